use std::fmt;

/// A non-negative real number held by its natural logarithm.
///
/// Zero is represented by `ln = -inf`. Elementary symmetric polynomials of
/// power-law weights span hundreds of decades, so every quantity in this
/// module travels in this form and is only exponentiated for ratios.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    #[inline]
    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan());
        LogReal(ln)
    }

    /// Panics in debug builds on negative or NaN input.
    #[inline]
    pub fn from_value(value: f64) -> Self {
        debug_assert!(value >= 0.0);
        LogReal(value.ln())
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `self / other` as a plain number.
    #[inline]
    pub fn ratio(self, other: LogReal) -> f64 {
        (self.0 - other.0).exp()
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Mul for LogReal {
    type Output = LogReal;
    #[inline]
    fn mul(self, rhs: LogReal) -> LogReal {
        LogReal(self.0 + rhs.0)
    }
}

impl std::ops::Add for LogReal {
    type Output = LogReal;
    #[inline]
    fn add(self, rhs: LogReal) -> LogReal {
        LogReal(log_add(self.0, rhs.0))
    }
}

impl fmt::Debug for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogReal(exp({}))", self.0)
    }
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum exp(x_i))` over a slice, with a single max shift.
pub fn log_sum(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}
