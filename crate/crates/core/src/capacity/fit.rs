use crate::error::{Error, Result};
use crate::grid::transmission_range;

/// Least-squares line through `(ln x, ln y)` points.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(ln predictor, ln response)`.
    pub points: Vec<(f64, f64)>,
    /// The response has zero variance; slope is 0 and `r_squared` is 1.
    pub degenerate: bool,
}

impl ScalingFit {
    /// Fits already-logged points.
    pub fn from_log_points(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InsufficientPoints { needed: 3, got: points.len() });
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::DegenerateFit);
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
        if sxx <= f64::EPSILON * mx.abs().max(1.0) {
            return Err(Error::DegenerateFit);
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let degenerate = syy <= 1e-24 * my.abs().max(1.0);
        let r_squared = if degenerate { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
        Ok(Self { slope: if degenerate { 0.0 } else { slope }, intercept, r_squared, points, degenerate })
    }
}

/// Fits `ln y` against `ln x` for positive raw values.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<ScalingFit> {
    ScalingFit::from_log_points(xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect())
}

/// Slope of `ln E[X]` against `ln(1 / r(n))` over `(n, mean hops)` points.
pub fn fit_scaling(points: &[(usize, f64)], range_const: f64) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: points.len() });
    }
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() != points.len() {
        return Err(Error::InvalidConfig("scaling fit needs distinct n values".into()));
    }
    let logged = points
        .iter()
        .map(|&(n, hops)| Ok(((1.0 / transmission_range(n, range_const)?).ln(), hops.ln())))
        .collect::<Result<Vec<_>>>()?;
    ScalingFit::from_log_points(logged)
}

/// Hop-count growth exponent in `1 / r(n)` for destination bias `β`:
/// 1 up to β = 2, `3 - β` on (2, 3], 0 beyond.
pub fn expected_slope(beta: f64) -> f64 {
    if beta <= 2.0 {
        1.0
    } else if beta <= 3.0 {
        3.0 - beta
    } else {
        0.0
    }
}
