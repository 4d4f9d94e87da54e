//! Elementary symmetric polynomials (ESPs) in the log domain.
//!
//! `σ_p(w)` is the sum over all `p`-subsets of the product of member weights.
//! Everything here is built on the prefix recurrence
//! `σ_{p,N'} = σ_{p,N'-1} + w_{N'} σ_{p-1,N'-1}`, evaluated with log-sum-exp so
//! that weights spanning many decades neither overflow nor underflow.
//!
//! The same machinery yields inclusion probabilities and exact samplers for
//! fixed-size subsets drawn with probability proportional to the product of
//! their weights.

mod grouped;
mod logreal;
mod sampler;

pub use grouped::GroupedSampler;
pub use logreal::{log_add, log_sum, LogReal};
pub use sampler::{sample_fixed_size_subset, FixedSizeSampler};

use crate::error::{Error, Result};

/// Upper bound on DP work (`N * p_max` cells) for a single table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EspBudget {
    pub max_cells: u64,
}

impl EspBudget {
    pub const DEFAULT_CELLS: u64 = 100_000_000;

    pub fn new(max_cells: u64) -> Self {
        Self { max_cells }
    }

    pub fn check(&self, n: usize, p_max: usize) -> Result<()> {
        let cost = n as u64 * p_max as u64;
        if cost > self.max_cells {
            return Err(Error::BudgetExceeded { cost, budget: self.max_cells });
        }
        Ok(())
    }
}

impl Default for EspBudget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_CELLS)
    }
}

/// Non-negative weights together with their logarithms.
///
/// Indices are stable: zero weights stay in the vector and are simply never
/// sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    ln_weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let ln_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(Self { weights, ln_weights })
    }

    /// Builds from logarithms directly; `-inf` encodes a zero weight.
    ///
    /// Use this when the weights themselves would underflow, e.g. `k^-ε` for
    /// large `k`, or exponentially tilted weights.
    pub fn from_ln(ln_weights: Vec<f64>) -> Result<Self> {
        if ln_weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        for (index, &value) in ln_weights.iter().enumerate() {
            if value.is_nan() || value == f64::INFINITY {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let weights = ln_weights.iter().map(|l| l.exp()).collect();
        Ok(Self { weights, ln_weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ln_weights(&self) -> &[f64] {
        &self.ln_weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn ln_weight(&self, i: usize) -> f64 {
        self.ln_weights[i]
    }

    /// Number of strictly positive weights (the sampler's support).
    pub fn positive_count(&self) -> usize {
        self.ln_weights.iter().filter(|l| **l > f64::NEG_INFINITY).count()
    }

    /// Every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidWeight { index: 0, value: c });
        }
        let lc = c.ln();
        Self::from_ln(self.ln_weights.iter().map(|l| l + lc).collect())
    }

    /// The vector with index `k` removed.
    pub fn without(&self, k: usize) -> Result<Self> {
        self.check_index(k)?;
        if self.len() == 1 {
            return Err(Error::EmptyWeights);
        }
        let ln = self
            .ln_weights
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, l)| *l)
            .collect();
        Self::from_ln(ln)
    }

    /// Same weights, reversed order.
    pub fn reversed(&self) -> Self {
        let mut weights = self.weights.clone();
        let mut ln_weights = self.ln_weights.clone();
        weights.reverse();
        ln_weights.reverse();
        Self { weights, ln_weights }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange { index: k, len: self.len() });
        }
        Ok(())
    }
}

/// Prefix table of `ln σ_{p,N'}` for `p = 0..=p_max`, `N' = 0..=N`.
#[derive(Clone, Debug)]
pub struct EspTable {
    n: usize,
    p_max: usize,
    ln: Vec<f64>,
}

impl EspTable {
    pub fn build(w: &WeightVector, p_max: usize) -> Result<Self> {
        Self::build_with_budget(w, p_max, &EspBudget::default())
    }

    pub fn build_with_budget(w: &WeightVector, p_max: usize, budget: &EspBudget) -> Result<Self> {
        let n = w.len();
        if p_max > n {
            return Err(Error::OrderOutOfRange { order: p_max, max: n });
        }
        budget.check(n, p_max)?;
        let width = p_max + 1;
        let mut ln = vec![f64::NEG_INFINITY; (n + 1) * width];
        ln[0] = 0.0;
        for prefix in 1..=n {
            let lx = w.ln_weight(prefix - 1);
            let (prev, cur) = ln.split_at_mut(prefix * width);
            let prev = &prev[(prefix - 1) * width..];
            let cur = &mut cur[..width];
            cur[0] = 0.0;
            for p in 1..=p_max.min(prefix) {
                cur[p] = log_add(prev[p], lx + prev[p - 1]);
            }
        }
        Ok(Self { n, p_max, ln })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }

    /// `σ_{p,prefix}`: the ESP of order `p` over the first `prefix` weights.
    #[inline]
    pub fn get(&self, p: usize, prefix: usize) -> LogReal {
        debug_assert!(p <= self.p_max && prefix <= self.n);
        LogReal::from_ln(self.ln[prefix * (self.p_max + 1) + p])
    }

    /// `σ_{p,N}` over the whole vector.
    pub fn total(&self, p: usize) -> LogReal {
        self.get(p, self.n)
    }

    pub(crate) fn row(&self, prefix: usize) -> &[f64] {
        let width = self.p_max + 1;
        &self.ln[prefix * width..(prefix + 1) * width]
    }
}

/// `σ_{0..=p_max, N}` with O(p_max) memory.
pub fn esp_all(w: &WeightVector, p_max: usize) -> Result<Vec<LogReal>> {
    Ok(esp_all_ln(w, p_max)?.into_iter().map(LogReal::from_ln).collect())
}

pub(crate) fn esp_all_ln(w: &WeightVector, p_max: usize) -> Result<Vec<f64>> {
    if p_max > w.len() {
        return Err(Error::OrderOutOfRange { order: p_max, max: w.len() });
    }
    EspBudget::default().check(w.len(), p_max)?;
    Ok(esp_row_unchecked(w.ln_weights(), p_max))
}

fn esp_row_unchecked(ln_weights: &[f64], p_max: usize) -> Vec<f64> {
    let mut row = vec![f64::NEG_INFINITY; p_max + 1];
    row[0] = 0.0;
    for (i, &lx) in ln_weights.iter().enumerate() {
        if lx == f64::NEG_INFINITY {
            continue;
        }
        // descending so row[p - 1] still holds the previous prefix
        for p in (1..=p_max.min(i + 1)).rev() {
            row[p] = log_add(row[p], lx + row[p - 1]);
        }
    }
    row
}

/// `σ_{p,N}(w)`. All-zero weights give zero for `p >= 1`, not an error.
pub fn esp(w: &WeightVector, p: usize) -> Result<LogReal> {
    Ok(esp_all(w, p)?[p])
}

/// Amplification of relative rounding error tolerated in the subtraction
/// form of the leave-one-out recurrence before a fresh DP is used instead.
/// 2^10 keeps results near 1e-12 relative accuracy.
pub const LEAVE_ONE_OUT_MAX_AMPLIFICATION: f64 = 1024.0;

/// `σ^{k̄}_{p,N-1}` for every `p = 0..=p_max`, i.e. the ESPs of `w` with index
/// `k` removed.
///
/// Unrolls `σ^{k̄}_p = σ_p - w_k σ^{k̄}_{p-1}` upward from `p = 0`, tracking how
/// much each subtraction amplifies rounding error; once that exceeds
/// [`LEAVE_ONE_OUT_MAX_AMPLIFICATION`] the remaining orders come from a DP
/// over the vector without `k`.
pub fn esp_leave_one_out_row(w: &WeightVector, k: usize, p_max: usize) -> Result<Vec<LogReal>> {
    w.check_index(k)?;
    let n = w.len();
    if p_max + 1 > n {
        return Err(Error::OrderOutOfRange { order: p_max, max: n - 1 });
    }
    let full = esp_all_ln(w, p_max)?;
    let lx = w.ln_weight(k);
    let mut out = vec![f64::NEG_INFINITY; p_max + 1];
    out[0] = 0.0;
    let mut amplification = 1.0f64;
    for p in 1..=p_max {
        let a = full[p];
        let b = lx + out[p - 1];
        if b == f64::NEG_INFINITY {
            out[p] = a;
            amplification = 1.0;
            continue;
        }
        let ratio = (b - a).exp();
        let next = if ratio < 1.0 { (1.0 + ratio * amplification) / (1.0 - ratio) } else { f64::INFINITY };
        if next > LEAVE_ONE_OUT_MAX_AMPLIFICATION {
            let rest = esp_row_unchecked(w.without(k)?.ln_weights(), p_max);
            out[p..].copy_from_slice(&rest[p..]);
            break;
        }
        out[p] = a + (-ratio).ln_1p();
        amplification = next;
    }
    Ok(out.into_iter().map(LogReal::from_ln).collect())
}

/// `σ^{k̄}_{p,N-1}(w)`: the ESP of order `p` over all weights except index `k`.
pub fn esp_leave_one_out(w: &WeightVector, k: usize, p: usize) -> Result<LogReal> {
    Ok(esp_leave_one_out_row(w, k, p)?[p])
}

/// `σ^{k̄}_{p,N-1}` for every `k` at a single order `p`.
///
/// Convolves a prefix table with a suffix table, so only additions of
/// non-negative terms are involved. Cost O(N p).
pub fn esp_leave_one_out_all(w: &WeightVector, p: usize) -> Result<Vec<LogReal>> {
    let n = w.len();
    if p + 1 > n {
        return Err(Error::OrderOutOfRange { order: p, max: n - 1 });
    }
    let prefix = EspTable::build(w, p)?;
    let suffix = EspTable::build(&w.reversed(), p)?;
    let mut terms = vec![0.0; p + 1];
    let out = (0..n)
        .map(|k| {
            // weights before k: prefix row k; after k: suffix row n-1-k
            let before = prefix.row(k);
            let after = suffix.row(n - 1 - k);
            for (j, t) in terms.iter_mut().enumerate() {
                *t = before[j] + after[p - j];
            }
            LogReal::from_ln(log_sum(&terms))
        })
        .collect();
    Ok(out)
}

/// `σ_1 σ_q / ((q + 1) σ_{q+1})`, which is `Θ(N / (N - q))` for bounded `q` and
/// exactly `N / (N - q)` when all weights are equal.
pub fn esp_order_ratio(w: &WeightVector, q: usize) -> Result<f64> {
    let n = w.len();
    if n < 2 {
        return Err(Error::DegenerateWeights("order ratio needs at least two weights"));
    }
    if q == 0 || q >= n {
        return Err(Error::OrderOutOfRange { order: q, max: n - 1 });
    }
    let s = esp_all(w, q + 1)?;
    if s[q + 1].is_zero() {
        return Err(Error::DegenerateWeights("sigma_{q+1} is zero"));
    }
    Ok((s[1].ln() + s[q].ln() - ((q + 1) as f64).ln() - s[q + 1].ln()).exp())
}

/// Probability that index `k` belongs to a `q`-subset drawn with probability
/// proportional to the product of its weights:
/// `w_k σ^{k̄}_{q-1,N-1} / σ_{q,N}`.
pub fn inclusion_probability(w: &WeightVector, q: usize, k: usize) -> Result<f64> {
    w.check_index(k)?;
    let n = w.len();
    if q == 0 || q > n {
        return Err(Error::OrderOutOfRange { order: q, max: n });
    }
    let total = esp(w, q)?;
    if total.is_zero() {
        return Err(Error::DegenerateWeights("sigma_q is zero"));
    }
    if q == n {
        return Ok(if w.ln_weight(k) == f64::NEG_INFINITY { 0.0 } else { 1.0 });
    }
    let loo = esp_leave_one_out(w, k, q - 1)?;
    Ok((w.ln_weight(k) + loo.ln() - total.ln()).exp().min(1.0))
}

/// [`inclusion_probability`] for every index at once (prefix/suffix route).
pub fn inclusion_probabilities(w: &WeightVector, q: usize) -> Result<Vec<f64>> {
    let n = w.len();
    if q == 0 || q > n {
        return Err(Error::OrderOutOfRange { order: q, max: n });
    }
    let total = esp(w, q)?;
    if total.is_zero() {
        return Err(Error::DegenerateWeights("sigma_q is zero"));
    }
    if q == n {
        return Ok(w.ln_weights().iter().map(|l| if *l == f64::NEG_INFINITY { 0.0 } else { 1.0 }).collect());
    }
    let loo = esp_leave_one_out_all(w, q - 1)?;
    Ok(loo
        .iter()
        .zip(w.ln_weights())
        .map(|(s, lx)| (lx + s.ln() - total.ln()).exp().min(1.0))
        .collect())
}
