use rand::Rng;

use super::{EspTable, WeightVector};
use crate::error::{Error, Result};

/// Exact sampler for `q`-subsets with `P(S) = ∏_{j∈S} w_j / σ_{q,N}(w)`.
///
/// Visits indices in order and includes index `j` with probability
/// `w_j σ_{r-1}(rest after j) / σ_r(rest from j)`, where `r` is the number of
/// members still needed. The suffix ESPs are precomputed once, so each draw
/// costs O(N).
#[derive(Clone, Debug)]
pub struct FixedSizeSampler {
    q: usize,
    ln_weights: Vec<f64>,
    // prefix table over the reversed weights: row m covers the last m weights
    suffix: EspTable,
}

impl FixedSizeSampler {
    pub fn new(w: &WeightVector, q: usize) -> Result<Self> {
        let available = w.positive_count();
        if q == 0 || q > available {
            return Err(Error::InfeasibleSample { requested: q, available });
        }
        let suffix = EspTable::build(&w.reversed(), q)?;
        Ok(Self { q, ln_weights: w.ln_weights().to_vec(), suffix })
    }

    pub fn set_size(&self) -> usize {
        self.q
    }

    /// Draws one subset; indices come back in increasing order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let n = self.ln_weights.len();
        let mut out = Vec::with_capacity(self.q);
        let mut needed = self.q;
        for (j, &lx) in self.ln_weights.iter().enumerate() {
            if needed == 0 {
                break;
            }
            if lx == f64::NEG_INFINITY {
                continue;
            }
            let remaining = n - j;
            let ln_p = lx + self.suffix.get(needed - 1, remaining - 1).ln() - self.suffix.get(needed, remaining).ln();
            if ln_p >= 0.0 || rng.random::<f64>() < ln_p.exp() {
                out.push(j);
                needed -= 1;
            }
        }
        debug_assert_eq!(out.len(), self.q);
        out
    }
}

/// One draw of a `q`-subset with probability proportional to the product of
/// member weights.
pub fn sample_fixed_size_subset<R: Rng + ?Sized>(w: &WeightVector, q: usize, rng: &mut R) -> Result<Vec<usize>> {
    Ok(FixedSizeSampler::new(w, q)?.sample(rng))
}
