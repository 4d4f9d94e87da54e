use rand::Rng;

use super::log_sum;
use crate::error::{Error, Result};

/// Exact fixed-size product-weighted sampler for weights that come in groups
/// of equal value.
///
/// A group of `m` members sharing weight `w` contributes
/// `C(m, j) w^j` to every `σ` term in which exactly `j` of its members appear,
/// so the DP runs over groups instead of individual indices. A draw picks a
/// member count per group with the sequential conditioning rule, and the
/// members of each group are then a uniform `j`-subset. The resulting subset
/// law is identical to the per-index sampler on the expanded weight vector.
#[derive(Clone, Debug)]
pub struct GroupedSampler {
    q: usize,
    counts: Vec<usize>,
    ln_weights: Vec<f64>,
    // suffix[g * (q + 1) + r] = ln σ_r over groups g..
    suffix: Vec<f64>,
    // ln_binom[g][j] = ln C(counts[g], j), j <= min(q, counts[g])
    ln_binom: Vec<Vec<f64>>,
}

impl GroupedSampler {
    /// `groups` holds `(member count, ln weight)` pairs.
    pub fn new(groups: &[(usize, f64)], q: usize) -> Result<Self> {
        let available: usize =
            groups.iter().filter(|(_, lw)| *lw > f64::NEG_INFINITY).map(|(m, _)| *m).sum();
        if q == 0 || q > available {
            return Err(Error::InfeasibleSample { requested: q, available });
        }
        for (index, &(_, lw)) in groups.iter().enumerate() {
            if lw.is_nan() || lw == f64::INFINITY {
                return Err(Error::InvalidWeight { index, value: lw });
            }
        }
        let g_count = groups.len();
        let width = q + 1;
        let ln_binom: Vec<Vec<f64>> = groups
            .iter()
            .map(|&(m, lw)| {
                let top = if lw == f64::NEG_INFINITY { 0 } else { m.min(q) };
                let mut row = Vec::with_capacity(top + 1);
                row.push(0.0);
                for j in 1..=top {
                    let prev = row[j - 1];
                    row.push(prev + ((m - j + 1) as f64).ln() - (j as f64).ln());
                }
                row
            })
            .collect();

        let mut suffix = vec![f64::NEG_INFINITY; (g_count + 1) * width];
        suffix[g_count * width] = 0.0;
        let mut terms = Vec::with_capacity(width);
        for g in (0..g_count).rev() {
            let lw = groups[g].1;
            let binom = &ln_binom[g];
            for r in 0..=q {
                terms.clear();
                for (j, lb) in binom.iter().enumerate().take(r + 1) {
                    let rest = suffix[(g + 1) * width + r - j];
                    if rest > f64::NEG_INFINITY {
                        terms.push(lb + j as f64 * lw + rest);
                    }
                }
                suffix[g * width + r] = log_sum(&terms);
            }
        }
        Ok(Self {
            q,
            counts: groups.iter().map(|g| g.0).collect(),
            ln_weights: groups.iter().map(|g| g.1).collect(),
            suffix,
            ln_binom,
        })
    }

    pub fn set_size(&self) -> usize {
        self.q
    }

    /// `ln σ_q` over all groups.
    pub fn ln_total(&self) -> f64 {
        self.suffix[self.q]
    }

    /// Number of members drawn from each group; the counts sum to `q`.
    pub fn sample_counts<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let width = self.q + 1;
        let mut out = vec![0; self.counts.len()];
        let mut needed = self.q;
        for (g, slot) in out.iter_mut().enumerate() {
            if needed == 0 {
                break;
            }
            let denom = self.suffix[g * width + needed];
            let lw = self.ln_weights[g];
            let binom = &self.ln_binom[g];
            let mut u: f64 = rng.random();
            let mut chosen = 0;
            let top = needed.min(binom.len() - 1);
            for j in (0..=top).rev() {
                let rest = self.suffix[(g + 1) * width + needed - j];
                if rest == f64::NEG_INFINITY {
                    continue;
                }
                let p = (binom[j] + j as f64 * lw + rest - denom).exp();
                chosen = j;
                if u < p {
                    break;
                }
                u -= p;
            }
            *slot = chosen;
            needed -= chosen;
        }
        debug_assert_eq!(needed, 0);
        out
    }

    /// A full draw expressed as flat indices into the expanded vector where
    /// group `g` occupies a contiguous block of `counts[g]` positions.
    pub fn sample_flat<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let counts = self.sample_counts(rng);
        let mut out = Vec::with_capacity(self.q);
        let mut offset = 0;
        for (g, &j) in counts.iter().enumerate() {
            if j > 0 {
                let mut picked = rand::seq::index::sample(rng, self.counts[g], j).into_vec();
                picked.sort_unstable();
                out.extend(picked.into_iter().map(|i| offset + i));
            }
            offset += self.counts[g];
        }
        out
    }
}
