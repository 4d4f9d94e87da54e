//! Exact mean hop count on a fixed node set, averaging over the contact-set
//! law instead of sampling it.
//!
//! For a source whose pool has product weights `x` and whose contact set has
//! size `s`, the probability that pool member `k` ends up as the destination is
//!
//! - uniform rule: `x_k σ^{k̄}_{s-1}(x) / (s σ_s(x))`;
//! - distance rule with weights `w = d^-β`, normalized inside the realized
//!   set: `E[1{k ∈ C} w_k / Σ_{j∈C} w_j]`. Writing `1/a = ∫₀^∞ e^{-ta} dt`
//!   turns this into
//!   `x_k w_k / σ_s(x) · ∫₀^∞ e^{-t w_k} σ^{k̄}_{s-1}(x ∘ e^{-t w}) dt`,
//!   evaluated by double-exponential (exp-sinh) quadrature with step halving.

use std::f64::consts::FRAC_PI_2;

use super::{ln_distance_weight, normalize_ln, DestinationRule, DistanceMode};
use crate::error::{Error, Result};
use crate::grid::{cell_of, hop_count, GridSpec};
use crate::netgen::{source_pool, ContactModel, SocialNetwork};
use crate::sympoly::{esp, esp_leave_one_out_all, inclusion_probabilities, EspBudget, WeightVector};

const QUAD_TOL: f64 = 1e-13;
const QUAD_H0: f64 = 0.25;
const QUAD_MAX_LEVEL: u32 = 8;

/// Probability that each pool member becomes the destination, given the pool
/// weights, a contact set of size `s`, and optional destination log-weights
/// (`None` for the uniform rule).
pub fn exact_destination_probabilities(pool: &WeightVector, dest_ln_weights: Option<&[f64]>, s: usize) -> Result<Vec<f64>> {
    let n = pool.len();
    if n == 0 {
        return Err(Error::EmptyWeights);
    }
    if s == 0 || s > pool.positive_count() {
        return Err(Error::InfeasibleSample { requested: s, available: pool.positive_count() });
    }
    let uniform = || -> Result<Vec<f64>> {
        Ok(inclusion_probabilities(pool, s)?.into_iter().map(|p| p / s as f64).collect())
    };
    let Some(lw) = dest_ln_weights else { return uniform() };
    if lw.len() != n {
        return Err(Error::IndexOutOfRange { index: lw.len(), len: n });
    }
    if let Some(index) = lw.iter().position(|l| !l.is_finite()) {
        return Err(Error::InvalidWeight { index, value: lw[index] });
    }
    let lmax = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lmin = lw.iter().copied().fold(f64::INFINITY, f64::min);
    if s == 1 || lmax == lmin {
        return uniform();
    }
    if s == n {
        return Ok(normalize_ln(lw));
    }
    distance_weighted(pool, lw, lmax, lmin, s)
}

fn distance_weighted(x: &WeightVector, lw: &[f64], lmax: f64, lmin: f64, s: usize) -> Result<Vec<f64>> {
    let n = x.len();
    let w: Vec<f64> = lw.iter().map(|l| (l - lmax).exp()).collect();
    let ln_sigma = esp(x, s)?.ln();
    // x_k w_k / σ_s, in logs
    let prefactor: Vec<f64> = (0..n).map(|k| x.ln_weight(k) + (lw[k] - lmax) - ln_sigma).collect();

    // below t = e^-40 the integrand is negligible; beyond t·w_min = e^5 every
    // term has decayed below e^-148
    let v_lo = -(40.0 / FRAC_PI_2).asinh();
    let v_hi = ((5.0 + (lmax - lmin)).min(700.0) / FRAC_PI_2).asinh();

    let mut shifted = vec![0.0; n];
    let mut node = |v: f64, acc: &mut [f64]| -> Result<()> {
        let t = (FRAC_PI_2 * v.sinh()).exp();
        let ln_jac = t.ln() + (FRAC_PI_2 * v.cosh()).ln();
        for j in 0..n {
            shifted[j] = x.ln_weight(j) - t * w[j];
        }
        let loo = esp_leave_one_out_all(&WeightVector::from_ln(shifted.clone())?, s - 1)?;
        for k in 0..n {
            acc[k] += (prefactor[k] - t * w[k] + loo[k].ln() + ln_jac).exp();
        }
        Ok(())
    };

    let mut h = QUAD_H0;
    let mut sums = vec![0.0; n];
    let first = (v_lo / h).ceil() as i64;
    let last = (v_hi / h).floor() as i64;
    for j in first..=last {
        node(j as f64 * h, &mut sums)?;
    }
    let mut estimate: Vec<f64> = sums.iter().map(|s| s * h).collect();
    for _ in 1..=QUAD_MAX_LEVEL {
        h /= 2.0;
        let first = (v_lo / h).ceil() as i64;
        let last = (v_hi / h).floor() as i64;
        for j in first..=last {
            if j.rem_euclid(2) == 1 {
                node(j as f64 * h, &mut sums)?;
            }
        }
        let next: Vec<f64> = sums.iter().map(|s| s * h).collect();
        let change = next.iter().zip(&estimate).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        estimate = next;
        if change < QUAD_TOL {
            break;
        }
    }
    Ok(estimate)
}

/// Exact `E[X]` for one source: the pool (with the allow-equal fallback) is
/// sampled to size `min(q, |pool|)`, then the destination is drawn by `rule`.
/// Returns `None` when the source has no eligible candidate.
pub fn exact_source_mean_hops(
    net: &SocialNetwork,
    model: &ContactModel,
    grid: &GridSpec,
    source: usize,
    rule: DestinationRule,
    distance: DistanceMode,
    budget: &EspBudget,
) -> Result<Option<f64>> {
    let src = &net.nodes[source];
    let pool = match source_pool(src, &net.nodes, model) {
        Ok(pool) => pool,
        Err(Error::EmptyPool(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let s = src.degree.min(pool.len());
    budget.check(pool.len(), s)?;
    let lw: Option<Vec<f64>> = match rule {
        DestinationRule::PowerLaw { beta } if beta != 0.0 => Some(
            pool.ids
                .iter()
                .map(|&u| ln_distance_weight(beta, src.position, net.nodes[u].position, distance, grid))
                .collect(),
        ),
        _ => None,
    };
    let probs = exact_destination_probabilities(&pool.weights, lw.as_deref(), s)?;
    let from = cell_of(src.position, grid);
    Ok(Some(
        probs
            .iter()
            .zip(&pool.ids)
            .map(|(p, &u)| p * hop_count(from, cell_of(net.nodes[u].position, grid)) as f64)
            .sum(),
    ))
}

/// Exact `E[X]` on the realized node set: sources uniform over nodes with a
/// non-empty pool, contact sets from the product-weight law, destinations by
/// `rule`.
pub fn exact_mean_hops_small(
    net: &SocialNetwork,
    model: &ContactModel,
    grid: &GridSpec,
    rule: DestinationRule,
    distance: DistanceMode,
    budget: &EspBudget,
) -> Result<f64> {
    rule.validate()?;
    let mut total = 0.0;
    let mut used = 0usize;
    for source in 0..net.len() {
        if let Some(e) = exact_source_mean_hops(net, model, grid, source, rule, distance, budget)? {
            total += e;
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::NoDestination(0));
    }
    Ok(total / used as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShareSpread {
    /// `N · P(v_t = v_k)` for every `k`, uniform destination rule.
    pub ratios: Vec<f64>,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

/// How far each candidate's destination share departs from `1/N` when a
/// `q`-subset is drawn with product weights and the destination is uniform
/// within it.
pub fn destination_share_spread(weights: &WeightVector, q: usize, budget: &EspBudget) -> Result<ShareSpread> {
    let n = weights.len();
    budget.check(n, q)?;
    let ratios: Vec<f64> = exact_destination_probabilities(weights, None, q)?.iter().map(|p| p * n as f64).collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    Ok(ShareSpread { median, min: sorted[0], max: sorted[n - 1], ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridParams, Point};
    use crate::netgen::{generate, NetworkConfig, Node};
    use proptest::prelude::*;

    /// Enumerates every `s`-subset of the pool with its product weight.
    fn brute_destination(x: &[f64], w: Option<&[f64]>, s: usize) -> Vec<f64> {
        fn walk(x: &[f64], w: Option<&[f64]>, s: usize, start: usize, set: &mut Vec<usize>, out: &mut [f64], total: &mut f64) {
            if set.len() == s {
                let weight: f64 = set.iter().map(|&i| x[i]).product();
                *total += weight;
                let denom: f64 = set.iter().map(|&i| w.map_or(1.0, |w| w[i])).sum();
                for &i in set.iter() {
                    out[i] += weight * w.map_or(1.0, |w| w[i]) / denom;
                }
                return;
            }
            for i in start..x.len() {
                set.push(i);
                walk(x, w, s, i + 1, set, out, total);
                set.pop();
            }
        }
        let mut out = vec![0.0; x.len()];
        let mut total = 0.0;
        walk(x, w, s, 0, &mut Vec::new(), &mut out, &mut total);
        out.iter().map(|v| v / total).collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * y.abs().max(1e-3), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn small_pools_match_enumeration() {
        let x = [1.0, 0.5, 0.25, 0.125, 0.3, 0.9];
        let w = [2.0, 1.0, 5.0, 0.1, 1e-3, 30.0];
        let lw: Vec<f64> = w.iter().map(|v: &f64| v.ln()).collect();
        let wv = WeightVector::new(x.to_vec()).unwrap();
        for s in 1..=6 {
            close(&exact_destination_probabilities(&wv, None, s).unwrap(), &brute_destination(&x, None, s), 1e-12);
            let p = exact_destination_probabilities(&wv, Some(&lw), s).unwrap();
            close(&p, &brute_destination(&x, Some(&w), s), 1e-9);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn wide_dynamic_range_matches_enumeration() {
        // distances from 1e-6 to 1 at beta = 4
        let x = [1.0, 1.0, 0.2, 0.2, 0.2, 0.05, 0.05, 0.01];
        let d = [1e-6, 0.9, 0.01, 0.5, 0.02, 1.0, 1e-3, 0.3];
        let w: Vec<f64> = d.iter().map(|v: &f64| v.powf(-4.0)).collect();
        let lw: Vec<f64> = d.iter().map(|v: &f64| -4.0 * v.ln()).collect();
        let wv = WeightVector::new(x.to_vec()).unwrap();
        for s in 2..=7 {
            close(&exact_destination_probabilities(&wv, Some(&lw), s).unwrap(), &brute_destination(&x, Some(&w), s), 1e-9);
        }
    }

    #[test]
    fn infeasible_sizes() {
        let wv = WeightVector::new(vec![1.0, 2.0]).unwrap();
        assert!(exact_destination_probabilities(&wv, None, 0).is_err());
        assert!(exact_destination_probabilities(&wv, None, 3).is_err());
        assert!(exact_destination_probabilities(&wv, Some(&[0.0]), 1).is_err());
    }

    #[test]
    fn two_nodes_forced_contact() {
        let config = NetworkConfig::new(2, 2.5, 2.6, 0).unwrap();
        let grid = GridSpec::new(3, &GridParams::default()).unwrap();
        let side = grid.cell_side();
        let nodes = vec![
            Node { id: 0, position: Point::new(0.5 * side, 0.5 * side), degree: 2 },
            Node { id: 1, position: Point::new(1.5 * side, 0.5 * side), degree: 1 },
        ];
        // node 1 has no smaller-degree candidate and no equal-degree peer
        let net = SocialNetwork {
            config,
            nodes,
            contacts: vec![vec![1], vec![]],
            truncated: vec![true, true],
            fallback: vec![false, false],
        };
        let model = ContactModel::new(2.6);
        for rule in [DestinationRule::Uniform, DestinationRule::PowerLaw { beta: 2.0 }] {
            let e = exact_mean_hops_small(&net, &model, &grid, rule, DistanceMode::Euclidean, &EspBudget::default()).unwrap();
            assert_eq!(e, 1.0);
        }
    }

    fn small_net(n: usize, seed: u64) -> SocialNetwork {
        generate(&NetworkConfig::new(n, 2.5, 2.6, seed).unwrap(), &ContactModel::new(2.6)).unwrap()
    }

    #[test]
    fn network_sources_match_subset_enumeration() {
        let net = small_net(50, 4);
        let grid = GridSpec::new(50, &GridParams::default()).unwrap();
        let model = ContactModel::new(2.6);
        let budget = EspBudget::default();
        let mut checked = 0;
        for src in &net.nodes {
            let Ok(pool) = source_pool(src, &net.nodes, &model) else { continue };
            let s = src.degree.min(pool.len());
            if s > 3 {
                continue;
            }
            let from = cell_of(src.position, &grid);
            let hops: Vec<f64> =
                pool.ids.iter().map(|&u| hop_count(from, cell_of(net.nodes[u].position, &grid)) as f64).collect();
            let x = pool.weights.weights().to_vec();
            for rule in [DestinationRule::Uniform, DestinationRule::PowerLaw { beta: 2.5 }] {
                let w: Option<Vec<f64>> = match rule {
                    DestinationRule::Uniform => None,
                    DestinationRule::PowerLaw { beta } => {
                        Some(pool.ids.iter().map(|&u| src.position.distance(net.nodes[u].position).powf(-beta)).collect())
                    }
                };
                let brute: f64 = brute_destination(&x, w.as_deref(), s).iter().zip(&hops).map(|(p, h)| p * h).sum();
                let exact = exact_source_mean_hops(&net, &model, &grid, src.id, rule, DistanceMode::Euclidean, &budget)
                    .unwrap()
                    .unwrap();
                assert!((exact - brute).abs() <= 1e-9 * brute, "source {}: {exact} vs {brute}", src.id);
            }
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn beta_zero_equals_uniform() {
        let net = small_net(120, 9);
        let grid = GridSpec::new(120, &GridParams::default()).unwrap();
        let model = ContactModel::new(2.6);
        let budget = EspBudget::default();
        let u = exact_mean_hops_small(&net, &model, &grid, DestinationRule::Uniform, DistanceMode::Euclidean, &budget).unwrap();
        let p = exact_mean_hops_small(&net, &model, &grid, DestinationRule::PowerLaw { beta: 0.0 }, DistanceMode::Euclidean, &budget)
            .unwrap();
        assert_eq!(u, p);
        assert!(u >= 1.0);
    }

    #[test]
    fn budget_is_enforced() {
        let net = small_net(60, 1);
        let grid = GridSpec::new(60, &GridParams::default()).unwrap();
        let r = exact_mean_hops_small(&net, &ContactModel::new(2.6), &grid, DestinationRule::Uniform, DistanceMode::Euclidean, &EspBudget::new(1));
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn share_spread_equal_weights() {
        let wv = WeightVector::new(vec![1.0; 40]).unwrap();
        let s = destination_share_spread(&wv, 7, &EspBudget::default()).unwrap();
        for r in &s.ratios {
            assert!((r - 1.0).abs() < 1e-12);
        }
        assert!((s.median - 1.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn probabilities_sum_to_one(
            x in prop::collection::vec(0.01f64..10.0, 2..12),
            d in prop::collection::vec(1e-4f64..1.5, 12),
            beta in 0.0f64..6.0,
            s_frac in 0.0f64..1.0,
        ) {
            let n = x.len();
            let s = 1 + ((n - 1) as f64 * s_frac) as usize;
            let lw: Vec<f64> = d[..n].iter().map(|v| -beta * v.ln()).collect();
            let wv = WeightVector::new(x).unwrap();
            let p = exact_destination_probabilities(&wv, Some(&lw), s).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(p.iter().all(|v| *v >= 0.0));
        }

        #[test]
        fn hops_non_increasing_in_beta(
            hops in prop::collection::vec(1usize..40, 2..10),
            b1 in 0.0f64..6.0,
            db in 0.0f64..3.0,
        ) {
            // destination law on a realized set with distances proportional to hops
            let mean = |beta: f64| -> f64 {
                let lw: Vec<f64> = hops.iter().map(|&h| -beta * (h as f64 * 0.01).ln()).collect();
                normalize_ln(&lw).iter().zip(&hops).map(|(p, &h)| p * h as f64).sum()
            };
            prop_assert!(mean(b1 + db) <= mean(b1) + 1e-12);
        }
    }
}
