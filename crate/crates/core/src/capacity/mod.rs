//! Hop-count estimation and throughput bounds.
//!
//! A transmission goes from a source to one of its direct contacts, chosen
//! uniformly or with probability proportional to `d^-β`. Its hop count is the
//! L1 cell distance on the TDMA grid. The mean hop count `E[X]` sets the
//! throughput bound `W / (T² C1² r² n E[X])`.

mod exact;
mod fit;
mod montecarlo;
mod sweep;

pub use exact::{
    destination_share_spread, exact_destination_probabilities, exact_mean_hops_small, exact_source_mean_hops,
    ShareSpread,
};
pub use fit::{expected_slope, fit_log_log, fit_scaling, ScalingFit};
pub use montecarlo::{estimate_mean_hops, run_trials, ExperimentConfig, HopAccumulator, HopEstimate};
pub use sweep::{run_sweep, CapacityPoint, PointFailure, RuleFit, SweepResult, SweepSpec, CSV_HEADER, FIT_CSV_HEADER};

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{cell_of, hop_count, GridSpec, Point};
use crate::netgen::Node;
use crate::sympoly::log_sum;

/// Distances below this are clamped before raising to `-β`.
pub const MIN_DISTANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DestinationRule {
    /// Each contact with probability `1 / q`.
    Uniform,
    /// Contact `k` with probability `d_k^-β / Σ_j d_j^-β`.
    PowerLaw { beta: f64 },
}

impl DestinationRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PowerLaw { beta } if !(beta >= 0.0 && beta.is_finite()) => {
                Err(Error::InvalidConfig(format!("beta must be a finite value >= 0, got {beta}")))
            }
            _ => Ok(()),
        }
    }

    /// The uniform rule behaves as `β = 0`.
    pub fn beta(&self) -> f64 {
        match *self {
            Self::Uniform => 0.0,
            Self::PowerLaw { beta } => beta,
        }
    }

    /// Key used in seed derivation; distinct for every rule.
    pub fn stream_tag(&self) -> u64 {
        match *self {
            Self::Uniform => u64::MAX,
            Self::PowerLaw { beta } => beta.to_bits(),
        }
    }
}

/// How the distance in `d^-β` is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// True Euclidean node distance.
    #[default]
    Euclidean,
    /// Cell ring index times the cell side.
    RingApprox,
}

/// Whether trials reuse the network's realized contact sets or redraw the
/// source's contact set every trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ContactMode {
    #[default]
    Fixed,
    Resample,
}

/// `ln d^-β` for the pair, under the chosen distance mode.
pub fn ln_distance_weight(beta: f64, from: Point, to: Point, mode: DistanceMode, grid: &GridSpec) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    let d = match mode {
        DistanceMode::Euclidean => from.distance(to),
        DistanceMode::RingApprox => hop_count(cell_of(from, grid), cell_of(to, grid)) as f64 * grid.cell_side(),
    };
    -beta * d.max(MIN_DISTANCE).ln()
}

/// Destination law over `contacts` (node ids) of `source`.
pub fn destination_probabilities(
    source: &Node,
    contacts: &[usize],
    nodes: &[Node],
    rule: DestinationRule,
    mode: DistanceMode,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    if contacts.is_empty() {
        return Err(Error::NoDestination(source.id));
    }
    match rule {
        DestinationRule::Uniform => Ok(vec![1.0 / contacts.len() as f64; contacts.len()]),
        DestinationRule::PowerLaw { beta } => {
            let lw: Vec<f64> = contacts
                .iter()
                .map(|&c| ln_distance_weight(beta, source.position, nodes[c].position, mode, grid))
                .collect();
            Ok(normalize_ln(&lw))
        }
    }
}

pub(crate) fn normalize_ln(lw: &[f64]) -> Vec<f64> {
    let total = log_sum(lw);
    lw.iter().map(|l| (l - total).exp()).collect()
}

/// Draws a destination among `contacts` and returns its node id.
pub fn pick_destination<R: Rng + ?Sized>(
    source: &Node,
    contacts: &[usize],
    nodes: &[Node],
    rule: DestinationRule,
    mode: DistanceMode,
    grid: &GridSpec,
    rng: &mut R,
) -> Result<usize> {
    if contacts.is_empty() {
        return Err(Error::NoDestination(source.id));
    }
    if contacts.len() == 1 {
        return Ok(contacts[0]);
    }
    match rule {
        DestinationRule::Uniform | DestinationRule::PowerLaw { beta: 0.0 } => {
            Ok(contacts[rng.random_range(0..contacts.len())])
        }
        DestinationRule::PowerLaw { .. } => {
            let probs = destination_probabilities(source, contacts, nodes, rule, mode, grid)?;
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (p, &c) in probs.iter().zip(contacts) {
                acc += p;
                if u < acc {
                    return Ok(c);
                }
            }
            Ok(*contacts.last().expect("non-empty"))
        }
    }
}

/// `W / (T² C1² r² n E[X])`.
pub fn throughput_upper_bound(n: usize, e_hops: f64, grid: &GridSpec, bandwidth: f64) -> f64 {
    debug_assert!(e_hops >= 1.0);
    let t = grid.reuse as f64;
    bandwidth / (t * t * grid.c1 * grid.c1 * grid.r * grid.r * n as f64 * e_hops)
}

/// Order of the maximum per-node rate for destination bias `β`, up to a
/// constant: `1/√(n ln n)` for `β ≤ 2`, `1/√(n^(3-β) ln n^(β-1))` for
/// `2 < β ≤ 3`, `1/ln n` beyond.
pub fn theory_reference(n: usize, beta: f64) -> f64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    if beta <= 2.0 {
        1.0 / (nf * ln_n).sqrt()
    } else if beta <= 3.0 {
        1.0 / (nf.powf(3.0 - beta) * (beta - 1.0) * ln_n).sqrt()
    } else {
        1.0 / ln_n
    }
}
