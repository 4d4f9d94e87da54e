use rand::Rng;
use rayon::prelude::*;

use super::{pick_destination, ContactMode, DestinationRule, DistanceMode};
use crate::error::{Error, Result};
use crate::grid::{cell_of, hop_count, CellIndex, GridParams, GridSpec};
use crate::netgen::{build_contacts, ContactModel, ContactSampler, NetworkConfig, NetworkDraft, SocialNetwork, TieRule};
use crate::seed;

/// Trials per random substream.
pub const TRIAL_BLOCK: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// `n`, `γ`, `ε`. The seed field is ignored; replicate networks are
    /// seeded from `seed`.
    pub network: NetworkConfig,
    pub tie_rule: TieRule,
    pub grid: GridParams,
    pub rule: DestinationRule,
    pub distance: DistanceMode,
    pub contacts: ContactMode,
    /// Total trials, split evenly over replicates.
    pub trials: u64,
    pub replicates: usize,
    pub seed: u64,
    /// Keep `(source degree, hops)` for every completed trial.
    pub record_trials: bool,
}

impl ExperimentConfig {
    pub fn new(network: NetworkConfig, rule: DestinationRule, trials: u64, seed: u64) -> Self {
        Self {
            network,
            tie_rule: TieRule::StrictSmaller,
            grid: GridParams::default(),
            rule,
            distance: DistanceMode::Euclidean,
            contacts: ContactMode::Fixed,
            trials,
            replicates: 8,
            seed,
            record_trials: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.rule.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        Ok(())
    }

    pub fn contact_model(&self) -> ContactModel {
        ContactModel { epsilon: self.network.epsilon, tie_rule: self.tie_rule }
    }

    /// Network seed of replicate `rep`.
    pub fn network_seed(&self, rep: usize) -> u64 {
        seed::substream(self.seed, &[seed::NETWORK, self.network.n as u64, rep as u64])
    }
}

/// Exact integer running sums of hop counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HopAccumulator {
    pub count: u64,
    pub sum: u64,
    pub sum_sq: u64,
    /// Trials whose source had no contact.
    pub skipped: u64,
    pub records: Vec<(usize, usize)>,
}

impl HopAccumulator {
    pub fn push(&mut self, hops: usize) {
        self.count += 1;
        self.sum += hops as u64;
        self.sum_sq += (hops * hops) as u64;
    }

    pub fn merge(&mut self, other: HopAccumulator) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.skipped += other.skipped;
        self.records.extend(other.records);
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let c = self.count as u128;
        let s = self.sum as u128;
        let numer = c * self.sum_sq as u128 - s * s;
        (numer as f64 / (c * (c - 1)) as f64 / self.count as f64).sqrt()
    }

    pub fn estimate(self) -> Result<HopEstimate> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("no trial found a destination".into()));
        }
        Ok(HopEstimate {
            mean: self.mean(),
            stderr: self.stderr(),
            trials: self.count,
            truncated_count: self.skipped,
            records: self.records,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HopEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Completed trials.
    pub trials: u64,
    /// Trials skipped because the source had no destination.
    pub truncated_count: u64,
    /// `(source degree, hops)` per trial, when requested.
    pub records: Vec<(usize, usize)>,
}

/// Runs `trials` trials on one network. `sampler` is required for
/// [`ContactMode::Resample`].
#[allow(clippy::too_many_arguments)]
pub fn run_trials<R: Rng + ?Sized>(
    net: &SocialNetwork,
    cells: &[CellIndex],
    sampler: Option<&ContactSampler>,
    rule: DestinationRule,
    distance: DistanceMode,
    grid: &GridSpec,
    trials: u64,
    record: bool,
    rng: &mut R,
) -> Result<HopAccumulator> {
    let n = net.len();
    let mut acc = HopAccumulator::default();
    let mut redrawn;
    for _ in 0..trials {
        let s = rng.random_range(0..n);
        let contacts: &[usize] = match sampler {
            None => &net.contacts[s],
            Some(sampler) => {
                redrawn = sampler.draw(s, rng).contacts;
                &redrawn
            }
        };
        match pick_destination(&net.nodes[s], contacts, &net.nodes, rule, distance, grid, rng) {
            Ok(d) => {
                let hops = hop_count(cells[s], cells[d]);
                acc.push(hops);
                if record {
                    acc.records.push((net.nodes[s].degree, hops));
                }
            }
            Err(Error::NoDestination(_)) => acc.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(acc)
}

pub(crate) fn cells_of(net: &SocialNetwork, grid: &GridSpec) -> Vec<CellIndex> {
    net.nodes.iter().map(|v| cell_of(v.position, grid)).collect()
}

/// Trials assigned to replicate `rep` when `total` is split over `reps`.
pub(crate) fn replicate_share(total: u64, reps: usize, rep: usize) -> u64 {
    let reps = reps as u64;
    total / reps + u64::from((rep as u64) < total % reps)
}

/// Trials for one replicate network, in blocks with their own substreams.
#[allow(clippy::too_many_arguments)]
pub(crate) fn replicate_trials(
    net: &SocialNetwork,
    cells: &[CellIndex],
    sampler: Option<&ContactSampler>,
    rule: DestinationRule,
    distance: DistanceMode,
    grid: &GridSpec,
    trials: u64,
    record: bool,
    master: u64,
    rep: usize,
) -> Result<HopAccumulator> {
    let mut acc = HopAccumulator::default();
    let blocks = trials.div_ceil(TRIAL_BLOCK);
    for block in 0..blocks {
        let count = TRIAL_BLOCK.min(trials - block * TRIAL_BLOCK);
        let mut rng =
            seed::substream_rng(master, &[seed::TRIALS, net.len() as u64, rule.stream_tag(), rep as u64, block]);
        acc.merge(run_trials(net, cells, sampler, rule, distance, grid, count, record, &mut rng)?);
    }
    Ok(acc)
}

pub(crate) fn build_replicate(config: &NetworkConfig, model: &ContactModel) -> Result<SocialNetwork> {
    let mut rng = config.rng();
    let draft = NetworkDraft::generate(config, &mut rng)?;
    build_contacts(draft, model, &mut rng)
}

/// Monte Carlo `E[X]` over `replicates` independently generated networks.
///
/// Each trial draws a source uniformly, takes its contact set (fixed or
/// redrawn), picks a destination by the rule and records the hop count.
/// Replicates run in parallel; integer sums make the result independent of
/// scheduling.
pub fn estimate_mean_hops(config: &ExperimentConfig) -> Result<HopEstimate> {
    config.validate()?;
    let grid = GridSpec::new(config.network.n, &config.grid)?;
    let model = config.contact_model();
    let parts: Vec<Result<HopAccumulator>> = (0..config.replicates)
        .into_par_iter()
        .map(|rep| {
            let net_config = NetworkConfig { seed: config.network_seed(rep), ..config.network };
            let net = build_replicate(&net_config, &model)?;
            let cells = cells_of(&net, &grid);
            let sampler = match config.contacts {
                ContactMode::Fixed => None,
                ContactMode::Resample => Some(ContactSampler::new(&net.nodes, &model)?),
            };
            let trials = replicate_share(config.trials, config.replicates, rep);
            replicate_trials(
                &net,
                &cells,
                sampler.as_ref(),
                config.rule,
                config.distance,
                &grid,
                trials,
                config.record_trials,
                config.seed,
                rep,
            )
        })
        .collect();
    let mut total = HopAccumulator::default();
    for part in parts {
        total.merge(part?);
    }
    total.estimate()
}
