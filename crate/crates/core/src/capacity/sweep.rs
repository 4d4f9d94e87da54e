use rayon::prelude::*;

use super::montecarlo::{build_replicate, cells_of, replicate_share, replicate_trials};
use super::{
    expected_slope, fit_scaling, theory_reference, throughput_upper_bound, ContactMode, DestinationRule, DistanceMode,
    HopAccumulator, ScalingFit,
};
use crate::error::{Error, Result};
use crate::grid::{GridParams, GridSpec};
use crate::netgen::{format_real, ContactModel, ContactSampler, NetworkConfig, TieRule};
use crate::seed;

pub const CSV_HEADER: &str = "n,beta,gamma,epsilon,trials,mean_hops,stderr,lambda_max,theory_order,seed";
pub const FIT_CSV_HEADER: &str = "beta,slope,intercept,r_squared,expected_slope,points";

/// A grid of `(n, rule)` points, each estimated over `replicates` networks.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub ns: Vec<usize>,
    pub rules: Vec<DestinationRule>,
    pub gamma: f64,
    pub epsilon: f64,
    pub tie_rule: TieRule,
    pub grid: GridParams,
    pub distance: DistanceMode,
    pub contacts: ContactMode,
    /// Trials per point, split over replicates.
    pub trials: u64,
    pub replicates: usize,
    pub seed: u64,
    /// Channel bandwidth `W`.
    pub bandwidth: f64,
}

impl SweepSpec {
    pub fn new(ns: Vec<usize>, rules: Vec<DestinationRule>, trials: u64, seed: u64) -> Self {
        Self {
            ns,
            rules,
            gamma: 2.5,
            epsilon: 2.6,
            tie_rule: TieRule::StrictSmaller,
            grid: GridParams::default(),
            distance: DistanceMode::Euclidean,
            contacts: ContactMode::Fixed,
            trials,
            replicates: 8,
            seed,
            bandwidth: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.rules.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one n and one rule".into()));
        }
        for &n in &self.ns {
            NetworkConfig::new(n, self.gamma, self.epsilon, 0)?;
            GridSpec::new(n, &self.grid)?;
        }
        for rule in &self.rules {
            rule.validate()?;
        }
        if self.trials == 0 || self.replicates == 0 {
            return Err(Error::InvalidConfig("trials and replicates must be at least 1".into()));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::InvalidConfig(format!("bandwidth must be positive, got {}", self.bandwidth)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityPoint {
    pub n: usize,
    pub rule: DestinationRule,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub trials: u64,
    pub e_hops: f64,
    pub stderr: f64,
    pub truncated_count: u64,
    pub lambda_max: f64,
    pub theory_order: f64,
    pub seed: u64,
}

impl CapacityPoint {
    /// First-order standard error of `lambda_max`, which scales as `1 / E[X]`.
    pub fn lambda_stderr(&self) -> f64 {
        self.lambda_max * self.stderr / self.e_hops
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            format_real(self.beta),
            format_real(self.gamma),
            format_real(self.epsilon),
            self.trials,
            format_real(self.e_hops),
            format_real(self.stderr),
            format_real(self.lambda_max),
            format_real(self.theory_order),
            self.seed
        )
    }
}

/// Scaling fit of one rule's series against `1 / r(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleFit {
    pub rule: DestinationRule,
    pub expected_slope: f64,
    pub fit: Result<ScalingFit>,
}

impl RuleFit {
    pub fn csv_row(&self) -> Option<String> {
        let fit = self.fit.as_ref().ok()?;
        Some(format!(
            "{},{},{},{},{},{}",
            format_real(self.rule.beta()),
            format_real(fit.slope),
            format_real(fit.intercept),
            format_real(fit.r_squared),
            format_real(self.expected_slope),
            fit.points.len()
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointFailure {
    pub n: usize,
    pub replicate: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    /// Sorted by `n`, then by the order of `SweepSpec::rules`.
    pub points: Vec<CapacityPoint>,
    /// One per rule, in spec order.
    pub fits: Vec<RuleFit>,
    pub failures: Vec<PointFailure>,
}

impl SweepResult {
    pub fn point(&self, n: usize, rule: DestinationRule) -> Option<&CapacityPoint> {
        self.points.iter().find(|p| p.n == n && p.rule == rule)
    }

    pub fn fit(&self, rule: DestinationRule) -> Option<&RuleFit> {
        self.fits.iter().find(|f| f.rule == rule)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&p.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn fits_to_csv(&self) -> String {
        let mut out = String::from(FIT_CSV_HEADER);
        out.push('\n');
        for row in self.fits.iter().filter_map(RuleFit::csv_row) {
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

/// Runs every `(n, replicate)` network in parallel and every rule on each
/// network. A failed replicate is recorded and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let model = ContactModel { epsilon: spec.epsilon, tie_rule: spec.tie_rule };
    let units: Vec<(usize, usize)> =
        spec.ns.iter().flat_map(|&n| (0..spec.replicates).map(move |rep| (n, rep))).collect();

    let outcomes: Vec<Result<Vec<HopAccumulator>>> = units
        .par_iter()
        .map(|&(n, rep)| {
            let grid = GridSpec::new(n, &spec.grid)?;
            let config = NetworkConfig {
                n,
                gamma: spec.gamma,
                epsilon: spec.epsilon,
                seed: seed::substream(spec.seed, &[seed::NETWORK, n as u64, rep as u64]),
            };
            let net = build_replicate(&config, &model)?;
            let cells = cells_of(&net, &grid);
            let sampler = match spec.contacts {
                ContactMode::Fixed => None,
                ContactMode::Resample => Some(ContactSampler::new(&net.nodes, &model)?),
            };
            let trials = replicate_share(spec.trials, spec.replicates, rep);
            spec.rules
                .iter()
                .map(|&rule| {
                    replicate_trials(&net, &cells, sampler.as_ref(), rule, spec.distance, &grid, trials, false, spec.seed, rep)
                })
                .collect()
        })
        .collect();

    let mut failures = Vec::new();
    let mut merged: Vec<Vec<HopAccumulator>> = vec![vec![HopAccumulator::default(); spec.rules.len()]; spec.ns.len()];
    for (&(n, rep), outcome) in units.iter().zip(outcomes) {
        match outcome {
            Ok(accs) => {
                let slot = spec.ns.iter().position(|&m| m == n).expect("n from spec");
                for (into, acc) in merged[slot].iter_mut().zip(accs) {
                    into.merge(acc);
                }
            }
            Err(e) => failures.push(PointFailure { n, replicate: rep, message: e.to_string() }),
        }
    }

    let mut points = Vec::new();
    for (slot, &n) in spec.ns.iter().enumerate() {
        let grid = GridSpec::new(n, &spec.grid)?;
        for (acc, &rule) in merged[slot].iter().zip(&spec.rules) {
            if acc.count == 0 {
                continue;
            }
            let e_hops = acc.mean();
            points.push(CapacityPoint {
                n,
                rule,
                beta: rule.beta(),
                gamma: spec.gamma,
                epsilon: spec.epsilon,
                trials: acc.count,
                e_hops,
                stderr: acc.stderr(),
                truncated_count: acc.skipped,
                lambda_max: throughput_upper_bound(n, e_hops, &grid, spec.bandwidth),
                theory_order: theory_reference(n, rule.beta()),
                seed: spec.seed,
            });
        }
    }
    points.sort_by_key(|p| p.n);

    let fits = spec
        .rules
        .iter()
        .map(|&rule| {
            let series: Vec<(usize, f64)> = points.iter().filter(|p| p.rule == rule).map(|p| (p.n, p.e_hops)).collect();
            RuleFit { rule, expected_slope: expected_slope(rule.beta()), fit: fit_scaling(&series, spec.grid.range_const) }
        })
        .collect();
    Ok(SweepResult { points, fits, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        let mut spec = SweepSpec::new(
            vec![256, 512, 1024],
            vec![DestinationRule::Uniform, DestinationRule::PowerLaw { beta: 4.0 }],
            2_000,
            5,
        );
        spec.replicates = 2;
        spec
    }

    #[test]
    fn rows_and_fits() {
        let result = run_sweep(&small_spec()).unwrap();
        assert_eq!(result.points.len(), 6);
        assert_eq!(result.fits.len(), 2);
        assert!(result.failures.is_empty());
        let csv = result.to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert_eq!(result.fits_to_csv().lines().count(), 3);
        for p in &result.points {
            assert!(p.lambda_max > 0.0 && p.e_hops >= 1.0);
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let spec = small_spec();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run_sweep(&spec).unwrap());
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| run_sweep(&spec).unwrap());
        assert_eq!(one.to_csv(), four.to_csv());
        assert_eq!(one.fits_to_csv(), four.fits_to_csv());
    }

    #[test]
    fn csv_fields_parse_back() {
        let result = run_sweep(&small_spec()).unwrap();
        for (line, p) in result.to_csv().lines().skip(1).zip(&result.points) {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 10);
            assert_eq!(f[0].parse::<usize>().unwrap(), p.n);
            assert_eq!(f[5].parse::<f64>().unwrap(), p.e_hops);
            assert_eq!(f[7].parse::<f64>().unwrap(), p.lambda_max);
        }
    }

    #[test]
    fn invalid_spec() {
        let mut spec = small_spec();
        spec.gamma = 1.0;
        assert!(run_sweep(&spec).is_err());
        let mut spec = small_spec();
        spec.rules.clear();
        assert!(run_sweep(&spec).is_err());
    }
}
