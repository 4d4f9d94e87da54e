//! Acceptance checks with independent oracles. Each returns a
//! [`CriterionResult`] holding the measured and expected values.

use std::fmt;

use rand::Rng;

use crate::capacity::{
    exact_mean_hops_small, run_trials, destination_share_spread, DestinationRule, DistanceMode, SweepResult,
    SweepSpec,
};
use crate::error::Result;
use crate::fractal::{box_cover, box_cover_series, estimate_exponents, CoverOptions, Graph};
use crate::grid::{cell_of, tdma_schedule, protocol_model_ok, CellIndex, GridParams, GridSpec};
use crate::netgen::{generate, ContactModel, ContactSampler, DegreeLaw, NetworkConfig};
use crate::seed;
use crate::sympoly::{
    esp_all, esp_leave_one_out_all, esp_leave_one_out_row, esp_order_ratio, EspBudget, FixedSizeSampler,
    WeightVector,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: measured {}; expected {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.expected
        )
    }
}

fn result(id: u32, name: &'static str, passed: bool, measured: String, expected: &str) -> CriterionResult {
    CriterionResult { id, name, passed, measured, expected: expected.to_string() }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn random_weights<R: Rng>(rng: &mut R, n: usize, decades: f64) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.random_range(-decades..decades))).collect()
}

/// Sums of products over every subset, by subset size. `skip` removes one
/// index from consideration.
fn subset_sums(x: &[f64], skip: Option<usize>) -> Vec<f64> {
    let n = x.len();
    let mut prod = vec![1.0; 1 << n];
    let mut out = vec![0.0; n + 1];
    for mask in 0usize..(1 << n) {
        if mask != 0 {
            let low = mask.trailing_zeros() as usize;
            prod[mask] = prod[mask & (mask - 1)] * x[low];
        }
        if skip.is_some_and(|k| mask >> k & 1 == 1) {
            continue;
        }
        out[mask.count_ones() as usize] += prod[mask];
    }
    out
}

/// DP values of `σ_p` and `σ^{k̄}_p` against subset enumeration on random
/// vectors with `N ≤ 20`.
pub fn check_esp_exactness(master: u64) -> Result<CriterionResult> {
    let mut rng = seed::substream_rng(master, &[seed::CHECK, 1]);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=20);
        let x = random_weights(&mut rng, n, 3.0);
        let w = WeightVector::new(x.clone())?;
        let dp = esp_all(&w, n)?;
        for (p, brute) in subset_sums(&x, None).iter().enumerate() {
            worst = worst.max(rel_err(dp[p].value(), *brute));
        }
        if n >= 2 {
            for _ in 0..3 {
                let k = rng.random_range(0..n);
                let row = esp_leave_one_out_row(&w, k, n - 1)?;
                for (p, brute) in subset_sums(&x, Some(k)).iter().take(n).enumerate() {
                    worst = worst.max(rel_err(row[p].value(), *brute));
                }
            }
        }
    }
    Ok(result(1, "ESP exactness vs subset enumeration", worst <= 1e-9, format!("max rel err {worst:.3e}"), "<= 1e-9"))
}

/// Sandwich bounds on `σ^{k̄}_{q-1}` and the leave-one-out identity on random
/// vectors with `N ≤ 64`.
pub fn check_sandwich_identity(master: u64) -> Result<CriterionResult> {
    let mut rng = seed::substream_rng(master, &[seed::CHECK, 2]);
    let tol = 1e-9;
    let mut worst: f64 = 0.0;
    let mut sandwich_breaks = 0usize;
    for _ in 0..1000 {
        let n = rng.random_range(2..=64);
        let w = WeightVector::new(random_weights(&mut rng, n, 2.0))?;
        let s = esp_all(&w, n)?;
        let q = rng.random_range(2..=n);
        for k in 0..n {
            let x = w.weight(k);
            let loo = esp_leave_one_out_row(&w, k, n - 1)?;
            let upper = s[q - 1].value();
            let lower = upper - x * s[q - 2].value();
            let mid = loo[q - 1].value();
            if mid > upper * (1.0 + tol) || mid < lower - tol * upper {
                sandwich_breaks += 1;
            }
        }
        // identity through the independent prefix/suffix route
        let p = rng.random_range(1..n);
        let a = esp_leave_one_out_all(&w, p)?;
        let b = esp_leave_one_out_all(&w, p - 1)?;
        for k in 0..n {
            worst = worst.max(rel_err(a[k].value() + w.weight(k) * b[k].value(), s[p].value()));
        }
    }
    Ok(result(
        2,
        "sandwich bounds and leave-one-out identity",
        sandwich_breaks == 0 && worst <= tol,
        format!("{sandwich_breaks} sandwich violations, identity max rel err {worst:.3e}"),
        "0 violations, <= 1e-9",
    ))
}

/// Order ratio on equal weights equals `N / (N - q)`.
pub fn check_order_ratio_collapse() -> Result<CriterionResult> {
    let mut worst: f64 = 0.0;
    for n in [2usize, 10, 100] {
        let w = WeightVector::new(vec![1.0; n])?;
        for q in 1..=(n - 1).min(20) {
            worst = worst.max(rel_err(esp_order_ratio(&w, q)?, n as f64 / (n - q) as f64));
        }
    }
    Ok(result(3, "equal-weight order ratio collapse", worst <= 1e-12, format!("max rel err {worst:.3e}"), "<= 1e-12"))
}

/// Set frequencies of the sampler on `(1, 1/2, 1/4)`, `q = 2`.
pub fn check_sampler_frequencies(master: u64) -> Result<CriterionResult> {
    let sampler = FixedSizeSampler::new(&WeightVector::new(vec![1.0, 0.5, 0.25])?, 2)?;
    let mut rng = seed::substream_rng(master, &[seed::CHECK, 4]);
    let draws = 1_000_000u32;
    let mut counts = [0u32; 3];
    for _ in 0..draws {
        match sampler.sample(&mut rng).as_slice() {
            [0, 1] => counts[0] += 1,
            [0, 2] => counts[1] += 1,
            [1, 2] => counts[2] += 1,
            other => unreachable!("unexpected set {other:?}"),
        }
    }
    let expected = [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
    let z: Vec<f64> = counts
        .iter()
        .zip(expected)
        .map(|(&c, p)| (c as f64 / draws as f64 - p).abs() / (p * (1.0 - p) / draws as f64).sqrt())
        .collect();
    let worst = z.iter().copied().fold(0.0, f64::max);
    Ok(result(
        4,
        "sampler set frequencies",
        worst <= 4.0,
        format!("frequencies {:?}, max |z| {worst:.2}", counts.map(|c| c as f64 / draws as f64)),
        "(4/7, 2/7, 1/7) within 4 standard errors",
    ))
}

/// Per-rule counts of oracle agreement cells.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleCell {
    pub n: usize,
    pub seed: u64,
    pub rule: DestinationRule,
    pub monte_carlo: f64,
    pub stderr: f64,
    pub exact: f64,
}

impl OracleCell {
    pub fn agrees(&self) -> bool {
        (self.monte_carlo - self.exact).abs() <= 3.0 * self.stderr
    }
}

pub const ORACLE_NS: [usize; 3] = [50, 100, 200];
pub const ORACLE_RULES: [DestinationRule; 2] = [DestinationRule::Uniform, DestinationRule::PowerLaw { beta: 2.5 }];

/// Monte Carlo with redrawn contact sets against the exact oracle on the same
/// node set.
pub fn oracle_cells(master: u64, trials: u64) -> Result<Vec<OracleCell>> {
    let model = ContactModel::new(2.6);
    let budget = EspBudget::default();
    let mut cells = Vec::new();
    for n in ORACLE_NS {
        let grid = GridSpec::new(n, &GridParams::default())?;
        for rep in 0..5u64 {
            let net_seed = seed::substream(master, &[seed::CHECK, 5, n as u64, rep]);
            let net = generate(&NetworkConfig::new(n, 2.5, 2.6, net_seed)?, &model)?;
            let sampler = ContactSampler::new(&net.nodes, &model)?;
            let node_cells: Vec<CellIndex> = net.nodes.iter().map(|v| cell_of(v.position, &grid)).collect();
            for rule in ORACLE_RULES {
                let exact = exact_mean_hops_small(&net, &model, &grid, rule, DistanceMode::Euclidean, &budget)?;
                let mut rng = seed::substream_rng(master, &[seed::CHECK, 5, n as u64, rep, rule.stream_tag()]);
                let acc = run_trials(&net, &node_cells, Some(&sampler), rule, DistanceMode::Euclidean, &grid, trials, false, &mut rng)?;
                cells.push(OracleCell { n, seed: net_seed, rule, monte_carlo: acc.mean(), stderr: acc.stderr(), exact });
            }
        }
    }
    Ok(cells)
}

pub fn check_oracle_agreement(master: u64) -> Result<CriterionResult> {
    let cells = oracle_cells(master, 20_000)?;
    let per_rule: Vec<usize> =
        ORACLE_RULES.iter().map(|r| cells.iter().filter(|c| c.rule == *r && c.agrees()).count()).collect();
    Ok(result(
        5,
        "Monte Carlo vs exact mean hops",
        per_rule.iter().all(|&k| k >= 14),
        format!("uniform {}/15, power-law(2.5) {}/15", per_rule[0], per_rule[1]),
        ">= 14/15 per rule within 3 stderr",
    ))
}

/// Sweep protocol for the slope and ordering checks.
pub fn acceptance_sweep_spec(master: u64) -> SweepSpec {
    let ns = (10..=15).map(|e| 1usize << e).collect();
    let rules = vec![
        DestinationRule::Uniform,
        DestinationRule::PowerLaw { beta: 0.0 },
        DestinationRule::PowerLaw { beta: 1.0 },
        DestinationRule::PowerLaw { beta: 2.5 },
        DestinationRule::PowerLaw { beta: 4.0 },
    ];
    let mut spec = SweepSpec::new(ns, rules, 200_000, master);
    spec.replicates = 8;
    spec
}

fn slope_of(sweep: &SweepResult, rule: DestinationRule) -> f64 {
    sweep.fit(rule).and_then(|f| f.fit.as_ref().ok()).map_or(f64::NAN, |f| f.slope)
}

pub fn check_uniform_slope(sweep: &SweepResult) -> CriterionResult {
    let s = slope_of(sweep, DestinationRule::Uniform);
    result(6, "uniform-rule hop slope", (s - 1.0).abs() <= 0.15, format!("slope {s:.4}"), "1.0 +- 0.15")
}

pub fn check_branch_slopes(sweep: &SweepResult) -> CriterionResult {
    let targets = [(1.0, 1.0), (2.5, 0.5), (4.0, 0.0)];
    let slopes: Vec<f64> = targets.iter().map(|&(b, _)| slope_of(sweep, DestinationRule::PowerLaw { beta: b })).collect();
    let passed = targets.iter().zip(&slopes).all(|(&(_, want), s)| (s - want).abs() <= 0.15);
    result(
        7,
        "power-law branch hop slopes",
        passed,
        format!("beta=1: {:.4}, beta=2.5: {:.4}, beta=4: {:.4}", slopes[0], slopes[1], slopes[2]),
        "1.0, 0.5, 0.0 each +- 0.15",
    )
}

pub fn check_beta_ordering(sweep: &SweepResult) -> CriterionResult {
    let n = 1usize << 15;
    let get = |b: f64| sweep.point(n, DestinationRule::PowerLaw { beta: b });
    let (Some(p4), Some(p25), Some(p0)) = (get(4.0), get(2.5), get(0.0)) else {
        return result(8, "throughput ordering in beta", false, "missing sweep points".into(), "three points at n=2^15");
    };
    let gap = |a: &crate::capacity::CapacityPoint, b: &crate::capacity::CapacityPoint| {
        (a.lambda_max - b.lambda_max) / (a.lambda_stderr().powi(2) + b.lambda_stderr().powi(2)).sqrt()
    };
    let (g1, g2) = (gap(p4, p25), gap(p25, p0));
    result(
        8,
        "throughput ordering in beta",
        g1 >= 3.0 && g2 >= 3.0,
        format!(
            "lambda(4)={:.6e}, lambda(2.5)={:.6e}, lambda(0)={:.6e}; gaps {g1:.2}, {g2:.2} combined stderr",
            p4.lambda_max, p25.lambda_max, p0.lambda_max
        ),
        "lambda(4) > lambda(2.5) > lambda(0), each gap >= 3 combined stderr",
    )
}

/// Grid sizes, interference margins and cell scales for the schedule check.
#[derive(Clone, Debug, PartialEq)]
pub struct TdmaCheck {
    pub max_side: usize,
    pub deltas: Vec<f64>,
    pub c1s: Vec<f64>,
    /// Overrides the reuse factor (fault injection); `None` uses the minimum.
    pub reuse: Option<u32>,
}

impl Default for TdmaCheck {
    fn default() -> Self {
        Self { max_side: 30, deltas: vec![0.5, 1.0, 2.0], c1s: vec![1.0, 0.5], reuse: None }
    }
}

/// `(link pairs checked, violations)`. Every transmitter sits at its cell
/// center and sends to the center of a 4-neighbor cell; every unordered pair
/// of same-slot cells and every pair of directions is tested.
pub fn tdma_violations(check: &TdmaCheck) -> Result<(u64, u64)> {
    const DIRS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    let mut checked = 0u64;
    let mut violations = 0u64;
    for &delta in &check.deltas {
        for &c1 in &check.c1s {
            let params = GridParams { c1, range_const: 1.0, delta, reuse: check.reuse };
            for m in 1..=check.max_side {
                let r = 1.0 / (c1 * m as f64);
                let spec = GridSpec::with_range_unchecked(m * m, r, &params)?;
                debug_assert_eq!(spec.cells_per_side, m);
                let schedule = tdma_schedule(&spec);
                let links = |c: CellIndex| -> Vec<_> {
                    DIRS.iter()
                        .filter_map(|&(di, dj)| {
                            let i = c.i.checked_add_signed(di)?;
                            let j = c.j.checked_add_signed(dj)?;
                            let to = CellIndex::new(i, j);
                            spec.contains(to).then(|| (spec.cell_center(c), spec.cell_center(to)))
                        })
                        .collect()
                };
                for slot in 0..schedule.slot_count() {
                    let cells = schedule.cells_in_slot(slot);
                    let all: Vec<Vec<_>> = cells.iter().map(|&c| links(c)).collect();
                    for a in 0..cells.len() {
                        for b in a + 1..cells.len() {
                            for la in &all[a] {
                                for lb in &all[b] {
                                    checked += 1;
                                    if !protocol_model_ok(&[*la, *lb], &spec) {
                                        violations += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((checked, violations))
}

pub fn check_tdma_soundness(check: &TdmaCheck) -> Result<CriterionResult> {
    let (checked, violations) = tdma_violations(check)?;
    Ok(result(
        9,
        "TDMA same-slot protocol soundness",
        violations == 0 && checked > 0,
        format!("{violations} violations in {checked} link pairs"),
        "0 violations",
    ))
}

pub fn check_box_covering(master: u64) -> Result<CriterionResult> {
    let mut invalid = 0usize;
    let mut coverings = 0usize;
    let opts = CoverOptions { orderings: 4, seed: master, per_component: true };
    let model = ContactModel::new(2.6);
    for (i, n) in [200usize, 800, 2000].into_iter().enumerate() {
        let net = generate(&NetworkConfig::new(n, 2.5, 2.6, seed::substream(master, &[seed::CHECK, 10, i as u64]))?, &model)?;
        let g = Graph::from_network(&net);
        for c in box_cover_series(&g, &[1, 2, 3, 4, 6], &opts)? {
            coverings += 1;
            invalid += usize::from(!c.is_valid(&g));
        }
    }
    let mut rng = seed::substream_rng(master, &[seed::CHECK, 10, 99]);
    for _ in 0..20 {
        let n = rng.random_range(2..300);
        let edges: Vec<(usize, usize)> = (0..2 * n).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
        let g = Graph::from_edges(n, &edges)?;
        for c in box_cover_series(&g, &[1, 2, 3], &opts)? {
            coverings += 1;
            invalid += usize::from(!c.is_valid(&g));
        }
    }
    let path = estimate_exponents(&Graph::path(10_000), &[1, 2, 3, 4], &CoverOptions::default())?;
    let d_b = path.d_b.exponent;
    let star = box_cover(&Graph::star(50), 2, &CoverOptions::default())?.n_boxes();
    let complete = box_cover(&Graph::complete(40), 1, &CoverOptions::default())?.n_boxes();
    Ok(result(
        10,
        "box covering validity and path exponent",
        invalid == 0 && (0.8..=1.2).contains(&d_b) && star == 1 && complete == 1,
        format!("{invalid}/{coverings} invalid coverings, path d_B {d_b:.4}, star {star} box, complete {complete} box"),
        "0 invalid, d_B in [0.8, 1.2], single boxes",
    ))
}

pub fn check_share_spread(master: u64) -> Result<CriterionResult> {
    let mut rng = seed::substream_rng(master, &[seed::CHECK, 11]);
    let law = DegreeLaw::new(500, 2.5);
    let weights: Vec<f64> = (0..500).map(|_| (law.sample(&mut rng) as f64).powf(-2.6)).collect();
    let w = WeightVector::new(weights)?;
    let budget = EspBudget::default();
    let large = destination_share_spread(&w, 64, &budget)?;
    let small = destination_share_spread(&w, 2, &budget)?;
    let outside = small.ratios.iter().any(|r| !(0.9..=1.1).contains(r));
    Ok(result(
        11,
        "destination share spread",
        (0.5..=2.0).contains(&large.median) && outside,
        format!(
            "q=64 median {:.4} (range {:.3}..{:.3}); q=2 range {:.3}..{:.3}",
            large.median, large.min, large.max, small.min, small.max
        ),
        "q=64 median in [0.5, 2]; q=2 some ratio outside [0.9, 1.1]",
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Skip the Monte Carlo criteria (5 to 8).
    pub quick: bool,
    pub tdma: TdmaCheck,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, quick: false, tdma: TdmaCheck::default() }
    }
}

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Runs every criterion in order. Errors inside a check become failures.
pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionResult> {
    let s = opts.seed;
    let wrap = |id: u32, name: &'static str, r: Result<CriterionResult>| {
        r.unwrap_or_else(|e| result(id, name, false, format!("error: {e}"), "check completes"))
    };
    let mut out = vec![
        wrap(1, "ESP exactness vs subset enumeration", check_esp_exactness(s)),
        wrap(2, "sandwich bounds and leave-one-out identity", check_sandwich_identity(s)),
        wrap(3, "equal-weight order ratio collapse", check_order_ratio_collapse()),
        wrap(4, "sampler set frequencies", check_sampler_frequencies(s)),
    ];
    if !opts.quick {
        out.push(wrap(5, "Monte Carlo vs exact mean hops", check_oracle_agreement(s)));
        match crate::capacity::run_sweep(&acceptance_sweep_spec(s)) {
            Ok(sweep) => {
                out.push(check_uniform_slope(&sweep));
                out.push(check_branch_slopes(&sweep));
                out.push(check_beta_ordering(&sweep));
            }
            Err(e) => {
                for (id, name) in [(6, "uniform-rule hop slope"), (7, "power-law branch hop slopes"), (8, "throughput ordering in beta")] {
                    out.push(result(id, name, false, format!("sweep error: {e}"), "sweep completes"));
                }
            }
        }
    }
    out.push(wrap(9, "TDMA same-slot protocol soundness", check_tdma_soundness(&opts.tdma)));
    out.push(wrap(10, "box covering validity and path exponent", check_box_covering(s)));
    out.push(wrap(11, "destination share spread", check_share_spread(s)));
    out
}

/// One line per criterion.
pub fn report(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} passed, {} failed\n", results.len() - failed, failed));
    out
}
