//! Network generation: uniform placement in the unit square, i.i.d.
//! power-law degrees, and contact sets drawn from the joint degree law
//! `P(k1, k2) ∝ k1^-(γ-1) k2^-ε` (`k1 > k2`).
//!
//! For a source of degree `q` the law reduces to drawing a `q`-subset of the
//! eligible pool with probability proportional to `∏ k_u^-ε`; the factor in
//! `k1` and the normalizer are common to every candidate set and cancel.

mod format;

pub use format::format_real;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Point;
use crate::sympoly::{EspBudget, GroupedSampler, WeightVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkConfig {
    pub n: usize,
    /// Degree exponent γ.
    pub gamma: f64,
    /// Correlation exponent ε.
    pub epsilon: f64,
    pub seed: u64,
}

impl NetworkConfig {
    pub fn new(n: usize, gamma: f64, epsilon: f64, seed: u64) -> Result<Self> {
        let config = Self { n, gamma, epsilon, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma = {} violates gamma > 1 (the degree exponent of a fractal network exceeds 1)",
                self.gamma
            )));
        }
        if !(self.epsilon > 2.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon = {} violates epsilon > 2 (the correlation exponent of a fractal network exceeds 2)",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Which candidates a source of degree `q` may select.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Only nodes of strictly smaller degree.
    #[default]
    StrictSmaller,
    /// Nodes of smaller or equal degree.
    AllowEqual,
}

/// Contact-selection law: subset weight `∏ k_u^-ε` over the pool fixed by the
/// tie rule. The normalizer of the joint degree law cancels in every
/// conditional quantity and is not represented.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactModel {
    pub epsilon: f64,
    pub tie_rule: TieRule,
}

impl ContactModel {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon, tie_rule: TieRule::StrictSmaller }
    }

    fn eligible(&self, source_degree: usize, candidate_degree: usize) -> bool {
        match self.tie_rule {
            TieRule::StrictSmaller => candidate_degree < source_degree,
            TieRule::AllowEqual => candidate_degree <= source_degree,
        }
    }

    fn ln_weight(&self, degree: usize) -> f64 {
        -self.epsilon * (degree as f64).ln()
    }

    fn with_rule(self, tie_rule: TieRule) -> Self {
        Self { tie_rule, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub id: usize,
    pub position: Point,
    pub degree: usize,
}

/// Truncated zeta law `P(k) = k^-γ / Σ_{b=1}^{n} b^-γ` on `{1, …, n}`.
#[derive(Clone, Debug)]
pub struct DegreeLaw {
    cdf: Vec<f64>,
    normalizer: f64,
}

impl DegreeLaw {
    pub fn new(n: usize, gamma: f64) -> Self {
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += (k as f64).powf(-gamma);
            cdf.push(acc);
        }
        let normalizer = acc;
        for c in &mut cdf {
            *c /= normalizer;
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Self { cdf, normalizer }
    }

    pub fn max_degree(&self) -> usize {
        self.cdf.len()
    }

    /// `Σ_{b=1}^{n} b^-γ`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn pmf(&self, k: usize) -> f64 {
        match k {
            0 => 0.0,
            1 => self.cdf[0],
            _ if k > self.cdf.len() => 0.0,
            _ => self.cdf[k - 1] - self.cdf[k - 2],
        }
    }

    /// `P(k <= degree)`.
    pub fn cdf(&self, degree: usize) -> f64 {
        match degree {
            0 => 0.0,
            _ => self.cdf[degree.min(self.cdf.len()) - 1],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) + 1
    }
}

pub fn place_nodes<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Vec<Point> {
    (0..config.n).map(|_| Point::new(rng.random(), rng.random())).collect()
}

pub fn sample_degrees<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Vec<usize> {
    let law = DegreeLaw::new(config.n, config.gamma);
    (0..config.n).map(|_| law.sample(rng)).collect()
}

/// Positions and degrees, before any contacts are drawn.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkDraft {
    pub config: NetworkConfig,
    pub nodes: Vec<Node>,
}

impl NetworkDraft {
    pub fn generate<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let positions = place_nodes(config, rng);
        let degrees = sample_degrees(config, rng);
        Ok(Self::from_parts(*config, positions, degrees))
    }

    pub fn from_parts(config: NetworkConfig, positions: Vec<Point>, degrees: Vec<usize>) -> Self {
        let nodes = positions
            .into_iter()
            .zip(degrees)
            .enumerate()
            .map(|(id, (position, degree))| Node { id, position, degree })
            .collect();
        Self { config, nodes }
    }
}

/// The candidates a source may select, as a weight vector over node ids.
#[derive(Clone, Debug, PartialEq)]
pub struct EligiblePool {
    pub weights: WeightVector,
    /// `ids[i]` is the node behind `weights[i]`; ascending.
    pub ids: Vec<usize>,
    /// True when the strict pool was empty and the allow-equal rule was used.
    pub fallback: bool,
}

impl EligiblePool {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Nodes the source may select under `model`, weighted `degree^-ε`, source
/// excluded. An empty pool is reported as [`Error::EmptyPool`].
pub fn eligible_pool(source: &Node, nodes: &[Node], model: &ContactModel) -> Result<EligiblePool> {
    let (ids, ln): (Vec<usize>, Vec<f64>) = nodes
        .iter()
        .filter(|u| u.id != source.id && model.eligible(source.degree, u.degree))
        .map(|u| (u.id, model.ln_weight(u.degree)))
        .unzip();
    if ids.is_empty() {
        return Err(Error::EmptyPool(source.id));
    }
    Ok(EligiblePool { weights: WeightVector::from_ln(ln)?, ids, fallback: false })
}

/// [`eligible_pool`] with the minimum-degree fallback: when the strict pool is
/// empty, nodes of equal degree become eligible.
pub fn source_pool(source: &Node, nodes: &[Node], model: &ContactModel) -> Result<EligiblePool> {
    match eligible_pool(source, nodes, model) {
        Err(Error::EmptyPool(_)) if model.tie_rule == TieRule::StrictSmaller => {
            let mut pool = eligible_pool(source, nodes, &model.with_rule(TieRule::AllowEqual))?;
            pool.fallback = true;
            Ok(pool)
        }
        other => other,
    }
}

/// Outcome of drawing one source's contact set.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactDraw {
    /// Selected node ids, ascending.
    pub contacts: Vec<usize>,
    /// The pool was smaller than the source degree.
    pub truncated: bool,
    pub fallback: bool,
}

#[derive(Debug)]
struct PoolPlan {
    // (degree, member count excluding the source) per group, ascending degree
    groups: Vec<(usize, usize)>,
    size: usize,
    fallback: bool,
    sampler: Option<Arc<GroupedSampler>>,
}

/// Draws contact sets for any node of a draft.
///
/// Every candidate of the same degree carries the same weight, so the pool of
/// a source of degree `q` is a handful of equal-weight groups. The subset law
/// is sampled exactly with a [`GroupedSampler`] (member counts per degree,
/// then uniform members), which matches the per-index sampler on the
/// expanded pool at a fraction of the cost. Plans are shared by all sources
/// of the same degree.
#[derive(Debug)]
pub struct ContactSampler {
    members: BTreeMap<usize, Vec<usize>>,
    plans: BTreeMap<usize, PoolPlan>,
    degrees: Vec<usize>,
}

impl ContactSampler {
    pub fn new(nodes: &[Node], model: &ContactModel) -> Result<Self> {
        Self::with_budget(nodes, model, &EspBudget::default())
    }

    pub fn with_budget(nodes: &[Node], model: &ContactModel, budget: &EspBudget) -> Result<Self> {
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for node in nodes {
            members.entry(node.degree).or_default().push(node.id);
        }
        let mut plans = BTreeMap::new();
        for &q in members.keys() {
            let plan_for = |rule: TieRule| -> Vec<(usize, usize)> {
                let m = model.with_rule(rule);
                members
                    .iter()
                    .filter(|(d, _)| m.eligible(q, **d))
                    .map(|(d, ids)| (*d, ids.len() - usize::from(*d == q)))
                    .filter(|(_, count)| *count > 0)
                    .collect()
            };
            let mut groups = plan_for(model.tie_rule);
            let mut fallback = false;
            if groups.is_empty() && model.tie_rule == TieRule::StrictSmaller {
                groups = plan_for(TieRule::AllowEqual);
                fallback = true;
            }
            let size: usize = groups.iter().map(|g| g.1).sum();
            let take = q.min(size);
            let sampler = if take > 0 && take < size {
                let cost: u64 = groups.iter().map(|g| (take.min(g.1) as u64) * take as u64).sum();
                if cost > budget.max_cells {
                    return Err(Error::BudgetExceeded { cost, budget: budget.max_cells });
                }
                let weighted: Vec<(usize, f64)> = groups.iter().map(|&(d, c)| (c, model.ln_weight(d))).collect();
                Some(Arc::new(GroupedSampler::new(&weighted, take)?))
            } else {
                None
            };
            plans.insert(q, PoolPlan { groups, size, fallback, sampler });
        }
        Ok(Self { members, plans, degrees: nodes.iter().map(|n| n.degree).collect() })
    }

    /// Eligible pool size for `source` (after any fallback).
    pub fn pool_size(&self, source: usize) -> usize {
        self.plans[&self.degrees[source]].size
    }

    pub fn draw<R: Rng + ?Sized>(&self, source: usize, rng: &mut R) -> ContactDraw {
        let q = self.degrees[source];
        let plan = &self.plans[&q];
        let mut contacts = Vec::with_capacity(q.min(plan.size));
        match &plan.sampler {
            None => {
                for &(d, _) in &plan.groups {
                    contacts.extend(self.members[&d].iter().copied().filter(|&id| id != source));
                }
            }
            Some(sampler) => {
                let counts = sampler.sample_counts(rng);
                for (&(d, available), &take) in plan.groups.iter().zip(&counts) {
                    if take == 0 {
                        continue;
                    }
                    let ids = &self.members[&d];
                    let self_pos = if d == q { ids.binary_search(&source).ok() } else { None };
                    for i in index::sample(rng, available, take) {
                        let i = match self_pos {
                            Some(pos) if i >= pos => i + 1,
                            _ => i,
                        };
                        contacts.push(ids[i]);
                    }
                }
            }
        }
        contacts.sort_unstable();
        ContactDraw { truncated: contacts.len() < q, fallback: plan.fallback, contacts }
    }
}

/// The realized social graph: positions, degrees and directed contact sets
/// (selector to selected).
#[derive(Clone, Debug, PartialEq)]
pub struct SocialNetwork {
    pub config: NetworkConfig,
    pub nodes: Vec<Node>,
    pub contacts: Vec<Vec<usize>>,
    pub truncated: Vec<bool>,
    pub fallback: Vec<bool>,
}

impl SocialNetwork {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn truncated_count(&self) -> usize {
        self.truncated.iter().filter(|t| **t).count()
    }

    pub fn fallback_count(&self) -> usize {
        self.fallback.iter().filter(|t| **t).count()
    }

    /// Unordered contact pairs `(u, v)` with `u < v`, deduplicated.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .contacts
            .iter()
            .enumerate()
            .flat_map(|(u, cs)| cs.iter().map(move |&v| (u.min(v), u.max(v))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

pub fn build_contacts<R: Rng + ?Sized>(draft: NetworkDraft, model: &ContactModel, rng: &mut R) -> Result<SocialNetwork> {
    let sampler = ContactSampler::new(&draft.nodes, model)?;
    let n = draft.nodes.len();
    let mut contacts = Vec::with_capacity(n);
    let mut truncated = Vec::with_capacity(n);
    let mut fallback = Vec::with_capacity(n);
    for id in 0..n {
        let d = sampler.draw(id, rng);
        contacts.push(d.contacts);
        truncated.push(d.truncated);
        fallback.push(d.fallback);
    }
    Ok(SocialNetwork { config: draft.config, nodes: draft.nodes, contacts, truncated, fallback })
}

/// Positions, then degrees, then contacts, all from one stream seeded by
/// `config.seed`.
pub fn generate(config: &NetworkConfig, model: &ContactModel) -> Result<SocialNetwork> {
    let mut rng = config.rng();
    let draft = NetworkDraft::generate(config, &mut rng)?;
    build_contacts(draft, model, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympoly::inclusion_probabilities;
    use rand_chacha::ChaCha8Rng;

    fn node(id: usize, degree: usize) -> Node {
        Node { id, position: Point::new(0.5, 0.5), degree }
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::new(100, 2.5, 2.6, 7).is_ok());
        let err = NetworkConfig::new(100, 1.0, 2.6, 7).unwrap_err().to_string();
        assert!(err.contains("gamma > 1"), "{err}");
        let err = NetworkConfig::new(100, 2.5, 2.0, 7).unwrap_err().to_string();
        assert!(err.contains("epsilon > 2"), "{err}");
        assert!(NetworkConfig::new(1, 2.5, 2.6, 7).is_err());
    }

    #[test]
    fn placement_in_unit_square_and_deterministic() {
        let config = NetworkConfig::new(1000, 2.5, 2.6, 3).unwrap();
        let a = place_nodes(&config, &mut config.rng());
        let b = place_nodes(&config, &mut config.rng());
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y)));
    }

    #[test]
    fn placement_quadrants_balanced() {
        let n = 10_000;
        let config = NetworkConfig::new(n, 2.5, 2.6, 17).unwrap();
        let pts = place_nodes(&config, &mut config.rng());
        let mut quad = [0usize; 4];
        for p in pts {
            quad[usize::from(p.x >= 0.5) * 2 + usize::from(p.y >= 0.5)] += 1;
        }
        // binomial(n, 1/4) has sd sqrt(3n)/4 < sqrt(n)
        for q in quad {
            assert!((q as f64 - n as f64 / 4.0).abs() <= 4.0 * (n as f64).sqrt(), "{quad:?}");
        }
    }

    #[test]
    fn degree_law_support_and_limits() {
        let law = DegreeLaw::new(50, 2.5);
        let total: f64 = (1..=50).map(|k| law.pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(law.pmf(0), 0.0);
        assert_eq!(law.pmf(51), 0.0);
        let steep = DegreeLaw::new(50, 200.0);
        assert!(steep.pmf(1) > 1.0 - 1e-12);
        let config = NetworkConfig::new(5000, 1.2, 2.6, 1).unwrap();
        let degrees = sample_degrees(&config, &mut config.rng());
        assert!(degrees.iter().all(|&d| (1..=5000).contains(&d)));
    }

    #[test]
    fn degree_one_frequency() {
        let n = 10_000;
        let config = NetworkConfig::new(n, 2.5, 2.6, 5).unwrap();
        let degrees = sample_degrees(&config, &mut config.rng());
        let z: f64 = (1..=n).map(|b| (b as f64).powf(-2.5)).sum();
        let p = 1.0 / z;
        let freq = degrees.iter().filter(|&&d| d == 1).count() as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * se, "freq={freq} p={p}");
    }

    #[test]
    fn pool_examples() {
        let nodes = [node(0, 3), node(1, 2), node(2, 2), node(3, 1)];
        let model = ContactModel::new(2.6);
        let pool = eligible_pool(&nodes[0], &nodes, &model).unwrap();
        assert_eq!(pool.ids, vec![1, 2, 3]);
        let w = pool.weights.weights();
        assert!((w[0] - 2f64.powf(-2.6)).abs() < 1e-15);
        assert!((w[1] - 2f64.powf(-2.6)).abs() < 1e-15);
        assert_eq!(w[2], 1.0);
        assert_eq!(eligible_pool(&nodes[3], &nodes, &model), Err(Error::EmptyPool(3)));
        let fb = source_pool(&nodes[3], &nodes, &model);
        // node 3 is the only degree-1 node, so even the fallback is empty
        assert_eq!(fb, Err(Error::EmptyPool(3)));
        let fb = source_pool(&nodes[1], &[nodes[1], nodes[2], node(4, 5)], &model).unwrap();
        assert!(fb.fallback);
        assert_eq!(fb.ids, vec![2]);
    }

    #[test]
    fn pool_fraction_matches_degree_law() {
        let n = 10_000;
        let config = NetworkConfig::new(n, 2.5, 2.6, 23).unwrap();
        let draft = NetworkDraft::generate(&config, &mut config.rng()).unwrap();
        let source = Node { id: usize::MAX, position: Point::new(0.5, 0.5), degree: 10 };
        let pool = eligible_pool(&source, &draft.nodes, &ContactModel::new(2.6)).unwrap();
        let law = DegreeLaw::new(n, 2.5);
        let p = law.cdf(9);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let frac = pool.len() as f64 / n as f64;
        assert!((frac - p).abs() < 4.0 * se, "frac={frac} p={p}");
    }

    #[test]
    fn strict_contacts_have_smaller_degree() {
        let config = NetworkConfig::new(2000, 2.2, 2.6, 9).unwrap();
        let net = generate(&config, &ContactModel::new(2.6)).unwrap();
        for (v, cs) in net.contacts.iter().enumerate() {
            let dv = net.nodes[v].degree;
            assert!(!cs.contains(&v));
            if !net.fallback[v] {
                assert!(cs.iter().all(|&u| net.nodes[u].degree < dv));
            } else {
                assert!(cs.iter().all(|&u| net.nodes[u].degree <= dv));
            }
            if net.truncated[v] {
                assert!(cs.len() < dv);
            } else {
                assert_eq!(cs.len(), dv);
            }
        }
        assert!(net.fallback_count() > 0);
    }

    #[test]
    fn truncation_when_pool_small() {
        let mut nodes: Vec<Node> = (0..3).map(|i| node(i, 1)).collect();
        nodes.push(node(3, 5));
        let draft = NetworkDraft { config: NetworkConfig::new(4, 2.5, 2.6, 0).unwrap(), nodes };
        let net = build_contacts(draft, &ContactModel::new(2.6), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(net.contacts[3], vec![0, 1, 2]);
        assert!(net.truncated[3]);
        assert_eq!(net.truncated_count(), 1);
    }

    #[test]
    fn allow_equal_rule_admits_equal_degrees() {
        let nodes = [node(0, 2), node(1, 2), node(2, 1), node(3, 3)];
        let model = ContactModel { epsilon: 2.6, tie_rule: TieRule::AllowEqual };
        let pool = eligible_pool(&nodes[0], &nodes, &model).unwrap();
        assert_eq!(pool.ids, vec![1, 2]);
    }

    #[test]
    fn generation_is_deterministic() {
        let config = NetworkConfig::new(500, 2.5, 2.6, 42).unwrap();
        let a = generate(&config, &ContactModel::new(2.6)).unwrap();
        let b = generate(&config, &ContactModel::new(2.6)).unwrap();
        assert_eq!(a, b);
        let c = generate(&NetworkConfig { seed: 43, ..config }, &ContactModel::new(2.6)).unwrap();
        assert_ne!(a.nodes, c.nodes);
    }

    #[test]
    fn contact_marginals_match_inclusion_probabilities() {
        let config = NetworkConfig::new(50, 2.0, 2.6, 77).unwrap();
        let draft = NetworkDraft::generate(&config, &mut config.rng()).unwrap();
        let model = ContactModel::new(2.6);
        let sampler = ContactSampler::new(&draft.nodes, &model).unwrap();
        let source = draft
            .nodes
            .iter()
            .filter(|n| {
                let size = sampler.pool_size(n.id);
                n.degree >= 2 && n.degree < size
            })
            .max_by_key(|n| n.degree)
            .expect("a node with a non-trivial pool");
        let pool = source_pool(source, &draft.nodes, &model).unwrap();
        let probs = inclusion_probabilities(&pool.weights, source.degree).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = 100_000;
        let mut hits = vec![0usize; config.n];
        for _ in 0..draws {
            for c in sampler.draw(source.id, &mut rng).contacts {
                hits[c] += 1;
            }
        }
        for (i, &id) in pool.ids.iter().enumerate() {
            let p = probs[i];
            let freq = hits[id] as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt().max(1e-12);
            assert!((freq - p).abs() < 4.0 * se, "node {id}: freq={freq} p={p}");
        }
    }
}
