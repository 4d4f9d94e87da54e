//! Box covering, renormalization and fractal exponents.
//!
//! A box of size `l_B` holds nodes whose pairwise graph distance is at most
//! `l_B`. Coverings are found by greedy coloring: nodes are visited in some
//! order and each joins the lowest-index box all of whose members lie within
//! `l_B` of it. Fits use `l_B + 1`, the number of nodes a box can span along a
//! shortest path, as the length scale.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::capacity::ScalingFit;
use crate::error::{Error, Result};
use crate::netgen::{format_real, SocialNetwork};
use crate::seed;

pub const DEFAULT_ORDERINGS: usize = 10;

/// Simple undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Self-loops and duplicate edges are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, len: n });
                }
            }
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { adj })
    }

    /// Contacts taken as undirected links.
    pub fn from_network(net: &SocialNetwork) -> Self {
        Self::from_edges(net.len(), &net.undirected_edges()).expect("contact ids are in range")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("in range")
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(leaves + 1, &edges).expect("in range")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_edges(n, &edges).expect("in range")
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Component label per node, labels in order of first appearance.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Nodes within `cap` hops of `src` with their distances, via a reusable
    /// distance buffer (`usize::MAX` = unvisited, restored on return).
    fn ball(&self, src: usize, cap: usize, dist: &mut [usize], out: &mut Vec<(usize, usize)>) {
        out.clear();
        dist[src] = 0;
        out.push((src, 0));
        let mut head = 0;
        while head < out.len() {
            let (u, d) = out[head];
            head += 1;
            if d == cap {
                continue;
            }
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = d + 1;
                    out.push((v, d + 1));
                }
            }
        }
        for &(v, _) in out.iter() {
            dist[v] = usize::MAX;
        }
    }

    /// Exact distance, or `None` when it exceeds `cap` or the nodes are not
    /// connected.
    pub fn distance_within(&self, a: usize, b: usize, cap: usize) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        self.ball(a, cap, &mut dist, &mut out);
        out.iter().find(|(v, _)| *v == b).map(|(_, d)| *d)
    }
}

/// Reads a graph from the network text format or from a `u v` edge list.
///
/// Edge-list ids may be any non-negative integers; they are relabelled
/// `0..` in ascending order. Lines starting with `#` are ignored.
pub fn read_graph(text: &str) -> Result<Graph> {
    let first = text.lines().find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    match first.map(|l| l.split_whitespace().count()) {
        None => Err(Error::Parse { line: 0, message: "empty graph input".into() }),
        Some(4) => Ok(Graph::from_network(&SocialNetwork::read_from(text.as_bytes())?)),
        Some(_) => read_edge_list(text),
    }
}

fn read_edge_list(text: &str) -> Result<Graph> {
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| -> Result<u64> {
            s.parse().map_err(|_| Error::Parse { line: i + 1, message: format!("cannot parse node id from `{s}`") })
        };
        if f.len() != 2 {
            return Err(Error::Parse { line: i + 1, message: "edge line must be `u v`".into() });
        }
        raw.push((parse(f[0])?, parse(f[1])?));
    }
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |x: u64| ids.binary_search(&x).expect("collected id");
    let edges: Vec<(usize, usize)> = raw.iter().map(|&(u, v)| (index(u), index(v))).collect();
    Graph::from_edges(ids.len(), &edges)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxCovering {
    pub l_b: usize,
    /// Box index of every node.
    pub assignment: Vec<usize>,
    /// Members of every box, ascending.
    pub boxes: Vec<Vec<usize>>,
}

impl BoxCovering {
    pub fn n_boxes(&self) -> usize {
        self.boxes.len()
    }

    fn from_assignment(l_b: usize, assignment: Vec<usize>) -> Self {
        let count = assignment.iter().copied().max().map_or(0, |m| m + 1);
        let mut boxes = vec![Vec::new(); count];
        for (v, &b) in assignment.iter().enumerate() {
            boxes[b].push(v);
        }
        Self { l_b, assignment, boxes }
    }

    /// Every node is in exactly one box and every pair inside a box is at
    /// distance `<= l_b`. Exhaustive BFS check.
    pub fn is_valid(&self, graph: &Graph) -> bool {
        if self.assignment.len() != graph.len() {
            return false;
        }
        let mut seen = vec![false; graph.len()];
        for (b, members) in self.boxes.iter().enumerate() {
            for &v in members {
                if v >= graph.len() || seen[v] || self.assignment[v] != b {
                    return false;
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return false;
        }
        let mut dist = vec![usize::MAX; graph.len()];
        let mut ball = Vec::new();
        let mut in_ball = vec![false; graph.len()];
        for members in &self.boxes {
            for &v in members {
                graph.ball(v, self.l_b, &mut dist, &mut ball);
                for &(u, _) in &ball {
                    in_ball[u] = true;
                }
                let ok = members.iter().all(|&u| in_ball[u]);
                for &(u, _) in &ball {
                    in_ball[u] = false;
                }
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

/// One greedy coloring pass in the given node order.
pub fn greedy_cover(graph: &Graph, l_b: usize, order: &[usize]) -> BoxCovering {
    let n = graph.len();
    let mut assignment = vec![usize::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    let mut near_count: Vec<usize> = Vec::new();
    let mut dist = vec![usize::MAX; n];
    let mut ball = Vec::new();
    for &v in order {
        graph.ball(v, l_b, &mut dist, &mut ball);
        for &(u, _) in &ball {
            if assignment[u] != usize::MAX {
                near_count[assignment[u]] += 1;
            }
        }
        let chosen = (0..sizes.len()).find(|&b| near_count[b] == sizes[b]).unwrap_or(sizes.len());
        for &(u, _) in &ball {
            if assignment[u] != usize::MAX {
                near_count[assignment[u]] = 0;
            }
        }
        if chosen == sizes.len() {
            sizes.push(0);
            near_count.push(0);
        }
        sizes[chosen] += 1;
        assignment[v] = chosen;
    }
    BoxCovering::from_assignment(l_b, assignment)
}

/// Breadth-first order started from a minimum-degree node of each component.
fn bfs_order(graph: &Graph) -> Vec<usize> {
    let (label, count) = graph.components();
    let mut starts = vec![usize::MAX; count];
    for v in 0..graph.len() {
        let s = &mut starts[label[v]];
        if *s == usize::MAX || graph.degree(v) < graph.degree(*s) {
            *s = v;
        }
    }
    let mut seen = vec![false; graph.len()];
    let mut order = Vec::with_capacity(graph.len());
    for s in starts {
        seen[s] = true;
        let mut head = order.len();
        order.push(s);
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in graph.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    order.push(v);
                }
            }
        }
    }
    order
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverOptions {
    /// Orderings tried; the first is breadth-first from a peripheral node, the
    /// rest are random permutations.
    pub orderings: usize,
    pub seed: u64,
    /// Accept disconnected graphs; boxes never span components.
    pub per_component: bool,
}

impl Default for CoverOptions {
    fn default() -> Self {
        Self { orderings: DEFAULT_ORDERINGS, seed: 0, per_component: false }
    }
}

fn check_input(graph: &Graph, l_b: usize, opts: &CoverOptions) -> Result<()> {
    if graph.is_empty() {
        return Err(Error::EmptyWeights);
    }
    if l_b == 0 {
        return Err(Error::InvalidConfig("box size l_B must be at least 1".into()));
    }
    if opts.orderings == 0 {
        return Err(Error::InvalidConfig("at least one ordering is required".into()));
    }
    let (_, components) = graph.components();
    if components > 1 && !opts.per_component {
        return Err(Error::Disconnected { components });
    }
    Ok(())
}

/// Fewest boxes over `opts.orderings` greedy passes (ties go to the earlier
/// ordering).
pub fn box_cover(graph: &Graph, l_b: usize, opts: &CoverOptions) -> Result<BoxCovering> {
    check_input(graph, l_b, opts)?;
    let base = bfs_order(graph);
    let covers: Vec<BoxCovering> = (0..opts.orderings)
        .into_par_iter()
        .map(|k| {
            let mut order = base.clone();
            if k > 0 {
                let mut rng = seed::substream_rng(opts.seed, &[seed::COVER, l_b as u64, k as u64]);
                order.shuffle(&mut rng);
            }
            greedy_cover(graph, l_b, &order)
        })
        .collect();
    Ok(covers.into_iter().min_by_key(BoxCovering::n_boxes).expect("at least one ordering"))
}

/// Coverings for ascending box sizes. A covering valid at `l` is valid at any
/// larger size, so a worse result is replaced by the previous covering and
/// box counts never increase.
pub fn box_cover_series(graph: &Graph, sizes: &[usize], opts: &CoverOptions) -> Result<Vec<BoxCovering>> {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out: Vec<BoxCovering> = Vec::with_capacity(sorted.len());
    for &l in &sorted {
        let mut cover = box_cover(graph, l, opts)?;
        if let Some(prev) = out.last() {
            if prev.n_boxes() < cover.n_boxes() {
                cover = BoxCovering { l_b: l, ..prev.clone() };
            }
        }
        out.push(cover);
    }
    Ok(out)
}

/// The graph of boxes and per-box statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct Renormalized {
    pub graph: Graph,
    /// Box degree in the renormalized graph.
    pub k_b: Vec<usize>,
    /// Largest original degree inside the box.
    pub k_hub: Vec<usize>,
    /// Links of that hub that leave the box.
    pub n_h: Vec<usize>,
}

pub fn renormalize(graph: &Graph, cover: &BoxCovering) -> Renormalized {
    let mut edges = Vec::new();
    for u in 0..graph.len() {
        for &v in graph.neighbors(u) {
            let (a, b) = (cover.assignment[u], cover.assignment[v]);
            if a < b {
                edges.push((a, b));
            }
        }
    }
    let boxed = Graph::from_edges(cover.n_boxes(), &edges).expect("box ids in range");
    let mut k_hub = Vec::with_capacity(cover.n_boxes());
    let mut n_h = Vec::with_capacity(cover.n_boxes());
    for (b, members) in cover.boxes.iter().enumerate() {
        // lowest id among the highest-degree members
        let hub = members.iter().copied().max_by_key(|&v| (graph.degree(v), std::cmp::Reverse(v))).expect("non-empty box");
        k_hub.push(graph.degree(hub));
        n_h.push(graph.neighbors(hub).iter().filter(|&&u| cover.assignment[u] != b).count());
    }
    Renormalized { k_b: (0..boxed.len()).map(|b| boxed.degree(b)).collect(), graph: boxed, k_hub, n_h }
}

/// Measurements at one box size. Means are over boxes with a non-zero
/// denominator and are NaN when there is none.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxRow {
    pub l_b: usize,
    pub n_b: usize,
    pub mean_kb_over_khub: f64,
    pub mean_nh_over_kb: f64,
}

impl BoxRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.l_b,
            self.n_b,
            format_real(self.mean_kb_over_khub),
            format_real(self.mean_nh_over_kb)
        )
    }
}

fn mean_ratio(num: &[usize], den: &[usize]) -> f64 {
    let pairs: Vec<f64> = num.iter().zip(den).filter(|(_, &d)| d > 0).map(|(&a, &d)| a as f64 / d as f64).collect();
    if pairs.is_empty() {
        f64::NAN
    } else {
        pairs.iter().sum::<f64>() / pairs.len() as f64
    }
}

/// One of the three log-log fits; `fit` is `None` when a response is zero or
/// undefined, and `degenerate` is set then or when the response is constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub fit: Option<ScalingFit>,
    pub degenerate: bool,
}

impl ExponentFit {
    fn from_series(xs: &[f64], ys: &[f64]) -> Self {
        let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
        match ScalingFit::from_log_points(pts) {
            Ok(fit) => Self { exponent: -fit.slope, degenerate: fit.degenerate, fit: Some(fit) },
            Err(_) => Self { exponent: f64::NAN, fit: None, degenerate: true },
        }
    }

    pub fn r_squared(&self) -> f64 {
        self.fit.as_ref().map_or(f64::NAN, |f| f.r_squared)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FractalExponents {
    pub rows: Vec<BoxRow>,
    /// `N_B / n` against `l_B + 1`.
    pub d_b: ExponentFit,
    /// Mean `k_B / k_hub` against `l_B + 1`.
    pub d_g: ExponentFit,
    /// Mean `n_h / k_B` against `l_B + 1`.
    pub d_e: ExponentFit,
    /// `1 + d_B / d_g`.
    pub gamma_pred: f64,
    /// `2 + d_e / d_g`.
    pub epsilon_pred: f64,
}

impl FractalExponents {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l_B,N_B,mean_kB_over_khub,mean_nh_over_kB\n");
        for row in &self.rows {
            out.push_str(&row.csv_row());
            out.push('\n');
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "# d_B={} d_g={} d_e={} gamma_pred={} epsilon_pred={} r2_B={} r2_g={} r2_e={} degenerate={}",
            format_real(self.d_b.exponent),
            format_real(self.d_g.exponent),
            format_real(self.d_e.exponent),
            format_real(self.gamma_pred),
            format_real(self.epsilon_pred),
            format_real(self.d_b.r_squared()),
            format_real(self.d_g.r_squared()),
            format_real(self.d_e.r_squared()),
            self.any_degenerate()
        )
    }

    pub fn any_degenerate(&self) -> bool {
        self.d_b.degenerate || self.d_g.degenerate || self.d_e.degenerate
    }
}

/// Covers the graph at every size in `sizes` (at least three distinct) and
/// fits the three scaling relations.
pub fn estimate_exponents(graph: &Graph, sizes: &[usize], opts: &CoverOptions) -> Result<FractalExponents> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: distinct.len() });
    }
    let covers = box_cover_series(graph, &distinct, opts)?;
    let n = graph.len() as f64;
    let rows: Vec<BoxRow> = covers
        .iter()
        .map(|c| {
            let r = renormalize(graph, c);
            BoxRow {
                l_b: c.l_b,
                n_b: c.n_boxes(),
                mean_kb_over_khub: mean_ratio(&r.k_b, &r.k_hub),
                mean_nh_over_kb: mean_ratio(&r.n_h, &r.k_b),
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| (r.l_b + 1) as f64).collect();
    let d_b = ExponentFit::from_series(&xs, &rows.iter().map(|r| r.n_b as f64 / n).collect::<Vec<_>>());
    let d_g = ExponentFit::from_series(&xs, &rows.iter().map(|r| r.mean_kb_over_khub).collect::<Vec<_>>());
    let d_e = ExponentFit::from_series(&xs, &rows.iter().map(|r| r.mean_nh_over_kb).collect::<Vec<_>>());
    let gamma_pred = 1.0 + d_b.exponent / d_g.exponent;
    let epsilon_pred = 2.0 + d_e.exponent / d_g.exponent;
    Ok(FractalExponents { rows, d_b, d_g, d_e, gamma_pred, epsilon_pred })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{generate, ContactModel, NetworkConfig};
    use proptest::prelude::*;

    /// Smallest covering by exhaustive search over box assignments.
    fn brute_min_boxes(graph: &Graph, l_b: usize) -> usize {
        let n = graph.len();
        let far: Vec<Vec<bool>> =
            (0..n).map(|a| (0..n).map(|b| graph.distance_within(a, b, l_b).is_none()).collect()).collect();
        fn place(v: usize, n: usize, far: &[Vec<bool>], boxes: &mut Vec<Vec<usize>>, best: &mut usize) {
            if boxes.len() >= *best {
                return;
            }
            if v == n {
                *best = boxes.len();
                return;
            }
            for b in 0..boxes.len() {
                if boxes[b].iter().all(|&u| !far[u][v]) {
                    boxes[b].push(v);
                    place(v + 1, n, far, boxes, best);
                    boxes[b].pop();
                }
            }
            boxes.push(vec![v]);
            place(v + 1, n, far, boxes, best);
            boxes.pop();
        }
        let mut best = n + 1;
        place(0, n, &far, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn path_twelve_size_three() {
        let g = Graph::path(12);
        // blocks of four consecutive nodes; exhaustive search agrees
        assert_eq!(brute_min_boxes(&g, 3), 3);
        let c = box_cover(&g, 3, &CoverOptions::default()).unwrap();
        assert_eq!(c.n_boxes(), 3);
        assert!(c.is_valid(&g));
    }

    #[test]
    fn star_and_complete_fit_one_box() {
        let star = Graph::star(30);
        assert_eq!(box_cover(&star, 2, &CoverOptions::default()).unwrap().n_boxes(), 1);
        let k = Graph::complete(12);
        for l in 1..4 {
            assert_eq!(box_cover(&k, l, &CoverOptions::default()).unwrap().n_boxes(), 1);
        }
    }

    #[test]
    fn greedy_matches_brute_force_on_small_graphs() {
        let cycle = Graph::from_edges(9, &(0..9).map(|i| (i, (i + 1) % 9)).collect::<Vec<_>>()).unwrap();
        for l in 1..=4 {
            let c = box_cover(&cycle, l, &CoverOptions { orderings: 30, ..CoverOptions::default() }).unwrap();
            assert!(c.is_valid(&cycle));
            assert!(c.n_boxes() >= brute_min_boxes(&cycle, l));
        }
    }

    #[test]
    fn disconnected_needs_flag() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(box_cover(&g, 1, &CoverOptions::default()), Err(Error::Disconnected { components: 2 }));
        let opts = CoverOptions { per_component: true, ..CoverOptions::default() };
        let c = box_cover(&g, 5, &opts).unwrap();
        assert_eq!(c.n_boxes(), 2);
        assert!(c.is_valid(&g));
        assert!(box_cover(&g, 0, &opts).is_err());
    }

    #[test]
    fn renormalized_path() {
        let g = Graph::path(12);
        let c = BoxCovering::from_assignment(2, (0..12).map(|v| v / 3).collect());
        assert!(c.is_valid(&g));
        let r = renormalize(&g, &c);
        assert_eq!(r.graph, Graph::path(4));
        assert_eq!(r.k_b, vec![1, 2, 2, 1]);
        assert_eq!(r.k_hub, vec![2, 2, 2, 2]);
        // hubs are the lowest-id degree-2 members: 1, 3, 6, 9
        assert_eq!(r.n_h, vec![0, 1, 1, 1]);
        let one = renormalize(&g, &BoxCovering::from_assignment(11, vec![0; 12]));
        assert_eq!(one.graph.len(), 1);
        assert_eq!(one.graph.edge_count(), 0);
    }

    #[test]
    fn invalid_covering_detected() {
        let g = Graph::path(6);
        let c = BoxCovering::from_assignment(1, vec![0, 0, 0, 1, 1, 1]);
        assert!(!c.is_valid(&g));
    }

    #[test]
    fn path_exponent_is_one() {
        let g = Graph::path(10_000);
        let e = estimate_exponents(&g, &[1, 2, 3, 4], &CoverOptions::default()).unwrap();
        assert!((e.d_b.exponent - 1.0).abs() < 1e-3, "{}", e.d_b.exponent);
        assert_eq!(e.rows.iter().map(|r| r.n_b).collect::<Vec<_>>(), vec![5000, 3334, 2500, 2000]);
    }

    #[test]
    fn single_box_fits_are_degenerate() {
        let g = Graph::complete(8);
        let e = estimate_exponents(&g, &[1, 2, 3], &CoverOptions::default()).unwrap();
        assert!(e.d_b.degenerate && e.any_degenerate());
        assert_eq!(e.d_b.exponent, 0.0);
        assert!(e.to_csv().lines().last().unwrap().contains("degenerate=true"));
        assert!(matches!(
            estimate_exponents(&g, &[1, 2, 2], &CoverOptions::default()),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn reads_edge_lists_and_networks() {
        let g = read_graph("# comment\n10 20\n20 30\n\n30 10\n").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(read_graph("1 x\n").is_err());
        assert!(read_graph("").is_err());
        let net = generate(&NetworkConfig::new(60, 2.5, 2.6, 3).unwrap(), &ContactModel::new(2.6)).unwrap();
        let g = read_graph(&net.to_text()).unwrap();
        assert_eq!(g, Graph::from_network(&net));
    }

    #[test]
    fn generated_network_covering_is_valid() {
        let net = generate(&NetworkConfig::new(1500, 2.5, 2.6, 8).unwrap(), &ContactModel::new(2.6)).unwrap();
        let g = Graph::from_network(&net);
        let opts = CoverOptions { orderings: 3, per_component: true, ..CoverOptions::default() };
        let series = box_cover_series(&g, &[1, 2, 3, 4], &opts).unwrap();
        for w in series.windows(2) {
            assert!(w[1].n_boxes() <= w[0].n_boxes());
        }
        for c in &series {
            assert!(c.is_valid(&g));
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..40).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |e| Graph::from_edges(n, &e).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn coverings_are_valid_and_monotone(g in arb_graph(), seed in any::<u64>()) {
            let opts = CoverOptions { orderings: 4, seed, per_component: true };
            let series = box_cover_series(&g, &[1, 2, 3, 5, 40], &opts).unwrap();
            for c in &series {
                prop_assert!(c.is_valid(&g));
            }
            for w in series.windows(2) {
                prop_assert!(w[1].n_boxes() <= w[0].n_boxes());
            }
            // a box never spans components, and beyond the diameter each component is one box
            let (_, comps) = g.components();
            prop_assert_eq!(series.last().unwrap().n_boxes(), comps);
        }

        #[test]
        fn renormalized_handshake(g in arb_graph(), l in 1usize..4) {
            let c = box_cover(&g, l, &CoverOptions { orderings: 2, seed: 1, per_component: true }).unwrap();
            let r = renormalize(&g, &c);
            prop_assert_eq!(r.k_b.iter().sum::<usize>(), 2 * r.graph.edge_count());
        }
    }
}
