//! Cell geometry of the unit square, the TDMA reuse schedule, the protocol
//! interference model and hop counting.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A position in the unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// `c * sqrt(ln n / n)`, the connectivity radius.
pub fn transmission_range(n: usize, c: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!("transmission range needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    let r = c * (nf.ln() / nf).sqrt();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidConfig(format!("range {r} for n = {n}, c = {c} is outside (0, 1)")));
    }
    Ok(r)
}

/// Tunable constants of the cell layout. The asymptotic orders do not depend
/// on them; the defaults give a reuse factor of 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridParams {
    /// Cell side as a multiple of the transmission range.
    pub c1: f64,
    /// Multiplier `c` in `r(n) = c sqrt(ln n / n)`.
    pub range_const: f64,
    /// Protocol-model guard factor Δ.
    pub delta: f64,
    /// TDMA reuse factor; `None` picks the smallest admissible value.
    pub reuse: Option<u32>,
}

impl Default for GridParams {
    fn default() -> Self {
        Self { c1: 1.0, range_const: 1.0, delta: 1.0, reuse: None }
    }
}

impl GridParams {
    /// `ceil((2 + Δ) / C1)`.
    pub fn min_reuse(&self) -> u32 {
        ((2.0 + self.delta) / self.c1 - 1e-9).ceil().max(1.0) as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub c1: f64,
    pub range_const: f64,
    pub delta: f64,
    pub reuse: u32,
    pub n: usize,
    pub r: f64,
    pub cells_per_side: usize,
}

impl GridSpec {
    pub fn new(n: usize, params: &GridParams) -> Result<Self> {
        let r = transmission_range(n, params.range_const)?;
        Self::with_range(n, r, params)
    }

    /// Uses an explicit transmission range instead of `r(n)`.
    pub fn with_range(n: usize, r: f64, params: &GridParams) -> Result<Self> {
        let spec = Self::with_range_unchecked(n, r, params)?;
        if (spec.reuse as f64) < (2.0 + spec.delta) / spec.c1 - 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "reuse factor T = {} violates T >= (2 + delta) / C1 = {}",
                spec.reuse,
                (2.0 + spec.delta) / spec.c1
            )));
        }
        Ok(spec)
    }

    /// Like [`GridSpec::with_range`] but accepts a reuse factor below the
    /// interference-free minimum. Only useful for fault-injection checks.
    pub fn with_range_unchecked(n: usize, r: f64, params: &GridParams) -> Result<Self> {
        if !(params.c1 > 0.0 && params.c1.is_finite()) {
            return Err(Error::InvalidConfig(format!("C1 must be positive, got {}", params.c1)));
        }
        if !(params.delta >= 0.0 && params.delta.is_finite()) {
            return Err(Error::InvalidConfig(format!("delta must be non-negative, got {}", params.delta)));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidConfig(format!("range must be positive, got {r}")));
        }
        let reuse = params.reuse.unwrap_or_else(|| params.min_reuse());
        if reuse == 0 {
            return Err(Error::InvalidConfig("reuse factor must be at least 1".into()));
        }
        // 1e-9 keeps exact quotients like 1 / 0.1 from gaining a sliver cell
        let cells_per_side = (1.0 / (params.c1 * r) - 1e-9).ceil().max(1.0) as usize;
        Ok(Self { c1: params.c1, range_const: params.range_const, delta: params.delta, reuse, n, r, cells_per_side })
    }

    pub fn cell_side(&self) -> f64 {
        self.c1 * self.r
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side * self.cells_per_side
    }

    pub fn cell_center(&self, c: CellIndex) -> Point {
        let s = self.cell_side();
        Point::new((c.i as f64 + 0.5) * s, (c.j as f64 + 0.5) * s)
    }

    pub fn contains(&self, c: CellIndex) -> bool {
        c.i < self.cells_per_side && c.j < self.cells_per_side
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub i: usize,
    pub j: usize,
}

impl CellIndex {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

pub fn cell_of(p: Point, spec: &GridSpec) -> CellIndex {
    let s = spec.cell_side();
    let last = spec.cells_per_side - 1;
    let axis = |v: f64| ((v / s).floor().max(0.0) as usize).min(last);
    CellIndex::new(axis(p.x), axis(p.y))
}

/// L1 cell distance, with a same-cell transmission counted as one hop.
pub fn hop_count(a: CellIndex, b: CellIndex) -> usize {
    (a.i.abs_diff(b.i) + a.j.abs_diff(b.j)).max(1)
}

/// Greedy staircase route from `a` to `b`: first along `i`, then along `j`.
///
/// The path has `hop_count(a, b) + 1` entries. A same-cell route is
/// `[a, a]`, one hop inside the cell.
pub fn route(a: CellIndex, b: CellIndex) -> Vec<CellIndex> {
    if a == b {
        return vec![a, a];
    }
    let mut path = Vec::with_capacity(hop_count(a, b) + 1);
    let mut cur = a;
    path.push(cur);
    while cur.i != b.i {
        cur.i = if cur.i < b.i { cur.i + 1 } else { cur.i - 1 };
        path.push(cur);
    }
    while cur.j != b.j {
        cur.j = if cur.j < b.j { cur.j + 1 } else { cur.j - 1 };
        path.push(cur);
    }
    path
}

/// TDMA slot assignment: cell `(i, j)` transmits in slot
/// `(i mod T) T + (j mod T)`, so same-slot cells differ by a multiple of `T`
/// along each axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub reuse: u32,
    pub cells_per_side: usize,
    slots: Vec<u32>,
}

impl Schedule {
    pub fn slot(&self, c: CellIndex) -> u32 {
        self.slots[c.i * self.cells_per_side + c.j]
    }

    pub fn slot_count(&self) -> u32 {
        self.reuse * self.reuse
    }

    pub fn cells_in_slot(&self, slot: u32) -> Vec<CellIndex> {
        let m = self.cells_per_side;
        (0..m * m)
            .filter(|&idx| self.slots[idx] == slot)
            .map(|idx| CellIndex::new(idx / m, idx % m))
            .collect()
    }

    /// One row per line of slot ids, `i` increasing downwards.
    pub fn dump(&self) -> String {
        let m = self.cells_per_side;
        let mut out = String::new();
        for i in 0..m {
            let row: Vec<String> = (0..m).map(|j| self.slots[i * m + j].to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

pub fn tdma_schedule(spec: &GridSpec) -> Schedule {
    let t = spec.reuse as usize;
    let m = spec.cells_per_side;
    let slots = (0..m * m).map(|idx| ((idx / m % t) * t + (idx % m % t)) as u32).collect();
    Schedule { reuse: spec.reuse, cells_per_side: m, slots }
}

/// Slack applied to both protocol-model inequalities so that geometrically
/// exact boundary cases survive rounding.
const PROTOCOL_SLACK: f64 = 1e-12;

/// Protocol-model success for a set of concurrent `(transmitter, receiver)`
/// links: every receiver is within range of its transmitter, and every other
/// concurrent transmitter is at least `(1 + Δ)` times the link length away
/// from that receiver.
pub fn protocol_model_ok(links: &[(Point, Point)], spec: &GridSpec) -> bool {
    let range = spec.r * (1.0 + PROTOCOL_SLACK);
    if links.iter().any(|(tx, rx)| tx.distance(*rx) > range) {
        return false;
    }
    for (a, (tx, rx)) in links.iter().enumerate() {
        let guard = (1.0 + spec.delta) * tx.distance(*rx) * (1.0 - PROTOCOL_SLACK);
        for (b, (other, _)) in links.iter().enumerate() {
            if a != b && other.distance(*rx) < guard {
                return false;
            }
        }
    }
    true
}
