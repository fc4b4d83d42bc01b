//! Edge scoring and filtering.
//!
//! Every candidate edge gets two angular scores:
//!
//! - `C0 = |e . l|`, the cosine between the edge and the beam of its lower
//!   pulse. 0 for a surface facing the sensor, 1 for an edge along the beam
//!   (depth discontinuity or grazing surface).
//! - `C1`, the product over predecessor and successor pulses along the
//!   edge's own lattice direction of the best `|1 - e_prev . e|`, with each
//!   factor clamped to 1 and set to 1 when the pulse is empty or off-grid.
//!   0 when the edge continues a straight line of echoes.
//!
//! An edge is kept when `C0 <= alpha_m`, or when `C1 < lambda * alpha_m * C0 /
//! (C0 - alpha_m)`. Kept edges may then go through the isolated-edge pass,
//! which drops any edge without an adjacent kept edge aligned to within
//! `1 - |cos| < epsilon`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use crate::exec::Executor;
use crate::geom::Vec3;
use crate::grid::{CandidateEdge, PulseGrid};

/// Reconstruction pipeline variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Variant {
    /// Edge length threshold, triangles from every closed edge triplet.
    Naive,
    /// C0/C1 edge filter, triangles from every closed edge triplet.
    Edges,
    /// C0/C1 edge filter, wedge coplanarity filter, then isolated-edge pass.
    Full,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Naive, Variant::Edges, Variant::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Naive => "naive",
            Variant::Edges => "edges",
            Variant::Full => "full",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown variant (expected naive, edges or full)")]
pub struct UnknownVariant;

impl FromStr for Variant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Variant::Naive),
            "edges" => Ok(Variant::Edges),
            "full" => Ok(Variant::Full),
            _ => Err(UnknownVariant),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("alpha_m must lie in (0, 1), got {0}")]
    AlphaM(f64),
    #[error("lambda must be positive, got {0}")]
    Lambda(f64),
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("omega must lie in (0, 1), got {0}")]
    Omega(f64),
    #[error("naive_length must be positive, got {0}")]
    NaiveLength(f64),
}

/// Filtering thresholds. Defaults are the reference settings used for the
/// three-way method comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterParams {
    /// C0 threshold below which an edge is kept outright.
    pub alpha_m: f64,
    /// How much C1 collinearity may compensate for a large C0.
    pub lambda: f64,
    /// Alignment tolerance of the isolated-edge pass.
    pub epsilon: f64,
    /// Coplanarity tolerance between neighbouring wedges.
    pub omega: f64,
    /// Length threshold of the naive baseline, in meters.
    pub naive_length: f64,
    pub variant: Variant,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            alpha_m: 0.05,
            lambda: 1e-4,
            epsilon: 5e-3,
            omega: 1e-3,
            naive_length: 0.5,
            variant: Variant::Full,
        }
    }
}

impl FilterParams {
    pub fn with_variant(self, variant: Variant) -> Self {
        FilterParams { variant, ..self }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.alpha_m) {
            return Err(ParamError::AlphaM(self.alpha_m));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(ParamError::Lambda(self.lambda));
        }
        if !open_unit(self.epsilon) {
            return Err(ParamError::Epsilon(self.epsilon));
        }
        if !open_unit(self.omega) {
            return Err(ParamError::Omega(self.omega));
        }
        if !(self.naive_length > 0.0 && self.naive_length.is_finite()) {
            return Err(ParamError::NaiveLength(self.naive_length));
        }
        Ok(())
    }
}

/// Undirected edge between two global echo indices, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgeKey {
    pub a: u32,
    pub b: u32,
}

impl EdgeKey {
    /// Orders the endpoints. `u` and `v` must differ.
    #[inline]
    pub fn new(u: u32, v: u32) -> Self {
        debug_assert_ne!(u, v);
        if u < v {
            EdgeKey { a: u, b: v }
        } else {
            EdgeKey { a: v, b: u }
        }
    }

    #[inline]
    pub fn other(self, v: u32) -> u32 {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

impl From<&CandidateEdge> for EdgeKey {
    fn from(e: &CandidateEdge) -> Self {
        EdgeKey { a: e.ia, b: e.ib }
    }
}

/// Sorted, duplicate-free set of edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet {
    keys: Vec<EdgeKey>,
}

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet::default()
    }

    pub fn from_keys(mut keys: Vec<EdgeKey>) -> Self {
        keys.sort_unstable();
        keys.dedup();
        EdgeSet { keys }
    }

    /// Wraps keys that are already strictly increasing, which is what
    /// candidate enumeration produces.
    pub fn from_sorted(keys: Vec<EdgeKey>) -> Self {
        if keys.windows(2).all(|w| w[0] < w[1]) {
            EdgeSet { keys }
        } else {
            EdgeSet::from_keys(keys)
        }
    }

    #[inline]
    pub fn contains(&self, key: EdgeKey) -> bool {
        self.keys.binary_search(&key).is_ok()
    }

    #[inline]
    pub fn contains_pair(&self, u: u32, v: u32) -> bool {
        u != v && self.contains(EdgeKey::new(u, v))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.keys.iter().copied()
    }

    pub fn as_slice(&self) -> &[EdgeKey] {
        &self.keys
    }

    pub fn into_vec(self) -> Vec<EdgeKey> {
        self.keys
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.keys.iter().all(|k| other.contains(*k))
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut keys = Vec::with_capacity(self.len() + other.len());
        keys.extend_from_slice(&self.keys);
        keys.extend_from_slice(&other.keys);
        EdgeSet::from_keys(keys)
    }
}

impl FromIterator<EdgeKey> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeKey>>(iter: I) -> Self {
        EdgeSet::from_keys(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("edge between echoes {a} and {b} has zero length")]
pub struct DegenerateEdge {
    pub a: u32,
    pub b: u32,
}

/// Unit vector and length from echo `from` to echo `to`.
#[inline]
fn unit_between(grid: &PulseGrid, from: u32, to: u32) -> Option<(Vec3, f64)> {
    let d = grid.position(to) - grid.position(from);
    let len = d.norm();
    (len > 0.0 && len.is_finite()).then(|| (d * (1.0 / len), len))
}

/// Candidate edge with its cached geometry and C0 score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredEdge {
    pub edge: CandidateEdge,
    /// Unit vector from `a` to `b`.
    pub unit: Vec3,
    pub length: f64,
    pub c0: f64,
}

impl ScoredEdge {
    pub fn new(edge: CandidateEdge, grid: &PulseGrid) -> Result<Self, DegenerateEdge> {
        let (unit, length) = unit_between(grid, edge.ia, edge.ib).ok_or(DegenerateEdge { a: edge.ia, b: edge.ib })?;
        let beam = grid.pulse_at(grid.pulse_of(edge.ia)).direction;
        let c0 = unit.dot(beam).abs().min(1.0);
        Ok(ScoredEdge { edge, unit, length, c0 })
    }

    pub fn key(&self) -> EdgeKey {
        EdgeKey::from(&self.edge)
    }

    /// C1 score, computed on demand.
    pub fn c1(&self, grid: &PulseGrid) -> f64 {
        let CandidateEdge { a, b, dir, ia, ib } = self.edge;
        let mut before = 1.0f64;
        if let Some((s, r)) = grid.step_backward(a.s, a.r, dir) {
            for prev in grid.echo_span(grid.pulse_index(s, r)) {
                if let Some((u, _)) = unit_between(grid, prev as u32, ia) {
                    before = before.min((1.0 - u.dot(self.unit)).abs());
                }
            }
        }
        let mut after = 1.0f64;
        if let Some((s, r)) = grid.step_forward(b.s, b.r, dir) {
            for next in grid.echo_span(grid.pulse_index(s, r)) {
                if let Some((u, _)) = unit_between(grid, ib, next as u32) {
                    after = after.min((1.0 - self.unit.dot(u)).abs());
                }
            }
        }
        before * after
    }

    pub fn keep(&self, params: &FilterParams, grid: &PulseGrid) -> bool {
        passes_regularity(self.c0, || self.c1(grid), params.alpha_m, params.lambda)
    }
}

/// C1 threshold for an edge with C0 above `alpha_m`.
#[inline]
pub fn c1_bound(c0: f64, alpha_m: f64, lambda: f64) -> f64 {
    lambda * alpha_m * c0 / (c0 - alpha_m)
}

/// Keep decision from C0 and a lazily evaluated C1.
#[inline]
pub fn passes_regularity(c0: f64, c1: impl FnOnce() -> f64, alpha_m: f64, lambda: f64) -> bool {
    c0 <= alpha_m || c1() < c1_bound(c0, alpha_m, lambda)
}

pub fn c0(edge: &CandidateEdge, grid: &PulseGrid) -> Result<f64, DegenerateEdge> {
    ScoredEdge::new(*edge, grid).map(|s| s.c0)
}

pub fn c1(edge: &CandidateEdge, grid: &PulseGrid) -> Result<f64, DegenerateEdge> {
    ScoredEdge::new(*edge, grid).map(|s| s.c1(grid))
}

/// Regularity keep criterion. Zero-length edges are never kept.
pub fn keep_edge(edge: &CandidateEdge, params: &FilterParams, grid: &PulseGrid) -> bool {
    ScoredEdge::new(*edge, grid).is_ok_and(|s| s.keep(params, grid))
}

/// Regularity filter over candidate edges whose lower echo is on `lines`.
pub fn regularity_filter_lines(grid: &PulseGrid, params: &FilterParams, lines: Range<usize>) -> Vec<EdgeKey> {
    grid.candidate_edges_in_lines(lines).filter(|e| keep_edge(e, params, grid)).map(|e| EdgeKey::from(&e)).collect()
}

/// C0/C1 regularity filter over the whole grid.
pub fn regularity_filter<E: Executor>(grid: &PulseGrid, params: &FilterParams, exec: &E) -> EdgeSet {
    EdgeSet::from_sorted(exec.map_chunks(grid.n_lines(), |lines| regularity_filter_lines(grid, params, lines)))
}

/// Length-threshold baseline: keeps edges strictly shorter than
/// `params.naive_length`.
pub fn naive_filter(
    edges: impl IntoIterator<Item = CandidateEdge>,
    params: &FilterParams,
    grid: &PulseGrid,
) -> EdgeSet {
    EdgeSet::from_sorted(naive_keys(edges, params, grid))
}

fn naive_keys(edges: impl IntoIterator<Item = CandidateEdge>, params: &FilterParams, grid: &PulseGrid) -> Vec<EdgeKey> {
    edges
        .into_iter()
        .filter(|e| grid.position(e.ia).distance(grid.position(e.ib)) < params.naive_length)
        .map(|e| EdgeKey::from(&e))
        .collect()
}

pub fn naive_filter_grid<E: Executor>(grid: &PulseGrid, params: &FilterParams, exec: &E) -> EdgeSet {
    EdgeSet::from_sorted(
        exec.map_chunks(grid.n_lines(), |lines| naive_keys(grid.candidate_edges_in_lines(lines), params, grid)),
    )
}

/// Vertex to incident edge lookup over an [`EdgeSet`].
#[derive(Debug, Clone)]
pub struct Incidence {
    offsets: Vec<u32>,
    edges: Vec<u32>,
}

impl Incidence {
    pub fn new(n_vertices: usize, set: &EdgeSet) -> Self {
        let mut offsets = alloc::vec![0u32; n_vertices + 1];
        for k in set.iter() {
            offsets[k.a as usize + 1] += 1;
            offsets[k.b as usize + 1] += 1;
        }
        for i in 0..n_vertices {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut edges = alloc::vec![0u32; set.len() * 2];
        for (i, k) in set.iter().enumerate() {
            for v in [k.a, k.b] {
                edges[fill[v as usize] as usize] = i as u32;
                fill[v as usize] += 1;
            }
        }
        Incidence { offsets, edges }
    }

    /// Indices (into the set) of edges incident to `v`.
    pub fn incident(&self, v: u32) -> &[u32] {
        &self.edges[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }
}

/// Whether `edge` has an aligned neighbour in `set` at either endpoint.
fn has_aligned_neighbor(grid: &PulseGrid, set: &EdgeSet, inc: &Incidence, edge: EdgeKey, epsilon: f64) -> bool {
    let keys = set.as_slice();
    [edge.a, edge.b].into_iter().any(|shared| {
        let Some((u, _)) = unit_between(grid, shared, edge.other(shared)) else {
            return false;
        };
        inc.incident(shared).iter().any(|&j| {
            let other = keys[j as usize];
            if other == edge {
                return false;
            }
            match unit_between(grid, shared, other.other(shared)) {
                Some((w, _)) => 1.0 - u.dot(w).abs() < epsilon,
                None => false,
            }
        })
    })
}

/// Isolated-edge pass over `set`.
///
/// Edges in `exempt` are kept unconditionally; every other edge survives only
/// if some other edge of `set` shares one endpoint with it and is aligned
/// within `epsilon`. All decisions are taken against the input set.
pub fn isolated_edge_pass<E: Executor>(
    grid: &PulseGrid,
    set: &EdgeSet,
    exempt: &EdgeSet,
    epsilon: f64,
    exec: &E,
) -> EdgeSet {
    let inc = Incidence::new(grid.n_echoes(), set);
    let keys = set.as_slice();
    EdgeSet::from_sorted(exec.map_chunks(keys.len(), |range| {
        keys[range]
            .iter()
            .copied()
            .filter(|&k| exempt.contains(k) || has_aligned_neighbor(grid, set, &inc, k, epsilon))
            .collect()
    }))
}

/// Isolated-edge pass with no exemptions.
pub fn regularize_isolated(grid: &PulseGrid, kept: &EdgeSet, params: &FilterParams) -> EdgeSet {
    isolated_edge_pass(grid, kept, &EdgeSet::new(), params.epsilon, &crate::exec::Sequential)
}
