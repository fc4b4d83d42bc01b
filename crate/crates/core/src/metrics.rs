//! Scoring reconstructions against ground-truth echo labels, and parameter
//! sweeps.
//!
//! An edge is correct when both endpoints carry the same label. For scatter
//! labels (foliage-like clouds of small spheres) the endpoints must in
//! addition be close enough to come from the same sphere. A triangle is
//! correct when all three corners share a label that marks a surface.
//!
//! Recall is measured against the lattice: the reference edges are all
//! candidate edges that would be correct, and the reference triangles are all
//! non-degenerate lattice triangles built from reference surface edges.
//! A ratio with a zero denominator is reported as 1 (precision) or 0 (recall)
//! together with a flag, so tables never contain NaN.

use alloc::vec::Vec;

use crate::complex::{Census, SimplicialComplex};
use crate::edgefilter::{EdgeKey, EdgeSet, FilterParams, ParamError, Variant};
use crate::exec::Executor;
use crate::grid::PulseGrid;
use crate::pipeline::{reconstruct_with, ReconstructError};
use crate::trifilter::extract_triangles;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("echo {0} has no ground-truth label")]
    Unlabelled(u32),
    #[error("complex has {complex} vertices but the grid has {grid} echoes")]
    VertexMismatch { complex: usize, grid: usize },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("parameter `{0}` has no values")]
    EmptyAxis(&'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
}

impl From<ParamError> for SweepError {
    fn from(e: ParamError) -> Self {
        SweepError::Reconstruct(e.into())
    }
}

/// What a ground-truth label stands for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelKind {
    Surface,
    /// Cloud of small spheres of the given radius.
    Scatter {
        point_radius: f64,
    },
}

/// Label → kind table. Labels not listed are surfaces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabelKinds {
    scatter: Vec<(u32, f64)>,
}

impl LabelKinds {
    pub fn surfaces_only() -> Self {
        LabelKinds::default()
    }

    pub fn with_scatter(scatter: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut scatter: Vec<_> = scatter.into_iter().collect();
        scatter.sort_by_key(|e| e.0);
        scatter.dedup_by_key(|e| e.0);
        LabelKinds { scatter }
    }

    pub fn kind(&self, label: u32) -> LabelKind {
        match self.scatter.binary_search_by_key(&label, |e| e.0) {
            Ok(i) => LabelKind::Scatter { point_radius: self.scatter[i].1 },
            Err(_) => LabelKind::Surface,
        }
    }
}

/// Precision and recall of one simplex dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Score {
    /// Correct simplices in the complex.
    pub correct: usize,
    /// All simplices of this dimension in the complex.
    pub total: usize,
    /// Size of the lattice reference set.
    pub reference: usize,
    pub precision: f64,
    pub recall: f64,
    /// `total == 0`; precision is reported as 1.
    pub precision_undefined: bool,
    /// `reference == 0`; recall is reported as 0.
    pub recall_undefined: bool,
}

impl Score {
    pub fn new(correct: usize, total: usize, reference: usize) -> Self {
        debug_assert!(correct <= total && correct <= reference);
        let ratio = |n: usize, d: usize, empty: f64| if d == 0 { empty } else { n as f64 / d as f64 };
        Score {
            correct,
            total,
            reference,
            precision: ratio(correct, total, 1.0),
            recall: ratio(correct, reference, 0.0),
            precision_undefined: total == 0,
            recall_undefined: reference == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    /// Parameters of the run, when the complex came from a pipeline.
    pub params: Option<FilterParams>,
    pub census: Census,
    pub edges: Score,
    pub triangles: Score,
    /// Edges whose endpoints carry different labels.
    pub cross_label_edges: usize,
    /// Wall-clock time of the reconstruction, filled in by callers that
    /// measure it.
    pub runtime_seconds: Option<f64>,
}

/// Precomputed lattice reference sets for one labelled grid.
pub struct Evaluator<'g> {
    grid: &'g PulseGrid,
    kinds: LabelKinds,
    labels: Vec<u32>,
    reference_edges: usize,
    reference_triangles: usize,
}

impl<'g> Evaluator<'g> {
    pub fn new<E: Executor>(grid: &'g PulseGrid, kinds: LabelKinds, exec: &E) -> Result<Self, EvalError> {
        let labels = grid
            .all_echoes()
            .iter()
            .enumerate()
            .map(|(i, e)| e.label.ok_or(EvalError::Unlabelled(i as u32)))
            .collect::<Result<Vec<u32>, _>>()?;

        let mut this = Evaluator { grid, kinds, labels, reference_edges: 0, reference_triangles: 0 };
        let mut reference = 0;
        let mut surface = Vec::new();
        for e in grid.candidate_edges() {
            if this.edge_correct(e.ia, e.ib) {
                reference += 1;
                if this.kinds.kind(this.labels[e.ia as usize]) == LabelKind::Surface {
                    surface.push(EdgeKey::new(e.ia, e.ib));
                }
            }
        }
        this.reference_edges = reference;
        this.reference_triangles = extract_triangles(grid, &EdgeSet::from_sorted(surface), exec).len();
        Ok(this)
    }

    pub fn grid(&self) -> &PulseGrid {
        self.grid
    }

    fn edge_correct(&self, u: u32, v: u32) -> bool {
        let label = self.labels[u as usize];
        if label != self.labels[v as usize] {
            return false;
        }
        match self.kinds.kind(label) {
            LabelKind::Surface => true,
            LabelKind::Scatter { point_radius } => {
                self.grid.position(u).distance(self.grid.position(v)) <= 2.0 * point_radius
            }
        }
    }

    fn triangle_correct(&self, [a, b, c]: [u32; 3]) -> bool {
        let label = self.labels[a as usize];
        label == self.labels[b as usize]
            && label == self.labels[c as usize]
            && self.kinds.kind(label) == LabelKind::Surface
    }

    pub fn evaluate(&self, complex: &SimplicialComplex) -> Result<EvalReport, EvalError> {
        if complex.n_vertices() != self.labels.len() {
            return Err(EvalError::VertexMismatch { complex: complex.n_vertices(), grid: self.labels.len() });
        }
        let mut correct_edges = 0;
        let mut cross = 0;
        for &[u, v] in complex.edges() {
            if self.labels[u as usize] != self.labels[v as usize] {
                cross += 1;
            } else if self.edge_correct(u, v) {
                correct_edges += 1;
            }
        }
        let correct_triangles = complex.triangles().iter().filter(|t| self.triangle_correct(**t)).count();

        Ok(EvalReport {
            params: None,
            census: complex.census(),
            edges: Score::new(correct_edges, complex.edges().len(), self.reference_edges),
            triangles: Score::new(correct_triangles, complex.triangles().len(), self.reference_triangles),
            cross_label_edges: cross,
            runtime_seconds: None,
        })
    }
}

/// Scores `complex` against the labels of `grid`.
///
/// Fails if any echo is unlabelled.
pub fn evaluate<E: Executor>(
    complex: &SimplicialComplex,
    grid: &PulseGrid,
    kinds: &LabelKinds,
    exec: &E,
) -> Result<EvalReport, EvalError> {
    Evaluator::new(grid, kinds.clone(), exec)?.evaluate(complex)
}

/// Value lists whose Cartesian product defines a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub variant: Vec<Variant>,
    pub alpha_m: Vec<f64>,
    pub lambda: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub omega: Vec<f64>,
    pub naive_length: Vec<f64>,
}

impl ParamGrid {
    /// A one-point grid at `base`.
    pub fn single(base: FilterParams) -> Self {
        ParamGrid {
            variant: alloc::vec![base.variant],
            alpha_m: alloc::vec![base.alpha_m],
            lambda: alloc::vec![base.lambda],
            epsilon: alloc::vec![base.epsilon],
            omega: alloc::vec![base.omega],
            naive_length: alloc::vec![base.naive_length],
        }
    }

    /// All parameter combinations, with the last axis (`naive_length`)
    /// varying fastest and axes in declaration order.
    pub fn combinations(&self) -> Result<Vec<FilterParams>, SweepError> {
        let axes: [(&'static str, usize); 6] = [
            ("variant", self.variant.len()),
            ("alpha_m", self.alpha_m.len()),
            ("lambda", self.lambda.len()),
            ("epsilon", self.epsilon.len()),
            ("omega", self.omega.len()),
            ("naive_length", self.naive_length.len()),
        ];
        if let Some((name, _)) = axes.iter().find(|(_, n)| *n == 0) {
            return Err(SweepError::EmptyAxis(name));
        }
        let mut out = Vec::with_capacity(axes.iter().map(|a| a.1).product());
        for &variant in &self.variant {
            for &alpha_m in &self.alpha_m {
                for &lambda in &self.lambda {
                    for &epsilon in &self.epsilon {
                        for &omega in &self.omega {
                            for &naive_length in &self.naive_length {
                                let p = FilterParams { alpha_m, lambda, epsilon, omega, naive_length, variant };
                                p.validate()?;
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Reconstructs and scores `grid` once per combination of `params`, in
/// [`ParamGrid::combinations`] order.
pub fn sweep<E: Executor>(
    grid: &PulseGrid,
    params: &ParamGrid,
    kinds: &LabelKinds,
    exec: &E,
) -> Result<Vec<EvalReport>, SweepError> {
    let combos = params.combinations()?;
    let evaluator = Evaluator::new(grid, kinds.clone(), exec)?;
    combos
        .iter()
        .map(|p| {
            let rec = reconstruct_with(grid, p, exec)?;
            let mut report = evaluator.evaluate(&rec.complex)?;
            report.params = Some(*p);
            Ok(report)
        })
        .collect()
}

/// Index of the first set in `sets` that is not a superset of its
/// predecessor, if any.
pub fn inclusion_violation(sets: &[EdgeSet]) -> Option<usize> {
    sets.windows(2).position(|w| !w[0].is_subset(&w[1])).map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::grid::{EchoSample, Pulse, PulseGridBuilder, ScannerMeta};
    use crate::{reconstruct, Vec3};
    use alloc::vec;

    /// Plane z = 0 seen from 10 m above, with per-pulse labels.
    fn labelled(n: usize, label: impl Fn(usize, usize) -> Option<u32>) -> PulseGrid {
        let mut b = PulseGridBuilder::new(n, n, ScannerMeta { pulses_per_line: n as f64 });
        for s in 0..n {
            for r in 0..n {
                let pulse = Pulse {
                    origin: Vec3::new(r as f64 * 0.1, s as f64 * 0.1, 10.0),
                    direction: Vec3::new(0.0, 0.0, -1.0),
                    theta: r as f64,
                    time: (s * n + r) as f64,
                };
                let sample = EchoSample { range: 10.0, label: label(s, r), intensity: None };
                b.push(pulse, &[sample]).unwrap();
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn perfect_plane_scores_one() {
        let g = labelled(10, |_, _| Some(1));
        let rec = reconstruct(&g, &FilterParams::default()).unwrap();
        let r = evaluate(&rec.complex, &g, &LabelKinds::surfaces_only(), &Sequential).unwrap();
        assert_eq!(r.edges.precision, 1.0);
        assert_eq!(r.edges.recall, 1.0);
        assert_eq!(r.triangles.precision, 1.0);
        assert_eq!(r.triangles.recall, 1.0);
        assert_eq!(r.cross_label_edges, 0);
        assert_eq!(r.triangles.reference, 2 * 9 * 9);
    }

    #[test]
    fn vertices_only_complex_flags_precision() {
        let g = labelled(4, |_, _| Some(1));
        let c = SimplicialComplex::from_parts(g.all_echoes().iter().map(|e| e.position).collect(), [], []).unwrap();
        let r = evaluate(&c, &g, &LabelKinds::surfaces_only(), &Sequential).unwrap();
        assert_eq!(r.edges.precision, 1.0);
        assert!(r.edges.precision_undefined);
        assert_eq!(r.edges.recall, 0.0);
        assert!(!r.edges.recall_undefined);
        assert!(r.triangles.precision_undefined);
    }

    #[test]
    fn cross_edge_lowers_precision() {
        let g = labelled(3, |_, r| Some(if r == 0 { 1 } else { 2 }));
        let positions = g.all_echoes().iter().map(|e| e.position).collect();
        // Echo 0 is (0,0) label 1; echo 1 is (0,1) label 2; echo 2 is (0,2) label 2.
        let c = SimplicialComplex::from_parts(positions, [[0, 1], [1, 2]], []).unwrap();
        let r = evaluate(&c, &g, &LabelKinds::surfaces_only(), &Sequential).unwrap();
        assert_eq!(r.cross_label_edges, 1);
        assert_eq!(r.edges.correct, 1);
        assert_eq!(r.edges.precision, 0.5);
    }

    #[test]
    fn unlabelled_echo_is_an_error() {
        let g = labelled(3, |s, r| if (s, r) == (1, 1) { None } else { Some(1) });
        let rec = reconstruct(&g, &FilterParams::default()).unwrap();
        let err = evaluate(&rec.complex, &g, &LabelKinds::surfaces_only(), &Sequential).unwrap_err();
        assert_eq!(err, EvalError::Unlabelled(4));
    }

    #[test]
    fn scatter_triangles_are_never_correct() {
        let g = labelled(5, |_, _| Some(3));
        let rec = reconstruct(&g, &FilterParams::default()).unwrap();
        let kinds = LabelKinds::with_scatter([(3, 0.01)]);
        let r = evaluate(&rec.complex, &g, &kinds, &Sequential).unwrap();
        assert!(r.triangles.total > 0);
        assert_eq!(r.triangles.correct, 0);
        assert!(r.triangles.recall_undefined);
        // Echoes are 0.1 apart, far more than one sphere diameter.
        assert_eq!(r.edges.correct, 0);
        assert_eq!(r.edges.reference, 0);
    }

    #[test]
    fn combinations_cover_the_product_in_order() {
        let mut grid = ParamGrid::single(FilterParams::default());
        grid.alpha_m = vec![0.01, 0.05, 0.1, 0.5];
        grid.lambda = vec![1e-6, 1e-2];
        let combos = grid.combinations().unwrap();
        assert_eq!(combos.len(), 8);
        assert_eq!((combos[0].alpha_m, combos[0].lambda), (0.01, 1e-6));
        assert_eq!((combos[1].alpha_m, combos[1].lambda), (0.01, 1e-2));
        assert_eq!((combos[7].alpha_m, combos[7].lambda), (0.5, 1e-2));
    }

    #[test]
    fn empty_axis_is_an_error() {
        let mut grid = ParamGrid::single(FilterParams::default());
        grid.omega.clear();
        assert_eq!(grid.combinations().unwrap_err(), SweepError::EmptyAxis("omega"));
    }

    #[test]
    fn sweep_emits_one_row_per_combination() {
        let g = labelled(6, |_, _| Some(1));
        let mut grid = ParamGrid::single(FilterParams::default());
        grid.alpha_m = vec![0.01, 0.05, 0.1, 0.5];
        let rows = sweep(&g, &grid, &LabelKinds::surfaces_only(), &Sequential).unwrap();
        assert_eq!(rows.len(), 4);
        for (row, alpha) in rows.iter().zip([0.01, 0.05, 0.1, 0.5]) {
            assert_eq!(row.params.unwrap().alpha_m, alpha);
        }
    }

    #[test]
    fn inclusion_violation_finds_first_shrink() {
        let a = EdgeSet::from_keys(vec![EdgeKey::new(0, 1)]);
        let b = EdgeSet::from_keys(vec![EdgeKey::new(0, 1), EdgeKey::new(1, 2)]);
        assert_eq!(inclusion_violation(&[a.clone(), b.clone()]), None);
        assert_eq!(inclusion_violation(&[a.clone(), b.clone(), a]), Some(2));
    }
}
