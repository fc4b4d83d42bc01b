//! Triangle extraction and wedge coplanarity filtering.
//!
//! Each lattice cell anchored at pulse `p = (s, r)` holds two triangles
//! sharing the diagonal `p -> p + Dd`:
//!
//! ```text
//!   p+Ds ---- p+Dd        lower: (p, p+Ds, p+Dd)
//!    |      /  |          upper: (p, p+Dtheta, p+Dd)
//!    |    /    |
//!    p ----- p+Dtheta
//! ```
//!
//! A wedge is one lower and one upper triangle on the same diagonal echo
//! pair. Its neighbours are the wedges of the cells at `(s, r +- 1)` (the
//! `Dtheta` group) and `(s +- 1, r)` (the `Ds` group) that share the
//! corresponding cell side echo for echo.

use alloc::vec::Vec;
use core::ops::Range;

use crate::edgefilter::{EdgeKey, EdgeSet};
use crate::exec::Executor;
use crate::geom::Vec3;
use crate::grid::{EchoRef, GridError, PulseGrid};

/// Triangles with area at or below this are dropped as degenerate (m^2).
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Wedge normal sums shorter than this make the wedge irregular.
pub const MIN_WEDGE_NORMAL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriangleVariant {
    /// `(p, p+Ds, p+Dd)`
    Lower,
    /// `(p, p+Dtheta, p+Dd)`
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    /// Global echo indices at `p`, the side pulse, and `p+Dd`.
    pub vertices: [u32; 3],
    pub anchor: (usize, usize),
    pub variant: TriangleVariant,
    /// Unit normal facing the sensor position of the anchor echo.
    pub normal: Vec3,
}

impl Triangle {
    pub fn edges(&self) -> [EdgeKey; 3] {
        let [a, b, c] = self.vertices;
        [EdgeKey::new(a, b), EdgeKey::new(b, c), EdgeKey::new(a, c)]
    }

    pub fn echo_refs(&self, grid: &PulseGrid) -> Result<[EchoRef; 3], GridError> {
        let [a, b, c] = self.vertices;
        Ok([grid.echo_ref(a)?, grid.echo_ref(b)?, grid.echo_ref(c)?])
    }

    /// Vertex triple sorted ascending, the triangle's identity.
    pub fn key(&self) -> [u32; 3] {
        let mut v = self.vertices;
        v.sort_unstable();
        v
    }
}

/// Sensor-facing unit normal of the triangle `a, b, c`, or `None` if
/// degenerate.
pub fn triangle_normal(grid: &PulseGrid, [a, b, c]: [u32; 3]) -> Option<Vec3> {
    let (pa, pb, pc) = (grid.position(a), grid.position(b), grid.position(c));
    let n = (pb - pa).cross(pc - pa);
    let len = n.norm();
    if len.is_nan() || len * 0.5 <= MIN_TRIANGLE_AREA {
        return None;
    }
    let n = n * (1.0 / len);
    let centroid = (pa + pb + pc) * (1.0 / 3.0);
    let sensor = grid.pulse_at(grid.pulse_of(a)).origin;
    Some(if n.dot(sensor - centroid) < 0.0 { -n } else { n })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleSet {
    /// Ordered by cell (row-major), diagonal echo pair, then lower before
    /// upper.
    pub triangles: Vec<Triangle>,
    /// Closed edge triplets rejected for having (near) zero area.
    pub degenerate: usize,
}

impl TriangleSet {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

fn cell_rows(grid: &PulseGrid) -> usize {
    if grid.n_steps() < 2 {
        0
    } else {
        grid.n_lines().saturating_sub(1)
    }
}

fn extract_rows(grid: &PulseGrid, kept: &EdgeSet, rows: Range<usize>) -> Vec<(Triangle, bool)> {
    let mut out = Vec::new();
    for s in rows {
        for r in 0..grid.n_steps() - 1 {
            let p = grid.echo_span(grid.pulse_index(s, r));
            let side_s = grid.echo_span(grid.pulse_index(s + 1, r));
            let side_t = grid.echo_span(grid.pulse_index(s, r + 1));
            let diag = grid.echo_span(grid.pulse_index(s + 1, r + 1));
            for a in p.clone() {
                let a = a as u32;
                for c in diag.clone() {
                    let c = c as u32;
                    if !kept.contains(EdgeKey::new(a, c)) {
                        continue;
                    }
                    for (side, variant) in
                        [(side_s.clone(), TriangleVariant::Lower), (side_t.clone(), TriangleVariant::Upper)]
                    {
                        for b in side {
                            let b = b as u32;
                            if kept.contains(EdgeKey::new(a, b)) && kept.contains(EdgeKey::new(b, c)) {
                                let vertices = [a, b, c];
                                match triangle_normal(grid, vertices) {
                                    Some(normal) => {
                                        out.push((Triangle { vertices, anchor: (s, r), variant, normal }, true))
                                    }
                                    None => out.push((
                                        Triangle { vertices, anchor: (s, r), variant, normal: Vec3::ZERO },
                                        false,
                                    )),
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Every lattice triangle whose three boundary edges are in `kept`.
pub fn extract_triangles<E: Executor>(grid: &PulseGrid, kept: &EdgeSet, exec: &E) -> TriangleSet {
    let all = exec.map_chunks(cell_rows(grid), |rows| extract_rows(grid, kept, rows));
    let mut set = TriangleSet::default();
    for (t, ok) in all {
        if ok {
            set.triangles.push(t);
        } else {
            set.degenerate += 1;
        }
    }
    set
}

/// Lower and upper triangle sharing one diagonal echo pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge {
    pub anchor: (usize, usize),
    /// Echoes at `p`, `p+Ds`, `p+Dtheta`, `p+Dd`.
    pub corners: [u32; 4],
    /// Indices into the triangle list the wedge was built from.
    pub lower: usize,
    pub upper: usize,
    /// Normalised sum of the two triangle normals; `None` when they cancel.
    pub normal: Option<Vec3>,
}

/// Wedges grouped by cell for neighbour lookup.
#[derive(Debug, Clone, Default)]
pub struct WedgeIndex {
    n_steps: usize,
    n_rows: usize,
    wedges: Vec<Wedge>,
    /// `cell_offsets[c]..cell_offsets[c + 1]` are the wedges of cell `c`.
    cell_offsets: Vec<u32>,
}

/// Compatible neighbours, `[r + 1, r - 1]` in the `Dtheta` group and
/// `[s + 1, s - 1]` in the `Ds` group. Usually at most one wedge per slot;
/// several only occur with multi-echo pulses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WedgeNeighbors {
    pub dtheta: [Vec<usize>; 2],
    pub ds: [Vec<usize>; 2],
}

impl WedgeNeighbors {
    pub fn count(&self) -> usize {
        self.dtheta.iter().chain(&self.ds).map(Vec::len).sum()
    }
}

impl WedgeIndex {
    /// Pairs up lower and upper triangles per diagonal. `triangles` must be
    /// ordered as [`extract_triangles`] emits them.
    pub fn build(grid: &PulseGrid, triangles: &[Triangle]) -> Self {
        let n_rows = cell_rows(grid);
        let n_steps = grid.n_steps();
        let n_cells = n_rows * n_steps.saturating_sub(1);
        let mut wedges = Vec::new();
        let mut cell_offsets = Vec::with_capacity(n_cells + 1);
        cell_offsets.push(0u32);
        let mut i = 0;
        for cell in 0..n_cells {
            let anchor = (cell / (n_steps - 1), cell % (n_steps - 1));
            while i < triangles.len() && triangles[i].anchor == anchor {
                // one diagonal group: consecutive triangles with same a and c
                let [a, _, c] = triangles[i].vertices;
                let start = i;
                while i < triangles.len()
                    && triangles[i].anchor == anchor
                    && triangles[i].vertices[0] == a
                    && triangles[i].vertices[2] == c
                {
                    i += 1;
                }
                let group = start..i;
                for lo in group.clone().filter(|&k| triangles[k].variant == TriangleVariant::Lower) {
                    for up in group.clone().filter(|&k| triangles[k].variant == TriangleVariant::Upper) {
                        let (tl, tu) = (&triangles[lo], &triangles[up]);
                        wedges.push(Wedge {
                            anchor,
                            corners: [a, tl.vertices[1], tu.vertices[1], c],
                            lower: lo,
                            upper: up,
                            normal: (tl.normal + tu.normal)
                                .normalized()
                                .filter(|_| (tl.normal + tu.normal).norm() >= MIN_WEDGE_NORMAL),
                        });
                    }
                }
            }
            cell_offsets.push(wedges.len() as u32);
        }
        debug_assert_eq!(i, triangles.len(), "triangles out of cell order");
        WedgeIndex { n_steps, n_rows, wedges, cell_offsets }
    }

    pub fn wedges(&self) -> &[Wedge] {
        &self.wedges
    }

    pub fn len(&self) -> usize {
        self.wedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wedges.is_empty()
    }

    fn cell(&self, s: usize, r: usize) -> Range<usize> {
        if s >= self.n_rows || r + 1 >= self.n_steps {
            return 0..0;
        }
        let c = s * (self.n_steps - 1) + r;
        self.cell_offsets[c] as usize..self.cell_offsets[c + 1] as usize
    }

    fn matching(&self, s: Option<usize>, r: Option<usize>, pred: impl Fn(&[u32; 4]) -> bool) -> Vec<usize> {
        match (s, r) {
            (Some(s), Some(r)) => self.cell(s, r).filter(|&k| pred(&self.wedges[k].corners)).collect(),
            _ => Vec::new(),
        }
    }

    pub fn neighbors(&self, w: usize) -> WedgeNeighbors {
        let Wedge { anchor: (s, r), corners: [a, b, t, c], .. } = self.wedges[w];
        WedgeNeighbors {
            dtheta: [
                self.matching(Some(s), Some(r + 1), |n| n[0] == t && n[1] == c),
                self.matching(Some(s), r.checked_sub(1), |n| n[2] == a && n[3] == b),
            ],
            ds: [
                self.matching(Some(s + 1), Some(r), |n| n[0] == b && n[2] == c),
                self.matching(s.checked_sub(1), Some(r), |n| n[1] == a && n[3] == t),
            ],
        }
    }

    /// Keep decision for wedge `w`.
    pub fn keep(&self, w: usize, omega: f64) -> bool {
        let Some(normal) = self.wedges[w].normal else {
            return false;
        };
        let n = self.neighbors(w);
        let normals = |slots: &[Vec<usize>; 2]| -> Vec<Vec3> {
            slots.iter().flatten().filter_map(|&k| self.wedges[k].normal).collect()
        };
        keep_wedge(normal, &normals(&n.dtheta), &normals(&n.ds), omega)
    }
}

/// True iff at least one normal in each group is coplanar with `normal`
/// within `1 - |dot| < omega`.
pub fn keep_wedge(normal: Vec3, dtheta: &[Vec3], ds: &[Vec3], omega: f64) -> bool {
    let regular = |group: &[Vec3]| group.iter().any(|m| 1.0 - normal.dot(*m).abs() < omega);
    regular(dtheta) && regular(ds)
}

#[derive(Debug, Clone, Default)]
pub struct WedgeFilterOutcome {
    pub triangles: Vec<Triangle>,
    pub wedges: usize,
    pub kept_wedges: usize,
}

/// Keeps triangles belonging to at least one kept wedge.
///
/// Wedge decisions are all taken on the input triangle set; there is no
/// second pass over the survivors.
pub fn filter_triangles<E: Executor>(
    grid: &PulseGrid,
    triangles: &[Triangle],
    omega: f64,
    exec: &E,
) -> WedgeFilterOutcome {
    let index = WedgeIndex::build(grid, triangles);
    let kept: Vec<usize> = exec.map_chunks(index.len(), |range| range.filter(|&w| index.keep(w, omega)).collect());
    let mut survive = alloc::vec![false; triangles.len()];
    for &w in &kept {
        survive[index.wedges[w].lower] = true;
        survive[index.wedges[w].upper] = true;
    }
    WedgeFilterOutcome {
        triangles: triangles.iter().zip(&survive).filter(|(_, &s)| s).map(|(t, _)| *t).collect(),
        wedges: index.len(),
        kept_wedges: kept.len(),
    }
}

/// Edges of every triangle in `triangles`.
pub fn triangle_edges(triangles: &[Triangle]) -> EdgeSet {
    triangles.iter().flat_map(|t| t.edges()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::grid::test_support::flat_grid;
    use crate::grid::{EchoSample, Pulse, PulseGridBuilder, ScannerMeta};

    fn all_edges(g: &PulseGrid) -> EdgeSet {
        g.candidate_edges().map(|e| EdgeKey::from(&e)).collect()
    }

    #[test]
    fn full_plane_yields_two_triangles_per_cell() {
        let g = flat_grid(6, 7, |_, _| 1);
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        assert_eq!(t.len(), 2 * 5 * 6);
        assert_eq!(t.degenerate, 0);
        for tri in &t.triangles {
            // sensor is above (+z), normal must face it
            assert!(tri.normal.z > 0.99);
        }
    }

    #[test]
    fn missing_edge_removes_one_triangle() {
        let g = flat_grid(2, 2, |_, _| 1);
        // drop (0,0)-(1,0), the Ds side of the lower triangle
        let edges: EdgeSet = all_edges(&g).iter().filter(|k| *k != EdgeKey::new(0, 2)).collect();
        let t = extract_triangles(&g, &edges, &Sequential);
        assert_eq!(t.len(), 1);
        assert_eq!(t.triangles[0].variant, TriangleVariant::Upper);
        assert!(extract_triangles(&g, &EdgeSet::new(), &Sequential).is_empty());
    }

    #[test]
    fn neighbor_counts() {
        let g = flat_grid(5, 5, |_, _| 1);
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        let idx = WedgeIndex::build(&g, &t.triangles);
        assert_eq!(idx.len(), 16);
        let find = |s, r| idx.wedges().iter().position(|w| w.anchor == (s, r)).unwrap();
        let interior = idx.neighbors(find(1, 1));
        assert_eq!(interior.count(), 4);
        assert_eq!(interior.dtheta.iter().filter(|v| !v.is_empty()).count(), 2);
        assert_eq!(interior.ds.iter().filter(|v| !v.is_empty()).count(), 2);
        let corner = idx.neighbors(find(0, 0));
        assert_eq!(corner.count(), 2);
        assert!(corner.dtheta[1].is_empty() && corner.ds[1].is_empty());

        let g = flat_grid(2, 2, |_, _| 1);
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        let idx = WedgeIndex::build(&g, &t.triangles);
        assert_eq!(idx.len(), 1);
        assert_eq!(idx.neighbors(0).count(), 0);
    }

    #[test]
    fn keep_wedge_needs_both_groups() {
        let n = Vec3::Z;
        assert!(keep_wedge(n, &[n], &[-n], 1e-3));
        assert!(!keep_wedge(n, &[n, n], &[], 1e-3));
        let five = 5.0f64.to_radians();
        let tilted = Vec3::new(libm::sin(five), 0.0, libm::cos(five));
        assert!(1.0 - libm::cos(five) > 3.8e-3);
        assert!(!keep_wedge(n, &[tilted], &[n], 1e-3));
    }

    #[test]
    fn planar_interior_survives_and_lone_wedge_dies() {
        let g = flat_grid(6, 6, |_, _| 1);
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        let out = filter_triangles(&g, &t.triangles, 1e-3, &Sequential);
        assert_eq!(out.triangles.len(), t.len());

        let g = flat_grid(2, 2, |_, _| 1);
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        assert_eq!(t.len(), 2);
        assert!(filter_triangles(&g, &t.triangles, 1e-3, &Sequential).triangles.is_empty());
    }

    #[test]
    fn wedge_normal_is_symmetric_in_its_triangles() {
        let g = flat_grid(2, 2, |_, _| 1);
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        let mut swapped = t.triangles.clone();
        swapped.swap(0, 1);
        let n1 = (t.triangles[0].normal + t.triangles[1].normal).normalized().unwrap();
        let n2 = (swapped[0].normal + swapped[1].normal).normalized().unwrap();
        assert!((n1.dot(n2).abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_triangle_is_degenerate() {
        // all echoes on one line: every triangle degenerate
        let mut b = PulseGridBuilder::new(2, 2, ScannerMeta { pulses_per_line: 2.0 });
        for i in 0..4 {
            b.push(
                Pulse {
                    origin: Vec3::new(i as f64, 0.0, 1.0),
                    direction: Vec3::new(0.0, 0.0, -1.0),
                    theta: 0.0,
                    time: 0.0,
                },
                &[EchoSample::new(1.0)],
            )
            .unwrap();
        }
        let g = b.build().unwrap();
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        assert!(t.is_empty());
        assert_eq!(t.degenerate, 2);
    }

    #[test]
    fn single_pass_semantics() {
        // 2x4 cells in one row: the end wedges have a Dtheta neighbour only on
        // one side and no Ds neighbours, so every wedge is discarded. A
        // 3-row strip keeps all of them.
        let g = flat_grid(2, 5, |_, _| 1);
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        assert!(filter_triangles(&g, &t.triangles, 1e-3, &Sequential).triangles.is_empty());

        // Removing one wedge from the middle of a 3x3-cell block: decisions
        // use the input set, so its neighbours still see each other exactly
        // as before and only lose the removed wedge as a candidate.
        let g = flat_grid(4, 4, |_, _| 1);
        let t = extract_triangles(&g, &all_edges(&g), &Sequential);
        let once = filter_triangles(&g, &t.triangles, 1e-3, &Sequential);
        assert_eq!(once.triangles.len(), t.len());
        let without_centre: Vec<Triangle> = t.triangles.iter().copied().filter(|x| x.anchor != (1, 1)).collect();
        let out = filter_triangles(&g, &without_centre, 1e-3, &Sequential);
        // (0,1) loses its only Ds neighbour (1,1), likewise (1,0),(1,2),(2,1)
        // lose a whole group; corners keep theirs.
        let survivors: alloc::collections::BTreeSet<(usize, usize)> = out.triangles.iter().map(|x| x.anchor).collect();
        assert!(survivors.contains(&(0, 0)));
        assert!(!survivors.contains(&(0, 1)));
        assert!(!survivors.contains(&(1, 0)));
        // a second pass would cascade further: the corners now lack neighbours
        let twice = filter_triangles(&g, &out.triangles, 1e-3, &Sequential);
        assert!(twice.triangles.len() < out.triangles.len());
    }
}
