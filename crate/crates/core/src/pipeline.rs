//! The three reconstruction pipelines.

use crate::complex::{assemble, ComplexError, SimplicialComplex};
use crate::edgefilter::{
    isolated_edge_pass, naive_filter_grid, regularity_filter, EdgeSet, FilterParams, ParamError, Variant,
};
use crate::exec::{Executor, Sequential};
use crate::grid::PulseGrid;
use crate::trifilter::{extract_triangles, filter_triangles, triangle_edges, Triangle};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Stage counters collected while reconstructing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    /// Edges surviving the length or regularity filter.
    pub filtered_edges: usize,
    /// Triangles extracted from those edges.
    pub extracted_triangles: usize,
    pub degenerate_triangles: usize,
    pub wedges: usize,
    pub kept_wedges: usize,
    /// Edges removed by the isolated-edge pass.
    pub isolated_removed: usize,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub params: FilterParams,
    /// Edges out of the first filtering stage.
    pub filtered_edges: EdgeSet,
    /// Final triangles, in extraction order.
    pub triangles: alloc::vec::Vec<Triangle>,
    pub complex: SimplicialComplex,
    pub diagnostics: Diagnostics,
}

/// Runs the pipeline selected by `params.variant` on the calling thread.
pub fn reconstruct(grid: &PulseGrid, params: &FilterParams) -> Result<Reconstruction, ReconstructError> {
    reconstruct_with(grid, params, &Sequential)
}

/// Runs the pipeline selected by `params.variant`.
///
/// - `naive`: edges shorter than `naive_length`, plus every lattice triangle
///   closed by them.
/// - `edges`: C0/C1 regularity filter, plus every lattice triangle closed by
///   the surviving edges.
/// - `full`: as `edges`, then the wedge filter on triangles, then the
///   isolated-edge pass on edges that are not sides of a surviving triangle.
pub fn reconstruct_with<E: Executor>(
    grid: &PulseGrid,
    params: &FilterParams,
    exec: &E,
) -> Result<Reconstruction, ReconstructError> {
    params.validate()?;
    let filtered = match params.variant {
        Variant::Naive => naive_filter_grid(grid, params, exec),
        Variant::Edges | Variant::Full => regularity_filter(grid, params, exec),
    };
    let extracted = extract_triangles(grid, &filtered, exec);
    let mut diagnostics = Diagnostics {
        filtered_edges: filtered.len(),
        extracted_triangles: extracted.len(),
        degenerate_triangles: extracted.degenerate,
        ..Diagnostics::default()
    };

    let (edges, triangles) = match params.variant {
        Variant::Naive | Variant::Edges => (filtered.clone(), extracted.triangles),
        Variant::Full => {
            let wedged = filter_triangles(grid, &extracted.triangles, params.omega, exec);
            diagnostics.wedges = wedged.wedges;
            diagnostics.kept_wedges = wedged.kept_wedges;
            let exempt = triangle_edges(&wedged.triangles);
            let edges = isolated_edge_pass(grid, &filtered, &exempt, params.epsilon, exec);
            diagnostics.isolated_removed = filtered.len() - edges.len();
            (edges, wedged.triangles)
        }
    };

    let complex = assemble(grid, &edges, &triangles)?;
    Ok(Reconstruction { params: *params, filtered_edges: filtered, triangles, complex, diagnostics })
}
