//! Simplicial complex assembled from the filter outputs.
//!
//! Every echo of the grid becomes a vertex. Edges and triangles are stored as
//! sorted index tuples, and inserting a triangle inserts its boundary edges.
//! Dimension adaptation is expressed through [`SimplexClass`], never by
//! deleting vertices.

use alloc::vec::Vec;

use crate::edgefilter::EdgeSet;
use crate::geom::Vec3;
use crate::grid::PulseGrid;
use crate::trifilter::Triangle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SimplexClass {
    /// Triangle, or a face of one.
    InTriangle,
    /// Edge not on any triangle, or a vertex whose highest coface is such an
    /// edge.
    FreeEdge,
    /// Vertex with no incident edge.
    FreeVertex,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("simplex references vertex {index}, complex has {n_vertices}")]
    Dangling { index: u32, n_vertices: usize },
    #[error("simplex repeats vertex {0}")]
    RepeatedVertex(u32),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Census {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub free_vertices: usize,
    pub free_edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    positions: Vec<Vec3>,
    edges: Vec<[u32; 2]>,
    triangles: Vec<[u32; 3]>,
    vertex_class: Vec<SimplexClass>,
    edge_class: Vec<SimplexClass>,
}

impl SimplicialComplex {
    /// Builds a complex over `positions`, closing triangles under their
    /// boundary edges and dropping duplicates.
    pub fn from_parts(
        positions: Vec<Vec3>,
        edges: impl IntoIterator<Item = [u32; 2]>,
        triangles: impl IntoIterator<Item = [u32; 3]>,
    ) -> Result<Self, ComplexError> {
        let n = positions.len();
        let check = |i: u32| {
            if (i as usize) < n {
                Ok(i)
            } else {
                Err(ComplexError::Dangling { index: i, n_vertices: n })
            }
        };

        let mut tris = Vec::new();
        for t in triangles {
            for &v in &t {
                check(v)?;
            }
            let mut t = t;
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] {
                return Err(ComplexError::RepeatedVertex(t[1]));
            }
            tris.push(t);
        }
        tris.sort_unstable();
        tris.dedup();

        let mut face_edges: Vec<[u32; 2]> = tris.iter().flat_map(|&[a, b, c]| [[a, b], [b, c], [a, c]]).collect();
        face_edges.sort_unstable();
        face_edges.dedup();

        let mut all_edges = face_edges.clone();
        for [u, v] in edges {
            check(u)?;
            check(v)?;
            if u == v {
                return Err(ComplexError::RepeatedVertex(u));
            }
            all_edges.push(if u < v { [u, v] } else { [v, u] });
        }
        all_edges.sort_unstable();
        all_edges.dedup();

        let edge_class: Vec<SimplexClass> =
            all_edges
                .iter()
                .map(|e| {
                    if face_edges.binary_search(e).is_ok() {
                        SimplexClass::InTriangle
                    } else {
                        SimplexClass::FreeEdge
                    }
                })
                .collect();

        let mut vertex_class = alloc::vec![SimplexClass::FreeVertex; n];
        for (e, class) in all_edges.iter().zip(&edge_class) {
            for &v in e {
                let slot = &mut vertex_class[v as usize];
                *slot = (*slot).min(*class);
            }
        }

        Ok(SimplicialComplex { positions, edges: all_edges, triangles: tris, vertex_class, edge_class })
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn vertex_class(&self) -> &[SimplexClass] {
        &self.vertex_class
    }

    pub fn edge_class(&self) -> &[SimplexClass] {
        &self.edge_class
    }

    pub fn n_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn contains_edge(&self, u: u32, v: u32) -> bool {
        let e = if u < v { [u, v] } else { [v, u] };
        self.edges.binary_search(&e).is_ok()
    }

    /// Edges that are not a face of any triangle.
    pub fn free_edges(&self) -> impl Iterator<Item = [u32; 2]> + '_ {
        self.edges.iter().zip(&self.edge_class).filter(|(_, c)| **c == SimplexClass::FreeEdge).map(|(e, _)| *e)
    }

    pub fn census(&self) -> Census {
        Census {
            vertices: self.positions.len(),
            edges: self.edges.len(),
            triangles: self.triangles.len(),
            free_vertices: self.vertex_class.iter().filter(|c| **c == SimplexClass::FreeVertex).count(),
            free_edges: self.edge_class.iter().filter(|c| **c == SimplexClass::FreeEdge).count(),
        }
    }

    /// Checks the closure and uniqueness invariants.
    pub fn is_closed(&self) -> bool {
        let n = self.positions.len() as u32;
        let sorted_unique = |w: &[[u32; 2]]| w.windows(2).all(|p| p[0] < p[1]);
        self.edges.iter().all(|&[a, b]| a < b && b < n)
            && sorted_unique(&self.edges)
            && self.triangles.windows(2).all(|p| p[0] < p[1])
            && self.triangles.iter().all(|&[a, b, c]| {
                a < b && b < c && self.contains_edge(a, b) && self.contains_edge(b, c) && self.contains_edge(a, c)
            })
    }
}

/// Assembles the complex over every echo of `grid`.
pub fn assemble(grid: &PulseGrid, edges: &EdgeSet, triangles: &[Triangle]) -> Result<SimplicialComplex, ComplexError> {
    let positions = grid.all_echoes().iter().map(|e| e.position).collect();
    SimplicialComplex::from_parts(positions, edges.iter().map(|k| [k.a, k.b]), triangles.iter().map(|t| t.vertices))
}
