//! Report files.
//!
//! Evaluation and reconstruction reports are TOML documents with the
//! following keys (all counts are integers, all ratios reals in `[0, 1]`):
//!
//! | key                      | meaning                                          |
//! |--------------------------|--------------------------------------------------|
//! | `kind`                   | `"eval"` or `"reconstruct"`                      |
//! | `cross_label_edges`      | eval only: edges joining two different labels    |
//! | `runtime_seconds`        | present only when timing was requested           |
//! | `[params]`               | `alpha_m lambda epsilon omega naive_length variant` |
//! | `[census]`               | `vertices edges triangles free_vertices free_edges` |
//! | `[edges]`, `[triangles]` | eval only: `correct total reference precision recall precision_undefined recall_undefined` |
//! | `[diagnostics]`          | reconstruct only: per-stage counters             |
//!
//! Sweep tables are CSV with one header row; see [`SweepRow`] for the
//! columns. `runtime_seconds` is left empty unless timing was requested, so
//! that default outputs are reproducible byte for byte.

use std::io::Write;

use mlsmesh_core::metrics::{EvalReport, Score};
use mlsmesh_core::pipeline::Diagnostics;
use mlsmesh_core::{Census, FilterParams, Reconstruction};
use serde::Serialize;

#[derive(Serialize)]
struct EvalDoc<'a> {
    kind: &'static str,
    cross_label_edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<FilterParams>,
    census: Census,
    edges: &'a Score,
    triangles: &'a Score,
}

#[derive(Serialize)]
struct ReconstructDoc {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<f64>,
    params: FilterParams,
    census: Census,
    diagnostics: Diagnostics,
}

pub fn eval_toml(report: &EvalReport) -> anyhow::Result<String> {
    Ok(toml::to_string(&EvalDoc {
        kind: "eval",
        cross_label_edges: report.cross_label_edges,
        runtime_seconds: report.runtime_seconds,
        params: report.params,
        census: report.census,
        edges: &report.edges,
        triangles: &report.triangles,
    })?)
}

pub fn reconstruct_toml(rec: &Reconstruction, runtime_seconds: Option<f64>) -> anyhow::Result<String> {
    Ok(toml::to_string(&ReconstructDoc {
        kind: "reconstruct",
        runtime_seconds,
        params: rec.params,
        census: rec.complex.census(),
        diagnostics: rec.diagnostics,
    })?)
}

/// One CSV row of an evaluation table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub variant: String,
    pub alpha_m: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub naive_length: f64,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub free_vertices: usize,
    pub free_edges: usize,
    pub cross_label_edges: usize,
    pub edge_precision: f64,
    pub edge_recall: f64,
    pub edge_precision_undefined: bool,
    pub edge_recall_undefined: bool,
    pub triangle_precision: f64,
    pub triangle_recall: f64,
    pub triangle_precision_undefined: bool,
    pub triangle_recall_undefined: bool,
    pub runtime_seconds: Option<f64>,
}

impl SweepRow {
    /// `report.params` must be set.
    pub fn new(report: &EvalReport) -> Self {
        let p = report.params.expect("sweep rows carry their parameters");
        let c = report.census;
        SweepRow {
            variant: p.variant.to_string(),
            alpha_m: p.alpha_m,
            lambda: p.lambda,
            epsilon: p.epsilon,
            omega: p.omega,
            naive_length: p.naive_length,
            vertices: c.vertices,
            edges: c.edges,
            triangles: c.triangles,
            free_vertices: c.free_vertices,
            free_edges: c.free_edges,
            cross_label_edges: report.cross_label_edges,
            edge_precision: report.edges.precision,
            edge_recall: report.edges.recall,
            edge_precision_undefined: report.edges.precision_undefined,
            edge_recall_undefined: report.edges.recall_undefined,
            triangle_precision: report.triangles.precision,
            triangle_recall: report.triangles.recall,
            triangle_precision_undefined: report.triangles.precision_undefined,
            triangle_recall_undefined: report.triangles.recall_undefined,
            runtime_seconds: report.runtime_seconds,
        }
    }
}

pub fn write_csv<W: Write>(reports: &[EvalReport], sink: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in reports {
        w.serialize(SweepRow::new(r))?;
    }
    w.flush()?;
    Ok(())
}
