//! ASCII PLY and OBJ export of simplicial complexes.
//!
//! Both writers emit every vertex, every triangle, and only the *free* edges:
//! boundary edges of triangles are implied by the faces. PLY colours follow
//! the usual convention for mixed-dimension reconstructions: triangles red,
//! free edges green, free vertices black, and every other vertex takes the
//! colour of the highest simplex it belongs to.

use std::io::{self, Write};

use mlsmesh_core::{SimplexClass, SimplicialComplex};

pub const TRIANGLE_RGB: [u8; 3] = [255, 0, 0];
pub const FREE_EDGE_RGB: [u8; 3] = [0, 255, 0];
pub const FREE_VERTEX_RGB: [u8; 3] = [0, 0, 0];

/// Significant digits of exported coordinates.
pub const SIGNIFICANT_DIGITS: usize = 9;

pub fn class_rgb(class: SimplexClass) -> [u8; 3] {
    match class {
        SimplexClass::InTriangle => TRIANGLE_RGB,
        SimplexClass::FreeEdge => FREE_EDGE_RGB,
        SimplexClass::FreeVertex => FREE_VERTEX_RGB,
    }
}

/// Formats `x` in plain decimal notation with at most nine significant
/// digits, trailing zeros removed. Magnitudes outside `[1e-9, 1e9)` fall back
/// to scientific notation.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if !(-9..9).contains(&exp) {
        return sci;
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".to_owned();
    }
    s
}

pub fn write_ply<W: Write>(complex: &SimplicialComplex, sink: W) -> io::Result<()> {
    let mut w = io::BufWriter::new(sink);
    let free: Vec<[u32; 2]> = complex.free_edges().collect();
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "comment triangles red, free edges green, free vertices black")?;
    writeln!(w, "element vertex {}", complex.n_vertices())?;
    for axis in ["x", "y", "z"] {
        writeln!(w, "property double {axis}")?;
    }
    for channel in ["red", "green", "blue"] {
        writeln!(w, "property uchar {channel}")?;
    }
    writeln!(w, "element edge {}", free.len())?;
    writeln!(w, "property int vertex1")?;
    writeln!(w, "property int vertex2")?;
    for channel in ["red", "green", "blue"] {
        writeln!(w, "property uchar {channel}")?;
    }
    writeln!(w, "element face {}", complex.triangles().len())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    for channel in ["red", "green", "blue"] {
        writeln!(w, "property uchar {channel}")?;
    }
    writeln!(w, "end_header")?;

    for (p, class) in complex.positions().iter().zip(complex.vertex_class()) {
        let [r, g, b] = class_rgb(*class);
        writeln!(w, "{} {} {} {r} {g} {b}", format_real(p.x), format_real(p.y), format_real(p.z))?;
    }
    let [r, g, b] = FREE_EDGE_RGB;
    for [u, v] in &free {
        writeln!(w, "{u} {v} {r} {g} {b}")?;
    }
    let [r, g, b] = TRIANGLE_RGB;
    for [a, b_, c] in complex.triangles() {
        writeln!(w, "3 {a} {b_} {c} {r} {g} {b}")?;
    }
    w.flush()
}

pub fn write_obj<W: Write>(complex: &SimplicialComplex, sink: W) -> io::Result<()> {
    let mut w = io::BufWriter::new(sink);
    let census = complex.census();
    writeln!(
        w,
        "# mlsmesh complex: {} vertices, {} free edges, {} triangles",
        census.vertices, census.free_edges, census.triangles
    )?;
    for p in complex.positions() {
        writeln!(w, "v {} {} {}", format_real(p.x), format_real(p.y), format_real(p.z))?;
    }
    for [u, v] in complex.free_edges() {
        writeln!(w, "l {} {}", u + 1, v + 1)?;
    }
    for [a, b, c] in complex.triangles() {
        writeln!(w, "f {} {} {}", a + 1, b + 1, c + 1)?;
    }
    w.flush()
}
