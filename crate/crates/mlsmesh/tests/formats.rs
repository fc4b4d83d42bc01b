use std::io::Cursor;

use mlsmesh::export::{write_obj, write_ply};
use mlsmesh::pgrid::{read_pgrid, write_pgrid};
use mlsmesh_core::synth::{builtin_scene, simulate};
use mlsmesh_core::{reconstruct, FilterParams, SimplicialComplex, Variant, Vec3};

const TINY: &str = include_str!("golden/tiny.pgrid");

fn pgrid_bytes(grid: &mlsmesh_core::PulseGrid) -> Vec<u8> {
    let mut out = Vec::new();
    write_pgrid(grid, &mut out).unwrap();
    out
}

#[test]
fn golden_pgrid_rewrites_byte_exact() {
    let grid = read_pgrid(Cursor::new(TINY)).unwrap();
    assert_eq!(grid.n_pulses(), 9);
    assert_eq!(grid.n_echoes(), 9);
    assert_eq!(grid.echo_count(1, 1), 0);
    assert_eq!(grid.echoes(0, 2).unwrap()[1].label, Some(2));
    assert_eq!(grid.echoes(0, 2).unwrap()[1].intensity, Some(0.125));
    assert_eq!(String::from_utf8(pgrid_bytes(&grid)).unwrap(), TINY);
}

#[test]
fn simulated_grid_round_trips() {
    let (scene, mut traj) = builtin_scene("pole-on-road").unwrap();
    traj.n_lines = 50;
    traj.pulses_per_line = 50.25;
    let grid = simulate(&scene, &traj, 5).unwrap();
    assert_eq!((grid.n_lines(), grid.n_steps()), (50, 50));
    let bytes = pgrid_bytes(&grid);
    let back = read_pgrid(Cursor::new(&bytes)).unwrap();
    assert_eq!(back, grid);
    assert_eq!(pgrid_bytes(&back), bytes);
}

#[test]
fn golden_meshes() {
    let grid = read_pgrid(Cursor::new(TINY)).unwrap();
    let rec = reconstruct(&grid, &FilterParams::default().with_variant(Variant::Edges)).unwrap();
    let mut ply = Vec::new();
    write_ply(&rec.complex, &mut ply).unwrap();
    assert_eq!(String::from_utf8(ply).unwrap(), include_str!("golden/tiny.ply"));
    let mut obj = Vec::new();
    write_obj(&rec.complex, &mut obj).unwrap();
    assert_eq!(String::from_utf8(obj).unwrap(), include_str!("golden/tiny.obj"));
}

fn ply_text(c: &SimplicialComplex) -> String {
    let mut out = Vec::new();
    write_ply(c, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

fn body(text: &str) -> Vec<&str> {
    text.split("end_header\n").nth(1).unwrap().lines().collect()
}

#[test]
fn ply_single_simplices() {
    let tri = SimplicialComplex::from_parts(vec![Vec3::ZERO, Vec3::X, Vec3::Y], [], [[0, 1, 2]]).unwrap();
    let text = ply_text(&tri);
    assert!(
        text.contains("element vertex 3\n") && text.contains("element edge 0\n") && text.contains("element face 1\n")
    );
    assert_eq!(body(&text).last().copied(), Some("3 0 1 2 255 0 0"));

    let edge = SimplicialComplex::from_parts(vec![Vec3::ZERO, Vec3::X], [[0, 1]], []).unwrap();
    let text = ply_text(&edge);
    assert!(text.contains("element edge 1\n"));
    assert_eq!(body(&text), ["0 0 0 0 255 0", "1 0 0 0 255 0", "0 1 0 255 0"]);

    let point = SimplicialComplex::from_parts(vec![Vec3::new(1.5, -2.0, 0.25)], [], []).unwrap();
    assert_eq!(body(&ply_text(&point)), ["1.5 -2 0.25 0 0 0"]);
}

#[test]
fn ply_element_counts_match_census() {
    let (scene, traj) = builtin_scene("pole-on-road").unwrap();
    let grid = simulate(&scene, &traj, 2).unwrap();
    let rec = reconstruct(&grid, &FilterParams::default()).unwrap();
    let census = rec.complex.census();
    let text = ply_text(&rec.complex);
    assert!(text.contains(&format!("element vertex {}\n", census.vertices)));
    assert!(text.contains(&format!("element edge {}\n", census.free_edges)));
    assert!(text.contains(&format!("element face {}\n", census.triangles)));
    assert_eq!(body(&text).len(), census.vertices + census.free_edges + census.triangles);
}
