use mlsmesh_core::edgefilter::regularity_filter;
use mlsmesh_core::synth::{builtin_scene, simulate, BUILTIN_SCENES};
use mlsmesh_core::trifilter::extract_triangles;
use mlsmesh_core::{reconstruct, FilterParams, Sequential, Variant};

#[test]
fn facing_plane_complex_matches_extraction() {
    let (scene, traj) = builtin_scene("facing-plane").unwrap();
    let grid = simulate(&scene, &traj, 1).unwrap();
    let params = FilterParams::default().with_variant(Variant::Edges);
    let rec = reconstruct(&grid, &params).unwrap();
    let extracted = extract_triangles(&grid, &regularity_filter(&grid, &params, &Sequential), &Sequential);
    let census = rec.complex.census();
    assert_eq!(census.triangles, extracted.len());
    assert_eq!(census.vertices, grid.n_echoes());
    assert_eq!(census.free_vertices, 0);
}

#[test]
fn builtin_scenes_are_deterministic() {
    for name in BUILTIN_SCENES.iter().filter(|n| **n != "street") {
        let (scene, traj) = builtin_scene(name).unwrap();
        let a = simulate(&scene, &traj, 42).unwrap();
        let b = simulate(&scene, &traj, 42).unwrap();
        assert_eq!(a, b, "{name}");
        assert!(a.n_echoes() > 0, "{name}");
        assert!(a.all_echoes().iter().all(|e| e.label.is_some()), "{name}");
    }
}
