use std::path::Path;
use std::process::{Command, Output};

fn mlsmesh(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlsmesh"))
        .args(args)
        .current_dir(dir)
        .env_remove("MLSMESH_THREADS")
        .output()
        .expect("spawn mlsmesh")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mlsmesh(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let stdout = ok(d, &["synth", "--scene", "facing-plane", "--seed", "1", "-o", "a.pgrid"]);
    assert!(stdout.contains("pulses 10000"), "{stdout}");
    ok(d, &["synth", "--scene", "facing-plane", "--seed", "1", "-o", "b.pgrid"]);
    assert_eq!(std::fs::read(d.join("a.pgrid")).unwrap(), std::fs::read(d.join("b.pgrid")).unwrap());
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = mlsmesh(d, &["synth", "--scene", "bogus", "-o", "x.pgrid"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scene"));

    let out = mlsmesh(d, &["synth", "--scene", "wire", "-o", "missing-dir/x.pgrid"]);
    assert!(!out.status.success());

    std::fs::write(d.join("bad.pgrid"), "PGRID 1 1 1 1 0\n0 0 0 0 0 0 0 0 0 1 9 1 1 1 1 1 1 1 1 1\n").unwrap();
    let out = mlsmesh(d, &["reconstruct", "bad.pgrid", "-o", "x.ply"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = mlsmesh(d, &["reconstruct", "bad.pgrid", "-o", "x.ply", "--alpha-m", "2"]);
    assert!(!out.status.success());
}

#[test]
fn eval_requires_labels() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("u.pgrid"), "PGRID 1 1 2 2 0\n0 0 0 0 0 0 0 0 0 1 1 1\n0 1 0 0 1 0 0 0 0 1 1 1\n").unwrap();
    let out = mlsmesh(d, &["eval", "u.pgrid"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("label"));
}

#[test]
fn eval_on_plane_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--scene", "facing-plane", "-o", "p.pgrid"]);
    ok(d, &["eval", "p.pgrid", "--report", "r.toml"]);
    let doc: toml::Table = std::fs::read_to_string(d.join("r.toml")).unwrap().parse().unwrap();
    for dim in ["edges", "triangles"] {
        assert_eq!(doc[dim]["precision"].as_float(), Some(1.0), "{dim}");
        assert_eq!(doc[dim]["recall"].as_float(), Some(1.0), "{dim}");
    }
    assert_eq!(doc["cross_label_edges"].as_integer(), Some(0));
}

#[test]
fn sweep_rows_and_empty_lists() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--scene", "two-planes", "-o", "t.pgrid"]);
    ok(d, &["sweep", "t.pgrid", "--alpha-m", "0.01,0.05,0.1,0.5", "-o", "s.csv"]);
    let csv = std::fs::read_to_string(d.join("s.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("variant,alpha_m,"));
    for (line, alpha) in lines[1..].iter().zip(["0.01", "0.05", "0.1", "0.5"]) {
        assert!(line.starts_with(&format!("full,{alpha},")), "{line}");
    }

    let out = mlsmesh(d, &["sweep", "t.pgrid", "--lambda", ""]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no values"));
}

#[test]
fn scene_file_and_outputs_ignore_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let scene = mlsmesh::scene::SceneConfig::builtin("pole-on-road").unwrap();
    std::fs::write(d.join("scene.toml"), scene.to_toml().unwrap()).unwrap();
    for threads in ["1", "8"] {
        let grid = format!("g{threads}.pgrid");
        ok(d, &["--threads", threads, "synth", "--scene-config", "scene.toml", "--seed", "9", "-o", &grid]);
        ok(
            d,
            &[
                "--threads",
                threads,
                "reconstruct",
                &grid,
                "-o",
                &format!("m{threads}.ply"),
                "--report",
                &format!("r{threads}.toml"),
            ],
        );
        ok(
            d,
            &["--threads", threads, "sweep", &grid, "--variant", "naive,edges,full", "-o", &format!("s{threads}.csv")],
        );
    }
    for stem in ["g", "m", "r", "s"] {
        let ext = match stem {
            "g" => "pgrid",
            "m" => "ply",
            "r" => "toml",
            _ => "csv",
        };
        let a = std::fs::read(d.join(format!("{stem}1.{ext}"))).unwrap();
        let b = std::fs::read(d.join(format!("{stem}8.{ext}"))).unwrap();
        assert!(a == b, "{stem}.{ext} differs between thread counts");
    }
}
