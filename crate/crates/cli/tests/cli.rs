use std::path::{Path, PathBuf};
use std::process::Command;

use foldnet_core::mesh::{shapes, write_obj, HalfEdgeMesh};

fn foldnet(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_foldnet")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn save(dir: &Path, name: &str, mesh: &HalfEdgeMesh) -> PathBuf {
    let path = dir.join(name);
    write_obj(mesh, std::fs::File::create(&path).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn tetrahedron_unfolds_to_four_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "tetra.obj", &shapes::tetrahedron());
    let svg = dir.path().join("tetra.svg");
    let report = dir.path().join("tetra.json");
    let (code, _, err) = foldnet(&["unfold", s(&input), "--seed", "7", "--svg", s(&svg), "--report", s(&report)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polygon").count(), 4);
    let r = json(&report);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["status"], "success");
}

#[test]
fn zero_step_budget_exits_approximative() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "sphere1280.obj", &shapes::icosphere(3));
    let report = dir.path().join("r.json");
    let obj = dir.path().join("coarse.obj");
    let (code, _, err) = foldnet(&[
        "unfold",
        s(&input),
        "--step-budget",
        "0",
        "--report",
        s(&report),
        "--obj-out",
        s(&obj),
    ]);
    assert_eq!(code, 1, "{err}");
    let r = json(&report);
    assert_eq!(r["status"], "approximative");
    assert!(r["hausdorff_percent"].as_f64().unwrap() > 0.0);
    let coarse = foldnet_core::mesh::load_mesh_file(&obj).unwrap();
    assert_eq!(coarse.face_count() as u64, r["stats"]["final_faces"].as_u64().unwrap());
}

#[test]
fn invalid_inputs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let fin = dir.path().join("fin.obj");
    std::fs::write(&fin, "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n").unwrap();
    let (code, _, err) = foldnet(&["unfold", s(&fin)]);
    assert_eq!(code, 3);
    assert!(err.contains("error"));

    let (positions, triangles) = shapes::bowtie_tetrahedra();
    let mut text = String::new();
    for p in &positions {
        text += &format!("v {} {} {}\n", p.x, p.y, p.z);
    }
    for t in &triangles {
        text += &format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    let bowtie = dir.path().join("bowtie.obj");
    std::fs::write(&bowtie, text).unwrap();
    assert_eq!(foldnet(&["unfold", s(&bowtie)]).0, 3);

    let disk = save(dir.path(), "disk.obj", &shapes::grid_disk(3, 3));
    assert_eq!(foldnet(&["unfold", s(&disk)]).0, 3);
    let (code, _, err) = foldnet(&["unfold", s(&disk), "--allow-boundary", "--svg", s(&dir.path().join("d.svg"))]);
    assert_eq!(code, 0, "{err}");

    assert_eq!(foldnet(&["unfold", s(&dir.path().join("missing.obj"))]).0, 3);
}

#[test]
fn direct_mode_reports_no_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "cube.obj", &shapes::cube());
    let report = dir.path().join("r.json");
    let (code, _, _) = foldnet(&["unfold", s(&input), "--direct", "--report", s(&report)]);
    assert_eq!(code, 0);
    let r = json(&report);
    assert_eq!(r["mode"], "direct");
    assert!(r["strategy"].is_null());
}

#[test]
fn decimate_then_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let input = save(dir.path(), "sphere.obj", &shapes::icosphere(2));
    let out = dir.path().join("small.off");
    let (code, stdout, _) = foldnet(&["decimate", s(&input), "-o", s(&out), "--target-faces", "100", "--strategy", "se/mp"]);
    assert_eq!(code, 0);
    let summary: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(summary["faces"], 100);
    let (code, stdout, _) = foldnet(&["metrics", s(&input), s(&out)]);
    assert_eq!(code, 0);
    let m: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(m["hausdorff_percent"].as_f64().unwrap() > 0.0);
}

#[test]
fn bench_on_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = foldnet(&["bench", s(dir.path())]);
    assert_eq!(code, 0);
    let r: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(r["rows"].as_array().unwrap().is_empty());
    assert!(r["aggregates"].as_array().unwrap().is_empty());
}

fn toy_corpus(dir: &Path) {
    save(dir, "a_icosphere.obj", &shapes::icosphere(3));
    save(dir, "b_torus.obj", &shapes::grid_torus(16, 16, 2.0, 0.7));
    save(
        dir,
        "c_bumpy.obj",
        &shapes::mapped_sphere(3, |p| nalgebra::Point3::from(p * (1.0 + 0.2 * (5.0 * p.z).sin()))),
    );
    save(
        dir,
        "d_ellipsoid.obj",
        &shapes::mapped_sphere(3, |p| nalgebra::Point3::new(2.0 * p.x, p.y, 0.5 * p.z)),
    );
    save(
        dir,
        "e_pear.obj",
        &shapes::mapped_sphere(3, |p| nalgebra::Point3::from(p * (1.0 + 0.4 * p.z.max(0.0)))),
    );
}

#[test]
fn bench_toy_corpus_is_complete_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    toy_corpus(&corpus);
    let mut reports = Vec::new();
    for (i, jobs) in ["1", "4"].iter().enumerate() {
        let report = dir.path().join(format!("bench{i}.json"));
        let csv = dir.path().join(format!("bench{i}.csv"));
        let (code, _, err) = foldnet(&[
            "bench",
            s(&corpus),
            "--resolutions",
            "100,200",
            "--seed",
            "5",
            "--jobs",
            jobs,
            "--report",
            s(&report),
            "--csv",
            s(&csv),
        ]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 41);
        reports.push(json(&report));
    }
    let rows = reports[0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5 * 2 * 4);
    for a in reports[0]["aggregates"].as_array().unwrap() {
        assert!(a["success_with_approximation_rate"].as_f64() >= a["success_rate"].as_f64());
    }
    for r in &mut reports {
        foldnet_cli::report::strip_timing(r);
    }
    assert_eq!(reports[0], reports[1]);
}
