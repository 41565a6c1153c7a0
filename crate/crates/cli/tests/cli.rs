//! Black-box checks of the `objectddm` binary: argument handling, exit
//! codes, and output layout.

use std::path::Path;
use std::process::Command;

use oddm_core::synthetic::{build_scene, write_scene, RectSpec, SyntheticSceneSpec};
use oddm_core::ObjectCategory;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_objectddm"))
}

fn demo_scene(dir: &Path) -> std::path::PathBuf {
    let spec = SyntheticSceneSpec {
        video_id: "demo".to_string(),
        width: 80,
        height: 60,
        n_frames: 60,
        frame_rate_hz: 30.0,
        px_per_dva: 3.0,
        background_feature: 0.05,
        rects: vec![RectSpec {
            id: 1,
            category: ObjectCategory::Other,
            width: 18,
            height: 20,
            center: (30.0, 30.0),
            velocity: (0.3, 0.0),
            feature: 1.0,
        }],
    };
    write_scene(&build_scene(&spec), dir).unwrap()
}

fn write_run_spec(dir: &Path, manifest: &Path, out: &Path) -> std::path::PathBuf {
    let spec = serde_json::json!({
        "manifests": [manifest],
        "model": "objectddm",
        "sim": {"theta": 0.02},
        "n_seeds": 2,
        "out_dir": out,
    });
    let path = dir.join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    path
}

#[test]
fn simulate_writes_one_csv_per_video_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = demo_scene(dir.path());
    let out = dir.path().join("out");
    let spec = write_run_spec(dir.path(), &manifest, &out);

    let status = binary()
        .args(["simulate", "--config"])
        .arg(&spec)
        .args(["--seeds", "3"])
        .status()
        .unwrap();
    assert!(status.success());
    let mut files: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(
        files,
        vec![
            "demo_objectddm_seed000.csv",
            "demo_objectddm_seed001.csv",
            "demo_objectddm_seed002.csv",
        ]
    );
}

#[test]
fn missing_manifest_path_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let spec = write_run_spec(dir.path(), Path::new("nowhere.json"), &out);
    let output = binary()
        .args(["simulate", "--config"])
        .arg(&spec)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("does not exist"));
}

#[test]
fn malformed_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    let output = binary()
        .args(["simulate", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn corrupt_raster_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = demo_scene(dir.path());
    // truncate the feature raster
    let feature = dir.path().join("demo.feature.oddm");
    let bytes = std::fs::read(&feature).unwrap();
    std::fs::write(&feature, &bytes[..bytes.len() / 2]).unwrap();

    let out = dir.path().join("out");
    let spec = write_run_spec(dir.path(), &manifest, &out);
    let output = binary()
        .args(["simulate", "--config"])
        .arg(&spec)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn single_value_sweep_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = demo_scene(dir.path());
    let out = dir.path().join("out");
    let sweep = serde_json::json!({
        "run": {
            "manifests": [manifest],
            "model": "objectddm",
            "n_seeds": 1,
            "out_dir": out,
        },
        "parameter": "theta",
        "values": [0.03],
    });
    let path = dir.path().join("sweep.json");
    std::fs::write(&path, serde_json::to_string(&sweep).unwrap()).unwrap();
    let output = binary()
        .args(["sweep", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("at least 2"));
}

#[test]
fn baseline_subcommand_forces_model() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = demo_scene(dir.path());
    let out = dir.path().join("out");
    let spec = write_run_spec(dir.path(), &manifest, &out);
    let status = binary()
        .args(["baseline", "--config"])
        .arg(&spec)
        .args(["--seeds", "1"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("demo_baseline_seed000.csv").exists());
    let text = std::fs::read_to_string(out.join("demo_baseline_seed000.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",baseline"));
}

#[test]
fn evaluate_self_distance_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = demo_scene(dir.path());
    let out = dir.path().join("out");
    let spec = write_run_spec(dir.path(), &manifest, &out);
    assert!(binary()
        .args(["simulate", "--config"])
        .arg(&spec)
        .status()
        .unwrap()
        .success());

    let files: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    let eval_out = dir.path().join("reports");
    let eval = serde_json::json!({
        "corpora": [
            {"name": "a", "videos": [{"manifest": manifest, "events": files}]},
            {"name": "b", "videos": [{"manifest": manifest, "events": files}]},
        ],
        "out_dir": eval_out,
    });
    let eval_path = dir.path().join("eval.json");
    std::fs::write(&eval_path, serde_json::to_string(&eval).unwrap()).unwrap();
    assert!(binary()
        .args(["evaluate", "--config"])
        .arg(&eval_path)
        .status()
        .unwrap()
        .success());

    assert!(eval_out.join("a.report.json").exists());
    assert!(eval_out.join("b.report.json").exists());
    let distances = std::fs::read_to_string(eval_out.join("distances.csv")).unwrap();
    for line in distances.lines().skip(1) {
        let distance: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(distance, 0.0, "identical corpora must have zero distance");
    }
}

#[test]
fn set_flag_overrides_nested_fields() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = demo_scene(dir.path());
    let out = dir.path().join("out");
    let spec = write_run_spec(dir.path(), &manifest, &out);
    // an invalid theta through --set must be rejected as a config error
    let output = binary()
        .args(["simulate", "--config"])
        .arg(&spec)
        .args(["--set", "sim.theta=-1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("theta"));
}
