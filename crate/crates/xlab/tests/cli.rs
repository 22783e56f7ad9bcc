use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use spikeres_xlab::*;

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["spikeres"];
    argv.extend_from_slice(args);
    cli_main(argv)
}

fn files_in(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

#[test]
fn tables_happy_path() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t1");
    let code = run(&["tables", "--h", "0.1", "--eta", "0.05", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let manifest = RunManifest::load(&out).unwrap();
    let listed: BTreeSet<String> = manifest.outputs.iter().map(|o| o.path.clone()).collect();
    assert_eq!(listed, BTreeSet::from(["table1.csv".to_string(), "table2.csv".to_string()]));
    let mut on_disk = files_in(&out);
    assert!(on_disk.remove(RunManifest::FILE_NAME));
    assert_eq!(on_disk, listed);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(run(&["figure1", "--samples", "0", "--out", out]), 2);
    assert_eq!(run(&["plot"]), 2);
    assert_eq!(run(&["tables", "--frobnicate"]), 2);
    assert_eq!(run(&["tables", "--h", "0.1", "--eta", "0.2", "--out", out]), 2);
    assert_eq!(run(&["scaling", "--l", "4", "--out", out]), 2);
    assert_eq!(run(&["tables", "--jobs", "0", "--out", out]), 2);
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn runtime_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    assert_eq!(run(&["tables", "--out", out.to_str().unwrap()]), 1);
}

#[test]
fn scaling_cli_matches_api() {
    let tmp = tempfile::tempdir().unwrap();
    let cli_out = tmp.path().join("cli");
    let code = run(&[
        "scaling",
        "--l",
        "2",
        "--epsilons",
        "1e-3,1e-5,1e-7",
        "--trials",
        "3",
        "--seed",
        "4",
        "--jobs",
        "2",
        "--out",
        cli_out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let api = run_scaling(2, 10.0, &[1e-3, 1e-5, 1e-7], 3, 4, &tmp.path().join("api")).unwrap();
    let cli = RunManifest::load(&cli_out).unwrap();
    let (a, c) = (ScalingFit::from_summary(&api.summary).unwrap(), ScalingFit::from_summary(&cli.summary).unwrap());
    assert_eq!(a, c);
    assert_eq!(api.outputs, cli.outputs);
}

#[test]
fn decimate_from_files() {
    let tmp = tempfile::tempdir().unwrap();
    let signal = tmp.path().join("signal.json");
    let config = tmp.path().join("config.json");
    fs::write(&signal, r#"{"amplitudes": [1.0, 1.0], "nodes": [-0.3, 0.3]}"#).unwrap();
    fs::write(&config, r#"{"model_order": 2, "node_bound": 0.5}"#).unwrap();
    let out = tmp.path().join("d");
    let code = run(&[
        "decimate",
        "--signal",
        signal.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--epsilon",
        "1e-6",
        "--N",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let manifest = RunManifest::load(&out).unwrap();
    let err = manifest.summary["node_error"].as_f64().unwrap();
    assert!(err < 1e-4);
    assert_eq!(manifest.spec.parameters["config"]["seed"], 0);
}

#[test]
fn run_spec_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("adv");
    let spec = ExperimentSpec::new(ExperimentKind::AdversaryDemo, &out)
        .with("l", 2)
        .with("h", 0.01)
        .with("seed", 3);
    let path = tmp.path().join("spec.json");
    fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(run(&["run", path.to_str().unwrap()]), 0);
    let manifest = RunManifest::load(&out).unwrap();
    assert_eq!(manifest.spec, spec);
    assert!(manifest.digest("pair.json").is_some());

    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"kind": "tables", "parameters": {"h": 0.1}, "output_dir": "x"}"#).unwrap();
    assert_eq!(run(&["run", bad.to_str().unwrap()]), 2);
}
