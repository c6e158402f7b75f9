//! End-to-end checks of the command-line surface and the batch mode: exit
//! codes, stage selection, flag aliases and failure aggregation.

use std::fs;
use std::process::Command;

use tempfile::TempDir;

use atomic::bundle;
use atomic::pipeline::{evaluate_soa, PipelineOptions, Stage};

fn atomic_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_atomic"))
}

fn fast_opts(out_dir: &std::path::Path) -> PipelineOptions {
    PipelineOptions {
        out_dir: out_dir.to_path_buf(),
        substeps: 100,
        deviation_max: 0.1,
        deviation_step: 0.1,
        record_waveforms: false,
        ..PipelineOptions::default()
    }
}

/// Materialize a bundled algorithm as config + program files on disk.
fn write_bundled(dir: &std::path::Path, bundled: &bundle::BundledAlgorithm) {
    fs::write(
        dir.join(format!("{}.json", bundled.name)),
        bundled.config_json,
    )
    .unwrap();
    fs::write(
        dir.join(format!("{}.txt", bundled.name)),
        bundled.algorithm_text,
    )
    .unwrap();
}

#[test]
fn missing_config_file_exits_1() {
    let out = TempDir::new().unwrap();
    let status = atomic_bin()
        .args(["pipeline", "--config-file", "does_not_exist.json"])
        .args(["--out-dir", out.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn flipped_expected_bit_exits_2() {
    let dir = TempDir::new().unwrap();
    let bundled = &bundle::BUNDLED_ALGORITHMS[0];
    let broken = bundled
        .config_json
        .replace("\"w6\": [0, 1, 1, 0, 1, 0, 0, 1]", "\"w6\": [1, 1, 1, 0, 1, 0, 0, 1]");
    assert_ne!(broken, bundled.config_json);
    fs::write(dir.path().join("broken.json"), broken).unwrap();
    fs::write(dir.path().join("serial_full_adder.txt"), bundled.algorithm_text).unwrap();
    let output = atomic_bin()
        .args(["pipeline", "--config-file"])
        .arg(dir.path().join("broken.json"))
        .args(["--out-dir"])
        .arg(dir.path().join("out"))
        .args(["--stages", "v"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("functional mismatch"), "{stderr}");
}

#[test]
fn validate_stage_only_writes_state_history() {
    let dir = TempDir::new().unwrap();
    write_bundled(dir.path(), &bundle::BUNDLED_ALGORITHMS[0]);
    let out = dir.path().join("out");
    let status = atomic_bin()
        .args(["pipeline", "--config_file"]) // underscore alias
        .arg(dir.path().join("serial_full_adder.json"))
        .args(["--out-dir"])
        .arg(&out)
        .args(["--stages", "validate"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let algo_dir = out.join("serial_full_adder");
    assert!(algo_dir.join("State_History.txt").is_file());
    assert!(algo_dir.join("run.log").is_file());
    assert!(!algo_dir.join("PWM_output").exists());
    assert!(!algo_dir.join("deviation_range.txt").exists());
    let log = fs::read_to_string(algo_dir.join("run.log")).unwrap();
    for stage in ["validate", "control", "simulate", "deviate", "plot"] {
        assert!(log.contains(&format!("[{stage}] start")), "{stage} in log");
    }
    assert!(log.contains("[pipeline] end ok"));
}

#[test]
fn evaluate_soa_empty_directory_is_ok_with_empty_table() {
    let empty = TempDir::new().unwrap();
    let out = TempDir::new().unwrap();
    let output = atomic_bin()
        .args(["evaluate-soa", "--out-dir"])
        .arg(out.path())
        .args(["--algo-dir"])
        .arg(empty.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let table = fs::read_to_string(out.path().join("soa_comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 1); // header only
    assert!(String::from_utf8_lossy(&output.stderr).contains("warning"));
}

#[test]
fn evaluate_soa_marks_broken_row_without_aborting() {
    let algos = TempDir::new().unwrap();
    let out = TempDir::new().unwrap();
    // one good algorithm and one with an impossible expected truth table
    write_bundled(algos.path(), &bundle::BUNDLED_ALGORITHMS[3]);
    let bundled = &bundle::BUNDLED_ALGORITHMS[0];
    let broken = bundled
        .config_json
        .replace("\"w6\": [0, 1, 1, 0, 1, 0, 0, 1]", "\"w6\": [1, 0, 0, 1, 0, 1, 1, 0]");
    fs::write(algos.path().join("a_broken_adder.json"), broken).unwrap();
    fs::write(
        algos.path().join("serial_full_adder.txt"),
        bundled.algorithm_text,
    )
    .unwrap();

    let rows = evaluate_soa(out.path(), Some(algos.path()), &fast_opts(out.path())).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].algo == "a_broken_adder" && rows[0].status.is_err());
    assert!(rows[1].algo == "approx_full_adder" && rows[1].status.is_ok());
    let table = fs::read_to_string(out.path().join("soa_comparison.csv")).unwrap();
    assert!(table.contains("a_broken_adder,fail"));
    assert!(table.contains("approx_full_adder,pass"));
}

#[test]
fn stage_subsets_compose_to_the_full_tree() {
    // Running stages one at a time must leave the same artifacts as one full
    // run (stage independence).
    let algos = TempDir::new().unwrap();
    write_bundled(algos.path(), &bundle::BUNDLED_ALGORITHMS[3]);
    let config = algos.path().join("approx_full_adder.json");

    std::env::set_var(atomic::pipeline::FIXED_TIMESTAMP_ENV, "1");
    let run = |stage_sets: &[&str]| {
        let out = TempDir::new().unwrap();
        for stages in stage_sets {
            let mut opts = fast_opts(out.path());
            opts.stages = Stage::parse_list(stages).unwrap();
            atomic::pipeline::run_pipeline(
                &atomic::pipeline::ConfigSource::Path(config.clone()),
                &opts,
            )
            .unwrap();
        }
        let mut files: Vec<String> = walk(out.path())
            .into_iter()
            .map(|p| p.strip_prefix(out.path()).unwrap().to_string_lossy().into_owned())
            .collect();
        files.sort();
        (out, files)
    };
    let (full_dir, full) = run(&["v,c,s,d,p"]);
    let (split_dir, split) = run(&["v", "c", "s", "d", "p"]);
    assert_eq!(full, split);
    for rel in &full {
        if rel.ends_with("run.log") {
            continue; // the split run logs five runs, the full run one
        }
        assert_eq!(
            fs::read(full_dir.path().join(rel)).unwrap(),
            fs::read(split_dir.path().join(rel)).unwrap(),
            "{rel}"
        );
    }
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}
