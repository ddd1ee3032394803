use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_plopen"));
    c.env_remove("PLOPEN_SEED");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli_commands").join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = bin().args(args).output().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report, out)
}

/// Generates `kind` into `dir` and returns the path.
fn gen(dir: &Path, kind: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("{kind}{}.json", extra.join("")));
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["gen", "--kind", kind, "--out", &p];
    args.extend_from_slice(extra);
    let (code, report, _) = run(&args);
    assert_eq!(code, 0, "{report}");
    p
}

#[test]
fn validate_exit_codes() {
    let dir = scratch("validate");
    let id = gen(&dir, "identity", &["--dim", "2"]);
    assert_eq!(run(&["validate", &id]).0, 0);

    let broken = dir.join("discontinuous.json");
    fs::write(
        &broken,
        r#"{
  "format_version": 1,
  "ambient_dim": 1,
  "vertices": [["-1"], ["0"], ["1"]],
  "cells": [[0, 1], [1, 2]],
  "pieces": [
    {"matrix": [["1"]], "offset": ["0"]},
    {"matrix": [["1"]], "offset": ["1"]}
  ]
}
"#,
    )
    .unwrap();
    let (code, report, _) = run(&["validate", broken.to_str().unwrap()]);
    assert_eq!(code, 2);
    let violations = report["results"]["violations"].as_array().unwrap();
    assert!(violations[0].as_str().unwrap().contains("discontinuous across face"));

    let text = fs::read_to_string(&id).unwrap();
    let truncated = dir.join("truncated.json");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let (code, report, out) = run(&["validate", truncated.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(report["results"]["error"].as_str().unwrap().contains("line"));
    assert!(!out.stderr.is_empty());
}

#[test]
fn check_open_verdicts() {
    let dir = scratch("check_open");
    let (code, report, _) = run(&["check-open", &gen(&dir, "identity", &["--dim", "3"])]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["coherent"], true);
    let (code, report, _) = run(&["check-open", &gen(&dir, "fold1d", &[])]);
    assert_eq!(code, 1);
    let c = &report["results"]["conditions"];
    for key in ["sign_condition_ii", "sign_condition_iii", "branch_condition_iv"] {
        assert_eq!(c[key]["holds"], false, "{key}");
    }
    assert_eq!(report["results"]["coherent"], false);
    let (code, report, _) = run(&["check-open", &gen(&dir, "doubling2d", &[])]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["dim_Bf"], 0);
}

#[test]
fn degree_fibers_graph_and_whyburn() {
    let dir = scratch("single");
    let id = gen(&dir, "identity", &["--dim", "2"]);
    let (code, report, _) = run(&["degree", &id, "--at", "1/3,-1/5"]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["degree"], 1);
    let (code, report, _) = run(&["degree", &id, "--at", "1,0"]);
    assert_eq!(code, 5);
    assert!(report["results"]["error"].as_str().unwrap().starts_with("degree undefined"));
    assert_eq!(run(&["degree", &id, "--at", "1/0,0"]).0, 3);

    let fold = gen(&dir, "fold1d", &[]);
    let (_, report, _) = run(&["fibers", &fold, "--at", "1/2"]);
    assert_eq!(report["results"]["count"], 2);
    assert_eq!(report["results"]["points"][0]["point"][0], "-1/2");
    let (code, report, _) = run(&["graph", &fold]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["num_nodes"], 2);
    assert_eq!(report["results"]["connected"], true);
    let (_, report, _) = run(&["branch-set", &fold]);
    assert_eq!(report["results"]["dim"], 0);

    let (code, report, _) = run(&["whyburn", &gen(&dir, "interior_fold1d", &[])]);
    assert_eq!(code, 1);
    assert_eq!(report["results"]["stage"], 3);
    let (code, report, _) = run(&["whyburn", &id]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["degree"], 1);
}

#[test]
fn homotopy_reports_the_violation() {
    let dir = scratch("homotopy");
    let shear = gen(&dir, "shear", &[]);
    let text = fs::read_to_string(&shear).unwrap();
    let mut file: Value = serde_json::from_str(&text).unwrap();
    file["vertex_images"] = file["vertices"].clone();
    let id = dir.join("shear_domain_identity.json");
    fs::write(&id, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let id = id.to_str().unwrap();
    let (code, report, _) = run(&["homotopy", id, &shear, "--gamma", "3/2,1"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["results"]["degrees"].as_array().unwrap().len(), 33);

    let sq = gen(&dir, "identity", &["--dim", "2"]);
    let mut file: Value = serde_json::from_str(&fs::read_to_string(&sq).unwrap()).unwrap();
    for p in file["vertex_images"].as_array_mut().unwrap() {
        for x in p.as_array_mut().unwrap() {
            let s = x.as_str().unwrap();
            *x = Value::String(match s.strip_prefix('-') {
                Some(rest) => rest.to_string(),
                None if s == "0" => s.to_string(),
                None => format!("-{s}"),
            });
        }
    }
    let refl = dir.join("reflection.json");
    fs::write(&refl, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let (code, report, _) = run(&["homotopy", &sq, refl.to_str().unwrap(), "--gamma", "0,0"]);
    assert_eq!(code, 5);
    assert_eq!(report["results"]["violation"]["t"], "1/2");
}

#[test]
fn generated_files_round_trip_and_reports_repeat() {
    let dir = scratch("determinism");
    let a = gen(&dir, "random_mixed_signs", &["--dim", "2", "--seed", "11"]);
    let out = bin()
        .args(["gen", "--kind", "random_mixed_signs", "--dim", "2"])
        .env("PLOPEN_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(out.stdout, fs::read(&a).unwrap());
    let file: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(file["metadata"]["gen_spec"]["seed"], 11);
    assert_eq!(file["metadata"]["gen_spec"]["kind"], "random_mixed_signs");

    let first = bin().args(["check-open", &a, "--seed", "3"]).output().unwrap();
    let second = bin().args(["check-open", &a]).env("PLOPEN_SEED", "3").output().unwrap();
    assert_eq!(first.stdout, second.stdout);
    let r: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert!(!r["results"]["oracle"]["failures"].as_array().unwrap().is_empty());

    let (code, report, _) = run(&["oracle-open", &a]);
    assert_eq!(code, 1);
    for w in report["results"]["failures"].as_array().unwrap() {
        assert_eq!(w["revalidated"], true);
    }
}

#[test]
fn batch_mode_aggregates_in_file_order() {
    let dir = scratch("batch");
    for (kind, extra) in [("identity", vec!["--dim", "1"]), ("fold1d", vec![]), ("doubling2d", vec![])] {
        gen(&dir, kind, &extra);
    }
    let d = dir.to_str().unwrap();
    let (code, report, _) = run(&["check-open", "--all", d, "--oracle-points", "4"]);
    assert_eq!(code, 1);
    let names: Vec<&str> = report["results"]["instances"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["file"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["doubling2d.json", "fold1d.json", "identity--dim1.json"]);
    assert_eq!(report["results"]["summary"]["disagreements"], 0);
    let again = run(&["check-open", "--all", d, "--oracle-points", "4"]).1;
    assert_eq!(report, again);
}

#[test]
fn approx_is_separate_and_labeled() {
    let dir = scratch("approx");
    let fold = gen(&dir, "fold1d", &[]);
    let (_, report, _) = run(&["--approx", "fibers", &fold, "--at", "1/3"]);
    assert_eq!(report["results"]["points"][0]["point"][0], "-1/3");
    assert!(report["approx"]["note"].as_str().unwrap().contains("inexact"));
    assert!(report["approx"]["results"]["points"][0]["point"][0].is_f64());
}
