// Copyright 2026 The delisort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use delisort_cli::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel).display().to_string()
}

fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("delisort").chain(args.iter().copied()))
}

/// Runs with `--out` pointed at a temp file and returns the exit code and parsed output.
fn run_json(args: &[&str]) -> (i32, Option<Value>) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.display().to_string();
    full.extend(["--out", &out_str]);
    let code = run_args(&full);
    let value = fs::read_to_string(&out).ok().map(|t| serde_json::from_str(&t).unwrap());
    (code, value)
}

fn order(v: &Value) -> Vec<String> {
    v["order"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()).collect()
}

#[test]
fn rank_approvals_on_s100() {
    let s100 = fixture("s100");
    let (code, v) = run_json(&["rank", "--method", "approvals", "--input-dir", &s100, "--now", "0"]);
    assert_eq!(code, EXIT_OK);
    let v = v.unwrap();
    assert_eq!(&order(&v)[..3], ["x01", "x02", "x03"]);
    assert_eq!(order(&v).len(), 30);
    assert_eq!(v["method"], "approvals");
    assert_eq!(v["produced_at"], 0);
    assert_eq!(v["context"]["day_key"], "1970-01-01");
}

#[test]
fn rank_coverage_on_s100() {
    let (code, v) =
        run_json(&["rank", "--method", "coverage", "--input-dir", &fixture("s100"), "--now", "0", "--top", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(order(&v.unwrap()), ["x01", "y01", "z01"]);
}

#[test]
fn every_method_ranks_the_small_fixture() {
    let small = fixture("small");
    for method in [
        "date",
        "approvals",
        "ratio",
        "active",
        "cost",
        "comments",
        "random",
        "seqpav",
        "seqphragmen",
        "coverage",
        "integrated",
    ] {
        let (code, v) =
            run_json(&["rank", "--method", method, "--input-dir", &small, "--now", "1700200000", "--seed", "4"]);
        assert_eq!(code, EXIT_OK, "{method}");
        let mut got = order(&v.unwrap());
        got.sort();
        assert_eq!(got, ["p1", "p2", "p3"], "{method}");
    }
}

#[test]
fn method_flags_change_the_order() {
    let small = fixture("small");
    let newest = order(&run_json(&["rank", "--method", "date", "--input-dir", &small, "--now", "0"]).1.unwrap());
    let oldest = order(
        &run_json(&["rank", "--method", "date", "--oldest-first", "--input-dir", &small, "--now", "0"]).1.unwrap(),
    );
    assert_eq!(newest, ["p3", "p2", "p1"]);
    assert_eq!(oldest, ["p1", "p2", "p3"]);
    let cheap = order(
        &run_json(&["rank", "--method", "cost", "--lowest-first", "--input-dir", &small, "--now", "0"]).1.unwrap(),
    );
    assert_eq!(cheap, ["p2", "p1", "p3"]);
}

#[test]
fn per_session_without_key_is_a_usage_error() {
    let code =
        run_args(&["rank", "--method", "random", "--random-policy", "per-session", "--input-dir", &fixture("s100")]);
    assert_eq!(code, EXIT_USAGE);
    let (code, v) = run_json(&[
        "rank",
        "--method",
        "random",
        "--random-policy",
        "per-session",
        "--session-key",
        "abc",
        "--input-dir",
        &fixture("s100"),
        "--now",
        "0",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v.unwrap()["context"]["session_key"], "abc");
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    assert_eq!(run_args(&["rank", "--method", "popularity", "--input-dir", &fixture("s100")]), EXIT_USAGE);
    assert_eq!(run_args(&["rank", "--input-dir", &fixture("s100")]), EXIT_USAGE);
    assert_eq!(
        run_args(&["rank", "--method", "approvals", "--input-dir", &fixture("s100"), "--tiebreak", "alphabetical"]),
        EXIT_USAGE
    );
    assert_eq!(run_args(&["rank", "--method", "approvals", "--input-dir", "/nonexistent"]), EXIT_DATA);
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("proposals.csv"), "id,title,author,submitted_at\na,A,x,1\n").unwrap();
    fs::write(dir.path().join("events.csv"), "user,proposal,polarity,at\nu,ghost,+1,1\n").unwrap();
    assert_eq!(
        run_args(&["rank", "--method", "approvals", "--input-dir", &dir.path().display().to_string()]),
        EXIT_DATA
    );
}

#[test]
fn rank_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("{i}.json"));
            let code = run_args(&[
                "rank",
                "--method",
                "random",
                "--input-dir",
                &fixture("s100"),
                "--seed",
                "9",
                "--now",
                "1000",
                "--out",
                &out.display().to_string(),
            ]);
            assert_eq!(code, EXIT_OK);
            fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn compare_reproduces_the_three_columns() {
    let (code, v) = run_json(&[
        "compare",
        "--methods",
        "approvals,seqpav,coverage",
        "--k",
        "5",
        "--input-dir",
        &fixture("s100"),
        "--now",
        "0",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = v.unwrap();
    let prefix = |i: usize| -> Vec<String> {
        v["methods"][i]["prefix"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()).collect()
    };
    assert_eq!(prefix(0), ["x01", "x02", "x03", "x04", "x05"]);
    assert_eq!(prefix(1), ["x01", "y01", "x02", "z01", "y02"]);
    assert_eq!(prefix(2), ["x01", "y01", "z01", "x02", "y02"]);
    assert_eq!(v["methods"][0]["coverage_at_k"], 0.45);
    assert_eq!(v["methods"][2]["coverage_at_k"], 1.0);
    assert_eq!(v["methods"][0]["group_first_hit"][2]["first_hit"], 21);
    assert!(v["methods"][0]["proportionality_deviation"].as_f64().unwrap() > 0.5);
}

#[test]
fn compare_rejects_oversized_k_and_handles_empty_data() {
    assert_eq!(
        run_args(&["compare", "--methods", "approvals", "--k", "31", "--input-dir", &fixture("s100")]),
        EXIT_USAGE
    );
    assert_eq!(
        run_args(&[
            "compare",
            "--methods",
            "approvals",
            "--k",
            "3",
            "--attention",
            "zipf:1",
            "--input-dir",
            &fixture("s100")
        ]),
        EXIT_USAGE
    );
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("proposals.csv"), "id,title,author,submitted_at\n").unwrap();
    let (code, v) = run_json(&[
        "compare",
        "--methods",
        "approvals,coverage",
        "--k",
        "3",
        "--input-dir",
        &dir.path().display().to_string(),
        "--now",
        "0",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = v.unwrap();
    for m in v["methods"].as_array().unwrap() {
        assert_eq!(m["prefix"], Value::Array(vec![]));
        assert!(m["coverage_at_k"].is_null());
        assert!(m["attention_gini"].is_null());
    }
}

#[test]
fn simulate_static_scenario_matches_rank() {
    let (code, sim) =
        run_json(&["simulate", "--scenario", &fixture("s100_static.toml"), "--method", "approvals", "--seed", "7"]);
    assert_eq!(code, EXIT_OK);
    let (_, ranked) = run_json(&["rank", "--method", "approvals", "--input-dir", &fixture("s100"), "--now", "0"]);
    assert_eq!(order(&sim.unwrap()["final_list"]), order(&ranked.unwrap()));
}

#[test]
fn simulate_experiments_emit_summaries() {
    let (code, v) = run_json(&[
        "simulate",
        "--scenario",
        &fixture("feedback.toml"),
        "--runs",
        "4",
        "--experiment",
        "feedback",
        "--seed",
        "1",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = v.unwrap();
    assert!(v["raw_mean"].is_number() && v["integrated_mean"].is_number());
    assert_eq!(v["pairs"].as_array().unwrap().len(), 4);
    let (code, v) = run_json(&[
        "simulate",
        "--scenario",
        &fixture("timing.toml"),
        "--method",
        "date",
        "--runs",
        "3",
        "--experiment",
        "timing",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v.unwrap()["runs"], 3);
    let (code, v) = run_json(&["simulate", "--scenario", &fixture("feedback.toml"), "--runs", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v.unwrap().as_array().unwrap().len(), 2);
}

#[test]
fn simulate_bad_scenarios_are_data_errors() {
    assert_eq!(run_args(&["simulate", "--scenario", "/nonexistent.toml"]), EXIT_DATA);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "group_sizes = [1]\ngroup_pools = [1]\ngroup_approval_probs = [0.5]\nhorizon = \"long\"\n")
        .unwrap();
    assert_eq!(run_args(&["simulate", "--scenario", &bad.display().to_string()]), EXIT_DATA);
}

fn binary(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_delisort")).args(args).current_dir(cwd).output().unwrap()
}

#[test]
fn binary_exit_codes_and_messages() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let ok =
        binary(&["rank", "--method", "coverage", "--input-dir", "fixtures/s100", "--now", "0", "--top", "3"], &root);
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(order(&v), ["x01", "y01", "z01"]);

    let unknown = binary(&["rank", "--method", "hot", "--input-dir", "fixtures/s100"], &root);
    assert_eq!(unknown.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&unknown.stderr);
    assert!(msg.contains("seqphragmen") && msg.contains("integrated"), "{msg}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "group_sizes = [1]\ngroup_pools = [1]\ngroup_approval_probs = [0.5]\n\nhorizon = -1\n").unwrap();
    let parse = binary(&["simulate", "--scenario", &bad.display().to_string()], &root);
    assert_eq!(parse.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&parse.stderr);
    assert!(msg.contains("bad.toml:5:"), "{msg}");

    let help = binary(&["--help"], &root);
    assert_eq!(help.status.code(), Some(0));
}
