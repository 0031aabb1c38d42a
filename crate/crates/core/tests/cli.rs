// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn gridshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridshift"))
        .args(args)
        .env_remove("GRIDSHIFT_BUDGET_MS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = gridshift(&all);
    let v = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().unwrap(), v)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn quotient_chi_prints_five() {
    let out = gridshift(&["quotient-chi", "--group", "gamma", "--k", "3", "--M", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().next(), Some("5"));
}

#[test]
fn verify_commands_exit_zero() {
    for args in [
        vec!["verify-dichotomy", "--k", "3"],
        vec!["verify-invariance", "--k", "3", "--twisted", "true"],
        vec!["verify-rigidity", "--k", "3"],
        vec!["verify-alternation", "--k", "3", "--M", "3"],
        vec!["report", "--k", "3"],
    ] {
        assert_eq!(gridshift(&args).status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"vertices\": 3, \"edges\": [[0, 7]]}").unwrap();
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    for args in [
        vec!["chi", bad.to_str().unwrap()],
        vec!["chi", garbage.to_str().unwrap()],
        vec!["chi", "/nonexistent/graph.json"],
        vec!["verify-dichotomy", "--k", "3", "--palette", "5"],
        vec!["verify-dichotomy", "--frobnicate"],
        vec!["quotient-chi", "--group", "delta", "--k", "3", "--M", "2"],
        vec!["verify-alternation", "--k", "3", "--M", "4"],
    ] {
        assert_eq!(gridshift(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exhausted_budget_exits_three() {
    let out = gridshift(&[
        "quotient-chi",
        "--group",
        "gamma",
        "--k",
        "3",
        "--M",
        "5",
        "--budget-ms",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_gridshift"))
        .args(["verify-alternation", "--k", "3", "--M", "5"])
        .env("GRIDSHIFT_BUDGET_MS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn chi_on_exported_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for format in ["json", "dimacs"] {
        let (code, rep) = json(&[
            "quotient-chi",
            "--group",
            "delta",
            "--k",
            "3",
            "--M",
            "4",
            "--export",
            format,
            "--artifacts",
            d,
        ]);
        assert_eq!(code, 0);
        assert_eq!(rep["results"]["chi"], 3);
        let ext = if format == "json" { "json" } else { "col" };
        let path = dir.path().join(format!("quotient-delta-k3-M4.{ext}"));
        assert!(rep["artifacts"]
            .as_array()
            .unwrap()
            .iter()
            .any(|a| a == path.to_str().unwrap()));
        let (code, rep) = json(&["chi", path.to_str().unwrap(), "--witness"]);
        assert_eq!(code, 0);
        assert_eq!(rep["results"]["chi"], 3);
        assert_eq!(rep["results"]["witness"].as_array().unwrap().len(), 36);
    }
}

#[test]
fn reports_are_reproducible() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v.as_object_mut().unwrap().remove("command");
        v
    };
    let (_, a) = json(&["report", "--k", "3", "--seed", "11"]);
    let (_, b) = json(&["report", "--k", "3", "--seed", "11", "--jobs", "1"]);
    assert_eq!(strip(a.clone()), strip(b));
    assert_eq!(a["outcome"], "ok");
    let rows = a["results"]["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["outcome"] == "ok"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let (_, printed) = json(&[
        "verify-rigidity",
        "--k",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    let written: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(printed["results"], written["results"]);
    assert_eq!(written["command"][1], "verify-rigidity");
}

#[test]
fn two_ended_from_file_and_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("c12.json");
    let edges: Vec<[usize; 2]> = (0..12).map(|i| [i, (i + 1) % 12]).collect();
    let doc = serde_json::json!({
        "mode": "cycle",
        "blocks": (0..12).map(|i| vec![i]).collect::<Vec<_>>(),
        "edges": edges,
    });
    fs::write(&inst, doc.to_string()).unwrap();
    let (code, rep) = json(&["two-ended-color", "--instance", inst.to_str().unwrap()]);
    assert_eq!(code, 0, "{rep}");
    assert!(rep["results"]["colors_used"].as_u64().unwrap() <= 3);

    let art = dir.path().join("art");
    let (code, rep) = json(&[
        "two-ended-color",
        "--builtin",
        "gamma",
        "--blocks",
        "13",
        "--chi",
        "5",
        "--artifacts",
        art.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(rep["results"]["colors_used"].as_u64().unwrap() <= 9);
    let coloring: Vec<u32> =
        serde_json::from_str(&fs::read_to_string(art.join("two-ended-coloring.json")).unwrap())
            .unwrap();
    assert_eq!(coloring.len(), 9 * 13);
    assert!(art.join("psi.json").exists());
}

#[test]
fn shift_color_from_anchor_file() {
    let dir = tempfile::tempdir().unwrap();
    let anchors = dir.path().join("anchors.json");
    fs::write(
        &anchors,
        r#"{"extent": 20, "anchors": [{"position": 0, "offset": [1, 0]}, {"position": 10, "offset": [2, 0]}]}"#,
    )
    .unwrap();
    let (code, rep) = json(&[
        "shift-color",
        "--k",
        "3",
        "--anchors",
        anchors.to_str().unwrap(),
        "--mode",
        "cycle",
    ]);
    assert_eq!(code, 0);
    assert_eq!(rep["results"]["proper"], true);
    assert_eq!(rep["results"]["coloring"].as_array().unwrap().len(), 180);

    fs::write(&anchors, r#"{"extent": 20, "anchors": [{"position": 0, "offset": [1, 0]}, {"position": 5, "offset": [2, 0]}]}"#)
        .unwrap();
    assert_eq!(
        gridshift(&["shift-color", "--anchors", anchors.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cayley_export() {
    let out = gridshift(&[
        "cayley", "--group", "gamma", "--k", "3", "--orbits", "2", "--format", "dimacs",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("p edge 18"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("window.json");
    let out = gridshift(&["cayley", "--group", "delta", "--k", "3", "--orbits", "3"]);
    fs::write(&path, &out.stdout).unwrap();
    let chi = gridshift(&["chi", path.to_str().unwrap()]);
    assert_eq!(chi.status.code(), Some(0));
    assert_eq!(stdout(&chi).lines().next(), Some("3"));
}
