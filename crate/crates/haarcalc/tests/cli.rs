use std::process::{Command, Output};

use serde_json::Value;

fn haarcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haarcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn diagram_file(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("haarcalc-{}-{name}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn module_of_mul5_on_qp5_plus_r() {
    let out = haarcalc(&["module", "--expr", "Qp(5)+R", "--morphism", "mul(5)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let r = json(&out);
    assert_eq!(r["results"]["module"]["value"], "1");
    assert_eq!(r["verb"], "module");
    assert_eq!(r["notes"].as_array().unwrap().len(), 1);
}

#[test]
fn k1_of_mul7() {
    let r = json(&haarcalc(&[
        "k1",
        "--expr",
        "Qp(7)",
        "--morphism",
        "mul(7)",
    ]));
    assert_eq!(r["results"]["k1"], serde_json::json!({"7": -1}));
    assert_eq!(r["verdicts"][0]["pass"], true);
}

#[test]
fn holonomy_of_two_arrows() {
    for p in [2, 3, 5, 7] {
        let body = format!(
            r#"{{"vertices": ["Qp({p})", "Qp({p})"], "edges": [{{"from": 0, "to": 1, "morphism": "mul({p})"}}, {{"from": 0, "to": 1, "morphism": "id"}}]}}"#
        );
        let path = diagram_file(&format!("two-{p}"), &body);
        let out = haarcalc(&["holonomy", "--file", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let r = json(&out);
        assert_eq!(
            r["results"]["cycles"][0]["holonomy"]["value"],
            format!("1/{p}")
        );
        assert_eq!(r["results"]["rational"], true);
        let out = haarcalc(&[
            "holonomy",
            "--file",
            path.to_str().unwrap(),
            "--cycle",
            "1+,0-",
        ]);
        assert_eq!(
            json(&out)["results"]["cycles"][0]["holonomy"]["value"],
            format!("{p}")
        );
        std::fs::remove_file(path).unwrap();
    }
}

#[test]
fn symbolic_holonomy_is_reported_not_failed() {
    let path = diagram_file(
        "real",
        r#"{"vertices": ["R", "R"], "edges": [{"from": 0, "to": 1, "morphism": "mul(c)"}, {"from": 0, "to": 1, "morphism": "id"}]}"#,
    );
    let out = haarcalc(&["holonomy", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["rational"], false);
    assert_eq!(r["results"]["cycles"][0]["holonomy"]["symbols"]["c"], 1);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn exit_codes() {
    // usage errors
    for args in [
        &["frobnicate"][..],
        &["module", "--expr", "Qp(5)"],
        &["parse", "--expr", "Qp(4)"],
        &["parse", "--expr", "Qp(5) +"],
        &["check-axioms", "--axiom", "4"],
        &[
            "check-axioms",
            "--axiom",
            "7",
            "--filtration",
            "ring(2,1,0)",
        ],
        &["selftest", "--only", "13"],
    ] {
        let out = haarcalc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    // failed verdict
    let out = haarcalc(&["module", "--expr", "Z", "--morphism", "mul(2)"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdicts"][0]["pass"], false);
    // domain and guard errors
    for args in [
        &["k0", "--expr", "Qp(5)"][..],
        &["gg-pi0", "--prime", "2", "--max-length", "4"],
        &["k1", "--expr", "R", "--morphism", "mul(2)"],
    ] {
        let out = haarcalc(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    assert_eq!(haarcalc(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_error_names_the_position() {
    let out = haarcalc(&["parse", "--expr", "Qp(4)"]);
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("K(4)") && msg.contains("position 3"), "{msg}");
}

#[test]
fn report_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("haarcalc-{}-gg.json", std::process::id()));
    let out = haarcalc(&[
        "gg-pi0",
        "--prime",
        "2",
        "--max-length",
        "2",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    let r = json(&out);
    assert_eq!(r["results"]["vertex_count"], 16);
    assert_eq!(r["results"]["edges_checked"], r["results"]["edge_count"]);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn text_rendering() {
    let out = haarcalc(&["--format", "text", "defect", "--sequence", "mult-z(6)"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("defect (haarcalc"));
    assert!(text.contains("value: 6"));
}

#[test]
fn selftest_is_reproducible() {
    let run = |seed: &str| haarcalc(&["--seed", seed, "selftest", "--only", "4"]);
    let (a, b, c) = (run("7"), run("7"), run("8"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json(&a)["results"]["seed"], 7);
}

#[test]
fn every_verb_runs() {
    for args in [
        &["parse", "--expr", "Qp(5)^2 + Z/6 + T"][..],
        &["parse", "--expr", ""],
        &["classify", "--expr", "R + Zp(3) + Z"],
        &[
            "split",
            "--sequence",
            "compact-open(Qp(2)+Z/4; 1,2)",
            "--scale",
            "3/4",
        ],
        &[
            "check-axioms",
            "--axiom",
            "3",
            "--expr",
            "Qp(3)+Z/5",
            "--morphism",
            "mul(3)",
        ],
        &[
            "check-axioms",
            "--axiom",
            "4",
            "--filtration",
            "tower(Qp(2)+Zp(3); 2,1; 0,0)",
        ],
        &[
            "check-axioms",
            "--axiom",
            "5",
            "--expr",
            "Qp(2)",
            "--other",
            "Z/3",
        ],
        &["haq", "--expr", "Qp(2)+T", "--scale", "5/3"],
    ] {
        let out = haarcalc(args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stderr.is_empty(), "{args:?}");
    }
    let r = json(&haarcalc(&["parse", "--expr", "Qp(5)^2 + Z/6 + T"]));
    assert_eq!(r["results"]["normalized"], "Qp(5)^2 + T + Z/6");
}
