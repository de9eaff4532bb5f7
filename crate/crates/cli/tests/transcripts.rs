use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("stdout is JSON")
    }
}

fn pmas(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_pmas"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn graph(dir: &TempDir, name: &str, text: &str) -> String {
    let path: PathBuf = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn assert_usage_error(run: &Run) {
    assert_eq!(run.code, 2, "stdout: {}", run.stdout);
    assert!(run.stdout.is_empty());
    assert!(!run.stderr.is_empty());
    assert!(!run.stderr.contains("panicked"), "{}", run.stderr);
}

const P4: &str = "# path with a heavy middle edge\n1 2 1\n2 3 3\n3 4 1\n";
const C4: &str = "1 2 1\n2 3 1\n3 4 1\n4 1 1\n";

#[test]
fn check_p4() {
    let dir = TempDir::new().unwrap();
    let run = pmas(&["check", &graph(&dir, "p4.txt", P4)]);
    assert_eq!(run.code, 0);
    let doc = run.json();
    assert_eq!(doc["population_monotonic"], true);
    assert_eq!(
        doc["witnesses"][0]["centers"],
        serde_json::json!(["2", "3"])
    );
    assert_eq!(doc["witnesses"][0]["margin"], "1");
    assert_eq!(
        doc["witnesses"][0]["sigma"],
        serde_json::json!({"2": "1", "3": "1"})
    );
}

#[test]
fn check_c4() {
    let dir = TempDir::new().unwrap();
    let run = pmas(&["check", &graph(&dir, "c4.txt", C4)]);
    assert_eq!(run.code, 1);
    let doc = run.json();
    assert_eq!(doc["population_monotonic"], false);
    assert_eq!(doc["certificate"]["kind"], "C4");
    assert_eq!(doc["certificate"]["reason"], "NOT_DOUBLE_STAR");
}

#[test]
fn gamma_golden() {
    let dir = TempDir::new().unwrap();
    let file = graph(&dir, "p4.txt", P4);
    let run = pmas(&["gamma", &file, "--coalition", "1,2,3,4"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout, "{\n  \"gamma\": \"3\"\n}\n");
    let run = pmas(&["gamma", &file, "--coalition", "1,2,4"]);
    assert_eq!(run.json()["gamma"], "1");
}

#[test]
fn gamma_beyond_the_matching_cap_uses_the_closed_form() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("u v 100\n");
    for k in 0..40 {
        text.push_str(&format!("u a{k} {}\nv b{k} 1/{}\n", k % 5 + 1, k % 3 + 1));
    }
    let file = graph(&dir, "star.txt", &text);
    let everyone: Vec<String> = ["u".to_owned(), "v".to_owned()]
        .into_iter()
        .chain((0..40).map(|k| format!("a{k}")))
        .collect();
    let run = pmas(&["gamma", &file, "--coalition", &everyone.join(",")]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    // u-v is worth more than u-a plus v-b (5 + 1).
    assert_eq!(run.json()["gamma"], "100");
    let leaves_only: Vec<String> = (0..30)
        .map(|k| format!("a{k}"))
        .chain(["u".into()])
        .collect();
    let run = pmas(&["gamma", &file, "--coalition", &leaves_only.join(",")]);
    assert_eq!(run.json()["gamma"], "5");
}

#[test]
fn unknown_label_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let file = graph(&dir, "p4.txt", P4);
    assert_usage_error(&pmas(&["gamma", &file, "--coalition", "1,9"]));
    assert_usage_error(&pmas(&["allocate", &file, "--coalition", "x"]));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_usage_error(&pmas(&["check", "/nonexistent/graph.txt"]));
    assert_usage_error(&pmas(&["check", &graph(&dir, "bad.txt", "1 2\n")]));
    assert_usage_error(&pmas(&["check", &graph(&dir, "neg.txt", "1 2 -1\n")]));
    assert_usage_error(&pmas(&["check", &graph(&dir, "loop.txt", "1 1 2\n")]));
    assert_eq!(pmas(&["frobnicate"]).code, 2);
    assert_eq!(pmas(&["check"]).code, 2);
    assert_eq!(pmas(&["scan", "--bogus", "x"]).code, 2);
    let eight: String = (1..=8).map(|i| format!("{i}\n")).collect();
    let run = pmas(&["oracle", &graph(&dir, "eight.txt", &eight)]);
    assert_usage_error(&run);
    assert!(run.stderr.contains("at most 7"));
}

#[test]
fn pmas_then_verify_closes_the_pipeline() {
    let dir = TempDir::new().unwrap();
    let file = graph(&dir, "p4.txt", P4);
    let scheme = dir.path().join("s.json");
    let run = pmas(&["pmas", &file, "--out", scheme.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&scheme).unwrap()).unwrap();
    assert_eq!(doc["coalitions"].as_array().unwrap().len(), 15);

    let run = pmas(&["verify", &file, "--scheme", scheme.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    assert_eq!(
        run.stdout,
        "{\n  \"passed\": true,\n  \"violation\": null\n}\n"
    );
}

fn set_payoff(doc: &mut Value, members: &[&str], player: &str, value: &str) {
    let rows = doc["coalitions"].as_array_mut().unwrap();
    let row = rows
        .iter_mut()
        .find(|r| r["members"] == serde_json::json!(members))
        .unwrap();
    row["payoff"][player] = Value::String(value.into());
}

#[test]
fn verify_reports_the_first_violation() {
    let dir = TempDir::new().unwrap();
    let file = graph(&dir, "p4.txt", P4);
    let base = pmas(&["pmas", &file]).json();

    let mut broken = base.clone();
    set_payoff(&mut broken, &["2", "3"], "2", "2");
    let path = dir.path().join("eff.json");
    fs::write(&path, broken.to_string()).unwrap();
    let run = pmas(&["verify", &file, "--scheme", path.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    let v = &run.json()["violation"];
    assert_eq!(v["type"], "efficiency");
    assert_eq!(v["coalition"], serde_json::json!(["2", "3"]));
    assert_eq!(v["total"], "7/2");

    // An efficient but leaf-favouring split of {1,2}: the leaf then loses
    // payoff when center 3 joins.
    let mut broken = base;
    set_payoff(&mut broken, &["1", "2"], "1", "1/2");
    set_payoff(&mut broken, &["1", "2"], "2", "1/2");
    let path = dir.path().join("mono.json");
    fs::write(&path, broken.to_string()).unwrap();
    let run = pmas(&["verify", &file, "--scheme", path.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    let v = &run.json()["violation"];
    assert_eq!(v["type"], "monotonicity");
    assert_eq!(v["smaller"], serde_json::json!(["1", "2"]));
    assert_eq!(v["larger"], serde_json::json!(["1", "2", "3"]));
    assert_eq!(v["player"], "1");
    assert_eq!(
        (v["before"].as_str(), v["after"].as_str()),
        (Some("1/2"), Some("0"))
    );
}

#[test]
fn verify_rejects_malformed_schemes() {
    let dir = TempDir::new().unwrap();
    let file = graph(&dir, "p4.txt", P4);
    let path = dir.path().join("s.json");
    fs::write(&path, "{\"coalitions\": []}").unwrap();
    assert_usage_error(&pmas(&[
        "verify",
        &file,
        "--scheme",
        path.to_str().unwrap(),
    ]));
    fs::write(&path, "not json").unwrap();
    assert_usage_error(&pmas(&[
        "verify",
        &file,
        "--scheme",
        path.to_str().unwrap(),
    ]));
}

#[test]
fn pmas_on_non_pm_graph_returns_the_certificate() {
    let dir = TempDir::new().unwrap();
    let run = pmas(&["pmas", &graph(&dir, "c4.txt", C4)]);
    assert_eq!(run.code, 1);
    assert_eq!(run.json()["certificate"]["kind"], "C4");
}

#[test]
fn allocate_golden() {
    let dir = TempDir::new().unwrap();
    let file = graph(&dir, "two.txt", "1 2 4\n3 4 6\n");
    let run = pmas(&["allocate", &file, "--coalition", "4,3,2,1"]);
    assert_eq!(run.code, 0);
    assert_eq!(
        run.json(),
        serde_json::json!({
            "members": ["1", "2", "3", "4"],
            "payoff": {"1": "2", "2": "2", "3": "3", "4": "3"}
        })
    );
    let run = pmas(&["allocate", &file, "--coalition", "1,3"]);
    assert_eq!(
        run.json()["payoff"],
        serde_json::json!({"1": "0", "3": "0"})
    );
}

#[test]
fn allocate_on_a_large_double_star() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("u v 21\n");
    for k in 0..5000 {
        text.push_str(&format!("u a{k} {}\nv a{k} {}\n", k % 10 + 1, k % 7 + 1));
    }
    let file = graph(&dir, "big.txt", &text);
    let run = pmas(&["allocate", &file, "--coalition", "u,v,a3"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    // σ_u = 10, σ_v = 7, split 21 as 210/17 : 147/17.
    assert_eq!(
        run.json()["payoff"],
        serde_json::json!({"a3": "0", "u": "210/17", "v": "147/17"})
    );
}

#[test]
fn scan_lists_hits_and_exits_1() {
    let dir = TempDir::new().unwrap();
    let clean = pmas(&["scan", &graph(&dir, "p4.txt", P4)]);
    assert_eq!(clean.code, 0);
    assert_eq!(
        clean.stdout,
        "{\n  \"forbidden_subgraphs\": [],\n  \"lemma_violations\": []\n}\n"
    );

    let file = graph(&dir, "tri.txt", "1 2 1\n1 3 1\n2 3 3/2\n");
    let run = pmas(&["scan", &file]);
    assert_eq!(run.code, 1);
    let doc = run.json();
    let hit = &doc["lemma_violations"][0];
    assert_eq!(hit["kind"], "K3");
    assert_eq!(hit["clause"], "w23 >= w12 + w13");
    assert_eq!(
        (hit["lhs"].as_str(), hit["rhs"].as_str()),
        (Some("3/2"), Some("2"))
    );

    let k5: String = (1..=5)
        .flat_map(|i| (i + 1..=5).map(move |j| format!("{i} {j} 1\n")))
        .collect();
    let file = graph(&dir, "k5.txt", &k5);
    let all = pmas(&["scan", &file]).json();
    let first = pmas(&["scan", &file, "--first"]).json();
    assert_eq!(all["forbidden_subgraphs"].as_array().unwrap().len(), 5);
    assert_eq!(first["forbidden_subgraphs"].as_array().unwrap().len(), 1);
}

#[test]
fn oracle_verdicts() {
    let dir = TempDir::new().unwrap();
    let run = pmas(&["oracle", &graph(&dir, "tri.txt", "1 2 1\n1 3 1\n2 3 2\n")]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json()["feasible"], true);
    assert_eq!(
        run.json()["scheme"]["coalitions"].as_array().unwrap().len(),
        7
    );

    let run = pmas(&["oracle", &graph(&dir, "c4.txt", C4)]);
    assert_eq!(run.code, 1);
    assert_eq!(
        run.stdout,
        "{\n  \"feasible\": false,\n  \"scheme\": null\n}\n"
    );
}

#[test]
fn harness_is_deterministic() {
    let args = [
        "--threads",
        "2",
        "harness",
        "--max-n",
        "4",
        "--trials",
        "30",
        "--seed",
        "5",
    ];
    let a = pmas(&args);
    let b = pmas(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let doc = a.json();
    assert_eq!(doc["exhaustive"]["instances"], 760);
    assert_eq!(doc["exhaustive"]["disagreements"], 0);
    assert_eq!(doc["random"]["trials"], 30);
    assert_eq!(doc["disagreement_dumps"], serde_json::json!([]));
    assert_usage_error(&pmas(&["harness", "--max-n", "8"]));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let file = graph(&dir, "g.txt", "b a 3\nb c 1\na d 3/2\nz\n");
    for cmd in ["check", "pmas", "scan", "oracle"] {
        assert_eq!(pmas(&[cmd, &file]).stdout, pmas(&[cmd, &file]).stdout);
    }
}

#[test]
fn labels_sort_as_strings() {
    let dir = TempDir::new().unwrap();
    let file = graph(&dir, "g.txt", "10 9 2\n");
    let run = pmas(&["allocate", &file, "--coalition", "9,10"]);
    assert_eq!(run.json()["members"], serde_json::json!(["10", "9"]));
}
