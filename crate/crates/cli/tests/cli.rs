use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn advncg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_advncg")).args(args).env_remove("ADVNCG_BUDGET").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn graph_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

/// Rows of a CSV output as maps from column name to cell.
fn rows(o: &Output) -> Vec<std::collections::HashMap<String, String>> {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(o);
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    lines.map(|l| header.iter().cloned().zip(l.split(',').map(str::to_string)).collect()).collect()
}

const DG3: &str = "advncg-graph v1\nn 3\n# doubled triangle\ne 0 1 0\ne 0 1 1\ne 0 2 0\ne 0 2 2\ne 1 2 1\ne 1 2 2\n";
const C4: &str = "advncg-graph v1\nn 4\ne 0 1 0\ne 1 2 1\ne 2 3 2\ne 3 0 3\n";

#[test]
fn eval_social_costs_from_files() {
    let f = graph_file(DG3);
    let r = rows(&advncg(&["eval", f.path().to_str().unwrap(), "--alpha", "1"]));
    let social = r.iter().find(|row| row["scope"] == "social").unwrap();
    assert_eq!(social["cost"], "12/1");
    assert_eq!(social["distance"], "6/1");
    let f = graph_file(C4);
    let r = rows(&advncg(&["eval", f.path().to_str().unwrap(), "--alpha", "1"]));
    assert_eq!(r.last().unwrap()["cost"], "24/1");
    assert_eq!(r.len(), 5);
}

#[test]
fn eval_accepts_decimal_alpha_exactly() {
    let r = rows(&advncg(&["eval", "dg3", "--alpha", "10.3", "--agent", "1"]));
    assert_eq!(r.len(), 2);
    // 2 * 103/10 + 2
    assert_eq!(r[0]["cost"], "113/5");
    assert_eq!(r[0]["cost-decimal"], "22.6");
}

#[test]
fn malformed_owner_is_a_parse_error() {
    let f = graph_file("advncg-graph v1\nn 3\ne 0 1 0\ne 1 2 0\n");
    let o = advncg(&["eval", f.path().to_str().unwrap(), "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(advncg(&["eval", "dg3"]).status.code(), Some(2));
    assert_eq!(advncg(&["eval", "no-such-thing", "--alpha", "1"]).status.code(), Some(2));
}

#[test]
fn precondition_and_budget_exit_codes() {
    // three parallel instances exceed the default cap of 2
    let f = graph_file("advncg-graph v1\nn 2\ne 0 1 0\ne 0 1 0\ne 0 1 1\n");
    assert_eq!(advncg(&["eval", f.path().to_str().unwrap(), "--alpha", "1"]).status.code(), Some(5));
    assert_eq!(advncg(&["poa", "--n", "5", "--alpha-grid", "1"]).status.code(), Some(4));
    let o = Command::new(env!("CARGO_BIN_EXE_advncg"))
        .args(["opt-sweep", "--n", "4", "--alpha-grid", "1"])
        .env("ADVNCG_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn ne_check_examples() {
    let r = rows(&advncg(&["ne-check", "ds5", "--alpha", "1"]));
    assert_eq!(r[0]["is-nash"], "true");
    let r = rows(&advncg(&["ne-check", "dg3", "--alpha", "1/4"]));
    assert_eq!(r[0]["is-nash"], "false");
    assert_eq!(r[0]["move-kind"], "delete");
    assert_eq!(r[0]["delta"], "1/20");
    let r = rows(&advncg(&["ne-check", "dg4", "--alpha", "1/11"]));
    assert_eq!(r[0]["is-nash"], "true");
}

#[test]
fn best_response_row() {
    let r = rows(&advncg(&["br", "dg3", "--alpha", "1/4", "--agent", "0"]));
    assert_eq!(r[0]["current-strategy"], "1 2");
    assert_eq!(r[0]["best-strategy"], "1");
    assert_eq!(r[0]["gain"], "1/20");
    assert_eq!(r[0]["improving"], "true");
}

#[test]
fn structure_of_double_path() {
    let r = rows(&advncg(&["structure", "double-path-4"]));
    assert_eq!(r[0]["two-cut-edge-count"], "6");
    assert_eq!(r[0]["bridge-count"], "0");
    assert_eq!(r[0]["diameter"], "3");
}

#[test]
fn dynamics_from_path_converges() {
    let o = advncg(&["dynamics", "--start", "path3", "--alpha", "1", "--policy", "best-response"]);
    let r = rows(&o);
    assert!(!r.is_empty() && r.len() <= 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("converged"));
}

#[test]
fn random_dynamics_are_byte_stable() {
    let args = ["dynamics", "--start", "c5", "--alpha", "1/2", "--schedule", "random", "--seed", "7"];
    let a = advncg(&args);
    let b = advncg(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn opt_sweep_partial_double_windows() {
    // labels contain commas and are quoted, so check the raw text
    let text = stdout(&advncg(&["opt-sweep", "--n", "4", "--alpha-grid", "lemma2-windows"]));
    assert_eq!(text.lines().count(), 6);
    for k in 1..=5 {
        assert!(text.contains(&format!("\"DG_{{4,{k}}}\"")), "{text}");
    }
    let alias = stdout(&advncg(&["opt-sweep", "--n", "4", "--alpha-grid", "partial-double-windows"]));
    assert_eq!(alias, text);
}

#[test]
fn poa_grid_small() {
    let r = rows(&advncg(&["poa", "--n", "3", "--alpha-grid", "1/6,201/1000"]));
    assert_eq!(r[0]["pos"], "1/1");
    assert_eq!(r[0]["search-complete"], "true");
    assert_eq!(r[1]["pos"], "7405/7206");
}

#[test]
fn poa_sampled_is_marked_incomplete() {
    let r = rows(&advncg(&["poa", "--n", "5", "--alpha-grid", "10", "--sampled", "--samples", "50"]));
    assert_eq!(r[0]["search-complete"], "false");
    assert_eq!(r[0]["poa"], "");
    assert!(!r[0]["poa-lower-bound"].is_empty());
}

#[test]
fn domset_with_reduction() {
    // path on five nodes
    let f = graph_file("advncg-graph v1\nn 5\ne 0 1 0\ne 1 2 1\ne 2 3 2\ne 3 4 3\n");
    let r = rows(&advncg(&["domset", f.path().to_str().unwrap(), "--verify-reduction"]));
    assert_eq!(r[0]["size"], "3");
    assert_eq!(r[0]["domination-number"], "2");
    assert_eq!(r[0]["universal-cds-size"], "3");
    assert_eq!(r[0]["holds"], "true");
}

#[test]
fn json_lines_output() {
    let o = advncg(&["--format", "json", "structure", "c4"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["two-cut-edge-count"], "4");
}
