use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn domlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domlab"))
        .args(args)
        .env_remove("DOMLAB_BUDGET_MS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn invariant_values_and_certificates() {
    let dir = TempDir::new().unwrap();
    let c4 = write(dir.path(), "c4.g6", "Cl\n");
    let out = domlab(&["invariant", s(&c4), "--which", "gammak", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("gamma_{2} = 3\tcertificate (0,1,1,1)"));
    let out = domlab(&["invariant", s(&c4), "--which", "gammawk"]);
    assert!(stdout(&out).starts_with("gamma_w{2} = 2"));
    let out = domlab(&["invariant", s(&c4), "--which", "i", "--solver", "oracle"]);
    assert!(stdout(&out).contains("brute-force"));
}

#[test]
fn invariant_reads_edge_lists_and_many_graphs() {
    let dir = TempDir::new().unwrap();
    let p5 = write(dir.path(), "p5.txt", "5 4\n0 1\n1 2\n2 3\n3 4\n");
    let out = domlab(&["invariant", s(&p5), "--which", "gamma"]);
    assert!(stdout(&out).starts_with("gamma = 2"));
    let many = write(dir.path(), "many.g6", "A_\nC~\n");
    let out = domlab(&["invariant", s(&many), "--which", "gamma2"]);
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("A_\tgamma_2 = 2"));
    assert!(lines[1].starts_with("C~\tgamma_2 = 2"));
}

#[test]
fn product_formats() {
    let dir = TempDir::new().unwrap();
    let c4 = write(dir.path(), "c4.g6", "Cl\n");
    let k2 = write(dir.path(), "k2.g6", "A_\n");
    let out_g6 = dir.path().join("q3.g6");
    assert_eq!(domlab(&["product", s(&c4), s(&k2), "-o", s(&out_g6)]).status.code(), Some(0));
    let q3 = domlab::io::read_graph(&out_g6).unwrap();
    assert_eq!((q3.order(), q3.size()), (8, 12));
    let out_el = dir.path().join("q3.txt");
    domlab(&["product", s(&c4), s(&k2), "-o", s(&out_el), "--format", "edges"]);
    assert_eq!(domlab::io::read_graph(&out_el).unwrap(), q3);
}

#[test]
fn large_products_fall_back_to_edge_lists() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "c8.txt", "8 8\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n0 7\n");
    let out = dir.path().join("prod");
    assert_eq!(domlab(&["product", s(&p), s(&p), "-o", s(&out)]).status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("64 128\n"));
    assert_eq!(
        domlab(&["product", s(&p), s(&p), "-o", s(&out), "--format", "graph6"]).status.code(),
        Some(3)
    );
}

#[test]
fn clawfree_exit_codes() {
    let dir = TempDir::new().unwrap();
    let c4 = write(dir.path(), "c4.g6", "Cl\n");
    let star = write(dir.path(), "star.txt", "4 3\n0 1\n0 2\n0 3\n");
    assert_eq!(domlab(&["clawfree", s(&c4)]).status.code(), Some(0));
    let out = domlab(&["clawfree", s(&star)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("center 0"));
}

#[test]
fn filter_keeps_claw_free_graphs_in_order() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "in.g6", "C~\nCs\n\nCr\nCl\n");
    let output = dir.path().join("out.g6");
    assert_eq!(domlab(&["filter-clawfree", s(&input), s(&output)]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&output).unwrap(), "C~\nCr\nCl\n");
}

#[test]
fn label_dumps_a_replayable_trace() {
    let dir = TempDir::new().unwrap();
    let c4 = write(dir.path(), "c4.g6", "Cl\n");
    let p3 = write(dir.path(), "p3.g6", "Bg\n");
    let trace = dir.path().join("trace.txt");
    let out = domlab(&["label", s(&c4), s(&p3), "--dump-trace", s(&trace)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("passed"));
    let text = fs::read_to_string(&trace).unwrap();
    let records = domlab::labeling::parse_trace(&text).unwrap();
    assert!(!records.is_empty());
    assert!(text.lines().all(|l| l.starts_with("rule=")));
}

#[test]
fn label_accepts_explicit_weights() {
    let dir = TempDir::new().unwrap();
    let k2 = write(dir.path(), "k2.g6", "A_\n");
    let k1 = write(dir.path(), "k1.g6", "@\n");
    let d = write(dir.path(), "d.txt", "# weights\n2 0\n");
    let out = domlab(&["label", s(&k2), s(&k1), "--d", s(&d)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("|D| = 2"));
    let bad = write(dir.path(), "bad.txt", "0 0\n");
    assert_eq!(domlab(&["label", s(&k2), s(&k1), "--d", s(&bad)]).status.code(), Some(1));
}

#[test]
fn label_rejects_graphs_with_claws() {
    let dir = TempDir::new().unwrap();
    let star = write(dir.path(), "star.txt", "4 3\n0 1\n0 2\n0 3\n");
    let k2 = write(dir.path(), "k2.g6", "A_\n");
    let out = domlab(&["label", s(&star), s(&k2)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("claw"));
}

#[test]
fn sweep_is_reproducible_across_job_counts() {
    let dir = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for jobs in ["1", "3"] {
        let o = dir.path().join(format!("r{jobs}.jsonl"));
        let csv = dir.path().join(format!("s{jobs}.csv"));
        let out = domlab(&[
            "sweep", "--g", "connected:4", "--h", "connected:3", "--claw-free", "--k", "2", "--jobs", jobs,
            "-o", s(&o), "--csv", s(&csv),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let csv = fs::read_to_string(&csv).unwrap();
        assert!(csv.ends_with("9,4,36,36,36,0,0,0,0,false\n"), "{csv}");
        reports.push(fs::read(&o).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0].iter().filter(|&&b| b == b'\n').count(), 36);
}

#[test]
fn sweep_budget_from_environment_skips_instances() {
    let dir = TempDir::new().unwrap();
    let o = dir.path().join("r.jsonl");
    let out = Command::new(env!("CARGO_BIN_EXE_domlab"))
        .args(["sweep", "--g", "petersen", "--h", "cycle:7", "-o", s(&o)])
        .env("DOMLAB_BUDGET_MS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let line = fs::read_to_string(&o).unwrap();
    assert!(line.contains("\"status\":\"skipped\""));
    assert!(line.contains("1 ms"));
}

#[test]
fn sweep_rejects_enumeration_past_the_cap() {
    let dir = TempDir::new().unwrap();
    let o = dir.path().join("r.jsonl");
    let out = domlab(&["sweep", "--g", "connected:9", "--h", "connected:2", "-o", s(&o)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn allan_laskar_check() {
    let out = domlab(&["check-allan-laskar", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("checked 73 claw-free graphs"));
    assert_eq!(domlab(&["check-allan-laskar", "--n", "9"]).status.code(), Some(3));
}

#[test]
fn usage_errors_do_not_collide_with_findings() {
    assert_eq!(domlab(&["invariant"]).status.code(), Some(64));
    assert_eq!(domlab(&["--help"]).status.code(), Some(0));
}
