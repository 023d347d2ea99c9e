use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use temporal_branchings::io::parse_instance;

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tbranch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tbranch"))
        .args(args)
        .env("NO_COLOR", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Two parallel edges from the root, so both branchings fit.
const PARALLEL: &str = "\
tdg 1
v r
v a
active r 1
active a 1
e e1 r a
e e2 r a
te e1 1 1
te e2 1 1
roots 1
r r 1
";

const GOLDEN_CNF: &str = "p cnf 4 2\n1 2 3 0\n2 3 4 0\n";

#[test]
fn solve_then_verify_succeeds() {
    let inst = scratch("parallel.tdg", PARALLEL);
    let p = inst.to_str().unwrap();
    for (s, d) in [
        ("temporal", "t-edge"),
        ("temporal", "edge"),
        ("vertex", "edge"),
    ] {
        let (code, sol, _) = run(
            &["solve", "--spanning", s, "--disjoint", d, "--k", "2", p],
            None,
        );
        assert_eq!(code, 0, "{s} {d}");
        assert!(sol.starts_with("sol 1\n"));
        let solp = scratch(&format!("parallel-{s}-{d}.sol"), &sol);
        let (code, out, _) = run(&["verify", p, solp.to_str().unwrap()], None);
        assert_eq!((code, out.as_str()), (0, "VALID\n"));
    }
}

#[test]
fn single_edge_is_infeasible_for_two() {
    let text = PARALLEL.replace("te e2 1 1\n", "");
    let (code, out, err) = run(
        &[
            "solve",
            "--spanning",
            "temporal",
            "--disjoint",
            "edge",
            "--k",
            "2",
            "-",
        ],
        Some(&text),
    );
    assert_eq!(code, 3);
    assert_eq!(out, "INFEASIBLE\n");
    assert!(err.starts_with("reason: "));
    assert!(!err.contains('\x1b'));
}

#[test]
fn tampered_solution_is_rejected() {
    let inst = scratch("tamper.tdg", PARALLEL);
    let sol = "sol 1\nbranching 1\nactive r 1\nactive a 1\nte e1 1 1\n\
               branching 2\nactive r 1\nactive a 1\nte e1 1 1\n";
    let solp = scratch("tamper.sol", sol);
    let args = ["verify", "--spanning", "temporal", "--disjoint", "t-edge"];
    let (code, out, err) = run(
        &[&args[..], &[inst.to_str().unwrap(), solp.to_str().unwrap()]].concat(),
        None,
    );
    assert_eq!(code, 3);
    assert_eq!(out, "INVALID\n");
    assert!(err.contains("e1"), "{err}");
}

#[test]
fn verify_needs_a_variant() {
    let inst = scratch("novariant.tdg", PARALLEL);
    let solp = scratch("novariant.sol", "sol 1\nbranching 1\nactive r 1\n");
    let (code, _, _) = run(
        &["verify", inst.to_str().unwrap(), solp.to_str().unwrap()],
        None,
    );
    assert_eq!(code, 2);
}

#[test]
fn parse_errors_exit_2_with_line() {
    let bad = "tdg 1\nv a\nactive a 1\nte nope 1 1\n";
    let (code, _, err) = run(
        &["solve", "--spanning", "temporal", "--disjoint", "edge", "-"],
        Some(bad),
    );
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn poly_vertex_is_a_capability_error() {
    let inst = scratch("poly.tdg", PARALLEL);
    let (code, _, err) = run(
        &[
            "solve",
            "--spanning",
            "vertex",
            "--disjoint",
            "edge",
            "--method",
            "poly",
            inst.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code, 4);
    assert!(err.contains("NP-complete"));
}

#[test]
fn oracle_refuses_large_instances() {
    let mut text = String::from("tdg 1\nv a\nv b\nactive a 1-16\nactive b 1-16\ne ab a b\n");
    for t in 1..=16 {
        text.push_str(&format!("te ab {t} {t}\n"));
    }
    text.push_str("roots 1\nr a 1\n");
    let (code, _, err) = run(
        &[
            "oracle",
            "--spanning",
            "temporal",
            "--disjoint",
            "edge",
            "-",
        ],
        Some(&text),
    );
    assert_eq!(code, 4, "{err}");
}

#[test]
fn k_must_match_root_sets() {
    let text = format!("{PARALLEL}roots 2\nr a 1\n");
    let (code, _, err) = run(
        &[
            "solve",
            "--spanning",
            "temporal",
            "--disjoint",
            "edge",
            "--k",
            "3",
            "-",
        ],
        Some(&text),
    );
    assert_eq!(code, 2);
    assert!(err.contains("--k 3"));
}

#[test]
fn reduce_nae_star_has_lifetime_11() {
    let cnf = scratch("golden.cnf", GOLDEN_CNF);
    let (code, out, _) = run(&["reduce", "nae-star", cnf.to_str().unwrap()], None);
    assert_eq!(code, 0);
    assert!(out.starts_with("tdg 1\nlifetime 11\n"));
    let (g, roots) = parse_instance(&out).unwrap();
    assert_eq!(g.lifetime(), Some(11));
    assert_eq!(roots.len(), 2);
}

#[test]
fn reduce_nae_vertex_then_solve() {
    let (code, out, _) = run(&["reduce", "nae-vertex", "-"], Some(GOLDEN_CNF));
    assert_eq!(code, 0);
    let (g, _) = parse_instance(&out).unwrap();
    assert_eq!(g.num_vertices(), 20);
    let (code, _, _) = run(
        &["solve", "--spanning", "vertex", "--disjoint", "edge", "-"],
        Some(&out),
    );
    assert_eq!(code, 0);
}

#[test]
fn negative_literal_is_rejected() {
    let (code, _, err) = run(&["reduce", "nae-star", "-"], Some("p cnf 3 1\n1 -2 3 0\n"));
    assert_eq!(code, 2);
    assert!(err.contains("positive"), "{err}");
}

#[test]
fn reduce_wdp_normalizes() {
    let doc = "wdp 1\nv s\nv t\nv u\ne st s t\ne su s u\nreq s t\nreq s u\n";
    let (code, out, err) = run(&["reduce", "wdp", "-"], Some(doc));
    assert_eq!(code, 0);
    assert!(err.contains("normalizing"));
    let (g, roots) = parse_instance(&out).unwrap();
    assert!(g.vertex_id("X").is_some() && g.vertex_id("Y").is_some());
    assert_eq!(roots.len(), 2);
    let (code, _, _) = run(
        &["solve", "--spanning", "temporal", "--disjoint", "edge", "-"],
        Some(&out),
    );
    assert_eq!(code, 0);
}

#[test]
fn reduce_root_normalizations() {
    let (code, out, _) = run(&["reduce", "single-source", "-"], Some(PARALLEL));
    assert_eq!(code, 0);
    let (g, roots) = parse_instance(&out).unwrap();
    assert_eq!(g.gamma(g.vertex_id("r'").unwrap()).first(), Some(&0));
    assert_eq!(roots.len(), 1);
    let (code, out, _) = run(
        &["reduce", "lift-roots", "--spanning", "vertex", "-"],
        Some(PARALLEL),
    );
    assert_eq!(code, 0);
    assert!(out.ends_with("roots 2\nr r 1\nr a 1\n"), "{out}");
}

#[test]
fn gen_is_seed_deterministic() {
    let args = [
        "gen",
        "--vertices",
        "4",
        "--lifetime",
        "3",
        "--edge-prob",
        "0.4",
        "--seed",
        "11",
    ];
    let (c1, a, _) = run(&args, None);
    let (c2, b, _) = run(&args, None);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let (code, c, _) = run(
        &[
            "gen",
            "--vertices",
            "4",
            "--lifetime",
            "3",
            "--edge-prob",
            "0.4",
            "--seed",
            "11",
            "--interval-activity",
        ],
        None,
    );
    assert_eq!(code, 0);
    let (g, _) = parse_instance(&c).unwrap();
    assert_eq!(g.first_non_interval_vertex(), None);
    let (code, _, _) = run(
        &[
            "gen",
            "--vertices",
            "2",
            "--lifetime",
            "2",
            "--edge-prob",
            "1.5",
            "--seed",
            "0",
        ],
        None,
    );
    assert_eq!(code, 2);
}

#[test]
fn missing_file_is_a_usage_error() {
    let (code, _, _) = run(
        &[
            "solve",
            "--spanning",
            "temporal",
            "--disjoint",
            "edge",
            "/nonexistent/x.tdg",
        ],
        None,
    );
    assert_eq!(code, 2);
}
