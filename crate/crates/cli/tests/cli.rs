use std::path::Path;
use std::process::{Command, Output};

fn toda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toda")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Value of a `# drift <name> <value>` footer line.
fn drift(csv: &str, name: &str) -> f64 {
    let prefix = format!("# drift {name} ");
    csv.lines().find_map(|l| l.strip_prefix(&prefix)).expect("drift line").parse().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .take_while(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn harmonic_toy_flow_returns_after_one_period() {
    let o = toda(&["flow", "--system", "a1toy", "--n", "0", "--t", "6.283185307179586", "--stride", "500"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("t,pt,qt,trL,trL2,trL3,eig1,eig2"));
    let r = rows(&csv);
    let last = r.last().unwrap();
    assert!((last[1] - 0.0).abs() < 1e-9 && (last[2] - 1.0).abs() < 1e-9);
    assert!(drift(&csv, "eigenvalues") < 1e-9);
}

#[test]
fn gl_flow_conserves_traces() {
    let o = toda(&["flow", "--system", "gl", "--size", "3", "--t", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = stdout(&o);
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "t,a11,a12,a13,a21,a22,a23,a31,a32,a33,trL,trL2,trL3,eig1,eig2,eig3");
    for k in 1..=3 {
        assert!(drift(&csv, &format!("trL{k}")) < 1e-6);
    }
}

#[test]
fn a2_flow_header_and_isospectrality() {
    let o = toda(&["flow", "--system", "a2", "--z0", "0.3,-0.2,0.5,-0.4", "--t", "10"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("t,pxi,peta,xi,eta,trL,trL2,trL3,eig1,eig2,eig3"));
    assert_eq!(rows(&csv).len(), 101);
    assert!(drift(&csv, "eigenvalues") < 1e-7);
    assert!(drift(&csv, "energy") < 1e-7);
}

#[test]
fn adaptive_method_and_hierarchy() {
    let o = toda(&[
        "flow",
        "--system",
        "hierarchy",
        "--m",
        "2",
        "--method",
        "dp",
        "--rtol",
        "1e-10",
        "--atol",
        "1e-12",
        "--t",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(drift(&stdout(&o), "trL2") < 1e-7);
}

#[test]
fn flow_output_is_deterministic() {
    let args = ["flow", "--system", "a2", "--seed", "7", "--t", "2", "--stride", "50"];
    let a = toda(&args);
    let b = toda(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = toda(&["flow", "--system", "a2", "--seed", "8", "--t", "2", "--stride", "50"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_with_command_line_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let out = dir.path().join("traj.csv");
    std::fs::write(&cfg, "# harmonic toy\nsystem = a1toy\nn = 0\nt = 1.0\nh = 0.01\nstride = 10\n").unwrap();
    let o = toda(&["--config", cfg.to_str().unwrap(), "flow", "--t", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let r = rows(&csv);
    assert_eq!(r.len(), 6);
    assert_eq!(r.last().unwrap()[0], 0.5);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "colour = red\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["--config", bad.to_str().unwrap(), "flow"],
        vec!["--config", "/nonexistent/run.conf", "flow"],
        vec!["flow", "--system", "a5"],
        vec!["flow", "--system", "a2", "--z0", "1,2"],
        vec!["flow", "--system", "a2", "--h", "-1"],
        vec!["flow", "--method", "euler"],
        vec!["spectrum"],
        vec!["spectrum", "--problem", "box", "--domain", "3:1"],
        vec!["spectrum", "--problem", "box", "--N", "10"],
        vec!["spectrum", "--problem", "box", "--map", "u"],
        vec!["star", "--f", "L9_9", "--g", "L1_1"],
        vec!["verify", "everything"],
        vec!["flow", "--bogus-flag"],
        vec![],
    ];
    for args in cases {
        let o = toda(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn integration_failure_exits_three() {
    // A rotation generator has complex spectrum; the Cholesky flow blows up in finite time.
    let o = toda(&["flow", "--system", "gl", "--size", "2", "--z0", "0,1,-1,0", "--t", "10"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("non-finite"));
}

#[test]
fn box_spectrum_csv() {
    let o = toda(&["spectrum", "--problem", "box", "--N", "2000", "--k", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,E_k"));
    for (k, line) in lines.enumerate() {
        let (idx, e) = line.split_once(',').unwrap();
        assert_eq!(idx.parse::<usize>().unwrap(), k);
        assert!((e.parse::<f64>().unwrap() - ((k + 1) * (k + 1)) as f64 / 2.0).abs() < 1e-4);
    }
}

#[test]
fn spectrum_vectors_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = toda(&[
        "spectrum",
        "--problem",
        "oscillator",
        "--N",
        "200",
        "--k",
        "2",
        "--vectors",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(Path::new(&out)).unwrap();
    let table: Vec<&str> = csv.split("\n\n").collect();
    assert_eq!(table.len(), 2);
    assert!(table[1].starts_with("x,psi_0,psi_1\n"));
    assert_eq!(table[1].lines().count(), 201);
}

#[test]
fn exponential_map_compares_equal() {
    let o = toda(&[
        "spectrum",
        "--problem",
        "schrodinger2",
        "--map",
        "exp",
        "--N",
        "1024",
        "--compare",
        "schrodinger1",
        "--rel-tol",
        "1e-9",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("relative deviation"));
}

#[test]
fn toy_problem_in_both_charts() {
    let q = toda(&["spectrum", "--problem", "toy", "--n", "0", "--N", "4096", "--k", "6"]);
    assert_eq!(code(&q), 0, "{}", stderr(&q));
    for line in stdout(&q).lines().skip(1) {
        let (k, e) = line.split_once(',').unwrap();
        let want = k.parse::<f64>().unwrap() + 0.5;
        assert!((e.parse::<f64>().unwrap() - want).abs() < 1e-4, "{line}");
    }
    let u = toda(&[
        "spectrum",
        "--problem",
        "toy",
        "--n",
        "-1",
        "--map",
        "u",
        "--N",
        "512",
        "--k",
        "3",
        "--compare",
        "toy-u",
    ]);
    assert_eq!(code(&u), 0, "{}", stderr(&u));
}

#[test]
fn failed_comparison_exits_one() {
    let o = toda(&["spectrum", "--problem", "box", "--domain", "-10:10", "--N", "256", "--compare", "oscillator"]);
    assert_eq!(code(&o), 1);
    assert!(!stdout(&o).is_empty());
}

#[test]
fn star_product_of_coordinates() {
    let o = toda(&["star", "--f", "L1_1", "--g", "L1_2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# f = L1_1");
    assert_eq!(lines[1], "# g = L1_2");
    assert_eq!(lines[2], "hbar^0: L1_1*L1_2");
    assert!(lines[3].starts_with("hbar^1: "));
    assert_eq!(lines.len(), 4);
}

#[test]
fn star_constants_csv() {
    let o = toda(&["star", "--size", "2", "--constants"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("i,j,k,l,r,s,value\n"));
    assert!(text.contains("1,1,1,2,1,2,1/2"));
}

#[test]
fn verify_suites_pass() {
    for suite in ["algebra", "hierarchy", "spectral"] {
        let o = toda(&["verify", suite]);
        assert_eq!(code(&o), 0, "{suite}: {}", stdout(&o));
        let text = stdout(&o);
        assert!(!text.is_empty());
        assert!(text.lines().all(|l| l.contains(": PASS (")), "{text}");
    }
}

#[test]
fn verify_prints_printed_and_oracle_forms() {
    let o = toda(&["verify", "algebra"]);
    let text = stdout(&o);
    for name in ["typo.A2_invariant:", "typo.gl2_trace_identity:"] {
        let line = text.lines().find(|l| l.starts_with(name)).expect(name);
        assert!(line.contains("printed:") && line.contains("oracle:"), "{line}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&toda(&["--help"])), 0);
    assert_eq!(code(&toda(&["--version"])), 0);
    assert_eq!(code(&toda(&["spectrum", "--help"])), 0);
}
