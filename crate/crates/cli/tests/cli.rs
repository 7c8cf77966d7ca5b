use std::path::PathBuf;
use std::process::{Command, Output};

use qrw_cli::report::{Report, Value};
use qrw_core::C64;

fn qrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrw"))
        .args(args)
        .env_remove("QRW_QUAD_TOL")
        .output()
        .expect("binary runs")
}

fn ok_report(args: &[&str]) -> Report {
    let out = qrw(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Report::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qrw-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn col(r: &Report, name: &str) -> usize {
    r.columns
        .iter()
        .position(|c| c.name == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn complex(v: &Value) -> C64 {
    match v {
        Value::Complex(z) => *z,
        other => panic!("expected complex, got {other:?}"),
    }
}

fn real(v: &Value) -> f64 {
    match v {
        Value::Real(x) => *x,
        other => panic!("expected real, got {other:?}"),
    }
}

fn int(v: &Value) -> i64 {
    match v {
        Value::Int(x) => *x,
        other => panic!("expected int, got {other:?}"),
    }
}

#[test]
fn simulate_hadamard_methods_agree() {
    let r = ok_report(&[
        "simulate",
        "--lattice",
        "half",
        "--coin",
        "hadamard",
        "--steps",
        "4",
        "--method",
        "both",
    ]);
    let (n, idx, k, d, diff) = (
        col(&r, "n"),
        col(&r, "index"),
        col(&r, "kmcg"),
        col(&r, "direct"),
        col(&r, "diff"),
    );
    let mut seen = false;
    for row in &r.rows {
        assert!(real(&row[diff]) < 1e-8);
        if int(&row[n]) == 4 && int(&row[idx]) == 0 {
            assert!((complex(&row[d]) - C64::new(-0.25, 0.0)).norm() < 1e-14);
            assert!((complex(&row[k]) - C64::new(-0.25, 0.0)).norm() < 1e-8);
            seen = true;
        }
    }
    assert!(seen);
    // probabilities at each step sum to one
    for step in 0..=4 {
        let p: f64 = r
            .rows
            .iter()
            .filter(|row| int(&row[n]) == step)
            .map(|row| real(&row[col(&r, "prob")]))
            .sum();
        assert!((p - 1.0).abs() < 1e-12, "step {step}: {p}");
    }
}

#[test]
fn measure_hmod_reports_the_mass() {
    let r = ok_report(&["measure", "--coin", "hmod", "--lattice", "half"]);
    let kind = col(&r, "kind");
    let masses: Vec<_> = r
        .rows
        .iter()
        .filter(|row| row[kind] == Value::Text("mass".into()))
        .collect();
    assert_eq!(masses.len(), 1);
    let z = complex(&masses[0][col(&r, "z")]);
    assert!((z - C64::new(0.0, 1.0)).norm() < 1e-12);
    assert!((real(&masses[0][col(&r, "weight")]) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert_eq!(r.rows.len(), 257);
}

#[test]
fn recurrence_hadamard_transient_rows() {
    let r = ok_report(&[
        "recurrence",
        "--coin",
        "hadamard",
        "--lattice",
        "half",
        "--max-index",
        "4",
    ]);
    let (sec, item, idx, val) = (
        col(&r, "section"),
        col(&r, "item"),
        col(&r, "index"),
        col(&r, "value"),
    );
    let mut basis = vec![[C64::new(0.0, 0.0); 4]; 2];
    for row in r
        .rows
        .iter()
        .filter(|row| row[sec] == Value::Text("transient".into()))
    {
        basis[int(&row[item]) as usize][int(&row[idx]) as usize] = complex(&row[val]);
    }
    // echelon rows of span{|0↑⟩+|1↓⟩, |0↓⟩−|1↑⟩}
    let want = [[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, -1.0, 0.0]];
    for (b, w) in basis.iter().zip(want) {
        for (x, y) in b.iter().zip(w) {
            assert!((x - C64::new(y, 0.0)).norm() < 1e-9, "{basis:?}");
        }
    }
    assert_eq!(r.metadata["transient_dimension"], "2");
}

#[test]
fn recurrence_verdict_from_state_file() {
    let path = scratch("transient.json");
    std::fs::write(
        &path,
        r#"[{"site": 0, "spin": "up", "amp": [1, 0]}, {"site": 1, "spin": "down", "amp": [1, 0]}]"#,
    )
    .unwrap();
    let out = qrw(&[
        "recurrence",
        "--coin",
        "hadamard",
        "--lattice",
        "half",
        "--state",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("renormalized"));
    let r = Report::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(r.metadata["verdict"], "transient");
}

#[test]
fn initial_state_file_is_used() {
    let path = scratch("down.json");
    std::fs::write(&path, r#"[{"site": 0, "spin": "down", "amp": [0, 1]}]"#).unwrap();
    let out = qrw(&[
        "simulate",
        "--lattice",
        "line",
        "--coin",
        "hmod",
        "--steps",
        "3",
        "--initial",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn exit_codes() {
    assert_eq!(qrw(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        qrw(&["measure", "--lattice", "half", "--coin", "grover"])
            .status
            .code(),
        Some(2)
    );
    let nonunitary = qrw(&[
        "measure",
        "--lattice",
        "half",
        "--coin",
        "[[1,0],[1,0];[0,0],[1,0]]",
    ]);
    assert_eq!(nonunitary.status.code(), Some(2));
    let missing = qrw(&[
        "simulate",
        "--lattice",
        "half",
        "--coin",
        "hadamard",
        "--steps",
        "1",
        "--initial",
        "/nonexistent/state.json",
    ]);
    assert_eq!(missing.status.code(), Some(2));
    // recurrence needs a constant coin
    let field = r#"{"default": "hadamard", "sites": [{"site": 1, "coin": "hmod"}]}"#;
    let out = qrw(&["recurrence", "--lattice", "half", "--coin", field]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(qrw(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_tolerance_env_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_qrw"))
        .args([
            "moments",
            "--lattice",
            "half",
            "--coin",
            "hadamard",
            "--n",
            "3",
        ])
        .env("QRW_QUAD_TOL", "tight")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic_and_round_trips() {
    for fmt in ["csv", "json"] {
        let args = [
            "moments",
            "--lattice",
            "line",
            "--coin",
            "hadamard",
            "--n",
            "8",
            "--out",
            fmt,
        ];
        let a = qrw(&args);
        let b = qrw(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        let text = String::from_utf8(a.stdout).unwrap();
        let r = if fmt == "csv" {
            Report::from_csv(&text)
        } else {
            Report::from_json(&text)
        }
        .unwrap();
        assert_eq!(
            r.to_csv().unwrap(),
            Report::from_csv(&r.to_csv().unwrap())
                .unwrap()
                .to_csv()
                .unwrap()
        );
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(r.rows.len(), 9);
    }
}

#[test]
fn compare_exit_status_tracks_tolerance() {
    let base = [
        "compare",
        "--lattice",
        "line",
        "--coin",
        "hmod",
        "--steps",
        "6",
        "--max-index",
        "6",
        "--tol",
    ];
    let pass = qrw(&[&base[..], &["1e-8"]].concat());
    assert_eq!(
        pass.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&pass.stderr)
    );
    let fail = qrw(&[&base[..], &["1e-300"]].concat());
    assert_eq!(fail.status.code(), Some(3));
    let r = Report::from_csv(&String::from_utf8(fail.stdout).unwrap()).unwrap();
    assert_eq!(r.metadata["agree"], "false");
}

#[test]
fn asymptotics_for_hmod_and_hadamard() {
    let r = ok_report(&[
        "asymptotics",
        "--lattice",
        "half",
        "--coin",
        "hmod",
        "--max-index",
        "3",
    ]);
    assert_eq!(r.metadata["weak_limit"], "projector");
    let u = col(&r, "u_infinity");
    // U^∞_{00} = μ({i}) = 1/√2
    assert!(
        (complex(&r.rows[0][u]) - C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-10
    );
    let z = ok_report(&["asymptotics", "--lattice", "line", "--coin", "hadamard"]);
    assert_eq!(z.metadata["weak_limit"], "zero");
    assert!(z.rows.is_empty());
}

#[test]
fn svg_files_are_written() {
    let weight = scratch("weight.svg");
    let profile = scratch("profile.svg");
    ok_report(&[
        "measure",
        "--lattice",
        "half",
        "--coin",
        "hmod",
        "--grid",
        "32",
        "--svg",
        weight.to_str().unwrap(),
    ]);
    ok_report(&[
        "simulate",
        "--lattice",
        "line",
        "--coin",
        "hadamard",
        "--steps",
        "5",
        "--method",
        "direct",
        "--svg",
        profile.to_str().unwrap(),
    ]);
    for p in [weight, profile] {
        let s = std::fs::read_to_string(&p).unwrap();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    }
}
