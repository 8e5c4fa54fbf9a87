use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nopa-bell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_rows(out: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(out);
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], row: &[String], name: &str) -> f64 {
    let i = header.iter().position(|h| h == name).unwrap();
    row[i].parse().unwrap()
}

#[test]
fn verify_passes_at_depth_four() {
    let out = run(&["verify", "--D", "4"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = csv_rows(&out.stdout);
    assert!(!rows.is_empty());
    for row in &rows {
        assert_eq!(column(&header, row, "residual"), 0.0, "{row:?}");
    }
}

#[test]
fn number_bell_optimal() {
    let out = run(&["number-bell", "--d", "2", "--r", "1", "--optimal"]);
    assert!(out.status.success());
    let (h, rows) = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 1);
    assert!((column(&h, &rows[0], "max_lhs") - 4.03614).abs() < 1e-5);
    assert_eq!(column(&h, &rows[0], "bound"), 3.0);
}

#[test]
fn chsh_infinite_squeezing_json() {
    let out = run(&["chsh", "--r", "20", "--optimal", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(doc["meta"]["config"].is_object());
    let max = doc["rows"][0]["max_lhs"].as_f64().unwrap();
    assert!((max - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(doc["rows"][0]["gamma_opt_over_pi"].as_f64().unwrap(), 0.25);
}

#[test]
fn csv_round_trips_bit_exactly() {
    let dir = std::env::temp_dir().join(format!("nopa-bell-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let out = run(&[
        "hamming-bell",
        "--d",
        "3",
        "--r",
        "0.1:2.5:7",
        "--gamma",
        "pi/5,0.3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let (h, rows) = csv_rows(&std::fs::read(&path).unwrap());
    assert_eq!(rows.len(), 14);
    let kind = nopa_bell::bell::BellKind::Hamming { d: 3 };
    for row in &rows {
        let r = column(&h, row, "r");
        let gamma = column(&h, row, "gamma");
        let ev = nopa_bell::bell::nopa_bell(&kind, gamma, r).unwrap();
        assert_eq!(
            column(&h, row, "lhs").to_bits(),
            ev.report.lhs_value.to_bits()
        );
        assert_eq!(
            column(&h, row, "max_lhs").to_bits(),
            ev.optimum.max_lhs.to_bits()
        );
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn correlate_columns() {
    let out = run(&[
        "correlate",
        "--r",
        "0.5,1",
        "--d",
        "1,2,4",
        "--alpha",
        "0:pi:3",
        "--beta",
        "pi/3",
        "--D",
        "6",
    ]);
    assert!(out.status.success());
    let (h, rows) = csv_rows(&out.stdout);
    assert_eq!(
        h,
        [
            "r",
            "d",
            "alpha",
            "beta",
            "analytic",
            "numeric",
            "abs_err",
            "tail_weight"
        ]
    );
    assert_eq!(rows.len(), 18);
    for row in &rows {
        assert!(column(&h, row, "abs_err") <= 10.0 * column(&h, row, "tail_weight") + 1e-14);
    }
}

#[test]
fn sample_is_seed_deterministic() {
    let args = [
        "sample", "--kind", "chsh", "--r", "1", "--shots", "20000", "--seed", "5", "--D", "5",
    ];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_nopa-bell"))
        .args(args)
        .env("NOPA_BELL_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (h, rows) = csv_rows(&a.stdout);
    assert!(column(&h, &rows[0], "z_score").abs() < 5.0);
}

#[test]
fn lhv_random_sets_stay_below_bound() {
    let out = run(&[
        "lhv", "--random", "5", "--shots", "20000", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for row in doc["rows"].as_array().unwrap() {
        assert!(row["exact_lhs"].as_f64().unwrap() <= 2.0 + 1e-12);
    }
}

#[test]
fn bad_input_fails_with_json_error() {
    for args in [
        vec!["chsh", "--gamma", "pi/0"],
        vec!["chsh", "--d", "0"],
        vec!["number-bell", "--r", "-1"],
        vec!["weighted-bell", "--weights", "1,-2"],
        vec!["verify", "--D", "40"],
        vec!["nonsense"],
        vec!["sample", "--kind", "weighted-bell"],
    ] {
        let out = run(&args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert!(v["error"].is_string());
    }
    let env = Command::new(env!("CARGO_BIN_EXE_nopa-bell"))
        .args(["chsh"])
        .env("NOPA_BELL_THREADS", "many")
        .output()
        .unwrap();
    assert!(!env.status.success());
}

#[test]
fn help_exits_zero() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["chsh", "--help"]).status.success());
}
