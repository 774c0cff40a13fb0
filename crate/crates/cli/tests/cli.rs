use std::path::Path;
use std::process::{Command, Output};

fn bcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcm"))
        .args(args)
        .output()
        .expect("bcm runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// First data row of a CSV report as (header, values).
fn first_row(csv: &str) -> Vec<(String, String)> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let row = lines.next().unwrap();
    let mut cells = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = row.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '"' if quoted && chars.peek() == Some(&'"') => {
                chars.next();
                cur.push('"');
            }
            '"' => quoted = !quoted,
            ',' if !quoted => cells.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    cells.push(cur);
    header.into_iter().zip(cells).collect()
}

fn field(row: &[(String, String)], name: &str) -> String {
    row.iter()
        .find(|(k, _)| k == name)
        .unwrap_or_else(|| panic!("no column {name}"))
        .1
        .clone()
}

#[test]
fn improved_exponential_closed_form() {
    let o = bcm(&[
        "bound",
        "--formula",
        "thm2.7",
        "--c1",
        "0.5",
        "--r",
        "1",
        "--deterministic",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: f64 = field(&first_row(&stdout(&o)), "value").parse().unwrap();
    let want = (0.5 * (1f64.exp() - 1.0)).exp();
    assert!((v - want).abs() < 1e-12 * want, "{v} vs {want}");
}

#[test]
fn out_of_domain_exits_two() {
    let o = bcm(&["bound", "--formula", "thm2.9", "--c1", "1.5", "--r", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("C1 < 1"), "{}", stderr(&o));
}

/// For `C_m = m^-4`, `2·K1(1) = ζ(2) + ζ(3)`; `ζ(2)` rides along as the
/// reference closed form.
#[test]
fn polynomial_moment_power_law() {
    let o = bcm(&[
        "bound",
        "--formula",
        "cor2.3.poly",
        "--decay",
        "powerlaw:1,4",
        "--p",
        "1",
        "--deterministic",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let row = first_row(&stdout(&o));
    let v: f64 = field(&row, "value").parse().unwrap();
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    let zeta3 = 1.202_056_903_159_594_3;
    assert!((v - (zeta2 + zeta3)).abs() < 1e-10, "{v}");
    let aux: serde_json::Value = serde_json::from_str(&field(&row, "auxiliary")).unwrap();
    assert!((aux["closed_form_reference"].as_f64().unwrap() - zeta2).abs() < 1e-12);
}

#[test]
fn divergence_is_opt_in() {
    let args = [
        "bound",
        "--formula",
        "cor3.5",
        "--decay",
        "powerlaw:1,2",
        "--p",
        "1",
        "--deterministic",
    ];
    assert_eq!(bcm(&args).status.code(), Some(2));
    let mut allowed = args.to_vec();
    allowed.push("--allow-divergent");
    let o = bcm(&allowed);
    assert_eq!(o.status.code(), Some(0));
    let row = first_row(&stdout(&o));
    assert_eq!(field(&row, "value"), "inf");
    assert_eq!(field(&row, "infinite"), "true");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(bcm(&["bound", "--formula", "thm9.9"]).status.code(), Some(64));
    assert_eq!(bcm(&["bound"]).status.code(), Some(64));
    assert_eq!(
        bcm(&["export", "--decay", "geometric:1,0.5", "--reps", "0"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(
        bcm(&["bound", "--formula", "thm2.7", "--nonsense"]).status.code(),
        Some(64)
    );
    assert_eq!(bcm(&["app", "nowhere"]).status.code(), Some(64));
    assert_eq!(bcm(&["export", "--decay", "cubic:1"]).status.code(), Some(64));
    assert_eq!(bcm(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_config_file_is_io_error() {
    assert_eq!(
        bcm(&["bound", "--config", "/nonexistent/cfg.json"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_passes_on_true_bounds() {
    for args in [
        vec![
            "verify",
            "--formula",
            "thm2.2",
            "--decay",
            "geometric:1,0.5",
            "--reps",
            "20000",
        ],
        vec![
            "verify",
            "--formula",
            "prop2.1",
            "--decay",
            "geometric:1,0.5",
            "--reps",
            "20000",
        ],
        vec![
            "verify",
            "--formula",
            "cor2.3.exp",
            "--decay",
            "geometric:1,0.5",
            "--p",
            "0.5",
            "--reps",
            "20000",
        ],
        vec![
            "verify",
            "--formula",
            "ex2.13.tail",
            "--tail",
            "geometric:1,0.5",
            "--k",
            "3,5,8",
        ],
        vec![
            "verify",
            "--formula",
            "thm2.7",
            "--decay",
            "geometric:0.5,0.5",
            "--r",
            "0.5,1,2",
        ],
    ] {
        let o = bcm(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("# failures: 0"));
    }
}

#[test]
fn sanov_rate_for_fair_coin() {
    let o = bcm(&["app", "sanov", "--mu", "0.5,0.5", "--t", "0.6", "--deterministic"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rate: f64 = field(&first_row(&stdout(&o)), "rate").parse().unwrap();
    let want = 0.6 * (1.2f64).ln() + 0.4 * (0.8f64).ln();
    assert!((rate - want).abs() < 1e-9, "{rate} vs {want}");
}

#[test]
fn sde_sweep_reports_slope() {
    let o = bcm(&[
        "app",
        "sde",
        "--reps",
        "500",
        "--sweep",
        "dyadic:3..6",
        "--deterministic",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let slope: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("# slope: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(slope > 1.2, "{slope}");
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

fn rerun_matches(dir: &Path, name: &str, first: &[&str], again: &[&str]) {
    let a = dir.join(format!("{name}.a"));
    let b = dir.join(format!("{name}.b"));
    let mut args = first.to_vec();
    args.extend(["--deterministic", "--threads", "1", "-o", a.to_str().unwrap()]);
    assert_eq!(bcm(&args).status.code(), Some(0));
    let mut args = again.to_vec();
    args.extend([
        "--config",
        a.to_str().unwrap(),
        "--threads",
        "4",
        "-o",
        b.to_str().unwrap(),
    ]);
    let o = bcm(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{name}");
}

#[test]
fn reruns_from_header_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    rerun_matches(
        dir.path(),
        "verify",
        &[
            "verify",
            "--formula",
            "thm2.2",
            "--decay",
            "powerlaw:1,4",
            "--reps",
            "5000",
            "--seed",
            "7",
        ],
        &["verify"],
    );
    rerun_matches(
        dir.path(),
        "lil",
        &["app", "lil", "--reps", "200", "--format", "jsonl"],
        &["app"],
    );
    rerun_matches(
        dir.path(),
        "export",
        &[
            "export",
            "--decay",
            "geometric:1,0.5",
            "--reps",
            "300",
            "--format",
            "json",
        ],
        &["export"],
    );
}

#[test]
fn timestamp_only_without_deterministic() {
    let o = bcm(&["bound", "--formula", "thm2.7", "--c1", "0.5", "--r", "1"]);
    assert!(stdout(&o).lines().next().unwrap().contains("\"timestamp\""));
    let o = bcm(&[
        "bound",
        "--formula",
        "thm2.7",
        "--c1",
        "0.5",
        "--r",
        "1",
        "--deterministic",
    ]);
    assert!(!stdout(&o).contains("timestamp"));
}

#[test]
fn export_counts_one_row_per_rep() {
    let o = bcm(&[
        "export",
        "--decay",
        "geometric:1,0.5",
        "--reps",
        "25",
        "--format",
        "jsonl",
        "--deterministic",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["type"], "config");
    assert_eq!(lines[1]["type"], "summary");
    assert_eq!(lines.len(), 27);
    assert_eq!(lines[26]["rep"], 24);
}
