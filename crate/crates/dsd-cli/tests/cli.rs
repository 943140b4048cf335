//! End-to-end tests of the `dsd` binary: exit codes, output schemas,
//! reproduction of the bundled datasets' fit quality, and byte-level
//! determinism of every command.

use std::path::PathBuf;
use std::process::{Command, Output};

use dsd_regress::io;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn dsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsd"))
        .args(args)
        .output()
        .expect("spawn dsd")
}

fn run_ok(args: &[&str]) -> String {
    let out = dsd(args);
    assert!(
        out.status.success(),
        "dsd {args:?} exited with {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is UTF-8")
}

fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} ± {tol}"
    );
}

/// Field `column` of data row `row` (0-based, header excluded).
fn csv_field(text: &str, row: usize, column: usize) -> String {
    text.lines()
        .nth(row + 1)
        .unwrap_or_else(|| panic!("row {row} missing in:\n{text}"))
        .split(',')
        .nth(column)
        .unwrap_or_else(|| panic!("column {column} missing in row {row}"))
        .to_string()
}

#[test]
fn fit_writes_model_and_report() {
    let dir = tempfile::tempdir().expect("tempdir");
    let model_path = dir.path().join("model.txt");
    let report_path = dir.path().join("report.csv");
    run_ok(&[
        "fit",
        &data("unemployment.csv"),
        "--response",
        "LNY",
        "--predictors",
        "X",
        "--out-model",
        model_path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);

    let model = io::read_model(&model_path).expect("written model parses");
    let coeffs = model.dsd.expect("DSD coefficients");
    close(coeffs.alphas[0], 0.0779, 1e-3, "alpha");
    close(coeffs.betas[0], 0.0503, 1e-3, "beta");
    close(coeffs.gamma, 2.2277, 1e-3, "gamma");
    close(model.omega, 0.7715, 1e-3, "omega");

    let report = std::fs::read_to_string(&report_path).expect("report file");
    assert_eq!(report.lines().next(), Some("method,omega,rmse_m,rmse_l,rmse_u"));
    assert_eq!(csv_field(&report, 0, 0), "dsd");
    close(csv_field(&report, 0, 2).parse().unwrap(), 0.4679, 1e-3, "rmse_m");
}

#[test]
fn log_shift_matches_pretransformed_response() {
    // The bundled table stores both the raw response Y and LNY = ln(Y + 2);
    // fitting Y under --log-shift 2 must agree with fitting LNY directly.
    let dir = tempfile::tempdir().expect("tempdir");
    let fit_to = |name: &str, response: &str, shift: Option<&str>| {
        let path = dir.path().join(name);
        let mut args = vec![
            "fit".to_string(),
            data("unemployment.csv"),
            "--response".into(),
            response.into(),
            "--predictors".into(),
            "X".into(),
            "--out-model".into(),
            path.to_string_lossy().into_owned(),
            "--report".into(),
            dir.path().join("report.csv").to_string_lossy().into_owned(),
        ];
        if let Some(s) = shift {
            args.extend(["--log-shift".to_string(), s.to_string()]);
        }
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        run_ok(&arg_refs);
        io::read_model(&path).expect("model parses")
    };
    let direct = fit_to("direct.txt", "LNY", None);
    let shifted = fit_to("shifted.txt", "Y", Some("2"));
    let (ca, cb) = (direct.dsd.expect("dsd"), shifted.dsd.expect("dsd"));
    close(cb.alphas[0], ca.alphas[0], 1e-10, "alpha");
    close(cb.betas[0], ca.betas[0], 1e-10, "beta");
    close(cb.gamma, ca.gamma, 1e-10, "gamma");
}

#[test]
fn compare_reproduces_published_fit_quality() {
    let out = run_ok(&[
        "compare",
        &data("unemployment.csv"),
        "--response",
        "LNY",
        "--predictors",
        "X",
    ]);
    assert_eq!(out.lines().count(), 6, "header plus five methods");
    let methods: Vec<String> = (0..5).map(|r| csv_field(&out, r, 0)).collect();
    assert_eq!(methods, ["dsd", "cm", "minmax", "crm", "ccrm"]);

    for (row, want) in [0.4679, 0.7759, 0.4621, 0.4397, 0.4397].into_iter().enumerate() {
        let rmse_m: f64 = csv_field(&out, row, 2).parse().unwrap();
        close(rmse_m, want, 1e-3, &format!("rmse_m row {row}"));
    }
    // CRM and CCRM coincide here: identical rows apart from the method tag.
    let crm = out.lines().nth(4).unwrap().strip_prefix("crm").unwrap();
    let ccrm = out.lines().nth(5).unwrap().strip_prefix("ccrm").unwrap();
    assert_eq!(crm, ccrm);

    let fires = run_ok(&["compare", &data("forestfires_monthly.csv"), "--response", "LNarea"]);
    for (row, want) in [0.1066, 0.1856, 0.1044, 0.1038, 0.1038].into_iter().enumerate() {
        let rmse_m: f64 = csv_field(&fires, row, 2).parse().unwrap();
        close(rmse_m, want, 1e-3, &format!("fires rmse_m row {row}"));
    }
}

#[test]
fn commands_are_byte_deterministic() {
    let args = [
        "compare",
        &data("unemployment.csv"),
        "--response",
        "LNY",
        "--predictors",
        "X",
    ];
    assert_eq!(run_ok(&args), run_ok(&args));

    let loo_args = ["loo", &data("forestfires_monthly.csv"), "--response", "LNarea"];
    assert_eq!(run_ok(&loo_args), run_ok(&loo_args));
}

#[test]
fn predict_applies_a_saved_model() {
    let dir = tempfile::tempdir().expect("tempdir");
    let model_path = dir.path().join("model.txt");
    run_ok(&[
        "fit",
        &data("unemployment.csv"),
        "--response",
        "LNY",
        "--predictors",
        "X",
        "--out-model",
        model_path.to_str().unwrap(),
        "--report",
        dir.path().join("report.csv").to_str().unwrap(),
    ]);

    let out = run_ok(&["predict", model_path.to_str().unwrap(), &data("unemployment.csv")]);
    assert_eq!(out.lines().next(), Some("unit,pred_lb,pred_ub"));
    assert_eq!(out.lines().count(), 1 + 58, "one row per unit");
    for row in 0..58 {
        let lb: f64 = csv_field(&out, row, 1).parse().unwrap();
        let ub: f64 = csv_field(&out, row, 2).parse().unwrap();
        assert!(lb <= ub, "row {row}: DSD predictions are valid intervals");
    }
}

#[test]
fn loo_emits_observed_predicted_pairs() {
    let out = run_ok(&["loo", &data("forestfires_monthly.csv"), "--response", "LNarea"]);
    assert_eq!(out.lines().next(), Some("unit,obs_lb,obs_ub,pred_lb,pred_ub"));
    assert_eq!(out.lines().count(), 1 + 10, "one row per month");
    for row in 0..10 {
        for column in 1..5 {
            let v: f64 = csv_field(&out, row, column).parse().unwrap();
            assert!(v.is_finite());
        }
    }
}

#[test]
fn study_commands_share_schema_and_seed_determinism() {
    // Reduced replication counts keep the full factorial grid cheap; the
    // noiseless (s_a = 0, s_b = 0) cells must come out exact.
    let study1_args = [
        "study",
        "--config",
        &data("study1_low.cfg"),
        "--replications",
        "3",
        "--seed",
        "7",
    ];
    let out1 = run_ok(&study1_args);
    let header = out1.lines().next().expect("header").to_string();
    assert!(header.starts_with("m,s_a,s_b,linearity,replications,"));
    assert_eq!(out1.lines().count(), 1 + 2 * 9 * 12, "two sample sizes × 9 × 12 grid");

    // Column layout: m, s_a, s_b, linearity, replications, then alpha_1
    // stats; omega_mean sits 8 columns from the end.
    let columns: Vec<&str> = header.split(',').collect();
    let omega_mean = columns.len() - 8;
    assert_eq!(columns[omega_mean], "omega_mean");
    for line in out1.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[1] == "0" && fields[2] == "0" {
            assert_eq!(fields[4], "3");
            let omega: f64 = fields[omega_mean].parse().unwrap();
            close(omega, 1.0, 1e-9, &format!("noiseless cell omega ({line})"));
        }
    }

    // Same seed, same bytes.
    assert_eq!(out1, run_ok(&study1_args));

    let study2_args = [
        "study",
        "--config",
        &data("study2_p1_high_lin.cfg"),
        "--replications",
        "2",
        "--seed",
        "7",
    ];
    let out2 = run_ok(&study2_args);
    assert_eq!(out2.lines().next(), Some(header.as_str()), "studies share one schema");
    assert_eq!(out2.lines().count(), 1 + 4, "one row per sample size");
    let lin = csv_field(&out2, 0, 3);
    assert_eq!(lin, "high");

    // The thread pool size must not change the aggregates.
    let single = Command::new(env!("CARGO_BIN_EXE_dsd"))
        .args(study2_args)
        .env("DSD_STUDY_THREADS", "1")
        .output()
        .expect("spawn dsd");
    assert!(single.status.success());
    let pooled = Command::new(env!("CARGO_BIN_EXE_dsd"))
        .args(study2_args)
        .env("DSD_STUDY_THREADS", "3")
        .output()
        .expect("spawn dsd");
    assert!(pooled.status.success());
    assert_eq!(single.stdout, out2.as_bytes());
    assert_eq!(pooled.stdout, out2.as_bytes());
}

#[test]
fn usage_errors_exit_2() {
    let bad_method = dsd(&[
        "fit",
        &data("unemployment.csv"),
        "--response",
        "LNY",
        "--method",
        "ols",
    ]);
    assert_eq!(bad_method.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_method.stderr).contains("ols"));

    let missing_arg = dsd(&["fit", &data("unemployment.csv")]);
    assert_eq!(missing_arg.status.code(), Some(2), "--response is required");
}

#[test]
fn runtime_errors_exit_1_with_context() {
    let missing_file = dsd(&["fit", "no-such-table.csv", "--response", "y"]);
    assert_eq!(missing_file.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing_file.stderr).starts_with("error:"));

    let bad_variable = dsd(&[
        "fit",
        &data("unemployment.csv"),
        "--response",
        "NOPE",
    ]);
    assert_eq!(bad_variable.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_variable.stderr).contains("NOPE"));

    let bad_config = dsd(&["study", "--config", &data("unemployment.csv")]);
    assert_eq!(bad_config.status.code(), Some(1));
}
