use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const REF_MODEL: &str = r#"{
  "transition": [[0.4, 0.25, 0.35], [0.25, 0.45, 0.3], [0.2, 0.55, 0.25]],
  "epsilon": [0.01, 0.02],
  "log_base": 2
}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_entrate"));
    c.env_remove("ENTRATE_THREADS");
    c
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_accepts_reference_model_and_reports_gamma() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = run(&["--json", "validate", "--model", p(&m)]);
    assert_eq!(code(&out), 0);
    let r = json_of(&out);
    assert_eq!(r["result"]["valid"], true);
    let g = r["result"]["gamma"].as_f64().unwrap();
    assert!(g > 0.0 && g < 1.0);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn validate_names_the_violated_condition() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "m.json",
        r#"{"transition": [[0.4,0.25,0.35],[0.25,0.45,0.3],[0.2,0.55,0.25]], "epsilon": [0.0, 0.02]}"#,
    );
    let out = run(&["validate", "--model", p(&m)]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("condition (i)"), "{text}");
}

#[test]
fn validate_lists_all_violations() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "m.json",
        r#"{"transition": [[1.0, 0.0], [0.6, 0.6]], "epsilon": [1.5], "log_base": 10}"#,
    );
    let out = run(&["--json", "validate", "--model", p(&m)]);
    assert_eq!(code(&out), 2);
    let v = json_of(&out)["result"]["violations"].as_array().unwrap().len();
    assert_eq!(v, 5);
}

#[test]
fn validate_flags_singular_zero_matrix() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "m.json",
        r#"{"transition": [[0.3,0.3,0.4],[0.3,0.3,0.4],[0.2,0.5,0.3]], "epsilon": [0.1, 0.1]}"#,
    );
    let out = run(&["validate", "--model", p(&m)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("condition (ii)"));
}

#[test]
fn unreadable_inputs_exit_4() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{ \"transition\": [[0.5, 0.5],");
    let missing = dir.path().join("nope.json");
    for cmd in ["validate", "entropy", "oracle"] {
        assert_eq!(code(&run(&[cmd, "--model", p(&bad)])), 4, "{cmd}");
        assert_eq!(code(&run(&[cmd, "--model", p(&missing)])), 4, "{cmd}");
    }
    let wrong_shape = write(&dir, "w.json", r#"{"transition": [[0.5, 0.5]]}"#);
    assert_eq!(code(&run(&["validate", "--model", p(&wrong_shape)])), 4);
}

#[test]
fn entropy_with_fixed_terms() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = run(&["--json", "entropy", "--model", p(&m), "--terms", "50"]);
    assert_eq!(code(&out), 0);
    let r = &json_of(&out)["result"];
    assert!((r["value"].as_f64().unwrap() - 1.520947864969815).abs() < 1e-12);
    assert_eq!(r["terms"], 50);
    for key in ["gamma", "bound_constant", "err_bound", "residual", "phi_hat", "compute_seconds"] {
        assert!(!r[key].is_null(), "{key}");
    }
}

#[test]
fn entropy_json_round_trips_bits() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = run(&["--json", "entropy", "--model", p(&m), "--terms", "37"]);
    let printed = json_of(&out)["result"]["value"].as_f64().unwrap();
    let model = entrate_core::HmpModel::from_parts(
        &[vec![0.4, 0.25, 0.35], vec![0.25, 0.45, 0.3], vec![0.2, 0.55, 0.25]],
        &[0.01, 0.02],
    )
    .unwrap();
    let direct = entrate_core::entropy_rate(&model, 37).unwrap().value;
    assert_eq!(printed.to_bits(), direct.to_bits());
}

#[test]
fn entropy_by_accuracy() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = run(&["--json", "entropy", "--model", p(&m), "--accuracy", "1e-8"]);
    assert_eq!(code(&out), 0);
    let r = &json_of(&out)["result"];
    assert!(r["terms"].as_u64().unwrap() <= 50);
    assert!(r["err_bound"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn entropy_zero_terms_is_a_valid_rate() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = run(&["--json", "entropy", "--model", p(&m), "--terms", "0"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out)["result"]["value"].as_f64().unwrap();
    assert!((0.0..=3f64.log2()).contains(&v));
}

#[test]
fn entropy_in_nats() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = run(&["--json", "entropy", "--model", p(&m), "--terms", "50", "--log-base", "e"]);
    let r = &json_of(&out)["result"];
    assert!((r["value"].as_f64().unwrap() - 1.520947864969815 * std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(r["log_base"], "nats");
    assert_eq!(code(&run(&["entropy", "--model", p(&m), "--log-base", "10"])), 2);
}

#[test]
fn entropy_argument_errors() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    assert_eq!(code(&run(&["entropy", "--model", p(&m), "--terms", "5", "--accuracy", "1e-3"])), 2);
    assert_eq!(code(&run(&["entropy", "--model", p(&m), "--accuracy", "-1"])), 2);
    assert_eq!(code(&run(&["entropy", "--model", p(&m), "--terms", "many"])), 2);
    assert_eq!(code(&run(&["entropy"])), 2);
}

#[test]
fn entropy_rejects_invalid_model() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"transition": [[0.5, 0.5], [0.5, 0.5]], "epsilon": [1.0]}"#);
    assert_eq!(code(&run(&["entropy", "--model", p(&m)])), 2);
}

#[test]
fn entropy_without_contraction_exits_3() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "m.json",
        r#"{"transition": [[0.99999999999999, 1e-14], [0.5, 0.5]], "epsilon": [0.99999999999999]}"#,
    );
    let out = run(&["--json", "entropy", "--model", p(&m), "--terms", "10"]);
    assert_eq!(code(&out), 3);
    assert!(json_of(&out)["error"].as_str().unwrap().contains("gamma"));
}

#[test]
fn oracle_reproduces_uniform_start_values() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = run(&["--json", "oracle", "--model", p(&m), "--length", "10", "--initial", "uniform"]);
    assert_eq!(code(&out), 0);
    let rows = json_of(&out)["result"]["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 10);
    let g10 = rows[9]["conditional"].as_f64().unwrap();
    assert!((g10 - 1.520947864877943).abs() < 1e-12);
    assert!(rows[0]["conditional"].is_null());
}

#[test]
fn oracle_single_symbol_has_no_conditional() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = run(&["oracle", "--model", p(&m), "--length", "1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains('-'));
}

#[test]
fn oracle_guard() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    assert_eq!(code(&run(&["oracle", "--model", p(&m), "--length", "20"])), 2);
    assert_eq!(code(&run(&["oracle", "--model", p(&m), "--length", "0"])), 2);
    assert_eq!(code(&run(&["oracle", "--model", p(&m), "--length", "3", "--max-length", "2"])), 2);
}

#[test]
fn oracle_output_independent_of_thread_cap() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let rows = |threads: &str| {
        let out = bin()
            .env("ENTRATE_THREADS", threads)
            .args(["--json", "oracle", "--model", p(&m), "--length", "8"])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        let r = json_of(&out)["result"].clone();
        r["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|row| (row["joint"].as_f64().unwrap(), row["conditional"].as_f64()))
            .collect::<Vec<_>>()
    };
    let one = rows("1");
    assert_eq!(one, rows("3"));
    assert_eq!(one, rows("0"));
}

#[test]
fn bad_thread_setting_is_rejected() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = bin()
        .env("ENTRATE_THREADS", "lots")
        .args(["oracle", "--model", p(&m), "--length", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let r = run(&["generate", "--model", p(&m), "--length", "200", "--seed", "9", "--out", p(out)]);
        assert_eq!(code(&r), 0);
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let symbols: Vec<usize> = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(symbols.len(), 200);
    assert!(symbols.iter().all(|&s| s < 3));
}

#[test]
fn generate_with_states() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = dir.path().join("s.json");
    let r = run(&["generate", "--model", p(&m), "--length", "50", "--out", p(&out), "--with-states"]);
    assert_eq!(code(&r), 0);
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let symbols = v["symbols"].as_array().unwrap();
    let states = v["states"].as_array().unwrap();
    assert_eq!(symbols.len(), 50);
    for (y, x) in symbols.iter().zip(states) {
        let (y, x) = (y.as_u64().unwrap(), x.as_u64().unwrap());
        assert!(y == 0 || y == x);
    }
}

#[test]
fn generate_errors() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let out = dir.path().join("s.json");
    assert_eq!(code(&run(&["generate", "--model", p(&m), "--length", "0", "--out", p(&out)])), 2);
    let unwritable = dir.path().join("missing-dir").join("s.json");
    assert_eq!(code(&run(&["generate", "--model", p(&m), "--length", "5", "--out", p(&unwritable)])), 4);
}

#[test]
fn estimate_end_to_end() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", REF_MODEL);
    let seq = dir.path().join("s.json");
    let r = run(&["generate", "--model", p(&m), "--length", "2000", "--seed", "4", "--out", p(&seq)]);
    assert_eq!(code(&r), 0);
    let out = run(&["--json", "estimate", "--sequence", p(&seq), "--q", "3", "--seed-init", "1"]);
    assert_eq!(code(&out), 0);
    let r = &json_of(&out)["result"];
    let em = &r["em"];
    for key in ["transition", "epsilon", "loglik_trace", "iterations", "converged"] {
        assert!(!em[key].is_null(), "{key}");
    }
    let trace: Vec<f64> = serde_json::from_value(em["loglik_trace"].clone()).unwrap();
    assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs()));
    let h = r["entropy"]["value"].as_f64().unwrap();
    assert!((h - 1.520947864969815).abs() < 0.05, "{h}");
}

#[test]
fn estimate_without_iterations_reports_initial_guess() {
    let dir = TempDir::new().unwrap();
    let seq = write(&dir, "s.txt", "0\n1\n2\n2\n0\n1\n");
    let out = run(&["--json", "estimate", "--sequence", p(&seq), "--max-iters", "0", "--seed-init", "5"]);
    assert_eq!(code(&out), 0);
    let r = &json_of(&out)["result"];
    assert_eq!(r["em"]["iterations"], 0);
    let guess = entrate_core::estimator::HmmParams::seeded_guess(3, 5);
    let (model, _) = guess.to_model().unwrap();
    let direct = entrate_core::entropy_rate(&model, 100).unwrap().value;
    assert_eq!(r["entropy"]["value"].as_f64().unwrap().to_bits(), direct.to_bits());
}

#[test]
fn estimate_input_errors() {
    let dir = TempDir::new().unwrap();
    let out_of_range = write(&dir, "s.json", "[0, 1, 5, 2]");
    assert_eq!(code(&run(&["estimate", "--sequence", p(&out_of_range), "--q", "3"])), 4);
    let garbage = write(&dir, "g.txt", "0\n1\nzwei\n");
    assert_eq!(code(&run(&["estimate", "--sequence", p(&garbage)])), 4);
    let empty = write(&dir, "e.txt", "\n\n");
    assert_eq!(code(&run(&["estimate", "--sequence", p(&empty)])), 4);
    let missing = dir.path().join("none.txt");
    assert_eq!(code(&run(&["estimate", "--sequence", p(&missing)])), 4);
    let short = write(&dir, "one.json", "[1]");
    assert_eq!(code(&run(&["estimate", "--sequence", p(&short)])), 2);
    let ok = write(&dir, "ok.json", "[0, 1, 1, 0]");
    assert_eq!(code(&run(&["estimate", "--sequence", p(&ok), "--q", "1"])), 2);
}

#[test]
fn gilbert_reports_both_bound_pairs() {
    for (h, lo, hi) in [
        (0.02, 1.775537282409934, 1.775537393396272),
        (0.1, 1.812015925779448, 1.812497634488852),
    ] {
        let out = run(&["--json", "gilbert", "--P", "0.2", "--Q", "0.25", "--h", &h.to_string()]);
        assert_eq!(code(&out), 0);
        let r = &json_of(&out)["result"];
        let f = |k: &str| r[k].as_f64().unwrap();
        assert!(f("lower") <= f("upper"));
        assert!(f("corrected_lower") <= f("corrected_upper"));
        assert!((0.5 * (f("lower") + f("upper")) - 0.5 * (lo + hi)).abs() < 1e-9);
        assert!((f("upper") - f("lower") - 2.0 * f("err_bound")).abs() < 1e-15);
        for k in ["entropy", "gamma", "bound_constant", "terms"] {
            assert!(!r[k].is_null(), "{k}");
        }
    }
}

#[test]
fn gilbert_range_checks() {
    assert_eq!(code(&run(&["gilbert", "--P", "0.2", "--Q", "0.25", "--h", "1.5"])), 2);
    assert_eq!(code(&run(&["gilbert", "--P", "0", "--Q", "0.25", "--h", "0.1"])), 2);
    assert_eq!(code(&run(&["gilbert", "--P", "0.2", "--Q", "0.25"])), 2);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}
