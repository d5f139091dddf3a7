use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use periodicgp::io::{read_coefficients, read_paths};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_periodicgp"))
        .args(args)
        .current_dir(dir)
        .env("PERIODICGP_THREADS", "2")
        .output()
        .expect("spawn periodicgp")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn paths(dir: &Path, name: &str) -> Vec<periodicgp::GridPath> {
    read_paths(std::fs::File::open(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn simulate_param_ensemble() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["simulate", "--model", "param", "--a", "1", "--p", "1", "--n", "1024", "--paths", "4", "--seed", "7", "--out", "e.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(d.path().join("e.csv")).unwrap();
    assert!(text.starts_with("t,x0,x1,x2,x3\n"));
    assert_eq!(text.lines().count(), 1025);
    let meta = json(d.path(), "e.meta.json");
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["k"], 511);
    assert_eq!(meta["n"], 1024);
}

#[test]
fn simulated_paths_match_the_library() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["simulate", "--p", "1.3", "--n", "256", "--paths", "3", "--seed", "5", "--out", "e.csv"]);
    assert_eq!(code(&out), 0);
    let c = periodicgp::model_coefficients(&periodicgp::ParametricModel::new(1.0, 1.3).unwrap(), 0);
    let lib = periodicgp::sample_ensemble(&c, 127, 256, 3, 5).unwrap();
    let cli = paths(d.path(), "e.csv");
    for (a, b) in cli.iter().zip(lib.paths()) {
        assert_eq!(a.values(), b.values());
    }
}

#[test]
fn simulate_shift_bridge_variance() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["simulate", "--model", "bridge:centered-shift", "--n", "4096", "--paths", "100", "--seed", "1", "--out", "b.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let e = paths(d.path(), "b.csv");
    let total: f64 = e.iter().flat_map(|p| p.values().iter().map(|v| v * v)).sum();
    let var = total / (e.len() * 4096) as f64;
    assert!((var - 1.0 / 6.0).abs() < 0.03, "variance {var}");
}

#[test]
fn simulate_usage_errors() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["simulate", "--model", "param", "--p", "0.4"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("p must exceed 1/2"));
    assert_eq!(code(&run(d.path(), &["simulate", "--model", "bridge:wobbly", "--seed", "1"])), 2);
    assert_eq!(code(&run(d.path(), &["simulate", "--model", "param", "--seed", "1"])), 2);
    assert_eq!(code(&run(d.path(), &["simulate", "--p", "1", "--n", "1000", "--seed", "1"])), 2);
    assert_eq!(code(&run(d.path(), &["simulate", "--p", "1", "--coeffs", "x.json", "--seed", "1"])), 2);
    assert_eq!(code(&run(d.path(), &["simulate", "--bogus"])), 2);
}

#[test]
fn simulate_aliasing_exit_code() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&run(d.path(), &["simulate", "--p", "1", "--n", "64", "--k", "32", "--seed", "1"])), 3);
    // c_k = 1/k^0.6 needs far more than 31 harmonics for eps = 1e-3
    assert_eq!(code(&run(d.path(), &["simulate", "--p", "0.6", "--n", "64", "--eps", "1e-3", "--seed", "1"])), 3);
    std::fs::write(d.path().join("wide.json"), r#"{"c0": 0, "c": [0, 0, 0, 0, 0, 0, 0, 0.5]}"#).unwrap();
    assert_eq!(code(&run(d.path(), &["simulate", "--model", "coeffs", "--coeffs", "wide.json", "--n", "16", "--seed", "1"])), 3);
}

#[test]
fn simulate_eps_records_tail() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["simulate", "--p", "1", "--eps", "0.01", "--n", "256", "--seed", "2", "--out", "e.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let meta = json(d.path(), "e.meta.json");
    assert_eq!(meta["k"], 61);
    assert!(meta["tail_fraction"].as_f64().unwrap() <= 0.01);
}

#[test]
fn missing_seed_is_reported() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["simulate", "--p", "1", "--n", "64", "--out", "e.csv"]);
    assert_eq!(code(&out), 0);
    let line = stderr(&out);
    let seed: u64 = line.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    assert_eq!(json(d.path(), "e.meta.json")["seed"], seed);
}

#[test]
fn transform_bridge_table() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["transform", "--direction", "g2c", "--input", "bridge", "--n", "4096", "--out", "c.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let c = read_coefficients(std::fs::File::open(d.path().join("c.json")).unwrap()).unwrap();
    assert!((c.c0().powi(2) - 1.0 / 12.0).abs() < 1e-7);
    for k in 1..=32 {
        let target = 1.0 / (2.0 * std::f64::consts::PI * k as f64).powi(2);
        assert!((c.coefficient(k).powi(2) - target).abs() < 1e-7);
    }
}

#[test]
fn transform_check_reports_small_residual() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("c.json"), r#"{"c0": 0.3, "c": [0.5, 0.25, 0.0, 0.125]}"#).unwrap();
    let out = run(d.path(), &["transform", "--direction", "c2g", "--input", "c.json", "--check", "--out", "g.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let residual: f64 = stderr(&out).trim().strip_prefix("round-trip residual: ").unwrap().parse().unwrap();
    assert!(residual < 1e-8);
    let out = run(d.path(), &["transform", "--direction", "g2c", "--input", "g.csv", "--k", "4", "--check", "--out", "back.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let back = read_coefficients(std::fs::File::open(d.path().join("back.json")).unwrap()).unwrap();
    for (k, want) in [(0, 0.3), (1, 0.5), (2, 0.25), (3, 0.0), (4, 0.125)] {
        assert!((back.coefficient(k) - want).abs() < 1e-7, "k={k}");
    }
}

#[test]
fn transform_rejects_invalid_tables() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("asym.csv"), "delta,value\n0,2\n0.25,1\n0.5,0.5\n0.75,0.9\n").unwrap();
    assert_eq!(code(&run(d.path(), &["transform", "--direction", "g2c", "--input", "asym.csv"])), 4);
    // 0.5 + cos θ - 0.1 cos 2θ has a negative second cosine coefficient
    let table: String = (0..8)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            format!("{},{}\n", j as f64 / 8.0, 0.5 + th.cos() - 0.1 * (2.0 * th).cos())
        })
        .collect();
    std::fs::write(d.path().join("npsd.csv"), format!("delta,value\n{table}")).unwrap();
    assert_eq!(code(&run(d.path(), &["transform", "--direction", "g2c", "--input", "npsd.csv"])), 4);
    std::fs::write(d.path().join("neg.json"), r#"{"c0": 1, "c": [-0.5]}"#).unwrap();
    assert_eq!(code(&run(d.path(), &["transform", "--direction", "c2g", "--input", "neg.json"])), 4);
}

#[test]
fn simulate_then_fit() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["simulate", "--model", "param", "--a", "1", "--p", "2.1", "--n", "1024", "--seed", "7", "--out", "s.csv"]);
    assert_eq!(code(&out), 0);
    let out = run(d.path(), &["fit", "--input", "s.csv", "--out", "fit.json", "--residuals", "r.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let fit = json(d.path(), "fit.json");
    let p = fit["p_hat"].as_f64().unwrap();
    assert!((1.9..=2.3).contains(&p), "p̂ = {p}");
    assert_eq!(fit["k_used"], 256);
    assert_eq!(fit["convergence"]["status"], "converged");
    assert!(fit["goodness_of_fit"]["dispersion"].as_f64().is_some());
    let residuals = std::fs::read_to_string(d.path().join("r.csv")).unwrap();
    assert!(residuals.starts_with("k,sin,cos,standardized\n"));
    assert_eq!(residuals.lines().count(), 257);
}

#[test]
fn fit_errors() {
    let d = TempDir::new().unwrap();
    let flat: String = (0..64).map(|j| format!("{},3\n", j as f64 / 64.0)).collect();
    std::fs::write(d.path().join("flat.csv"), format!("t,x\n{flat}")).unwrap();
    assert_eq!(code(&run(d.path(), &["fit", "--input", "flat.csv", "--k", "8"])), 5);
    assert_eq!(code(&run(d.path(), &["fit", "--input", "flat.csv", "--k", "32"])), 3);
    assert_eq!(code(&run(d.path(), &["fit", "--input", "flat.csv", "--column", "3"])), 2);
    assert_eq!(code(&run(d.path(), &["fit", "--input", "missing.csv"])), 2);
}

#[test]
fn regularity_of_bridge_and_ensemble() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["regularity", "--coeffs", "bridge", "--out", "r.json"]);
    assert_eq!(code(&out), 0);
    let r = json(d.path(), "r.json");
    assert_eq!(r["m"], 0);
    assert_eq!(r["holder_bound"], 0.5);

    std::fs::write(d.path().join("c.json"), r#"{"c0": 0, "c": [1.0, 0.0625, 0.012345679012345678, 0.00390625, 0.0016]}"#).unwrap();
    let out = run(d.path(), &["regularity", "--coeffs", "c.json", "--out", "c4.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(d.path(), "c4.json");
    assert!((r["q"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    assert_eq!(r["m"], 3);

    let out = run(d.path(), &["simulate", "--p", "1", "--n", "1024", "--paths", "200", "--seed", "3", "--out", "e.csv"]);
    assert_eq!(code(&out), 0);
    let out = run(d.path(), &["regularity", "--ensemble", "e.csv", "--out", "re.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(d.path(), "re.json");
    assert!((r["q"].as_f64().unwrap() - 2.0).abs() < 0.3, "{r}");
    let h = r["diagnostics"]["holder_estimate"]["exponent"].as_f64().unwrap();
    assert!((0.35..0.65).contains(&h), "{h}");

    std::fs::write(d.path().join("short.json"), r#"{"c0": 1, "c": [0.5]}"#).unwrap();
    assert_eq!(code(&run(d.path(), &["regularity", "--coeffs", "short.json"])), 2);
    assert_eq!(code(&run(d.path(), &["regularity"])), 2);
}

#[test]
fn bridge_check_report() {
    let d = TempDir::new().unwrap();
    let out = run(d.path(), &["bridge-check", "--replicates", "4000", "--n", "256", "--seed", "8", "--terms", "1000000", "--out", "b.json"]);
    let report = json(d.path(), "b.json");
    for id in report["identities"].as_array().unwrap() {
        assert!(id["gap"].as_f64().unwrap() < 1e-6);
        assert_eq!(id["pass"], true);
    }
    assert_eq!(report["identities"].as_array().unwrap().len(), 3);
    let pass = report["pass"].as_bool().unwrap();
    assert_eq!(code(&out), if pass { 0 } else { 1 });

    let out = run(d.path(), &["bridge-check", "--replicates", "200", "--n", "64", "--seed", "8", "--terms", "10", "--out", "f.json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(d.path(), "f.json")["pass"], false);
}

#[test]
fn sweep_order_and_reduction() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&run(d.path(), &["sweep", "--p-list", "1,1.6,2.1,3.1", "--seed", "11", "--n", "512", "--out", "up.csv"])), 0);
    assert_eq!(code(&run(d.path(), &["sweep", "--p-list", "3.1,2.1,1.6,1", "--seed", "11", "--n", "512", "--out", "down.csv"])), 0);
    let up = std::fs::read(d.path().join("up.csv")).unwrap();
    assert_eq!(up, std::fs::read(d.path().join("down.csv")).unwrap());
    assert!(up.starts_with(b"t,p1,p1.6,p2.1,p3.1\n"));

    assert_eq!(code(&run(d.path(), &["sweep", "--p-list", "1.6", "--seed", "11", "--n", "512", "--out", "one.csv"])), 0);
    assert_eq!(code(&run(d.path(), &["simulate", "--p", "1.6", "--seed", "11", "--n", "512", "--out", "sim.csv"])), 0);
    assert_eq!(paths(d.path(), "one.csv"), paths(d.path(), "sim.csv"));

    assert_eq!(code(&run(d.path(), &["sweep", "--p-list", "1,0.3", "--seed", "11"])), 2);
}

#[test]
fn sweep_smoothness_increases() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&run(d.path(), &["sweep", "--p-list", "1,1.6,2.1,3.1", "--seed", "11", "--n", "4096", "--out", "s.csv"])), 0);
    let cols = paths(d.path(), "s.csv");
    // mean squared increment at the finest lag falls as p grows
    let rough: Vec<f64> = cols
        .iter()
        .map(|p| {
            let x = p.values();
            (0..x.len()).map(|j| (x[(j + 1) % x.len()] - x[j]).powi(2)).sum::<f64>()
        })
        .collect();
    assert!(rough.windows(2).all(|w| w[1] < w[0]), "{rough:?}");
}
