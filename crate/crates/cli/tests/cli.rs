use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use ginidex::dataset::{gdp2023, parse_dataset};
use ginidex::estimators::{estimate_weighted, IndexSpec};
use ginidex::gamma::{gamma_draws, gamma_mle_bisection, GammaParams};
use ginidex::rng::RandomStream;
use ginidex::specfun::Tolerance;

fn ginidex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ginidex")).args(args).env_remove("GINIDEX_SEED").output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = ginidex(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(v["schema_version"], 1, "{args:?}");
    v
}

fn ok_text(args: &[&str]) -> String {
    let out = ginidex(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    ginidex(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn index_exponential_lower() {
    let v = ok_json(&["index", "--dist", "gamma", "--alpha", "1", "--lambda", "1", "--m", "3", "--kind", "lower"]);
    assert!((num(&v["value"]) - 2.0 / 9.0).abs() < 1e-6);
    assert_eq!(v["representation"], "survival");
    assert!(num(&v["est_error"]) >= 0.0);
}

#[test]
fn index_gamma_gini_is_rate_free() {
    let v = ok_json(&["index", "--dist", "gamma", "--alpha", "2", "--lambda", "7", "--m", "2", "--kind", "combined"]);
    assert!((num(&v["value"]) - 0.375).abs() < 1e-8);
}

#[test]
fn index_all_paths_agree() {
    let v = ok_json(&[
        "index", "--dist", "gamma", "--alpha", "0.5", "--lambda", "2", "--m", "4", "--kind", "upper", "--repr", "all",
    ]);
    assert_eq!(v["values"].as_array().unwrap().len(), 4);
    assert!(num(&v["max_gap"]) < 1e-6);
}

#[test]
fn index_on_data() {
    let v = ok_json(&["index", "--fixture", "gdp2023", "--m", "2", "--kind", "combined", "--repr", "all"]);
    assert_eq!(v["values"].as_array().unwrap().len(), 3);
    assert!(num(&v["max_gap"]) < 1e-9);
    // plug-in Gini of the empirical law is (n−1)/n times the paired estimator
    let est = 0.2642393208626956;
    assert!((num(&v["values"][0]["value"]) - est * 10.0 / 11.0).abs() < 1e-9);
}

#[test]
fn index_usage_errors() {
    assert_eq!(code(&["index", "--dist", "gamma", "--alpha", "1", "--lambda", "1", "--kind", "lower"]), 2);
    assert_eq!(code(&["index", "--dist", "gamma", "--alpha", "1", "--m", "3", "--kind", "lower"]), 2);
    assert_eq!(code(&["index", "--dist", "gamma", "--alpha", "1", "--lambda", "1", "--m", "1", "--kind", "lower"]), 2);
    assert_eq!(code(&["index", "--dist", "gamma", "--alpha", "-1", "--lambda", "1", "--m", "3", "--kind", "lower"]), 2);
    assert_eq!(code(&["index", "--fixture", "gdp2023", "--m", "3", "--kind", "lower", "--repr", "gamma"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn estimate_fixture_golden() {
    let v = ok_json(&[
        "estimate",
        "--fixture",
        "gdp2023",
        "--m",
        "2",
        "--i",
        "1",
        "--kind",
        "combined",
        "--algorithm",
        "brute",
    ]);
    // Σ_{j<k} |x_j − x_k| / ((n − 1) Σ x), enumerated independently
    assert!((num(&v["value"]) - 0.2642393208626956).abs() < 1e-15);
    assert_eq!(v["n"], 11);
    assert_eq!(v["algorithm"], "brute_force");
    let w = ok_json(&["estimate", "--fixture", "gdp2023", "--m", "2", "--i", "1", "--kind", "combined"]);
    assert!((num(&w["value"]) - num(&v["value"])).abs() < 1e-12);
}

#[test]
fn estimate_small_files() {
    let dir = tempfile::tempdir().unwrap();
    let three = write(dir.path(), "three.csv", "1\n2\n3\n");
    let v = ok_json(&["estimate", "--data", &three, "--m", "2", "--i", "2", "--kind", "lower"]);
    assert!((num(&v["value"]) - 1.0 / 3.0).abs() < 1e-6);
    let flat = write(dir.path(), "flat.csv", "value\n5\n5\n5\n5\n");
    let v = ok_json(&["estimate", "--data", &flat, "--m", "3", "--i", "2", "--kind", "upper"]);
    assert_eq!(num(&v["value"]), 0.0);
    assert_eq!(code(&["estimate", "--data", &three, "--m", "4", "--i", "1", "--kind", "lower"]), 4);
    let bad = write(dir.path(), "bad.csv", "1\n2\nthree\n");
    assert_eq!(code(&["estimate", "--data", &bad, "--m", "2", "--i", "1", "--kind", "lower"]), 3);
    let missing = dir.path().join("absent.csv");
    assert_eq!(code(&["estimate", "--data", missing.to_str().unwrap(), "--m", "2", "--i", "1", "--kind", "lower"]), 3);
    assert_eq!(
        code(&["estimate", "--data", &three, "--fixture", "gdp2023", "--m", "2", "--i", "1", "--kind", "lower"]),
        2
    );
    assert_eq!(code(&["estimate", "--data", &three, "--m", "2", "--i", "3", "--kind", "lower"]), 2);
}

#[test]
fn estimate_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut stream = RandomStream::from_seed(9);
    let draws = gamma_draws(&GammaParams::new(1.3, 0.01).unwrap(), &mut stream, 40);
    let body: String = draws.iter().map(|x| format!("{x}\n")).collect();
    let path = write(dir.path(), "draws.csv", &body);
    let parsed = parse_dataset(body.as_bytes(), None).unwrap();
    for (m, i, kind) in [("4", "2", "lower"), ("5", "5", "upper"), ("3", "1", "combined")] {
        let v = ok_json(&["estimate", "--data", &path, "--m", m, "--i", i, "--kind", kind]);
        let spec = IndexSpec::new(m.parse().unwrap(), i.parse().unwrap(), kind.parse().unwrap()).unwrap();
        let lib = estimate_weighted(&parsed, spec).unwrap().value;
        assert_eq!(num(&v["value"]).to_bits(), lib.to_bits(), "{m} {i} {kind}");
    }
}

#[test]
fn fit_fixture() {
    let v = ok_json(&["fit", "--fixture", "gdp2023"]);
    assert_eq!(v["converged"], true);
    let oracle = gamma_mle_bisection(&gdp2023(), &Tolerance::default()).unwrap();
    assert!((num(&v["alpha"]) - oracle.params.alpha()).abs() < 1e-6 * oracle.params.alpha());
    assert!((num(&v["lambda"]) - oracle.params.lambda()).abs() < 1e-6 * oracle.params.lambda());

    let dir = tempfile::tempdir().unwrap();
    let doubled: String = gdp2023().values().iter().map(|x| format!("{}\n", 2.0 * x)).collect();
    let path = write(dir.path(), "doubled.csv", &doubled);
    let w = ok_json(&["fit", "--data", &path]);
    assert!((num(&w["alpha"]) - num(&v["alpha"])).abs() < 1e-6);
    assert!((num(&w["lambda"]) - num(&v["lambda"]) / 2.0).abs() < 1e-6 * num(&v["lambda"]));
}

#[test]
fn fit_degenerate_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let single = write(dir.path(), "single.csv", "7\n7\n7\n");
    assert_eq!(code(&["fit", "--data", &single]), 5);
    let one = write(dir.path(), "one.csv", "7\n");
    assert_eq!(code(&["fit", "--data", &one]), 4);
}

#[test]
fn simulate_smoke_and_determinism() {
    let args = [
        "simulate",
        "--alpha",
        "2",
        "--lambda",
        "1",
        "--m",
        "3",
        "--i",
        "3",
        "--sizes",
        "10,30,50,100,200",
        "--reps",
        "2",
        "--seed",
        "5",
    ];
    let a = ok_text(&args);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "n,kind,bias,mse,mc_se,truth");
    assert_eq!(lines.len(), 11);
    for line in &lines[1..] {
        for field in line.split(',').skip(2) {
            assert!(field.parse::<f64>().unwrap().is_finite(), "{line}");
        }
    }
    assert_eq!(a, ok_text(&args));
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(a, ok_text(&threaded));
}

#[test]
fn simulate_seed_from_environment() {
    let base = ["simulate", "--alpha", "2", "--lambda", "1", "--m", "3", "--i", "1", "--sizes", "20", "--reps", "10"];
    let run_env = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ginidex")).args(base).env("GINIDEX_SEED", seed).output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let mut explicit = base.to_vec();
    explicit.extend(["--seed", "77"]);
    assert_eq!(run_env("77"), ok_text(&explicit));
    assert_ne!(run_env("77"), run_env("78"));
}

#[test]
fn simulate_usage_errors() {
    let base = ["simulate", "--alpha", "2", "--lambda", "1", "--m", "3", "--i", "3"];
    let with = |extra: &[&str]| {
        let mut v = base.to_vec();
        v.extend(extra);
        code(&v)
    };
    assert_eq!(with(&["--sizes", "10,x", "--reps", "5"]), 2);
    assert_eq!(with(&["--sizes", "2", "--reps", "5"]), 2);
    assert_eq!(with(&["--sizes", "10", "--reps", "1"]), 2);
    assert_eq!(with(&["--reps", "5"]), 2);
}

#[test]
fn gof_fixture_plugin() {
    let v = ok_json(&["gof", "--fixture", "gdp2023"]);
    assert!((num(&v["p_value_ks"]) - 0.508).abs() < 0.05);
    assert!((num(&v["p_value_cvm"]) - 0.784).abs() < 0.07);
    assert_eq!(v["method"], "plugin_exact");
    let a = ok_json(&["gof", "--fixture", "gdp2023", "--method", "plugin-asymptotic"]);
    assert_eq!(a["method"], "plugin_asymptotic");
    assert!((num(&a["p_value_cvm"]) - 0.784).abs() < 0.07);
}

#[test]
fn gof_bootstrap() {
    let v = ok_json(&["gof", "--fixture", "gdp2023", "--method", "bootstrap", "--boot", "2000", "--seed", "3"]);
    assert_eq!(v["bootstrap_replicates"], 2000);
    let p = num(&v["p_value_ks"]);
    assert!(p > 0.05 && p <= 1.0);
    assert_eq!(code(&["gof", "--fixture", "gdp2023", "--method", "bootstrap", "--boot", "50"]), 2);
}

#[test]
fn gof_null_smoke_and_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let mut stream = RandomStream::from_seed(2024);
    let draws = gamma_draws(&GammaParams::new(2.5, 0.3).unwrap(), &mut stream, 10_000);
    let body: String = draws.iter().map(|x| format!("{x}\n")).collect();
    let path = write(dir.path(), "gamma.csv", &body);
    let v = ok_json(&["gof", "--data", &path]);
    assert!(num(&v["p_value_ks"]) > 0.001);
    assert!(num(&v["p_value_cvm"]) > 0.001);
    let flat = write(dir.path(), "flat.csv", "3\n3\n3\n3\n");
    assert_eq!(code(&["gof", "--data", &flat]), 5);
}

fn grid(text: &str) -> Vec<(usize, usize, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,i,value"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn heatmap_structure() {
    let lower =
        grid(&ok_text(&["heatmap", "--fixture", "gdp2023", "--kind", "lower", "--m-max", "6", "--sort", "asc"]));
    let upper =
        grid(&ok_text(&["heatmap", "--fixture", "gdp2023", "--kind", "upper", "--m-max", "6", "--sort", "asc"]));
    assert_eq!(lower.len(), 20);
    for w in lower.windows(2) {
        if w[0].0 == w[1].0 {
            assert!(w[1].2 >= w[0].2, "{:?}", w);
        }
    }
    for m in 2..=6 {
        let sums: Vec<f64> = lower.iter().zip(&upper).filter(|(l, _)| l.0 == m).map(|(l, u)| l.2 + u.2).collect();
        for s in &sums {
            // CSV rounds to 6 significant digits
            assert!((s - sums[0]).abs() < 2e-6, "m={m}: {sums:?}");
        }
    }
    let small = grid(&ok_text(&["heatmap", "--fixture", "gdp2023", "--kind", "lower", "--m-max", "2"]));
    assert_eq!(small.iter().map(|c| (c.0, c.1)).collect::<Vec<_>>(), vec![(2, 1), (2, 2)]);
    assert_eq!(code(&["heatmap", "--fixture", "gdp2023", "--kind", "lower", "--m-max", "12"]), 4);
}
