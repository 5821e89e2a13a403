//! Monte Carlo oracles for the closed-form and quadrature routes.

use std::time::Instant;

use ginidex::estimators::{estimate_weighted, IndexKind, IndexSpec, Sample};
use ginidex::gamma::{gamma_draws, standard_gamma_variate, GammaParams};
use ginidex::inference::{normality_smoke, run_simulation, SimulationPlan};
use ginidex::population::{gamma_lower_index, gamma_upper_index};
use ginidex::rng::RandomStream;
use ginidex::specfun::{cvm_cdf, kolmogorov_cdf, KsMode};
use ginidex::QuadratureConfig;

fn sorted_uniforms(rng: &mut RandomStream, n: usize, buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend((0..n).map(|_| rng.open01()));
    buf.sort_by(f64::total_cmp);
}

#[test]
fn exact_kolmogorov_law_matches_simulation() {
    let n = 11;
    let d = 0.2;
    let reps = 1_000_000;
    let mut rng = RandomStream::from_seed(31);
    let mut u = Vec::with_capacity(n);
    let mut hits = 0usize;
    for _ in 0..reps {
        sorted_uniforms(&mut rng, n, &mut u);
        let dist = u
            .iter()
            .enumerate()
            .fold(0.0f64, |acc, (k, v)| acc.max((k + 1) as f64 / n as f64 - v).max(v - k as f64 / n as f64));
        hits += usize::from(dist <= d);
    }
    let p_mc = hits as f64 / reps as f64;
    let se = (p_mc * (1.0 - p_mc) / reps as f64).sqrt();
    let p = kolmogorov_cdf(d, n, KsMode::Exact).unwrap();
    assert!((p - p_mc).abs() <= 4.0 * se, "exact {p} vs MC {p_mc} (se {se})");
}

#[test]
fn finite_sample_cvm_law_matches_simulation() {
    let n = 20;
    let reps = 400_000;
    let grid = [0.05, 0.1, 0.2, 0.35, 0.6];
    let mut rng = RandomStream::from_seed(32);
    let mut u = Vec::with_capacity(n);
    let mut hits = [0usize; 5];
    for _ in 0..reps {
        sorted_uniforms(&mut rng, n, &mut u);
        let w2 = 1.0 / (12.0 * n as f64)
            + u.iter().enumerate().map(|(k, v)| (v - (2 * k + 1) as f64 / (2 * n) as f64).powi(2)).sum::<f64>();
        for (h, &w) in hits.iter_mut().zip(&grid) {
            *h += usize::from(w2 <= w);
        }
    }
    for (&h, &w) in hits.iter().zip(&grid) {
        let p_mc = h as f64 / reps as f64;
        let se = (p_mc * (1.0 - p_mc) / reps as f64).sqrt();
        let p = cvm_cdf(w, n).unwrap();
        // the 1/n correction leaves an O(1/n^2) residual
        assert!((p - p_mc).abs() <= 4.0 * se + 1e-3, "w {w}: law {p} vs MC {p_mc} (se {se})");
    }
}

#[test]
fn components_sum_to_the_expected_range() {
    let cfg = QuadratureConfig::default();
    let g = GammaParams::new(2.0, 1.0).unwrap();
    let total = gamma_lower_index(&g, 3, &cfg).unwrap().value + gamma_upper_index(&g, 3, &cfg).unwrap().value;

    let draws = 10_000_000;
    let mut rng = RandomStream::from_seed(33);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..draws {
        let t = [
            standard_gamma_variate(2.0, &mut rng),
            standard_gamma_variate(2.0, &mut rng),
            standard_gamma_variate(2.0, &mut rng),
        ];
        let range = t.iter().copied().fold(f64::MIN, f64::max) - t.iter().copied().fold(f64::MAX, f64::min);
        let v = range / (3.0 * g.mean());
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / draws as f64;
    let se = ((sum_sq / draws as f64 - mean * mean) / draws as f64).sqrt();
    assert!((mean - total).abs() <= 3.0 * se, "quadrature {total} vs MC {mean} (se {se})");
}

#[test]
fn weighted_estimator_matches_random_subsets_on_large_samples() {
    let n = 2000;
    let (m, i) = (4, 2);
    let mut rng = RandomStream::from_seed(34);
    let values = gamma_draws(&GammaParams::new(1.5, 1.0).unwrap(), &mut rng, n);
    let data = Sample::new(values.clone()).unwrap();

    let start = Instant::now();
    let full = estimate_weighted(&data, IndexSpec::lower(m, i).unwrap()).unwrap().value;
    let elapsed = start.elapsed();
    assert!(elapsed.as_millis() < 50, "weighted estimator took {elapsed:?}");

    let mean = data.mean();
    let subsets = 5000;
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..subsets {
        let mut idx = [0usize; 4];
        let mut filled = 0;
        while filled < m {
            let j = (rng.next_u64() % n as u64) as usize;
            if !idx[..filled].contains(&j) {
                idx[filled] = j;
                filled += 1;
            }
        }
        idx.sort_unstable();
        let min = idx.iter().map(|&j| values[j]).fold(f64::MAX, f64::min);
        let v = (values[idx[i - 1]] - min) / (m as f64 * mean);
        sum += v;
        sum_sq += v * v;
    }
    let est = sum / subsets as f64;
    let se = ((sum_sq / subsets as f64 - est * est) / subsets as f64).sqrt();
    assert!((est - full).abs() <= 4.0 * se, "weighted {full} vs subsets {est} (se {se})");
}

fn plan(m: usize, i: usize, kind: IndexKind, sizes: Vec<usize>, reps: usize) -> SimulationPlan {
    SimulationPlan {
        params: GammaParams::new(2.0, 1.0).unwrap(),
        spec: IndexSpec::new(m, i, kind).unwrap(),
        sample_sizes: sizes,
        replications: reps,
        master_seed: 35,
    }
}

#[test]
fn replicate_estimates_look_normal() {
    for (m, i, kind) in [(3, 3, IndexKind::Lower), (3, 3, IndexKind::Upper), (2, 1, IndexKind::Combined)] {
        let report = normality_smoke(&plan(m, i, kind, vec![200], 1000), None).unwrap();
        assert!(!report.degenerate);
        assert!(report.p_value > 0.01, "m={m} i={i} {kind}: p = {}", report.p_value);
    }
}

#[test]
fn simulation_is_reproducible_and_mse_shrinks() {
    let p = plan(3, 3, IndexKind::Lower, vec![10, 30, 100], 400);
    let a = run_simulation(&p, Some(1)).unwrap();
    let b = run_simulation(&p, Some(4)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    for kind in [IndexKind::Lower, IndexKind::Upper] {
        let mse: Vec<f64> = [10, 30, 100].iter().map(|&n| a.row(n, kind).unwrap().mse).collect();
        assert!(mse.windows(2).all(|w| w[1] <= 1.5 * w[0]), "{kind}: {mse:?}");
        assert!(mse[2] < mse[0]);
        for &n in &[10, 30, 100] {
            let row = a.row(n, kind).unwrap();
            assert!(row.mse >= row.bias * row.bias - 1e-12);
        }
    }
}
