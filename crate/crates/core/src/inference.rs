//! Monte Carlo bias/MSE studies, consistency and normality checks, and
//! goodness of fit against a fitted gamma model.
//!
//! Every replication draws from its own stream derived from
//! `(master_seed, n, r)`, and results are aggregated in replication order,
//! so reports are bit-identical for any thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{IndexKind, IndexSpec, KernelMeans, Sample};
use crate::gamma::{gamma_draws, gamma_mle, FitResult, GammaParams};
use crate::population::gamma_index;
use crate::quadrature::QuadratureConfig;
use crate::rng::RandomStream;
use crate::specfun::{cvm_asymptotic_cdf, cvm_cdf, kolmogorov_cdf, std_normal_cdf, KsMode, Tolerance};

/// Sum with `O(log n)` error growth; the result depends only on the order
/// of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(0) => Err(Error::domain("thread count must be positive")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationPlan {
    pub params: GammaParams,
    pub spec: IndexSpec,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
}

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(Error::domain(format!("at least 2 replications are needed, got {}", self.replications)));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::domain("no sample sizes given"));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < self.spec.m) {
            return Err(Error::InsufficientSample { n, m: self.spec.m });
        }
        if self.replications > u32::MAX as usize || self.sample_sizes.iter().any(|&n| n > u32::MAX as usize) {
            return Err(Error::domain("sizes and replication counts must fit in 32 bits"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationRow {
    pub n: usize,
    pub kind: IndexKind,
    /// Mean estimate minus truth.
    pub bias: f64,
    pub mse: f64,
    /// Replicate standard deviation over `√replicates`.
    pub mc_se: f64,
    pub truth: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub plan: SimulationPlan,
    pub rows: Vec<SimulationRow>,
}

pub const SIMULATION_CSV_HEADER: &str = "n,kind,bias,mse,mc_se,truth";

impl SimulationReport {
    pub fn row(&self, n: usize, kind: IndexKind) -> Option<&SimulationRow> {
        self.rows.iter().find(|r| r.n == n && r.kind == kind)
    }

    /// CSV with [`SIMULATION_CSV_HEADER`] and 6 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SIMULATION_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                r.kind,
                format_significant(r.bias, 6),
                format_significant(r.mse, 6),
                format_significant(r.mc_se, 6),
                format_significant(r.truth, 6)
            ));
        }
        out
    }
}

/// Shortest rendering of `x` rounded to `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    let exp = rounded.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{rounded:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", digits - 1, rounded);
        let (mantissa, exponent) = s.split_once('e').unwrap_or((&s, "0"));
        let mantissa =
            if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{exponent}")
    }
}

/// Lower and upper estimates for each replication at sample size `n`, in
/// replication order.
pub fn simulate_replicates(plan: &SimulationPlan, n: usize, threads: Option<usize>) -> Result<Vec<(f64, f64)>> {
    plan.validate()?;
    if n < plan.spec.m {
        return Err(Error::InsufficientSample { n, m: plan.spec.m });
    }
    let one = |r: usize| -> Result<(f64, f64)> {
        let mut stream = RandomStream::for_replication(plan.master_seed, n, r);
        let sample = Sample::new(gamma_draws(&plan.params, &mut stream, n)).map_err(|e| Error::Replication {
            n,
            replication: r,
            source: Box::new(e),
        })?;
        let means = KernelMeans::compute(&sample, plan.spec.m, plan.spec.i).map_err(|e| Error::Replication {
            n,
            replication: r,
            source: Box::new(e),
        })?;
        Ok((means.value(IndexKind::Lower), means.value(IndexKind::Upper)))
    };
    with_threads(threads, || (0..plan.replications).into_par_iter().map(one).collect::<Result<Vec<_>>>())?
}

/// Bias, MSE and MC standard error of `estimates` against `truth`.
pub fn summarize(n: usize, kind: IndexKind, estimates: &[f64], truth: f64) -> SimulationRow {
    let r = estimates.len() as f64;
    let mean = pairwise_sum(estimates) / r;
    let sq_err: Vec<f64> = estimates.iter().map(|x| (x - truth) * (x - truth)).collect();
    let dev: Vec<f64> = estimates.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = if estimates.len() > 1 { pairwise_sum(&dev) / (r - 1.0) } else { 0.0 };
    SimulationRow {
        n,
        kind,
        bias: mean - truth,
        mse: pairwise_sum(&sq_err) / r,
        mc_se: (var / r).sqrt(),
        truth,
        replicates: estimates.len(),
    }
}

/// Runs the plan: one lower and one upper row per sample size, with the
/// population truth from the gamma integrals.
pub fn run_simulation(plan: &SimulationPlan, threads: Option<usize>) -> Result<SimulationReport> {
    plan.validate()?;
    let cfg = QuadratureConfig::default();
    let truth_lower = gamma_index(&plan.params, plan.spec.m, IndexKind::Lower, &cfg)?.value;
    let truth_upper = gamma_index(&plan.params, plan.spec.m, IndexKind::Upper, &cfg)?.value;
    let mut rows = Vec::with_capacity(2 * plan.sample_sizes.len());
    for &n in &plan.sample_sizes {
        let reps = simulate_replicates(plan, n, threads)?;
        let lower: Vec<f64> = reps.iter().map(|r| r.0).collect();
        let upper: Vec<f64> = reps.iter().map(|r| r.1).collect();
        rows.push(summarize(n, IndexKind::Lower, &lower, truth_lower));
        rows.push(summarize(n, IndexKind::Upper, &upper, truth_upper));
    }
    Ok(SimulationReport { plan: plan.clone(), rows })
}

/// `|estimate − truth|` for a single sample of size `n` drawn from stream
/// `(seed, n, 0)`.
pub fn consistency_check(params: &GammaParams, spec: IndexSpec, n: usize, seed: u64) -> Result<f64> {
    if n < spec.m {
        return Err(Error::InsufficientSample { n, m: spec.m });
    }
    let truth = gamma_index(params, spec.m, spec.kind, &QuadratureConfig::default())?.value;
    let mut stream = RandomStream::for_replication(seed, n, 0);
    let sample = Sample::new(gamma_draws(params, &mut stream, n))?;
    let estimate = KernelMeans::compute(&sample, spec.m, spec.i)?.value(spec.kind);
    Ok((estimate - truth).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityReport {
    /// KS distance between standardized replicates and `N(0, 1)`.
    pub statistic: f64,
    pub p_value: f64,
    /// Replicates had (numerically) zero spread; the p-value is forced to 0.
    pub degenerate: bool,
}

/// KS test of standardized `values` against the standard normal law.
pub fn normality_of(values: &[f64]) -> Result<NormalityReport> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientSample { n, m: 2 });
    }
    let r = n as f64;
    let mean = pairwise_sum(values) / r;
    let dev: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let sd = (pairwise_sum(&dev) / (r - 1.0)).sqrt();
    if !(sd > 1e-12 * mean.abs().max(f64::MIN_POSITIVE)) {
        return Ok(NormalityReport { statistic: 1.0, p_value: 0.0, degenerate: true });
    }
    let mut z: Vec<f64> = values.iter().map(|x| (x - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let d = ks_distance(z.iter().map(|&v| std_normal_cdf(v)));
    let p_value = 1.0 - kolmogorov_cdf(d, n, KsMode::Asymptotic)?;
    Ok(NormalityReport { statistic: d, p_value: p_value.clamp(0.0, 1.0), degenerate: false })
}

/// Normality of the plan's replicate estimates for `plan.spec.kind` at its
/// single sample size.
pub fn normality_smoke(plan: &SimulationPlan, threads: Option<usize>) -> Result<NormalityReport> {
    plan.validate()?;
    let [n] = plan.sample_sizes[..] else {
        return Err(Error::domain("normality check needs exactly one sample size"));
    };
    if plan.replications < 500 || n < 100 {
        return Err(Error::domain("normality check needs at least 500 replications and n >= 100"));
    }
    let reps = simulate_replicates(plan, n, threads)?;
    let values: Vec<f64> = reps
        .iter()
        .map(|&(lo, up)| match plan.spec.kind {
            IndexKind::Lower => lo,
            IndexKind::Upper => up,
            IndexKind::Combined => lo + up,
        })
        .collect();
    normality_of(&values)
}

/// `max_k max(k/n − u_(k), u_(k) − (k−1)/n)` for ascending `u`.
fn ks_distance(u: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = u.len() as f64;
    u.enumerate().fold(0.0, |d, (k, v)| {
        let k = k as f64;
        d.max((k + 1.0) / n - v).max(v - k / n)
    })
}

/// `1/(12n) + Σ (u_(k) − (2k−1)/(2n))²` for ascending `u`.
fn cvm_statistic(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    let terms: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let c = v - (2.0 * k as f64 + 1.0) / (2.0 * n);
            c * c
        })
        .collect();
    1.0 / (12.0 * n) + pairwise_sum(&terms)
}

/// KS and CvM statistics of `data` against a fully specified gamma.
pub fn gof_statistics(data: &[f64], params: &GammaParams) -> Result<(f64, f64)> {
    let mut u = data.iter().map(|&x| params.cdf(x)).collect::<Result<Vec<f64>>>()?;
    u.sort_by(f64::total_cmp);
    Ok((ks_distance(u.iter().copied()), cvm_statistic(&u)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GofMethod {
    /// Estimated parameters plugged into the known-parameter null laws:
    /// exact KS law and the finite-sample CvM law.
    PluginExact,
    /// As above with both limiting laws.
    PluginAsymptotic,
    /// Null law simulated by refitting on samples from the fitted model.
    ParametricBootstrap { replicates: usize, seed: u64 },
}

/// Smallest bootstrap size accepted by [`gof_test`].
pub const MIN_BOOTSTRAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GofMethodName {
    PluginExact,
    PluginAsymptotic,
    ParametricBootstrap,
}

impl GofMethod {
    pub fn name(&self) -> GofMethodName {
        match self {
            GofMethod::PluginExact => GofMethodName::PluginExact,
            GofMethod::PluginAsymptotic => GofMethodName::PluginAsymptotic,
            GofMethod::ParametricBootstrap { .. } => GofMethodName::ParametricBootstrap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofReport {
    pub n: usize,
    pub statistic_ks: f64,
    pub p_value_ks: f64,
    pub statistic_cvm: f64,
    pub p_value_cvm: f64,
    pub method: GofMethodName,
    pub bootstrap_replicates: Option<usize>,
    pub fitted: FitResult,
}

/// Fits a gamma by maximum likelihood and tests the fit with KS and CvM.
pub fn gof_test(data: &Sample, method: GofMethod, threads: Option<usize>) -> Result<GofReport> {
    let n = data.len();
    if n < 3 {
        return Err(Error::InsufficientSample { n, m: 3 });
    }
    let tol = Tolerance::default();
    let fitted = gamma_mle(data, &tol)?;
    let (d, w2) = gof_statistics(data.values(), &fitted.params)?;

    let (p_ks, p_cvm, boot) = match method {
        GofMethod::PluginExact | GofMethod::PluginAsymptotic => {
            let (p_ks, p_cvm) = if method == GofMethod::PluginExact {
                (1.0 - kolmogorov_cdf(d, n, KsMode::for_sample_size(n))?, 1.0 - cvm_cdf(w2, n)?)
            } else {
                (1.0 - kolmogorov_cdf(d, n, KsMode::Asymptotic)?, 1.0 - cvm_asymptotic_cdf(w2)?)
            };
            (p_ks, p_cvm, None)
        }
        GofMethod::ParametricBootstrap { replicates, seed } => {
            if replicates < MIN_BOOTSTRAP {
                return Err(Error::domain(format!(
                    "parametric bootstrap needs at least {MIN_BOOTSTRAP} replicates, got {replicates}"
                )));
            }
            let one = |b: usize| -> Result<(f64, f64)> {
                let mut stream = RandomStream::derive(seed, b as u64);
                let draws = gamma_draws(&fitted.params, &mut stream, n);
                let refit = Sample::new(draws.clone()).and_then(|s| gamma_mle(&s, &tol));
                let refit = refit.map_err(|e| Error::Replication { n, replication: b, source: Box::new(e) })?;
                gof_statistics(&draws, &refit.params)
            };
            let stats =
                with_threads(threads, || (0..replicates).into_par_iter().map(one).collect::<Result<Vec<_>>>())??;
            let exceed_ks = stats.iter().filter(|s| s.0 >= d).count();
            let exceed_cvm = stats.iter().filter(|s| s.1 >= w2).count();
            let b = replicates as f64;
            ((exceed_ks as f64 + 1.0) / (b + 1.0), (exceed_cvm as f64 + 1.0) / (b + 1.0), Some(replicates))
        }
    };
    Ok(GofReport {
        n,
        statistic_ks: d,
        p_value_ks: p_ks.clamp(0.0, 1.0),
        statistic_cvm: w2,
        p_value_cvm: p_cvm.clamp(0.0, 1.0),
        method: method.name(),
        bootstrap_replicates: boot,
        fitted,
    })
}
