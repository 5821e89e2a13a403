//! The gamma model `Gamma(α, λ)` with shape `α` and rate `λ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::Sample;
use crate::rng::RandomStream;
use crate::specfun::{self, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaParams {
    alpha: f64,
    lambda: f64,
}

impl GammaParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("gamma shape must be positive and finite, got {alpha}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("gamma rate must be positive and finite, got {lambda}")));
        }
        Ok(GammaParams { alpha, lambda })
    }

    /// Unit-rate exponential.
    pub fn exponential() -> Self {
        GammaParams { alpha: 1.0, lambda: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        self.alpha / self.lambda
    }

    pub fn variance(&self) -> f64 {
        self.alpha / (self.lambda * self.lambda)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.alpha.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => self.lambda,
                _ => 0.0,
            };
        }
        let t = self.lambda * x;
        self.lambda * ((self.alpha - 1.0) * t.ln() - t - specfun::ln_gamma_unchecked(self.alpha)).exp()
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        gamma_cdf(self, x)
    }

    /// Survival function `1 − F(x)`, accurate in the tail.
    pub fn sf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("gamma survival requires x >= 0, got {x}")));
        }
        specfun::reg_upper_inc_gamma(self.alpha, self.lambda * x)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        gamma_quantile(self, p)
    }
}

/// `F(x) = P(α, λx)`.
pub fn gamma_cdf(params: &GammaParams, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("gamma cdf requires x >= 0, got {x}")));
    }
    specfun::reg_lower_inc_gamma(params.alpha, params.lambda * x)
}

/// Inverse CDF for `0 <= p < 1`: bracketed Newton on the unit-rate variable,
/// falling back to bisection whenever a step leaves the bracket.
pub fn gamma_quantile(params: &GammaParams, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::domain(format!("gamma quantile requires 0 <= p < 1, got {p}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(unit_rate_quantile(params.alpha, p)? / params.lambda)
}

fn unit_rate_quantile(alpha: f64, p: f64) -> Result<f64> {
    const MAX_ITER: usize = 300;
    let upper_tail = p > 0.5;
    let q = 1.0 - p;
    // Residual with the sign of F(x) − p, evaluated on the better-conditioned tail.
    let residual = |x: f64| -> Result<f64> {
        if upper_tail {
            Ok(q - specfun::reg_upper_inc_gamma(alpha, x)?)
        } else {
            Ok(specfun::reg_lower_inc_gamma(alpha, x)? - p)
        }
    };
    let ln_norm = specfun::ln_gamma_unchecked(alpha);
    let density = |x: f64| ((alpha - 1.0) * x.ln() - x - ln_norm).exp();

    let mut lo = 0.0;
    let mut hi = alpha.max(1.0);
    while residual(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NonConvergence { what: "gamma quantile bracket", iterations: MAX_ITER });
        }
    }

    // Small-p start from F(x) ≈ x^α / Γ(α + 1); otherwise start at the bracket midpoint.
    let mut x = if !upper_tail {
        let guess = ((p.ln() + specfun::ln_gamma_unchecked(alpha + 1.0)) / alpha).exp();
        if guess > lo && guess < hi {
            guess
        } else {
            0.5 * (lo + hi)
        }
    } else {
        0.5 * (lo + hi)
    };

    for _ in 0..MAX_ITER {
        let r = residual(x)?;
        if r == 0.0 {
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = density(x);
        let mut next = if d > 0.0 && d.is_finite() { x - r / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.max(f64::MIN_POSITIVE) || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergence { what: "gamma quantile", iterations: MAX_ITER })
}

/// One unit-rate gamma variate by the Marsaglia–Tsang squeeze method; shapes
/// below one are boosted through `G(α) = G(α + 1)·U^{1/α}`.
pub fn standard_gamma_variate(alpha: f64, rng: &mut RandomStream) -> f64 {
    if alpha < 1.0 {
        let boost = rng.open01().powf(1.0 / alpha);
        return standard_gamma_variate(alpha + 1.0, rng) * boost;
    }
    let d = alpha - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = rng.standard_normal();
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = rng.open01();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// `count` independent draws, scaled by the rate.
pub fn gamma_draws(params: &GammaParams, rng: &mut RandomStream, count: usize) -> Vec<f64> {
    (0..count).map(|_| standard_gamma_variate(params.alpha, rng) / params.lambda).collect()
}

pub fn gamma_sample(params: &GammaParams, rng: &mut RandomStream, count: usize) -> Result<Sample> {
    if count == 0 {
        return Err(Error::domain("gamma_sample requires count >= 1"));
    }
    Sample::new(gamma_draws(params, rng, count))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub params: GammaParams,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Gamma log-likelihood of `data`.
pub fn log_likelihood(params: &GammaParams, data: &[f64]) -> f64 {
    let (a, l) = (params.alpha, params.lambda);
    let n = data.len() as f64;
    let sum_x: f64 = data.iter().sum();
    let sum_ln: f64 = data.iter().map(|x| x.ln()).sum();
    n * (a * l.ln() - specfun::ln_gamma_unchecked(a)) + (a - 1.0) * sum_ln - l * sum_x
}

struct MleStatistics {
    mean: f64,
    /// `ln x̄ − mean(ln x)`, positive unless the data are constant.
    log_gap: f64,
    mom_alpha: f64,
}

fn mle_statistics(data: &Sample) -> Result<MleStatistics> {
    let xs = data.values();
    if xs.len() < 2 {
        return Err(Error::InsufficientSample { n: xs.len(), m: 2 });
    }
    if let Some(bad) = xs.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::InvalidSample(format!("gamma fit requires positive observations, found {bad}")));
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::Degenerate("all observations are equal; the shape estimate diverges".into()));
    }
    let n = xs.len() as f64;
    let mean = data.sum() / n;
    let mean_ln = xs.iter().map(|x| x.ln()).sum::<f64>() / n;
    let log_gap = mean.ln() - mean_ln;
    if !(log_gap > 0.0) {
        return Err(Error::Degenerate("observations are numerically constant".into()));
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let mom_alpha = if var > 0.0 { mean * mean / var } else { 1.0 / (2.0 * log_gap) };
    Ok(MleStatistics { mean, log_gap, mom_alpha })
}

/// `ln α − ψ(α) − gap`: zero at the profile-likelihood maximum.
fn score(alpha: f64, gap: f64) -> Result<f64> {
    Ok(specfun::log_minus_digamma(alpha)? - gap)
}

fn finish(data: &Sample, stats: &MleStatistics, alpha: f64, iterations: usize) -> Result<FitResult> {
    let params = GammaParams::new(alpha, alpha / stats.mean)?;
    Ok(FitResult { params, log_likelihood: log_likelihood(&params, data.values()), iterations, converged: true })
}

/// Maximum-likelihood gamma fit: Newton iteration on the shape equation
/// `ln α − ψ(α) = ln x̄ − mean(ln x)` from the method-of-moments start, then
/// `λ = α / x̄`.
pub fn gamma_mle(data: &Sample, tol: &Tolerance) -> Result<FitResult> {
    tol.validate()?;
    let stats = mle_statistics(data)?;
    let mut alpha = stats.mom_alpha;
    for it in 1..=tol.max_iter {
        let f = score(alpha, stats.log_gap)?;
        let df = specfun::inv_minus_trigamma(alpha)?;
        let mut next = alpha - f / df;
        if !(next > 0.0) || !next.is_finite() {
            next = 0.5 * alpha;
        }
        let step = (next - alpha).abs();
        alpha = next;
        if step <= tol.rel_eps * 1e-2 * alpha {
            return finish(data, &stats, alpha, it);
        }
    }
    Err(Error::NonConvergence { what: "gamma MLE Newton", iterations: tol.max_iter })
}

/// Same estimator as [`gamma_mle`], solved by bisection on the shape
/// equation. Shares nothing with the Newton path except the score function,
/// so agreement of the two is a check on both.
pub fn gamma_mle_bisection(data: &Sample, tol: &Tolerance) -> Result<FitResult> {
    tol.validate()?;
    let stats = mle_statistics(data)?;
    let mut lo = stats.mom_alpha;
    let mut hi = stats.mom_alpha;
    while score(lo, stats.log_gap)? <= 0.0 {
        lo *= 0.5;
    }
    while score(hi, stats.log_gap)? >= 0.0 {
        hi *= 2.0;
    }
    for it in 1..=tol.max_iter.max(200) {
        let mid = 0.5 * (lo + hi);
        if score(mid, stats.log_gap)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            return finish(data, &stats, 0.5 * (lo + hi), it);
        }
    }
    Err(Error::NonConvergence { what: "gamma MLE bisection", iterations: tol.max_iter })
}
