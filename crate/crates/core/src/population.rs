//! Population values of the extended Gini indices.
//!
//! For a non-negative model with survival function `S`, cdf `F`, quantile
//! `Q` and mean `μ`:
//!
//! ```text
//! lower(m) = ∫ S(1 − S^{m−1}) / (m ∫ S)        = (1/(mμ)) ∫₀¹ Q(u) {1 − m(1−u)^{m−1}} du
//! upper(m) = ∫ F(1 − F^{m−1}) / (m ∫ S)        = (1/(mμ)) ∫₀¹ Q(u) {m u^{m−1} − 1} du
//! ```
//!
//! and through the Lorenz curve `L`, `lower(m) = G_m / m` and
//! `upper(m) = (1 − 1/m) D_{m−1}` with
//! `G_n = n(n−1) ∫ (u − L(u))(1−u)^{n−2} du` and
//! `D_n = (n+1) ∫ (u − L(u)) u^{n−1} du`.
//!
//! All three routes are evaluated independently so they can be checked
//! against each other. At `m = 2` each component is half the classical Gini
//! coefficient.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{IndexKind, Sample};
use crate::gamma::GammaParams;
use crate::quadrature::{
    integrate_semi_infinite_with_breaks, integrate_unit_with_breaks, integrate_with_breaks, Integral, QuadratureConfig,
};
use crate::specfun::{reg_lower_inc_gamma, reg_upper_inc_gamma};

/// Largest double below one; quantiles are never requested at `u = 1`.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// A non-negative, absolutely continuous (or empirical) distribution.
///
/// Implementations return `NaN` when an evaluation fails; quadrature turns
/// that into an error.
pub trait DistributionModel: Send + Sync {
    fn cdf(&self, x: f64) -> f64;

    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Left-continuous inverse of the cdf on `[0, 1)`.
    fn quantile(&self, p: f64) -> f64;

    fn mean(&self) -> f64;

    /// Points on `[0, ∞)` where `cdf` is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Points on `(0, 1)` where `quantile` is not smooth.
    fn quantile_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `∫₀^p Q(t) dt`.
    fn partial_mean(&self, p: f64, cfg: &QuadratureConfig) -> Result<Integral> {
        quantile_integral(self, p, cfg)
    }
}

fn quantile_integral<M: DistributionModel + ?Sized>(model: &M, p: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    let breaks = model.quantile_breakpoints();
    integrate_with_breaks(|u| model.quantile(u.min(BELOW_ONE)), 0.0, p, &breaks, cfg)
}

impl DistributionModel for GammaParams {
    fn cdf(&self, x: f64) -> f64 {
        GammaParams::cdf(self, x).unwrap_or(f64::NAN)
    }

    fn sf(&self, x: f64) -> f64 {
        GammaParams::sf(self, x).unwrap_or(f64::NAN)
    }

    fn quantile(&self, p: f64) -> f64 {
        GammaParams::quantile(self, p).unwrap_or(f64::NAN)
    }

    fn mean(&self) -> f64 {
        GammaParams::mean(self)
    }

    /// `μ · P(α+1, λ Q(p))`.
    fn partial_mean(&self, p: f64, _cfg: &QuadratureConfig) -> Result<Integral> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("probability must lie in [0, 1], got {p}")));
        }
        let value = if p >= 1.0 {
            GammaParams::mean(self)
        } else {
            let x = GammaParams::quantile(self, p)?;
            GammaParams::mean(self) * reg_lower_inc_gamma(self.alpha() + 1.0, self.lambda() * x)?
        };
        Ok(Integral { value, error: 0.0, evaluations: 0 })
    }
}

/// `X + shift`.
#[derive(Debug, Clone)]
pub struct Shifted<M> {
    pub inner: M,
    pub shift: f64,
}

impl<M: DistributionModel> Shifted<M> {
    pub fn new(inner: M, shift: f64) -> Result<Self> {
        if !(shift >= 0.0) || !shift.is_finite() {
            return Err(Error::domain(format!("shift must be finite and non-negative, got {shift}")));
        }
        Ok(Shifted { inner, shift })
    }
}

impl<M: DistributionModel> DistributionModel for Shifted<M> {
    fn cdf(&self, x: f64) -> f64 {
        if x < self.shift {
            0.0
        } else {
            self.inner.cdf(x - self.shift)
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x < self.shift {
            1.0
        } else {
            self.inner.sf(x - self.shift)
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        self.inner.quantile(p) + self.shift
    }

    fn mean(&self) -> f64 {
        self.inner.mean() + self.shift
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.inner.breakpoints().into_iter().map(|x| x + self.shift).collect();
        b.push(self.shift);
        b
    }

    fn quantile_breakpoints(&self) -> Vec<f64> {
        self.inner.quantile_breakpoints()
    }

    fn partial_mean(&self, p: f64, cfg: &QuadratureConfig) -> Result<Integral> {
        let inner = self.inner.partial_mean(p, cfg)?;
        Ok(Integral { value: inner.value + self.shift * p, ..inner })
    }
}

/// `factor · X`.
#[derive(Debug, Clone)]
pub struct Scaled<M> {
    pub inner: M,
    pub factor: f64,
}

impl<M: DistributionModel> Scaled<M> {
    pub fn new(inner: M, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::domain(format!("scale factor must be finite and positive, got {factor}")));
        }
        Ok(Scaled { inner, factor })
    }
}

impl<M: DistributionModel> DistributionModel for Scaled<M> {
    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x / self.factor)
    }

    fn sf(&self, x: f64) -> f64 {
        self.inner.sf(x / self.factor)
    }

    fn quantile(&self, p: f64) -> f64 {
        self.factor * self.inner.quantile(p)
    }

    fn mean(&self) -> f64 {
        self.factor * self.inner.mean()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().into_iter().map(|x| x * self.factor).collect()
    }

    fn quantile_breakpoints(&self) -> Vec<f64> {
        self.inner.quantile_breakpoints()
    }

    fn partial_mean(&self, p: f64, cfg: &QuadratureConfig) -> Result<Integral> {
        let inner = self.inner.partial_mean(p, cfg)?;
        Ok(Integral { value: self.factor * inner.value, error: self.factor * inner.error, ..inner })
    }
}

/// All mass at `μ`: the zero-inequality reference.
#[derive(Debug, Clone, Copy)]
pub struct PointMass {
    pub at: f64,
}

impl PointMass {
    pub fn new(at: f64) -> Result<Self> {
        if !(at > 0.0) || !at.is_finite() {
            return Err(Error::domain(format!("point mass location must be positive, got {at}")));
        }
        Ok(PointMass { at })
    }
}

impl DistributionModel for PointMass {
    fn cdf(&self, x: f64) -> f64 {
        if x < self.at {
            0.0
        } else {
            1.0
        }
    }

    fn quantile(&self, _p: f64) -> f64 {
        self.at
    }

    fn mean(&self) -> f64 {
        self.at
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.at]
    }

    fn partial_mean(&self, p: f64, _cfg: &QuadratureConfig) -> Result<Integral> {
        Ok(Integral { value: self.at * p, error: 0.0, evaluations: 0 })
    }
}

/// Empirical distribution of a sample; its indices are the plug-in
/// (V-statistic) values.
#[derive(Debug, Clone)]
pub struct EmpiricalModel {
    sorted: Vec<f64>,
    mean: f64,
}

impl EmpiricalModel {
    pub fn from_sample(sample: &Sample) -> Self {
        EmpiricalModel { sorted: sample.sorted_values(), mean: sample.mean() }
    }

    fn n(&self) -> f64 {
        self.sorted.len() as f64
    }

    fn count_le(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }
}

impl DistributionModel for EmpiricalModel {
    fn cdf(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.n()
    }

    fn sf(&self, x: f64) -> f64 {
        (self.sorted.len() - self.count_le(x)) as f64 / self.n()
    }

    fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let k = ((p * n as f64).ceil() as usize).clamp(1, n);
        self.sorted[k - 1]
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.sorted.clone()
    }

    fn quantile_breakpoints(&self) -> Vec<f64> {
        let n = self.sorted.len();
        (1..n).map(|k| k as f64 / n as f64).collect()
    }

    fn partial_mean(&self, p: f64, _cfg: &QuadratureConfig) -> Result<Integral> {
        let n = self.sorted.len();
        let full = ((p * n as f64).floor() as usize).min(n);
        let head: f64 = self.sorted[..full].iter().sum::<f64>() / n as f64;
        let rest = if full < n { (p - full as f64 / n as f64).max(0.0) * self.sorted[full] } else { 0.0 };
        Ok(Integral { value: head + rest, error: 0.0, evaluations: 0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Survival,
    QuantileCovariance,
    Lorenz,
    GammaClosedPath,
}

impl Representation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Representation::Survival => "survival",
            Representation::QuantileCovariance => "quantile_covariance",
            Representation::Lorenz => "lorenz",
            Representation::GammaClosedPath => "gamma_closed_path",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexValue {
    pub value: f64,
    pub representation: Representation,
    /// Quadrature error carried through to the index.
    pub est_error: f64,
}

impl IndexValue {
    fn add(self, other: IndexValue) -> IndexValue {
        IndexValue {
            value: self.value + other.value,
            representation: self.representation,
            est_error: self.est_error + other.est_error,
        }
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::domain(format!("subset size m must be at least 2, got {m}")));
    }
    Ok(())
}

/// `num / den` with both quadrature errors carried linearly.
fn ratio(num: Integral, den: Integral, scale: f64, representation: Representation) -> IndexValue {
    let value = num.value / (scale * den.value);
    let est_error = (num.error + value.abs() * scale * den.error) / (scale * den.value).abs();
    IndexValue { value, representation, est_error }
}

/// `1 − p^k` for `p ∈ [0, 1]` given `q = 1 − p` too, without cancellation.
fn one_minus_pow(p: f64, q: f64, k: i32) -> f64 {
    if p > 0.5 {
        -(k as f64 * (-q).ln_1p()).exp_m1()
    } else {
        1.0 - p.powi(k)
    }
}

fn survival_mass<M: DistributionModel + ?Sized>(model: &M, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Integral> {
    integrate_semi_infinite_with_breaks(|t| model.sf(t), breaks, cfg)
}

pub fn lower_index_survival<M: DistributionModel + ?Sized>(
    model: &M,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<IndexValue> {
    check_m(m)?;
    let breaks = model.breakpoints();
    let k = (m - 1) as i32;
    let num = integrate_semi_infinite_with_breaks(
        |t| {
            let s = model.sf(t);
            s * one_minus_pow(s, model.cdf(t), k)
        },
        &breaks,
        cfg,
    )?;
    let den = survival_mass(model, &breaks, cfg)?;
    Ok(ratio(num, den, m as f64, Representation::Survival))
}

pub fn upper_index_survival<M: DistributionModel + ?Sized>(
    model: &M,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<IndexValue> {
    check_m(m)?;
    let breaks = model.breakpoints();
    let k = (m - 1) as i32;
    let num = integrate_semi_infinite_with_breaks(
        |t| {
            let f = model.cdf(t);
            f * one_minus_pow(f, model.sf(t), k)
        },
        &breaks,
        cfg,
    )?;
    let den = survival_mass(model, &breaks, cfg)?;
    Ok(ratio(num, den, m as f64, Representation::Survival))
}

pub fn index_quantile_covariance<M: DistributionModel + ?Sized>(
    model: &M,
    m: usize,
    kind: IndexKind,
    cfg: &QuadratureConfig,
) -> Result<IndexValue> {
    check_m(m)?;
    let mf = m as f64;
    let k = (m - 1) as i32;
    let weight = |u: f64| match kind {
        IndexKind::Lower => 1.0 - mf * (1.0 - u).powi(k),
        IndexKind::Upper => mf * u.powi(k) - 1.0,
        IndexKind::Combined => mf * (u.powi(k) - (1.0 - u).powi(k)),
    };
    let breaks = model.quantile_breakpoints();
    let num = integrate_unit_with_breaks(|u| model.quantile(u.min(BELOW_ONE)) * weight(u), &breaks, cfg)?;
    let mu = model.mean();
    Ok(IndexValue {
        value: num.value / (mf * mu),
        representation: Representation::QuantileCovariance,
        est_error: num.error / (mf * mu),
    })
}

/// `L(p) = ∫₀^p Q / μ`, by direct quadrature of the quantile function.
pub fn lorenz_curve<M: DistributionModel + ?Sized>(model: &M, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability must lie in [0, 1], got {p}")));
    }
    let part = quantile_integral(model, p, cfg)?;
    Ok((part.value / model.mean()).clamp(0.0, p))
}

/// `∫₀¹ (u − L(u)) w(u) du` with `L` taken from the model's partial mean.
fn lorenz_moment<M, W>(model: &M, weight: W, cfg: &QuadratureConfig) -> Result<Integral>
where
    M: DistributionModel + ?Sized,
    W: Fn(f64) -> f64,
{
    let mu = model.mean();
    let inner = QuadratureConfig { rel_tol: (cfg.rel_tol * 1e-3).max(1e-14), abs_tol: cfg.abs_tol * 1e-3, ..*cfg };
    let breaks = model.quantile_breakpoints();
    integrate_unit_with_breaks(
        |u| match model.partial_mean(u, &inner) {
            Ok(part) => (u - part.value / mu) * weight(u),
            Err(_) => f64::NAN,
        },
        &breaks,
        cfg,
    )
}

fn aaberge_integral<M: DistributionModel + ?Sized>(model: &M, n: usize, cfg: &QuadratureConfig) -> Result<Integral> {
    if n < 1 {
        return Err(Error::domain("Aaberge order must be at least 1"));
    }
    let k = (n - 1) as i32;
    let c = (n + 1) as f64;
    let r = lorenz_moment(model, |u| u.powi(k), cfg)?;
    Ok(Integral { value: c * r.value, error: c * r.error, ..r })
}

fn kakwani_integral<M: DistributionModel + ?Sized>(model: &M, n: usize, cfg: &QuadratureConfig) -> Result<Integral> {
    if n < 1 {
        return Err(Error::domain("Kakwani order must be at least 1"));
    }
    if n == 1 {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let k = (n - 2) as i32;
    let c = (n * (n - 1)) as f64;
    let r = lorenz_moment(model, |u| (1.0 - u).powi(k), cfg)?;
    Ok(Integral { value: c * r.value, error: c * r.error, ..r })
}

/// Aaberge's `D_n = (n+1) ∫ (u − L(u)) u^{n−1} du`.
#[allow(non_snake_case)]
pub fn aaberge_D<M: DistributionModel + ?Sized>(model: &M, n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(aaberge_integral(model, n, cfg)?.value)
}

/// The generalized Gini `G_n = n(n−1) ∫ (u − L(u))(1−u)^{n−2} du`.
#[allow(non_snake_case)]
pub fn kakwani_G<M: DistributionModel + ?Sized>(model: &M, n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(kakwani_integral(model, n, cfg)?.value)
}

/// Lower index as `G_m / m`, upper as `(1 − 1/m) D_{m−1}`.
pub fn index_lorenz<M: DistributionModel + ?Sized>(
    model: &M,
    m: usize,
    kind: IndexKind,
    cfg: &QuadratureConfig,
) -> Result<IndexValue> {
    check_m(m)?;
    let mf = m as f64;
    let lower = || -> Result<IndexValue> {
        let g = kakwani_integral(model, m, cfg)?;
        Ok(IndexValue { value: g.value / mf, representation: Representation::Lorenz, est_error: g.error / mf })
    };
    let upper = || -> Result<IndexValue> {
        let d = aaberge_integral(model, m - 1, cfg)?;
        let c = 1.0 - 1.0 / mf;
        Ok(IndexValue { value: c * d.value, representation: Representation::Lorenz, est_error: c * d.error })
    };
    match kind {
        IndexKind::Lower => lower(),
        IndexKind::Upper => upper(),
        IndexKind::Combined => Ok(lower()?.add(upper()?)),
    }
}

/// Survival-form index of any kind.
pub fn index_survival<M: DistributionModel + ?Sized>(
    model: &M,
    m: usize,
    kind: IndexKind,
    cfg: &QuadratureConfig,
) -> Result<IndexValue> {
    match kind {
        IndexKind::Lower => lower_index_survival(model, m, cfg),
        IndexKind::Upper => upper_index_survival(model, m, cfg),
        IndexKind::Combined => Ok(lower_index_survival(model, m, cfg)?.add(upper_index_survival(model, m, cfg)?)),
    }
}

/// `(1/m)[1 − (1/α) ∫₀^∞ {1 − P(α, t)}^m dt]`; free of λ.
pub fn gamma_lower_index(params: &GammaParams, m: usize, cfg: &QuadratureConfig) -> Result<IndexValue> {
    check_m(m)?;
    let alpha = params.alpha();
    let k = m as i32;
    let r = integrate_semi_infinite_with_breaks(
        |t| reg_upper_inc_gamma(alpha, t).map_or(f64::NAN, |q| q.powi(k)),
        &[],
        cfg,
    )?;
    let mf = m as f64;
    Ok(IndexValue {
        value: (1.0 - r.value / alpha) / mf,
        representation: Representation::GammaClosedPath,
        est_error: r.error / (alpha * mf),
    })
}

/// `(1/m)[(1/α) ∫₀^∞ {1 − P(α, t)^m} dt − 1]`; free of λ.
pub fn gamma_upper_index(params: &GammaParams, m: usize, cfg: &QuadratureConfig) -> Result<IndexValue> {
    check_m(m)?;
    let alpha = params.alpha();
    let k = m as i32;
    let r = integrate_semi_infinite_with_breaks(
        |t| match (reg_lower_inc_gamma(alpha, t), reg_upper_inc_gamma(alpha, t)) {
            (Ok(p), Ok(q)) => one_minus_pow(p, q, k),
            _ => f64::NAN,
        },
        &[],
        cfg,
    )?;
    let mf = m as f64;
    Ok(IndexValue {
        value: (r.value / alpha - 1.0) / mf,
        representation: Representation::GammaClosedPath,
        est_error: r.error / (alpha * mf),
    })
}

pub fn gamma_index(params: &GammaParams, m: usize, kind: IndexKind, cfg: &QuadratureConfig) -> Result<IndexValue> {
    match kind {
        IndexKind::Lower => gamma_lower_index(params, m, cfg),
        IndexKind::Upper => gamma_upper_index(params, m, cfg),
        IndexKind::Combined => Ok(gamma_lower_index(params, m, cfg)?.add(gamma_upper_index(params, m, cfg)?)),
    }
}

/// Shifts `(r_m, s_m)` with `G(X + r_m) = lower(m)` and `G(X + s_m) = upper(m)`,
/// using `G(X + a) = μ G(X) / (μ + a)`.
pub fn shift_constants<M: DistributionModel + ?Sized>(
    model: &M,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    check_m(m)?;
    let gini = index_survival(model, 2, IndexKind::Combined, cfg)?.value;
    let lower = lower_index_survival(model, m, cfg)?.value;
    let upper = upper_index_survival(model, m, cfg)?.value;
    let mu = model.mean();
    let shift = |component: f64, name: &str| -> Result<f64> {
        if !(component > 0.0) {
            return Err(Error::UndefinedShift(format!("{name} index is {component}; the model is degenerate")));
        }
        let r = mu * (gini - component) / component;
        if r < 0.0 {
            return Err(Error::UndefinedShift(format!("{name} index {component} exceeds the Gini coefficient {gini}")));
        }
        Ok(r)
    };
    Ok((shift(lower, "lower")?, shift(upper, "upper")?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn exp1() -> GammaParams {
        GammaParams::exponential()
    }

    fn harmonic(m: usize) -> f64 {
        (1..=m).map(|k| 1.0 / k as f64).sum()
    }

    #[test]
    fn survival_examples() {
        let lo = lower_index_survival(&exp1(), 3, &cfg()).unwrap();
        assert!((lo.value - 2.0 / 9.0).abs() < 1e-8);
        assert!(lo.est_error < 1e-8);
        assert!((lower_index_survival(&exp1(), 2, &cfg()).unwrap().value - 0.25).abs() < 1e-8);
        let up = upper_index_survival(&exp1(), 3, &cfg()).unwrap();
        assert!((up.value - 5.0 / 18.0).abs() < 1e-8);
        assert!((upper_index_survival(&exp1(), 2, &cfg()).unwrap().value - 0.25).abs() < 1e-8);
        assert!((lo.value + up.value - 0.5).abs() < 1e-8);
    }

    #[test]
    fn exponential_closed_forms_across_m() {
        for m in 2..=6 {
            let lo = lower_index_survival(&exp1(), m, &cfg()).unwrap().value;
            let up = upper_index_survival(&exp1(), m, &cfg()).unwrap().value;
            let mf = m as f64;
            assert!((lo - (1.0 - 1.0 / mf) / mf).abs() < 1e-9, "m={m}");
            assert!((up - (harmonic(m) - 1.0) / mf).abs() < 1e-9, "m={m}");
        }
    }

    #[test]
    fn quantile_examples() {
        let lo = index_quantile_covariance(&exp1(), 3, IndexKind::Lower, &cfg()).unwrap();
        assert!((lo.value - 2.0 / 9.0).abs() < 1e-6);
        let up = index_quantile_covariance(&exp1(), 2, IndexKind::Upper, &cfg()).unwrap();
        assert!((up.value - 0.25).abs() < 1e-6);
    }

    #[test]
    fn gamma_paths() {
        let g = GammaParams::new(2.0, 1.0).unwrap();
        assert!((gamma_lower_index(&exp1(), 3, &cfg()).unwrap().value - 2.0 / 9.0).abs() < 1e-8);
        assert!((gamma_upper_index(&exp1(), 3, &cfg()).unwrap().value - 5.0 / 18.0).abs() < 1e-8);
        assert!((gamma_lower_index(&g, 2, &cfg()).unwrap().value - 0.1875).abs() < 1e-8);
        assert!((gamma_upper_index(&g, 2, &cfg()).unwrap().value - 0.1875).abs() < 1e-8);
        let base = gamma_lower_index(&g, 4, &cfg()).unwrap().value;
        for lambda in [0.5, 3.0] {
            let v = gamma_lower_index(&GammaParams::new(2.0, lambda).unwrap(), 4, &cfg()).unwrap().value;
            assert_eq!(v, base);
        }
    }

    #[test]
    fn lorenz_examples() {
        let e = exp1();
        assert_eq!(lorenz_curve(&e, 0.0, &cfg()).unwrap(), 0.0);
        assert!((lorenz_curve(&e, 1.0, &cfg()).unwrap() - 1.0).abs() < 1e-8);
        let l = lorenz_curve(&e, 0.5, &cfg()).unwrap();
        assert!((l - (0.5 - 0.5 * 2f64.ln())).abs() < 1e-10);
        assert!(lorenz_curve(&e, 1.5, &cfg()).is_err());
    }

    #[test]
    fn closed_form_partial_mean_matches_quadrature() {
        for alpha in [0.5, 2.0, 5.0] {
            let g = GammaParams::new(alpha, 1.7).unwrap();
            for p in [0.01, 0.3, 0.9, 0.999] {
                let direct = lorenz_curve(&g, p, &cfg()).unwrap();
                let closed = g.partial_mean(p, &cfg()).unwrap().value / g.mean();
                assert!((direct - closed).abs() < 1e-9, "alpha={alpha} p={p}");
            }
        }
    }

    #[test]
    fn aaberge_and_kakwani_examples() {
        let e = exp1();
        assert!((aaberge_D(&e, 1, &cfg()).unwrap() - 0.5).abs() < 1e-8);
        assert!((aaberge_D(&e, 2, &cfg()).unwrap() - 5.0 / 12.0).abs() < 1e-8);
        assert!((kakwani_G(&e, 2, &cfg()).unwrap() - 0.5).abs() < 1e-8);
        assert!((kakwani_G(&e, 3, &cfg()).unwrap() - 2.0 / 3.0).abs() < 1e-8);
        let point = PointMass::new(3.0).unwrap();
        assert!(aaberge_D(&point, 3, &cfg()).unwrap().abs() < 1e-14);
        assert!(kakwani_G(&point, 3, &cfg()).unwrap().abs() < 1e-14);
    }

    /// Gamma model that hides its closed-form partial mean, forcing the nested
    /// quadrature in the Lorenz path.
    struct Opaque(GammaParams);

    impl DistributionModel for Opaque {
        fn cdf(&self, x: f64) -> f64 {
            DistributionModel::cdf(&self.0, x)
        }
        fn sf(&self, x: f64) -> f64 {
            DistributionModel::sf(&self.0, x)
        }
        fn quantile(&self, p: f64) -> f64 {
            DistributionModel::quantile(&self.0, p)
        }
        fn mean(&self) -> f64 {
            self.0.mean()
        }
    }

    #[test]
    fn nested_lorenz_path_agrees() {
        let c = cfg().with_tolerances(1e-8, 1e-10);
        let model = Opaque(GammaParams::new(2.0, 1.0).unwrap());
        let v = index_lorenz(&model, 3, IndexKind::Upper, &c).unwrap().value;
        let truth = gamma_upper_index(&model.0, 3, &cfg()).unwrap().value;
        assert!((v - truth).abs() < 1e-7);
    }

    #[test]
    fn shift_examples() {
        let (r, s) = shift_constants(&exp1(), 3, &cfg()).unwrap();
        assert!((r - 1.25).abs() < 1e-7);
        assert!((s - 0.8).abs() < 1e-7);
        let (r, s) = shift_constants(&exp1(), 2, &cfg()).unwrap();
        assert!((r - 1.0).abs() < 1e-7 && (s - 1.0).abs() < 1e-7);
        let point = PointMass::new(2.0).unwrap();
        assert!(matches!(shift_constants(&point, 3, &cfg()), Err(Error::UndefinedShift(_))));
    }

    #[test]
    fn shifted_model_has_shifted_gini() {
        let (r, s) = shift_constants(&exp1(), 4, &cfg()).unwrap();
        let lower = lower_index_survival(&exp1(), 4, &cfg()).unwrap().value;
        let upper = upper_index_survival(&exp1(), 4, &cfg()).unwrap().value;
        let g_r = index_survival(&Shifted::new(exp1(), r).unwrap(), 2, IndexKind::Combined, &cfg()).unwrap().value;
        let g_s = index_survival(&Shifted::new(exp1(), s).unwrap(), 2, IndexKind::Combined, &cfg()).unwrap().value;
        assert!((g_r - lower).abs() < 1e-8);
        assert!((g_s - upper).abs() < 1e-8);
    }

    #[test]
    fn point_mass_is_zero_everywhere() {
        let point = PointMass::new(5.0).unwrap();
        for kind in [IndexKind::Lower, IndexKind::Upper] {
            assert!(index_survival(&point, 3, kind, &cfg()).unwrap().value.abs() < 1e-14);
            assert!(index_quantile_covariance(&point, 3, kind, &cfg()).unwrap().value.abs() < 1e-12);
            assert!(index_lorenz(&point, 3, kind, &cfg()).unwrap().value.abs() < 1e-14);
        }
    }

    #[test]
    fn empirical_model_matches_v_statistic() {
        // For the empirical law of {1, 2, 4}, E[max of 2 − X1] averages over all
        // 9 ordered pairs with replacement.
        let data = [1.0, 2.0, 4.0];
        let mut ranges = 0.0;
        let mut upper = 0.0;
        for a in data {
            for b in data {
                ranges += f64::max(a, b) - f64::min(a, b);
                upper += f64::max(a, b) - a;
            }
        }
        let mu = 7.0 / 3.0;
        let comb_truth = ranges / 9.0 / (2.0 * mu);
        let up_truth = upper / 9.0 / (2.0 * mu);
        let model = EmpiricalModel::from_sample(&Sample::new(data.to_vec()).unwrap());
        for value in [
            index_survival(&model, 2, IndexKind::Upper, &cfg()).unwrap().value,
            index_quantile_covariance(&model, 2, IndexKind::Upper, &cfg()).unwrap().value,
            index_lorenz(&model, 2, IndexKind::Upper, &cfg()).unwrap().value,
        ] {
            assert!((value - up_truth).abs() < 1e-12, "{value} vs {up_truth}");
        }
        let c = index_survival(&model, 2, IndexKind::Combined, &cfg()).unwrap().value;
        assert!((c - comb_truth).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_m() {
        assert!(lower_index_survival(&exp1(), 1, &cfg()).is_err());
        assert!(gamma_upper_index(&exp1(), 0, &cfg()).is_err());
        assert!(index_lorenz(&exp1(), 1, IndexKind::Lower, &cfg()).is_err());
    }
}
