//! Adaptive Gauss–Kronrod (7/15) integration on finite intervals, `[0, 1]`
//! and `[0, ∞)`.
//!
//! Subdivision is global: the interval with the largest error estimate is
//! bisected until the summed estimate meets `max(abs_tol, rel_tol·|I|)`.
//! Kronrod nodes never touch the interval endpoints, so integrands that are
//! singular at an endpoint (e.g. a quantile function at `u = 1`) are safe.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any one interval.
    pub max_depth: u32,
    /// The infinite tail is cut once `|f(T)| <= tail_cut * max|f|`.
    pub tail_cut: f64,
    /// First truncation point tried on `[0, ∞)`; doubled until the tail is cut.
    pub initial_scale: f64,
    pub max_intervals: usize,
    /// Intervals narrower than this (relative to their location) are not split.
    pub min_width: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 60,
            tail_cut: 1e-14,
            initial_scale: 1.0,
            max_intervals: 5000,
            min_width: 1e-14,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) {
            return Err(Error::domain("quadrature tolerances must satisfy rel_tol > 0, abs_tol >= 0"));
        }
        if !(self.tail_cut > 0.0) || !(self.initial_scale > 0.0) || !self.initial_scale.is_finite() {
            return Err(Error::domain("tail_cut and initial_scale must be positive"));
        }
        if self.max_depth == 0 || self.max_intervals == 0 {
            return Err(Error::domain("max_depth and max_intervals must be positive"));
        }
        Ok(())
    }

    pub fn with_initial_scale(mut self, scale: f64) -> Self {
        self.initial_scale = scale;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// Kronrod abscissae (descending from 1) and weights; every other node is a
// Gauss-Legendre 7 node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Counted<'a, F> {
    f: &'a F,
    calls: Cell<usize>,
}

impl<F: Fn(f64) -> f64> Counted<'_, F> {
    fn eval(&self, x: f64) -> Result<f64> {
        self.calls.set(self.calls.get() + 1);
        let y = (self.f)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteIntegrand { at: x, value: y })
        }
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15<F: Fn(f64) -> f64>(f: &Counted<'_, F>, a: f64, b: f64, depth: u32) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f.eval(center)?;

    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let y1 = f.eval(center - dx)?;
        let y2 = f.eval(center + dx)?;
        fv1[j] = y1;
        fv2[j] = y2;
        res_k += WGK[j] * (y1 + y2);
        res_abs += WGK[j] * (y1.abs() + y2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (y1 + y2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_k - res_g) * half;
    let w = half.abs();
    Ok(Segment { a, b, value: res_k * half, error: rescale_error(err, res_abs * w, res_asc * w), depth })
}

/// Core adaptive loop over an initial partition.
fn adapt<F: Fn(f64) -> f64>(
    f: &Counted<'_, F>,
    cuts: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(f, w[0], w[1], 0)?);
        }
    }
    let mut intervals = heap.len();

    loop {
        let value: f64 = heap.iter().chain(frozen.iter()).map(|s| s.value).sum();
        let error: f64 = heap.iter().chain(frozen.iter()).map(|s| s.error).sum();
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            return Ok((value, error));
        }

        // Split until the worst interval is no longer the bottleneck before
        // re-summing; re-summing every step is quadratic in the interval count.
        let mut budget = heap.len().max(1);
        while budget > 0 {
            budget -= 1;
            let Some(worst) = heap.pop() else { break };
            let scale = worst.a.abs().max(worst.b.abs()).max(1.0);
            if worst.depth >= cfg.max_depth || (worst.b - worst.a) < cfg.min_width * scale {
                frozen.push(worst);
                continue;
            }
            if intervals >= cfg.max_intervals {
                heap.push(worst);
                let value: f64 = heap.iter().chain(frozen.iter()).map(|s| s.value).sum();
                let error: f64 = heap.iter().chain(frozen.iter()).map(|s| s.error).sum();
                return Err(Error::ToleranceNotMet {
                    estimate: value,
                    error,
                    target: abs_tol.max(rel_tol * value.abs()),
                });
            }
            let mid = 0.5 * (worst.a + worst.b);
            heap.push(gk15(f, worst.a, mid, worst.depth + 1)?);
            heap.push(gk15(f, mid, worst.b, worst.depth + 1)?);
            intervals += 1;
            if worst.error < target / 8.0 {
                break;
            }
        }

        if heap.is_empty() {
            let value: f64 = frozen.iter().map(|s| s.value).sum();
            let error: f64 = frozen.iter().map(|s| s.error).sum();
            let target = abs_tol.max(rel_tol * value.abs());
            if error <= target {
                return Ok((value, error));
            }
            return Err(Error::ToleranceNotMet { estimate: value, error, target });
        }
    }
}

fn partition(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);
    cuts
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    integrate_with_breaks(f, a, b, &[], cfg)
}

/// Like [`integrate`], with known kinks or jumps of `f` used as initial cuts.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("finite-interval integration needs finite bounds"));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let counted = Counted { f: &f, calls: Cell::new(0) };
    let (value, error) = adapt(&counted, &partition(lo, hi, breaks), cfg.abs_tol, cfg.rel_tol, cfg)?;
    Ok(Integral { value: sign * value, error, evaluations: counted.calls.get() })
}

/// Integrates `f` over `[0, 1]`.
pub fn integrate_unit<F: Fn(f64) -> f64>(f: F, cfg: &QuadratureConfig) -> Result<Integral> {
    integrate_with_breaks(f, 0.0, 1.0, &[], cfg)
}

pub fn integrate_unit_with_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Integral> {
    integrate_with_breaks(f, 0.0, 1.0, breaks, cfg)
}

/// Integrates `f` over `[0, ∞)`.
///
/// The truncation point starts at `cfg.initial_scale` and doubles until
/// `|f(T)|` drops below `tail_cut` times the largest `|f|` seen. `[0, T]` is
/// then integrated adaptively and further segments `[T, 2T]`, `[2T, 4T]`, ...
/// are added until their contribution is negligible.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, cfg: &QuadratureConfig) -> Result<Integral> {
    integrate_semi_infinite_with_breaks(f, &[], cfg)
}

pub fn integrate_semi_infinite_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    const MAX_DOUBLINGS: usize = 200;
    const PROBES: usize = 16;

    cfg.validate()?;
    let counted = Counted { f: &f, calls: Cell::new(0) };

    let last_break = breaks.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
    let mut t = cfg.initial_scale;
    let mut fmax = 0.0f64;
    for k in 1..=PROBES {
        fmax = fmax.max(counted.eval(t * k as f64 / PROBES as f64)?.abs());
    }
    let mut doublings = 0;
    while t <= last_break || counted.eval(t)?.abs() > cfg.tail_cut * fmax {
        for k in 1..=PROBES {
            fmax = fmax.max(counted.eval(t * (1.0 + k as f64 / PROBES as f64))?.abs());
        }
        t *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::domain("integrand does not decay on [0, inf)"));
        }
    }

    let (head, head_err) = adapt(&counted, &partition(0.0, t, breaks), 0.5 * cfg.abs_tol, 0.5 * cfg.rel_tol, cfg)?;
    let threshold = cfg.abs_tol.max(cfg.rel_tol * head.abs()) / 8.0;

    let mut value = head;
    let mut error = head_err;
    let mut lo = t;
    loop {
        let hi = 2.0 * lo;
        let (seg, seg_err) = adapt(&counted, &[lo, hi], threshold, 0.0, cfg)?;
        value += seg;
        error += seg_err;
        if seg.abs() + seg_err <= threshold && counted.eval(hi)?.abs() <= cfg.tail_cut * fmax {
            break;
        }
        lo = hi;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::domain("integrand tail does not vanish"));
        }
    }

    let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
    if error > target {
        return Err(Error::ToleranceNotMet { estimate: value, error, target });
    }
    Ok(Integral { value, error, evaluations: counted.calls.get() })
}
