//! Finite-sample estimators of the extended Gini indices.
//!
//! For a sample `X_1..X_n` and subset size `m`, the position-`i` lower
//! estimator averages `X_{j_i} − min(X_{j_1..j_m})` over all index subsets
//! `j_1 < … < j_m` (taken in original data order) and divides by `m·x̄`; the
//! upper estimator uses `max − X_{j_i}` and the combined (m-th Gini)
//! estimator the subset range.
//!
//! [`estimate_brute_force`] enumerates subsets and is the reference.
//! [`estimate_weighted`] counts, for every observation, how many subsets give
//! it each role, which reduces the kernel mean to three weighted sums:
//!
//! * position: `Σ_j X_j · C(j−1, i−1) C(n−j, m−i)` over original positions,
//! * minimum:  `Σ_k x_(k) · C(n−k, m−1)` over ascending ranks,
//! * maximum:  `Σ_k x_(k) · C(k−1, m−1)`,
//!
//! all divided by `C(n, m)`. The weights are generated as running ratios
//! already normalised by `C(n, m)`, so nothing overflows for large `n`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Observations in their original order. Non-empty, finite, non-negative,
/// with a positive total.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    sum: f64,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        if let Some((k, x)) = values.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidSample(format!(
                "observation {} is {x}; values must be finite and non-negative",
                k + 1
            )));
        }
        let sum: f64 = values.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidSample(format!("sample total must be positive and finite, got {sum}")));
        }
        Ok(Sample { values, sum })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.values.len() as f64
    }

    /// Values in ascending order; ties keep their original relative order.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Lower,
    Upper,
    /// Lower plus upper: the m-th Gini index.
    Combined,
}

impl IndexKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IndexKind::Lower => "lower",
            IndexKind::Upper => "upper",
            IndexKind::Combined => "combined",
        }
    }
}

impl std::fmt::Display for IndexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(IndexKind::Lower),
            "upper" => Ok(IndexKind::Upper),
            "combined" => Ok(IndexKind::Combined),
            other => Err(Error::domain(format!("unknown index kind {other:?}"))),
        }
    }
}

/// Subset size `m`, position `i` (only meaningful for estimators) and kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IndexSpec {
    pub m: usize,
    pub i: usize,
    pub kind: IndexKind,
}

impl IndexSpec {
    pub fn new(m: usize, i: usize, kind: IndexKind) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain(format!("subset size m must be at least 2, got {m}")));
        }
        if i < 1 || i > m {
            return Err(Error::domain(format!("position i must lie in 1..={m}, got {i}")));
        }
        Ok(IndexSpec { m, i, kind })
    }

    pub fn lower(m: usize, i: usize) -> Result<Self> {
        Self::new(m, i, IndexKind::Lower)
    }

    pub fn upper(m: usize, i: usize) -> Result<Self> {
        Self::new(m, i, IndexKind::Upper)
    }

    pub fn combined(m: usize) -> Result<Self> {
        Self::new(m, 1, IndexKind::Combined)
    }

    pub fn with_kind(self, kind: IndexKind) -> Self {
        IndexSpec { kind, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    BruteForce,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub value: f64,
    pub spec: IndexSpec,
    pub n: usize,
    pub algorithm: Algorithm,
}

/// Largest `n` accepted by [`estimate_brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 25;

fn check_size(n: usize, m: usize) -> Result<()> {
    if n < m {
        return Err(Error::InsufficientSample { n, m });
    }
    Ok(())
}

/// `(m−1)! / [(n−1)(n−2)⋯(n−m+1)]`.
fn prefactor(n: usize, m: usize) -> f64 {
    (1..m).map(|t| t as f64 / (n - t) as f64).product()
}

/// Reference estimator: enumerates every index subset.
pub fn estimate_brute_force(data: &Sample, spec: IndexSpec) -> Result<EstimateResult> {
    let n = data.len();
    let m = spec.m;
    check_size(n, m)?;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeGuard { n, limit: BRUTE_FORCE_LIMIT });
    }
    let x = data.values();
    let mut idx: Vec<usize> = (0..m).collect();
    let mut total = 0.0;
    loop {
        let chosen = idx.iter().map(|&j| x[j]);
        let lo = chosen.clone().fold(f64::INFINITY, f64::min);
        let hi = chosen.fold(f64::NEG_INFINITY, f64::max);
        let at = x[idx[spec.i - 1]];
        total += match spec.kind {
            IndexKind::Lower => at - lo,
            IndexKind::Upper => hi - at,
            IndexKind::Combined => hi - lo,
        };

        // next combination in lexicographic order
        let mut k = m;
        while k > 0 && idx[k - 1] == n - m + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for t in k..m {
            idx[t] = idx[t - 1] + 1;
        }
    }
    Ok(EstimateResult { value: prefactor(n, m) * total / data.sum(), spec, n, algorithm: Algorithm::BruteForce })
}

/// `C(k−1, m−1) / C(n, m)` for ranks `k = 1..=n`: the share of subsets whose
/// maximum is the `k`-th smallest value.
pub fn max_weights(n: usize, m: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if m == 0 || m > n {
        return w;
    }
    w[n - 1] = m as f64 / n as f64;
    for k in (m + 1..=n).rev() {
        w[k - 2] = w[k - 1] * (k - m) as f64 / (k - 1) as f64;
    }
    w
}

/// `C(n−k, m−1) / C(n, m)`: the share of subsets whose minimum is the `k`-th
/// smallest value.
pub fn min_weights(n: usize, m: usize) -> Vec<f64> {
    let mut w = max_weights(n, m);
    w.reverse();
    w
}

/// `C(j−1, i−1) C(n−j, m−i) / C(n, m)` for positions `j = 1..=n`: the share of
/// subsets in which observation `j` sits at position `i`.
pub fn position_weights(n: usize, m: usize, i: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if m > n || i < 1 || i > m {
        return w;
    }
    // First non-zero weight, j = i: C(n−i, m−i)/C(n, m) = Π_{t<i} (m−t)/(n−t).
    let mut ln_w: f64 = (0..i).map(|t| ((m - t) as f64 / (n - t) as f64).ln()).sum();
    let last = n - m + i;
    for j in i..=last {
        w[j - 1] = ln_w.exp();
        if j < last {
            // ratio w(j+1)/w(j) = [j/(j−i+1)]·[(n−j−m+i)/(n−j)]
            ln_w += (j as f64 / (j - i + 1) as f64).ln() + ((n + i - j - m) as f64 / (n - j) as f64).ln();
        }
    }
    w
}

/// The three subset-averaged kernel components for one `(m, i)`, measured
/// from the sample minimum (all kernels are translation invariant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMeans {
    pub position: f64,
    pub minimum: f64,
    pub maximum: f64,
    /// `m · x̄`
    pub scale: f64,
}

impl KernelMeans {
    pub fn compute(data: &Sample, m: usize, i: usize) -> Result<Self> {
        let n = data.len();
        check_size(n, m)?;
        if i < 1 || i > m {
            return Err(Error::domain(format!("position i must lie in 1..={m}, got {i}")));
        }
        let sorted = data.sorted_values();
        let base = sorted[0];
        let wmax = max_weights(n, m);
        let wpos = position_weights(n, m, i);

        let mut minimum = 0.0;
        let mut maximum = 0.0;
        for (k, x) in sorted.iter().enumerate() {
            let d = x - base;
            minimum += wmax[n - 1 - k] * d;
            maximum += wmax[k] * d;
        }
        let position = data.values().iter().zip(&wpos).map(|(x, w)| w * (x - base)).sum();
        Ok(KernelMeans { position, minimum, maximum, scale: m as f64 * data.mean() })
    }

    pub fn value(&self, kind: IndexKind) -> f64 {
        let numerator = match kind {
            IndexKind::Lower => self.position - self.minimum,
            IndexKind::Upper => self.maximum - self.position,
            IndexKind::Combined => self.maximum - self.minimum,
        };
        // the true kernel means are ordered; only rounding can push a difference below zero
        numerator.max(0.0) / self.scale
    }
}

/// Closed-form weighted estimator; equal to [`estimate_brute_force`] up to
/// rounding, in `O(n log n)`.
pub fn estimate_weighted(data: &Sample, spec: IndexSpec) -> Result<EstimateResult> {
    let means = KernelMeans::compute(data, spec.m, spec.i)?;
    Ok(EstimateResult { value: means.value(spec.kind), spec, n: data.len(), algorithm: Algorithm::Weighted })
}

pub fn estimate(data: &Sample, spec: IndexSpec, algorithm: Algorithm) -> Result<EstimateResult> {
    match algorithm {
        Algorithm::BruteForce => estimate_brute_force(data, spec),
        Algorithm::Weighted => estimate_weighted(data, spec),
    }
}

/// The m-th Gini estimator (subset range kernel); independent of position.
pub fn estimate_mth_gini(data: &Sample, m: usize) -> Result<EstimateResult> {
    estimate_weighted(data, IndexSpec::combined(m)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatmapCell {
    pub m: usize,
    pub i: usize,
    pub value: f64,
}

/// Estimates over every `(m, i)` with `2 <= m <= m_max`, `1 <= i <= m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapGrid {
    pub kind: IndexKind,
    pub m_max: usize,
    pub cells: Vec<HeatmapCell>,
}

impl HeatmapGrid {
    pub fn get(&self, m: usize, i: usize) -> Option<f64> {
        self.cells.iter().find(|c| c.m == m && c.i == i).map(|c| c.value)
    }

    pub fn row(&self, m: usize) -> Vec<f64> {
        self.cells.iter().filter(|c| c.m == m).map(|c| c.value).collect()
    }
}

pub fn heatmap(data: &Sample, kind: IndexKind, m_max: usize) -> Result<HeatmapGrid> {
    if m_max < 2 {
        return Err(Error::domain(format!("heatmap needs m_max >= 2, got {m_max}")));
    }
    check_size(data.len(), m_max)?;
    let mut cells = Vec::with_capacity(m_max * (m_max + 1) / 2);
    for m in 2..=m_max {
        for i in 1..=m {
            let value = KernelMeans::compute(data, m, i)?.value(kind);
            cells.push(HeatmapCell { m, i, value });
        }
    }
    Ok(HeatmapGrid { kind, m_max, cells })
}
