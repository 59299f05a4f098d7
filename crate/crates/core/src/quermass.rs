//! Quermassintegrals by Kubota averaging of projection functions, and their affine analogues.

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::sphquad::{grassmann_sample, grassmann_sample_stratified, unit_ball_volume, Estimate, GrassmannFrame};

/// Monte Carlo parameters for Grassmannian averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McParams {
    pub samples: usize,
    pub seed: u64,
    /// Stratify on the orbit parameter, two frames per stratum.
    pub stratified: bool,
}

impl Default for McParams {
    fn default() -> Self {
        Self { samples: 200_000, seed: 0, stratified: true }
    }
}

/// W_{n-i}(K) or A_{n-i}(K) with its Monte Carlo error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuermassResult {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub i: usize,
    pub effective_samples: f64,
}

impl QuermassResult {
    fn exact(value: f64, i: usize) -> Self {
        Self { value, std_error: 0.0, samples: 0, i, effective_samples: f64::INFINITY }
    }
}

/// Both Kubota means of one frame sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuermassPair {
    pub w: QuermassResult,
    pub a: QuermassResult,
}

const PER_STRATUM: usize = 2;

fn frames(n: usize, i: usize, mc: &McParams) -> Result<(Vec<GrassmannFrame>, Option<usize>)> {
    if mc.samples < 2 {
        return Err(Error::Domain("at least two samples are required".into()));
    }
    if mc.stratified {
        let s = grassmann_sample_stratified(n, i, mc.samples / PER_STRATUM, PER_STRATUM, mc.seed)?;
        Ok((s.frames, Some(PER_STRATUM)))
    } else {
        Ok((grassmann_sample(n, i, mc.samples, mc.seed)?, None))
    }
}

fn estimate(values: &[f64], per_stratum: Option<usize>) -> Estimate {
    match per_stratum {
        Some(p) => Estimate::stratified(values, p),
        None => Estimate::plain(values),
    }
}

/// Projection volumes V_i(K|E) over the sampled frames.
pub fn projection_sample(k: &ConvexBody, i: usize, mc: &McParams) -> Result<(Vec<f64>, Option<usize>)> {
    let (fr, per) = frames(k.dim(), i, mc)?;
    let values = fr.iter().map(|f| k.projection_function(f)).collect::<Result<Vec<_>>>()?;
    Ok((values, per))
}

/// W_{n-i}(K) and A_{n-i}(K) from a single sample of frames.
pub fn quermass_pair(k: &ConvexBody, i: usize, mc: &McParams) -> Result<QuermassPair> {
    let n = k.dim();
    if i > n {
        return Err(Error::DegreeOutOfRange { n, i });
    }
    if i == 0 {
        let v = QuermassResult::exact(unit_ball_volume(n), 0);
        return Ok(QuermassPair { w: v, a: v });
    }
    if i == n {
        let v = QuermassResult::exact(k.volume()?, n);
        return Ok(QuermassPair { w: v, a: v });
    }
    if let ConvexBody::Ball { radius, .. } = k {
        let v = QuermassResult::exact(unit_ball_volume(n) * radius.powi(i as i32), i);
        return Ok(QuermassPair { w: v, a: v });
    }
    let (values, per) = projection_sample(k, i, mc)?;
    let c = unit_ball_volume(n) / unit_ball_volume(i);
    let e = estimate(&values, per);
    let w = QuermassResult {
        value: c * e.mean,
        std_error: c * e.std_error,
        samples: e.samples,
        i,
        effective_samples: e.effective_samples,
    };
    if let Some(&z) = values.iter().find(|&&v| v <= 0.0) {
        return Err(Error::Degenerate(format!("projection volume {z} on a sampled frame")));
    }
    let neg: Vec<f64> = values.iter().map(|v| v.powi(-(n as i32))).collect();
    let m = estimate(&neg, per);
    let value = c * m.mean.powf(-1.0 / n as f64);
    // Delta method for x ↦ x^{-1/n}.
    let a = QuermassResult {
        value,
        std_error: value * m.std_error / (n as f64 * m.mean),
        samples: m.samples,
        i,
        effective_samples: m.effective_samples,
    };
    Ok(QuermassPair { w, a })
}

/// W_{n-i}(K) = (κ_n/κ_i) ∫ V_i(K|E) dE.
pub fn quermassintegral(k: &ConvexBody, i: usize, mc: &McParams) -> Result<QuermassResult> {
    let n = k.dim();
    if i == 0 || i == n || matches!(k, ConvexBody::Ball { .. }) {
        return Ok(quermass_pair(k, i, mc)?.w);
    }
    if i > n {
        return Err(Error::DegreeOutOfRange { n, i });
    }
    let (values, per) = projection_sample(k, i, mc)?;
    let c = unit_ball_volume(n) / unit_ball_volume(i);
    let e = estimate(&values, per);
    Ok(QuermassResult {
        value: c * e.mean,
        std_error: c * e.std_error,
        samples: e.samples,
        i,
        effective_samples: e.effective_samples,
    })
}

/// A_{n-i}(K) = (κ_n/κ_i) (∫ V_i(K|E)^{-n} dE)^{-1/n}.
pub fn affine_quermassintegral(k: &ConvexBody, i: usize, mc: &McParams) -> Result<QuermassResult> {
    Ok(quermass_pair(k, i, mc)?.a)
}

/// W_{n-i}(K)^n / (κ_n^{n-i} V_n(K)^i), with its standard error.
pub fn isoperimetric_ratio(k: &ConvexBody, i: usize, mc: &McParams) -> Result<(f64, f64)> {
    let n = k.dim();
    let w = quermassintegral(k, i, mc)?;
    let v = k.volume()?;
    if v <= 0.0 {
        return Ok((f64::INFINITY, 0.0));
    }
    let denom = unit_ball_volume(n).powi((n - i) as i32) * v.powi(i as i32);
    let r = w.value.powi(n as i32) / denom;
    Ok((r, r * n as f64 * w.std_error / w.value))
}

/// κ_n^{-i} W_{n-j}(K)^i / (κ_n^{-j} W_{n-i}(K)^j) for 0 < j < i ≤ n.
pub fn two_quermass_ratio(k: &ConvexBody, i: usize, j: usize, mc: &McParams) -> Result<(f64, f64)> {
    let n = k.dim();
    if !(0 < j && j < i && i <= n) {
        return Err(Error::Domain(format!("need 0 < j < i <= n, got i = {i}, j = {j}")));
    }
    let kn = unit_ball_volume(n);
    let wj = quermassintegral(k, j, mc)?;
    let wi = quermassintegral(k, i, mc)?;
    let r = (wj.value / kn).powi(i as i32) / (wi.value / kn).powi(j as i32);
    let rel = ((i as f64 * wj.std_error / wj.value).powi(2) + (j as f64 * wi.std_error / wi.value).powi(2)).sqrt();
    Ok((r, r * rel))
}

/// (diam K, S(K)^{n-1} / V_n(K)^{n-2}); the surface area comes from Kubota with i = n-1.
pub fn gritzmann_diagnostic(k: &ConvexBody, mc: &McParams) -> Result<(f64, f64)> {
    let n = k.dim();
    let s = n as f64 * quermassintegral(k, n - 1, mc)?.value;
    let v = k.volume()?;
    Ok((k.diameter(), s.powi(n as i32 - 1) / v.powi(n as i32 - 2)))
}
