//! Sign of the Crofton density of a generating function, and the L_α family of
//! bodies of revolution with h_α = 1 + α P_2^n.

use crate::bodies::is_support_function_zonal;
use crate::error::{Error, Result};
use crate::harmonic::ZonalFunction;
use crate::jacobi::gauss_jacobi;
use crate::minkval::lalpha_pre_cosine;
use statrs::function::beta::beta;

/// Outcome of the sign scan of I(τ) = ∫_0^1 ḡ(τt)(1-t²)^{(n-i-3)/2} dt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityResult {
    pub nonneg: bool,
    pub min: f64,
    pub argmin: f64,
}

pub const POSITIVITY_TOL: f64 = 1e-10;

/// I(τ) on the even part of ḡ; for i = n-1 the slice sphere is two points and I(τ) = (ḡ(τ)+ḡ(-τ))/2.
pub fn slice_integral(g: &ZonalFunction<f64>, n: usize, i: usize, tau: f64) -> f64 {
    let even = g.even_part();
    if i == n - 1 {
        return even.eval(tau);
    }
    let a = (n as f64 - i as f64 - 3.0) / 2.0;
    let rule = gauss_jacobi(even.degree() / 2 + 2, a, a);
    0.5 * rule.integrate(|t| even.eval(tau * t))
}

pub fn positivity_check(g: &ZonalFunction<f64>, n: usize, i: usize, grid_size: usize) -> Result<PositivityResult> {
    if i == 0 || i >= n || g.n != n {
        return Err(Error::DegreeOutOfRange { n, i });
    }
    let m = grid_size.max(2);
    let (min, argmin) = (0..=m)
        .map(|j| {
            let tau = j as f64 / m as f64;
            (slice_integral(g, n, i, tau), tau)
        })
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    Ok(PositivityResult { nonneg: min >= -POSITIVITY_TOL, min, argmin })
}

/// I(τ) for the profile 1 + (n+1) α P_2^n via Beta integrals.
pub fn beta_closed_form(alpha: f64, tau: f64, n: usize, i: usize) -> Result<f64> {
    if i == 0 || i + 2 > n {
        return Err(Error::DegreeOutOfRange { n, i });
    }
    let b = (n - i - 1) as f64 / 2.0;
    let j0 = beta(0.5, b) / 2.0;
    let j2 = beta(1.5, b) / 2.0;
    let nf = n as f64;
    Ok(j0 + (nf + 1.0) * alpha / (nf - 1.0) * (nf * tau * tau * j2 - j0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LAlphaClassification {
    pub alpha: f64,
    pub n: usize,
    pub i: usize,
    pub is_support: bool,
    pub is_zonoid: bool,
    pub crofton_nonneg: bool,
}

/// Closed-form intervals.
pub fn support_interval(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (-(nf - 1.0) / (2.0 * nf - 1.0), (nf - 1.0) / (nf + 1.0))
}

pub fn zonoid_lower(n: usize) -> f64 {
    -1.0 / (n as f64 + 1.0)
}

pub fn crofton_interval(n: usize, i: usize) -> (f64, f64) {
    let (nf, fi) = (n as f64, i as f64);
    let s = (nf - 1.0) / (nf + 1.0);
    (-(nf - fi) / fi * s, s)
}

pub fn lalpha_classify(alpha: f64, n: usize, i: usize) -> LAlphaClassification {
    let (s0, s1) = support_interval(n);
    let (c0, c1) = crofton_interval(n, i);
    let is_support = (s0..=s1).contains(&alpha);
    LAlphaClassification {
        alpha,
        n,
        i,
        is_support,
        is_zonoid: is_support && alpha >= zonoid_lower(n),
        crofton_nonneg: (c0..=c1).contains(&alpha),
    }
}

pub fn lalpha_profile(alpha: f64, n: usize) -> ZonalFunction<f64> {
    ZonalFunction::new(n, vec![1.0, 0.0, alpha])
}

/// The three properties decided numerically: LP re-support, sign of the cosine preimage,
/// and the slice-integral scan.
pub fn lalpha_numeric(alpha: f64, n: usize, i: usize) -> LAlphaClassification {
    lalpha_numeric_all(alpha, n)[i - 1]
}

/// `lalpha_numeric` for i = 1, …, n-1 sharing one support test.
pub fn lalpha_numeric_all(alpha: f64, n: usize) -> Vec<LAlphaClassification> {
    let is_support = is_support_function_zonal(&lalpha_profile(alpha, n)).valid;
    let g = lalpha_pre_cosine(alpha, n);
    let is_zonoid = is_support && g.min_on_grid(4096).0 >= -POSITIVITY_TOL;
    (1..n)
        .map(|i| {
            let crofton_nonneg = positivity_check(&g, n, i, 1000).map(|r| r.nonneg).unwrap_or(false);
            LAlphaClassification { alpha, n, i, is_support, is_zonoid, crofton_nonneg }
        })
        .collect()
}

/// Continuous margins whose sign decides each property; their roots are the interval endpoints.
pub fn support_margin(alpha: f64, n: usize) -> f64 {
    let h = lalpha_profile(alpha, n);
    (0..=2048)
        .map(|j| crate::bodies::meridian_curvature(&h, (std::f64::consts::PI * j as f64 / 2048.0).cos()))
        .fold(f64::INFINITY, f64::min)
}

pub fn zonoid_margin(alpha: f64, n: usize) -> f64 {
    lalpha_pre_cosine(alpha, n).min_on_grid(2048).0
}

/// min_τ I(τ); the profile is quadratic in τ so the minimum sits at τ ∈ {0, 1}.
pub fn crofton_margin(alpha: f64, n: usize, i: usize) -> f64 {
    let g = lalpha_pre_cosine(alpha, n);
    slice_integral(&g, n, i, 0.0).min(slice_integral(&g, n, i, 1.0))
}

/// Root of a margin between a nonnegative and a negative point.
fn bisect(f: impl Fn(f64) -> f64, mut good: f64, mut bad: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if f(mid) >= 0.0 {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

#[derive(Debug, Clone, PartialEq)]
pub struct LAlphaScan {
    pub n: usize,
    pub i: usize,
    pub rows: Vec<(LAlphaClassification, f64)>,
    pub support: (f64, f64),
    pub zonoid_lower: f64,
    pub crofton: (f64, f64),
    /// [support lower ∨ crofton lower, zonoid lower): generalized zonoid, not a zonoid, nonneg Crofton.
    pub window: Option<(f64, f64)>,
}

/// Scan α ∈ [-1, 1] with the given step, then refine every sign change by bisection.
pub fn lalpha_scan(n: usize, i: usize, step: f64) -> Result<LAlphaScan> {
    if i == 0 || i >= n {
        return Err(Error::DegreeOutOfRange { n, i });
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Domain(format!("scan step {step}")));
    }
    let count = (2.0 / step).round() as usize;
    let alphas: Vec<f64> = (0..=count).map(|j| -1.0 + 2.0 * j as f64 / count as f64).collect();
    let rows: Vec<(LAlphaClassification, f64)> = alphas
        .iter()
        .map(|&a| {
            let m = crofton_margin(a, n, i);
            let s = support_margin(a, n) >= 0.0;
            let z = zonoid_margin(a, n) >= -POSITIVITY_TOL;
            (LAlphaClassification { alpha: a, n, i, is_support: s, is_zonoid: s && z, crofton_nonneg: m >= -POSITIVITY_TOL }, m)
        })
        .collect();
    let edges = |f: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let inside: Vec<usize> = (0..alphas.len()).filter(|&j| f(alphas[j]) >= 0.0).collect();
        let (lo, hi) = (inside[0], *inside.last().expect("α = 0 is inside every interval"));
        let left = if lo == 0 { alphas[0] } else { bisect(f, alphas[lo], alphas[lo - 1]) };
        let right = if hi + 1 == alphas.len() { alphas[hi] } else { bisect(f, alphas[hi], alphas[hi + 1]) };
        (left, right)
    };
    let support = edges(&|a| support_margin(a, n));
    let crofton = edges(&|a| crofton_margin(a, n, i));
    let zl = edges(&|a| zonoid_margin(a, n)).0;
    let lower = support.0.max(crofton.0);
    let window = if lower < zl { Some((lower, zl)) } else { None };
    Ok(LAlphaScan { n, i, rows, support, zonoid_lower: zl, crofton, window })
}
