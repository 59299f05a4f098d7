//! Isoperimetric chains, volume products, and derivative-free search over bodies of revolution.

use crate::bodies::{
    distance_to_ball_zonal, is_support_function_zonal, meridian_curvature, meridian_volume, polar_volume,
    polar_volume_zonal, volume_from_field, ConvexBody, RevolutionBody, SupportField,
};
use crate::error::{Error, Result};
use crate::harmonic::{expand_zonal, inverse_box, ZonalFunction, ZonalMeasure};
use crate::minkval::{
    apply, apply_zonal, classify_degree1, degree1_image, ApplyParams, Degree1Class, Degree1Report, NormalizedSpec,
    ValuationSpec,
};
use crate::quermass::{quermass_pair, McParams, QuermassPair};
use crate::sphquad::{sphere_grid, substream, unit_ball_volume, GridKind, SphereGrid};
use rand::Rng;
use std::sync::Arc;

/// Relative tolerance of equality detection (combined with 3σ).
pub const EQUALITY_REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ordered,
    Violated,
    Skipped,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Ordered => "ordered",
            Verdict::Violated => "violated",
            Verdict::Skipped => "skipped",
        }
    }
}

/// a ≥ b unless the gap exceeds three combined standard errors.
/// Relative distance of ΦK to a ball below which the left inequality is an equality case.
pub const IMAGE_BALL_TOL: f64 = 1e-3;

/// Rounding floor below which a gap is not a violation.
const ROUNDING_REL_TOL: f64 = 1e-10;

fn order(a: f64, sa: f64, b: f64, sb: f64) -> Verdict {
    if a - b >= -3.0 * (sa * sa + sb * sb).sqrt() - ROUNDING_REL_TOL * a.abs().max(b.abs()) {
        Verdict::Ordered
    } else {
        Verdict::Violated
    }
}

fn equal(a: f64, sa: f64, b: f64, sb: f64) -> bool {
    (a - b).abs() <= EQUALITY_REL_TOL * a.abs().max(b.abs()) + 3.0 * (sa * sa + sb * sb).sqrt()
}

/// Numerical settings of chain computations.
#[derive(Debug, Clone)]
pub struct ChainParams {
    pub mc: McParams,
    pub apply: ApplyParams,
    /// Product-rule grid pair; the spread of the two results is the quadrature error.
    pub coarse: Arc<SphereGrid>,
    pub fine: Arc<SphereGrid>,
}

impl ChainParams {
    pub fn new(n: usize, coarse: usize, fine: usize, mc: McParams, apply: ApplyParams) -> Result<Self> {
        Ok(Self {
            mc,
            apply,
            coarse: Arc::new(sphere_grid(n, coarse, GridKind::ProductRule, 0)?),
            fine: Arc::new(sphere_grid(n, fine, GridKind::ProductRule, 0)?),
        })
    }

    /// Defaults used by the command-line front end: 32/64 grids for n = 3, lighter grids above.
    pub fn default_for(n: usize, mc: McParams) -> Result<Self> {
        let (c, f) = match n {
            3 => (32, 64),
            4 => (10, 16),
            _ => (8, 10),
        };
        Self::new(n, c, f, mc, ApplyParams::default())
    }
}

/// Q1 = W_{n-i}(K)^n ≥ Q2 = κ_n^{n+1}/κ_{n-1}^n · V_n(Φ°K)^{-1} ≥ Q3 = A_{n-i}(K)^n.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub n: usize,
    pub i: usize,
    pub q: [f64; 3],
    pub std_error: [f64; 3],
    pub left: Verdict,
    pub right: Verdict,
    pub left_equal: bool,
    pub right_equal: bool,
    pub notice: Option<String>,
}

impl ChainReport {
    pub fn violated(&self) -> bool {
        self.left == Verdict::Violated || self.right == Verdict::Violated
    }
}

/// V_n(Φ°K) on both grids: (fine value, |fine - coarse|).
pub fn polar_image_volume(spec: &ValuationSpec, k: &ConvexBody, params: &ChainParams) -> Result<(f64, f64)> {
    let f = apply(spec, k, &params.fine, &params.apply)?;
    let c = apply(spec, k, &params.coarse, &params.apply)?;
    let vf = polar_volume(&f)?;
    let vc = polar_volume(&c)?;
    Ok((vf, (vf - vc).abs()))
}

/// Q2 and its error for a spec normalized to Φ B^n = κ_{n-1} B^n.
pub fn chain_middle(spec: &NormalizedSpec, k: &ConvexBody, params: &ChainParams) -> Result<(f64, f64)> {
    let n = k.dim();
    let target = unit_ball_volume(n - 1);
    let s = if (spec.radius - target).abs() > 1e-12 * target { spec.rescaled(target) } else { spec.clone() };
    let (v, dv) = polar_image_volume(&s.spec, k, params)?;
    Ok(middle_from_volume(n, v, dv))
}

fn middle_from_volume(n: usize, v: f64, dv: f64) -> (f64, f64) {
    let target = unit_ball_volume(n - 1);
    let c = unit_ball_volume(n).powi(n as i32 + 1) / target.powi(n as i32);
    (c / v, c * dv / (v * v))
}

/// Assembles a report from precomputed Kubota means (so one sample serves many specs).
pub fn chain_from_parts(n: usize, i: usize, pair: &QuermassPair, middle: (f64, f64), nonneg: bool) -> ChainReport {
    let nf = n as f64;
    let q1 = pair.w.value.powi(n as i32);
    let s1 = q1 * nf * pair.w.std_error / pair.w.value;
    let q3 = pair.a.value.powi(n as i32);
    let s3 = q3 * nf * pair.a.std_error / pair.a.value;
    let (q2, s2) = middle;
    let left = order(q1, s1, q2, s2);
    let (right, notice) = if nonneg {
        (order(q2, s2, q3, s3), None)
    } else {
        (Verdict::Skipped, Some("Crofton measure not flagged nonnegative: right inequality skipped".to_string()))
    };
    ChainReport {
        n,
        i,
        q: [q1, q2, q3],
        std_error: [s1, s2, s3],
        left,
        right,
        left_equal: equal(q1, s1, q2, s2),
        right_equal: nonneg && equal(q2, s2, q3, s3),
        notice,
    }
}

pub fn chain_report(k: &ConvexBody, spec: &NormalizedSpec, params: &ChainParams) -> Result<ChainReport> {
    let (n, i) = (spec.spec.n, spec.spec.i);
    if k.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: k.dim() });
    }
    let pair = kubota_for_degree(k, i, &params.mc)?;
    let middle = chain_middle(spec, k, params)?;
    Ok(chain_from_parts(n, i, &pair, middle, spec.spec.is_nonneg_crofton()))
}

/// W_{n-i} and A_{n-i}: Kubota means over i-dimensional projections.
pub fn kubota_for_degree(k: &ConvexBody, i: usize, mc: &McParams) -> Result<QuermassPair> {
    quermass_pair(k, i, mc)
}

/// Q(K) = V_n(Φ°K) W_{n-i}(K)^n against Q(B^n), the ball-calibrated left inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftReport {
    pub q: f64,
    pub q_ball: f64,
    pub std_error: f64,
    pub verdict: Verdict,
    /// ΦK is a ball within `IMAGE_BALL_TOL` and Q(K) is consistent with Q(B^n).
    pub equality: bool,
    /// Distance of ΦK to the nearest ball.
    pub image_distance: f64,
}

pub fn ball_calibrated_left(k: &ConvexBody, spec: &NormalizedSpec, params: &ChainParams) -> Result<LeftReport> {
    let (n, i) = (spec.spec.n, spec.spec.i);
    let ball_image = spec.radius;
    if ball_image <= 0.0 {
        return Err(Error::OriginNotInterior(ball_image));
    }
    let w = kubota_for_degree(k, i, &params.mc)?.w;
    left_from_parts(k, spec, params, w.value, w.std_error, n)
}

/// `ball_calibrated_left` with W_{n-i}(K) supplied.
pub fn left_from_parts(
    k: &ConvexBody,
    spec: &NormalizedSpec,
    params: &ChainParams,
    w: f64,
    w_err: f64,
    n: usize,
) -> Result<LeftReport> {
    let f = apply(&spec.spec, k, &params.fine, &params.apply)?;
    let c = apply(&spec.spec, k, &params.coarse, &params.apply)?;
    let (vf, vc) = (polar_volume(&f)?, polar_volume(&c)?);
    Ok(left_from_volumes(spec, &f, vf, vc, w, w_err, n))
}

fn left_from_volumes(spec: &NormalizedSpec, f: &SupportField, vf: f64, vc: f64, w: f64, w_err: f64, n: usize) -> LeftReport {
    let kn = unit_ball_volume(n);
    let q = vf * w.powi(n as i32);
    let se = q * ((vf - vc).abs() / vf + n as f64 * w_err / w);
    let q_ball = kn * spec.radius.powi(-(n as i32)) * kn.powi(n as i32);
    let image_distance = f.distance_to_ball();
    LeftReport {
        q,
        q_ball,
        std_error: se,
        verdict: order(q, se, q_ball, 0.0),
        equality: image_distance < IMAGE_BALL_TOL && equal(q, se, q_ball, 0.0),
        image_distance,
    }
}

/// Chain report and ball-calibrated left report from one evaluation of ΦK per grid.
pub fn chain_and_left(
    k: &ConvexBody,
    spec: &NormalizedSpec,
    params: &ChainParams,
    pair: &QuermassPair,
) -> Result<(ChainReport, LeftReport)> {
    let (n, i) = (spec.spec.n, spec.spec.i);
    if k.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: k.dim() });
    }
    let f = apply(&spec.spec, k, &params.fine, &params.apply)?;
    let c = apply(&spec.spec, k, &params.coarse, &params.apply)?;
    let (vf, vc) = (polar_volume(&f)?, polar_volume(&c)?);
    // V_n(Φ°K) scales as s^{-n} when Φ is scaled by s.
    let target = unit_ball_volume(n - 1);
    let scale = (spec.radius / target).powi(n as i32);
    let middle = middle_from_volume(n, vf * scale, (vf - vc).abs() * scale);
    let chain = chain_from_parts(n, i, pair, middle, spec.spec.is_nonneg_crofton());
    Ok((chain, left_from_volumes(spec, &f, vf, vc, pair.w.value, pair.w.std_error, n)))
}

/// V_n(K°) W_{n-1}(K)^n ≥ κ_n^{n+1} for K with the origin inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LutwakReport {
    pub value: f64,
    pub bound: f64,
    pub std_error: f64,
    pub verdict: Verdict,
    pub equality: bool,
}

pub fn lutwak_polar_width(k: &ConvexBody, params: &ChainParams) -> Result<LutwakReport> {
    let n = k.dim();
    let (pv, pv_err) = match k {
        ConvexBody::Ball { center, radius } if center.norm() == 0.0 => {
            (unit_ball_volume(n) / radius.powi(n as i32), 0.0)
        }
        ConvexBody::Ellipsoid { matrix, center } if center.norm() == 0.0 => {
            (unit_ball_volume(n) / matrix.determinant().abs(), 0.0)
        }
        ConvexBody::Revolution(r) => {
            let a = polar_volume_zonal(&r.profile, 512)?;
            let b = polar_volume_zonal(&r.profile, 256)?;
            (a, (a - b).abs())
        }
        _ => {
            let a = polar_volume(&k.support_field(&params.fine))?;
            let b = polar_volume(&k.support_field(&params.coarse))?;
            (a, (a - b).abs())
        }
    };
    let w = kubota_for_degree(k, 1, &params.mc)?.w;
    let value = pv * w.value.powi(n as i32);
    let se = value * (pv_err / pv + n as f64 * w.std_error / w.value);
    let bound = unit_ball_volume(n).powi(n as i32 + 1);
    Ok(LutwakReport { value, bound, std_error: se, verdict: order(value, se, bound, 0.0), equality: equal(value, se, bound, 0.0) })
}

/// Polar: V_n(Φ°K) V_n(K)^i. Non-polar: V_n(ΦK) / V_n(K)^i. Returns (value, error).
pub fn volume_product(spec: &ValuationSpec, k: &ConvexBody, polar: bool, params: &ChainParams) -> Result<(f64, f64)> {
    let i = spec.i as i32;
    if let ConvexBody::Revolution(r) = k {
        if let Ok(v) = revolution_objective(spec, r, if polar { Objective::MaxPolarProduct } else { Objective::MinNonpolarRatio }) {
            return Ok(v);
        }
    }
    let vk = k.volume()?;
    if vk <= 0.0 {
        return Err(Error::Degenerate("zero volume".into()));
    }
    let f = apply(spec, k, &params.fine, &params.apply)?;
    let c = apply(spec, k, &params.coarse, &params.apply)?;
    let (a, b) = if polar {
        (polar_volume(&f)?, polar_volume(&c)?)
    } else {
        (volume_from_field(&f)?, volume_from_field(&c)?)
    };
    let scale = if polar { vk.powi(i) } else { vk.powi(-i) };
    Ok((a * scale, (a - b).abs() * scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MaxPolarProduct,
    MinNonpolarRatio,
}

impl Objective {
    fn maximize(&self) -> bool {
        matches!(self, Objective::MaxPolarProduct)
    }
}

fn objective_at(spec: &ValuationSpec, body: &RevolutionBody, objective: Objective, fine: bool) -> Result<f64> {
    let i = spec.i as i32;
    let image = apply_zonal(spec, body, &ApplyParams::default())?;
    let (panels, dirs) = if fine { (512, 1024) } else { (256, 512) };
    let vk = meridian_volume(&body.profile, dirs)?;
    match objective {
        Objective::MaxPolarProduct => Ok(polar_volume_zonal(&image, panels)? * vk.powi(i)),
        Objective::MinNonpolarRatio => Ok(meridian_volume(&image, dirs)? / vk.powi(i)),
    }
}

/// Objective of a body of revolution with a quadrature error estimate.
pub fn revolution_objective(spec: &ValuationSpec, body: &RevolutionBody, objective: Objective) -> Result<(f64, f64)> {
    let a = objective_at(spec, body, objective, true)?;
    let b = objective_at(spec, body, objective, false)?;
    Ok((a, (a - b).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub objective: Objective,
    /// Highest Legendre degree of the profile.
    pub degree: usize,
    pub multistarts: usize,
    /// Objective evaluations over all multistarts.
    pub budget: usize,
    pub seed: u64,
    /// Spread of the random starting coefficients.
    pub init_scale: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { objective: Objective::MaxPolarProduct, degree: 24, multistarts: 4, budget: 20_000, seed: 0, init_scale: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub evaluation: usize,
    pub start: usize,
    pub coeffs: Vec<f64>,
    pub objective: f64,
    pub projections: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerTrace {
    /// Best-so-far improvements in evaluation order.
    pub history: Vec<TraceEntry>,
    pub best: RevolutionBody,
    pub best_objective: f64,
    pub best_error: f64,
    pub ball_objective: f64,
    pub ball_error: f64,
    pub best_distance_to_ball: f64,
    pub evaluations: usize,
    pub projections: usize,
    pub budget_exhausted: bool,
    pub seed: u64,
    pub maximize: bool,
}

fn profile_from(n: usize, x: &[f64]) -> ZonalFunction<f64> {
    let mut c = vec![1.0, 0.0];
    c.extend_from_slice(x);
    ZonalFunction::new(n, c)
}

/// Shrinks the profile toward the ball until it is a support function; returns (λ, projected x).
pub fn project_to_valid(n: usize, x: &[f64]) -> (f64, Vec<f64>) {
    let h = profile_from(n, x);
    const M: usize = 2048;
    // ρ(1 + λ q) = 1 + λ ρ_q, so the largest admissible λ is explicit.
    let mut lam: f64 = 1.0;
    for j in 0..=M {
        let t = (std::f64::consts::PI * j as f64 / M as f64).cos();
        let rho = meridian_curvature(&h, t);
        if rho < 0.0 {
            lam = lam.min(1.0 / (1.0 - rho));
        }
    }
    let scaled = |l: f64| x.iter().map(|v| v * l).collect::<Vec<_>>();
    if is_support_function_zonal(&profile_from(n, &scaled(lam))).valid {
        return (lam, scaled(lam));
    }
    let (mut lo, mut hi) = (0.0, lam);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if is_support_function_zonal(&profile_from(n, &scaled(mid))).valid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, scaled(lo))
}

struct Search<'a> {
    spec: &'a ValuationSpec,
    cfg: &'a OptimizerConfig,
    n: usize,
    evaluations: usize,
    projections: usize,
}

impl Search<'_> {
    /// Sign-adjusted loss (minimized) at the projected point.
    fn eval(&mut self, x: &mut Vec<f64>) -> f64 {
        let (lam, y) = project_to_valid(self.n, x);
        if lam < 1.0 {
            self.projections += 1;
        }
        *x = y;
        self.evaluations += 1;
        let body = RevolutionBody::new_unchecked(profile_from(self.n, x));
        match objective_at(self.spec, &body, self.cfg.objective, true) {
            Ok(v) if v.is_finite() => {
                if self.cfg.objective.maximize() {
                    -v
                } else {
                    v
                }
            }
            _ => f64::INFINITY,
        }
    }
}

/// Adaptive Nelder–Mead on one start until `budget` evaluations, restarting when the simplex collapses.
fn nelder_mead(
    search: &mut Search,
    start: Vec<f64>,
    budget: usize,
    rng: &mut impl Rng,
    mut record: impl FnMut(&[f64], f64, usize, usize),
) {
    let d = start.len();
    let df = d as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / df, 0.75 - 1.0 / (2.0 * df), 1.0 - 1.0 / df);
    let stop = search.evaluations + budget;
    let mut scale = search.cfg.init_scale.max(1e-3);
    let mut centre = start;
    'restart: while search.evaluations < stop {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        let mut x0 = centre.clone();
        let f0 = search.eval(&mut x0);
        record(&x0, f0, search.evaluations, search.projections);
        simplex.push((x0, f0));
        for j in 0..d {
            let mut x = centre.clone();
            x[j] += scale * (0.5 + rng.random::<f64>()) / (j + 2) as f64;
            let f = search.eval(&mut x);
            record(&x, f, search.evaluations, search.projections);
            simplex.push((x, f));
            if search.evaluations >= stop {
                return;
            }
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let size = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            let spread = (simplex[d].1 - simplex[0].1).abs();
            if size < 1e-7 || spread < 1e-12 * simplex[0].1.abs().max(1e-300) {
                centre = simplex[0].0.clone();
                scale *= 0.5;
                if scale < 1e-4 {
                    scale = search.cfg.init_scale;
                    for v in centre.iter_mut() {
                        *v += 0.1 * scale * (rng.random::<f64>() - 0.5);
                    }
                }
                continue 'restart;
            }
            if search.evaluations >= stop {
                return;
            }
            let mut cen = vec![0.0; d];
            for (x, _) in &simplex[..d] {
                for (c, v) in cen.iter_mut().zip(x) {
                    *c += v / df;
                }
            }
            let worst = simplex[d].clone();
            let along = |t: f64| cen.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect::<Vec<_>>();
            let mut xr = along(alpha);
            let fr = search.eval(&mut xr);
            record(&xr, fr, search.evaluations, search.projections);
            if fr < simplex[0].1 {
                let mut xe = along(beta);
                let fe = search.eval(&mut xe);
                record(&xe, fe, search.evaluations, search.projections);
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
            } else {
                let (mut xc, outside) = if fr < worst.1 { (along(gamma), true) } else { (along(-gamma), false) };
                let fc = search.eval(&mut xc);
                record(&xc, fc, search.evaluations, search.projections);
                if (outside && fc <= fr) || (!outside && fc < worst.1) {
                    simplex[d] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for item in simplex.iter_mut().skip(1) {
                        let mut x: Vec<f64> = best.iter().zip(&item.0).map(|(b, v)| b + delta * (v - b)).collect();
                        let f = search.eval(&mut x);
                        record(&x, f, search.evaluations, search.projections);
                        *item = (x, f);
                        if search.evaluations >= stop {
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// Derivative-free search over h̄ = 1 + Σ_{k≥2} c_k P_k^n with validity projection.
/// (best objective, start, history, best coefficients, evaluations, projections) of one start.
type StartRun = (f64, usize, Vec<TraceEntry>, Vec<f64>, usize, usize);

pub fn optimize_revolution(spec: &ValuationSpec, cfg: &OptimizerConfig) -> Result<OptimizerTrace> {
    let n = spec.n;
    if cfg.degree < 2 || cfg.multistarts == 0 || cfg.budget == 0 {
        return Err(Error::Domain("optimizer needs degree ≥ 2, one start and a positive budget".into()));
    }
    let ball = RevolutionBody::new_unchecked(ZonalFunction::constant(n, 1.0));
    let (ball_objective, ball_error) = revolution_objective(spec, &ball, cfg.objective)?;
    let d = cfg.degree - 1;
    let per_start = cfg.budget / cfg.multistarts;
    let mut runs: Vec<StartRun> = Vec::new();
    for s in 0..cfg.multistarts {
        let mut rng = substream(cfg.seed, 100 + s as u64);
        let start: Vec<f64> = if s == 0 {
            vec![0.0; d]
        } else {
            (0..d).map(|k| cfg.init_scale * (2.0 * rng.random::<f64>() - 1.0) / (k + 1) as f64).collect()
        };
        let mut search = Search { spec, cfg, n, evaluations: 0, projections: 0 };
        let mut best = f64::INFINITY;
        let mut best_x = start.clone();
        let mut hist = Vec::new();
        nelder_mead(&mut search, start, per_start, &mut rng, |x, f, ev, pr| {
            if f < best {
                best = f;
                best_x = x.to_vec();
                hist.push(TraceEntry {
                    evaluation: ev,
                    start: s,
                    coeffs: x.to_vec(),
                    objective: if cfg.objective.maximize() { -f } else { f },
                    projections: pr,
                });
            }
        });
        runs.push((best, s, hist, best_x, search.evaluations, search.projections));
    }
    // Deterministic merge by (objective, start index).
    runs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let evaluations = runs.iter().map(|r| r.4).sum();
    let projections = runs.iter().map(|r| r.5).sum();
    let mut history: Vec<TraceEntry> = runs.iter().flat_map(|r| r.2.clone()).collect();
    history.sort_by(|a, b| a.start.cmp(&b.start).then(a.evaluation.cmp(&b.evaluation)));
    let mut monotone = Vec::new();
    let mut best_so_far = f64::INFINITY;
    for e in history {
        let loss = if cfg.objective.maximize() { -e.objective } else { e.objective };
        if loss < best_so_far {
            best_so_far = loss;
            monotone.push(e);
        }
    }
    let best = RevolutionBody::new_unchecked(profile_from(n, &runs[0].3));
    let (best_objective, best_error) = revolution_objective(spec, &best, cfg.objective)?;
    Ok(OptimizerTrace {
        history: monotone,
        best_distance_to_ball: distance_to_ball_zonal(&best.profile),
        best,
        best_objective,
        best_error,
        ball_objective,
        ball_error,
        evaluations,
        projections,
        budget_exhausted: evaluations >= per_start * cfg.multistarts,
        seed: cfg.seed,
        maximize: cfg.objective.maximize(),
    })
}

/// Ψ^λ = λ Φ_1 + (1-λ) J with Φ_1 generated by f_1.
pub fn psi_lambda(lambda: f64, f1: &ZonalFunction<f64>) -> Result<ValuationSpec> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("λ = {lambda} outside (0, 1)")));
    }
    let (min, _) = f1.min_on_grid(4096);
    if min <= 0.0 {
        return Err(Error::Domain(format!("generating function must be positive (min {min})")));
    }
    ValuationSpec::combination(vec![
        (lambda, ValuationSpec::generating(f1.clone(), 1)?),
        (1.0 - lambda, ValuationSpec::steiner_j(f1.n)),
    ])
}

/// Best-so-far products of the J search; the target is 10 κ_n².
#[derive(Debug, Clone, PartialEq)]
pub struct JProbe {
    pub sequence: Vec<f64>,
    pub final_value: f64,
    pub target: f64,
    pub reached: bool,
    pub trace: OptimizerTrace,
}

pub fn j_unboundedness_probe(n: usize, degree: usize, budget: usize, seed: u64) -> Result<JProbe> {
    let spec = ValuationSpec::steiner_j(n);
    let cfg = OptimizerConfig {
        objective: Objective::MaxPolarProduct,
        degree,
        multistarts: 4,
        budget,
        seed,
        init_scale: 0.3,
    };
    let trace = optimize_revolution(&spec, &cfg)?;
    let target = 10.0 * unit_ball_volume(n).powi(2);
    let sequence: Vec<f64> = trace.history.iter().map(|e| e.objective).collect();
    Ok(JProbe { final_value: trace.best_objective, reached: trace.best_objective >= target, target, sequence, trace })
}

/// Even cap bump with maximum C at ±ē, supported in |t| ≥ 1 - cap_radius, and its checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CapReport {
    pub c: f64,
    pub cap_radius: f64,
    pub h: ZonalFunction<f64>,
    /// min_t (1 - h(t)); negative means 1 - h is not a measure.
    pub min_one_minus_h: f64,
    /// min_t (1 - □^{-1} h(t)).
    pub margin: f64,
    pub classification: Degree1Report,
    /// Band limit too low to localize the bump: the expansion leaks more than 5% of C outside the cap.
    pub leakage_warning: bool,
}

pub fn cap_construction(n: usize, c: f64, cap_radius: f64, degree: usize) -> Result<CapReport> {
    if c <= 1.0 || !(cap_radius > 0.0 && cap_radius < 1.0) {
        return Err(Error::Domain("need C > 1 and cap radius in (0, 1)".into()));
    }
    let edge = 1.0 - cap_radius;
    // Smooth C² ramp from the cap boundary to the pole.
    let bump = |t: f64| {
        let s = ((t.abs() - edge) / cap_radius).clamp(0.0, 1.0);
        c * s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    };
    let h = expand_zonal(bump, n, degree).even_part();
    let grid: Vec<f64> = (0..=4096).map(|j| (std::f64::consts::PI * j as f64 / 4096.0).cos()).collect();
    let min_one_minus_h = grid.iter().map(|&t| 1.0 - h.eval(t)).fold(f64::INFINITY, f64::min);
    let ib = inverse_box(&h)?;
    let margin = grid.iter().map(|&t| 1.0 - ib.eval(t)).fold(f64::INFINITY, f64::min);
    let leak = grid.iter().filter(|t| t.abs() < edge).map(|&t| h.eval(t).abs()).fold(0.0, f64::max);
    let classification = classify_degree1(&ZonalMeasure::from_density(ZonalFunction::constant(n, 1.0).add(&h.scaled(-1.0))));
    Ok(CapReport {
        c,
        cap_radius,
        h,
        min_one_minus_h,
        margin,
        classification,
        leakage_warning: leak > 0.05 * c,
    })
}

/// Cap radii from the list whose construction has 1 - h negative somewhere and margin ≥ `threshold`.
pub fn cap_scan(n: usize, c: f64, radii: &[f64], degree: usize, threshold: f64) -> Result<(Vec<CapReport>, Option<f64>)> {
    let reports = radii.iter().map(|&r| cap_construction(n, c, r, degree)).collect::<Result<Vec<_>>>()?;
    let best = reports
        .iter()
        .filter(|r| r.min_one_minus_h < 0.0 && r.margin >= threshold)
        .map(|r| r.cap_radius)
        .fold(None, |a: Option<f64>, r| Some(a.map_or(r, |v| v.max(r))));
    Ok((reports, best))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerRow {
    pub ratio: f64,
    pub ball_ratio: f64,
    pub error: f64,
    pub verdict: Verdict,
    pub equality: bool,
}

/// V_n(ΦK)/V_n(K) ≥ V_n(ΦB)/V_n(B) for the degree-1 valuation h(ΦK,·) = h(K,·) ∗ μ.
pub fn revolution_minimizer_check(mu: &ZonalMeasure, bodies: &[RevolutionBody]) -> Result<Vec<MinimizerRow>> {
    let class = classify_degree1(mu);
    if class.class == Degree1Class::Neither {
        return Err(Error::Refused("the measure is neither monotone nor weakly monotone".into()));
    }
    let n = mu.n;
    let ball_ratio = mu.moment(0).powi(n as i32);
    bodies
        .iter()
        .map(|k| {
            let image = degree1_image(mu, k);
            let ratio_at = |m: usize| -> Result<f64> {
                Ok(meridian_volume(&image, m)? / meridian_volume(&k.profile, m)?)
            };
            let ratio = ratio_at(1024)?;
            let error = (ratio - ratio_at(512)?).abs();
            Ok(MinimizerRow {
                ratio,
                ball_ratio,
                error,
                verdict: order(ratio, error, ball_ratio, 0.0),
                equality: equal(ratio, error, ball_ratio, 0.0),
            })
        })
        .collect()
}

/// Distance of a support field to the nearest ball, Steiner point removed.
pub fn distance_to_ball(field: &SupportField) -> f64 {
    field.distance_to_ball()
}
