//! Quadrature on the sphere and on Grassmannians, rotations and orbit parameters.
//!
//! The pole is ē = e_n, the last coordinate vector.

use crate::error::{Error, Result};
use crate::jacobi::{gauss_jacobi, Rule};
use crate::scalar;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{Beta, ContinuousCDF};
use statrs::function::gamma::gamma;

/// κ_n, the volume of the unit ball.
pub fn unit_ball_volume(n: usize) -> f64 {
    scalar::kappa::<f64>(n)
}

/// ω_n = n κ_n, the surface area of S^{n-1}.
pub fn sphere_area(n: usize) -> f64 {
    scalar::omega::<f64>(n)
}

/// ω_α = 2 π^{α/2} / Γ(α/2) for real α > 0.
pub fn omega_real(alpha: f64) -> f64 {
    2.0 * std::f64::consts::PI.powf(alpha / 2.0) / gamma(alpha / 2.0)
}

pub fn pole(n: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[n - 1] = 1.0;
    e
}

/// Deterministic RNG for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_unit(n: usize, rng: &mut impl Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    ProductRule,
    MonteCarlo,
}

/// Weighted nodes on S^{n-1}; the weights sum to ω_n.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub n: usize,
    pub nodes: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
    pub kind: GridKind,
    pub resolution: usize,
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&DVector<f64>) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(u, w)| w * f(u)).sum()
    }

    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Norm of the weighted node mean.
    pub fn centering_defect(&self) -> f64 {
        let mut m = DVector::zeros(self.n);
        for (u, w) in self.nodes.iter().zip(&self.weights) {
            m += u * *w;
        }
        m.norm() / self.weights.iter().sum::<f64>()
    }
}

/// Product rule on S^{m-1} ⊂ R^m exact for polynomials of degree ≤ `degree`.
pub(crate) fn product_rule(m: usize, degree: usize) -> (Vec<DVector<f64>>, Vec<f64>) {
    match m {
        0 => (vec![], vec![]),
        1 => (vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)], vec![1.0, 1.0]),
        2 => {
            let count = degree + 1;
            let w = 2.0 * std::f64::consts::PI / count as f64;
            let nodes = (0..count)
                .map(|k| {
                    let a = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / count as f64;
                    DVector::from_vec(vec![a.cos(), a.sin()])
                })
                .collect();
            (nodes, vec![w; count])
        }
        _ => {
            let lam = (m as f64 - 3.0) / 2.0;
            let rule = gauss_jacobi(degree / 2 + 1, lam, lam);
            let (sub_nodes, sub_weights) = product_rule(m - 1, degree);
            let mut nodes = Vec::with_capacity(rule.len() * sub_nodes.len());
            let mut weights = Vec::with_capacity(nodes.capacity());
            for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (v, &wv) in sub_nodes.iter().zip(&sub_weights) {
                    let mut u = DVector::zeros(m);
                    for j in 0..m - 1 {
                        u[j] = s * v[j];
                    }
                    u[m - 1] = t;
                    nodes.push(u);
                    weights.push(wt * wv);
                }
            }
            (nodes, weights)
        }
    }
}

/// Quadrature grid on S^{n-1}, n ∈ {3, 4, 5}.
///
/// Product rules integrate polynomials of degree ≤ `resolution` exactly.
/// Monte Carlo grids hold `resolution²` antithetic pairs with equal weights.
pub fn sphere_grid(n: usize, resolution: usize, kind: GridKind, seed: u64) -> Result<SphereGrid> {
    if !(3..=5).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if resolution < 8 {
        return Err(Error::Domain(format!("grid resolution {resolution} < 8")));
    }
    let (nodes, weights) = match kind {
        GridKind::ProductRule => product_rule(n, resolution),
        GridKind::MonteCarlo => {
            let pairs = resolution * resolution;
            let mut rng = substream(seed, 0);
            let w = sphere_area(n) / (2 * pairs) as f64;
            let mut nodes = Vec::with_capacity(2 * pairs);
            for _ in 0..pairs {
                let u = random_unit(n, &mut rng);
                nodes.push(-&u);
                nodes.push(u);
            }
            (nodes, vec![w; 2 * pairs])
        }
    };
    Ok(SphereGrid { n, nodes, weights, kind, resolution })
}

/// ω_{n-1} ∫_{-1}^{1} f(t) (1-t²)^{(n-3)/2} dt with an m-point Gauss–Jacobi rule.
///
/// Equals ∫_{S^{n-1}} f(⟨w,u⟩) du for any unit w.
pub fn integrate_zonal(f: impl Fn(f64) -> f64, n: usize, m: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if n == 2 {
        let r = gauss_jacobi(m, -0.5, -0.5);
        return finite_sum(&r, &f).map(|s| 2.0 * s);
    }
    let lam = (n as f64 - 3.0) / 2.0;
    let r = gauss_jacobi(m, lam, lam);
    finite_sum(&r, &f).map(|s| sphere_area(n - 1) * s)
}

fn finite_sum(rule: &Rule, f: &impl Fn(f64) -> f64) -> Result<f64> {
    let mut total = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonIntegrable(format!("profile is {v} at t = {t}")));
        }
        total += w * v;
    }
    Ok(total)
}

/// Rotation ϑ_u with ϑ_u ē = u: a Householder reflection composed with a flip of e_1.
pub fn rotation_to(u: &DVector<f64>) -> Result<DMatrix<f64>> {
    let norm = u.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit(norm));
    }
    Ok(rotation_to_unchecked(u))
}

pub(crate) fn rotation_to_unchecked(u: &DVector<f64>) -> DMatrix<f64> {
    let n = u.len();
    let mut v = -u.clone();
    v[n - 1] += 1.0;
    let vv = v.norm_squared();
    if vv < 1e-28 || n == 1 {
        return DMatrix::identity(n, n);
    }
    let mut h = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
    // Flip the first column so the determinant becomes +1 while ē stays fixed.
    for r in 0..n {
        h[(r, 0)] = -h[(r, 0)];
    }
    h
}

/// Orthonormal i-frame in R^n, stored as the columns of an n × i matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannFrame {
    pub basis: DMatrix<f64>,
}

impl GrassmannFrame {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let gram = basis.transpose() * &basis;
        let i = basis.ncols();
        let defect = (gram - DMatrix::<f64>::identity(i, i)).abs().max();
        if defect > 1e-10 {
            return Err(Error::Domain(format!("frame not orthonormal (defect {defect:e})")));
        }
        Ok(Self { basis })
    }

    pub fn n(&self) -> usize {
        self.basis.nrows()
    }

    pub fn i(&self) -> usize {
        self.basis.ncols()
    }

    /// t_F = ‖ē|F‖.
    pub fn orbit_parameter(&self) -> f64 {
        let n = self.n();
        self.basis.row(n - 1).norm().min(1.0)
    }

    pub fn rotated(&self, r: &DMatrix<f64>) -> GrassmannFrame {
        GrassmannFrame { basis: r * &self.basis }
    }

    /// Orthogonal projector onto the span.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

pub fn orbit_parameter(f: &GrassmannFrame) -> f64 {
    f.orbit_parameter()
}

fn check_degree(n: usize, i: usize) -> Result<()> {
    if i == 0 || i >= n {
        return Err(Error::DegreeOutOfRange { n, i });
    }
    Ok(())
}

/// Haar frame from a Gaussian matrix: QR with R's diagonal made positive.
pub fn haar_frame(n: usize, i: usize, rng: &mut impl Rng) -> GrassmannFrame {
    let g = DMatrix::from_fn(n, i, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..i {
        if r[(c, c)] < 0.0 {
            for row in 0..n {
                q[(row, c)] = -q[(row, c)];
            }
        }
    }
    GrassmannFrame { basis: q }
}

/// `count` Haar-distributed i-frames, reproducible by seed.
pub fn grassmann_sample(n: usize, i: usize, count: usize, seed: u64) -> Result<Vec<GrassmannFrame>> {
    check_degree(n, i)?;
    let mut rng = substream(seed, 1);
    Ok((0..count).map(|_| haar_frame(n, i, &mut rng)).collect())
}

/// Frame of the orbit {t_F = σ}: span{σē + s·w, E'} with w ⊥ ē unit and E' ⊥ {ē, w}.
pub fn orbit_frame(sigma: f64, w: &DVector<f64>, rest: &DMatrix<f64>) -> GrassmannFrame {
    let n = w.len();
    let i = rest.ncols() + 1;
    let s = (1.0 - sigma * sigma).max(0.0).sqrt();
    let mut basis = DMatrix::zeros(n, i);
    for r in 0..n {
        basis[(r, 0)] = s * w[r];
    }
    basis[(n - 1, 0)] += sigma;
    for c in 1..i {
        basis.set_column(c, &rest.column(c - 1));
    }
    GrassmannFrame { basis }
}

/// Embeds a vector of R^{n-1} into ē^⊥ ⊂ R^n.
fn embed(v: &DVector<f64>, n: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e.rows_mut(0, v.len()).copy_from(v);
    e
}

/// Orthonormal basis (n × (n-2)) of ē^⊥ ∩ w^⊥ for unit w ∈ ē^⊥.
fn complement_basis(w: &DVector<f64>, n: usize) -> DMatrix<f64> {
    let wp = w.rows(0, n - 1).into_owned();
    let r = rotation_to_unchecked(&wp);
    let mut b = DMatrix::zeros(n, n - 2);
    for c in 0..n - 2 {
        for row in 0..n - 1 {
            b[(row, c)] = r[(row, c)];
        }
    }
    b
}

/// Rule for Gr_j(R^m) as weighted m × j bases; trivial for j ∈ {0, m}, sphere rules for j ∈ {1, m-1}.
fn grassmann_rule(m: usize, j: usize, degree: usize) -> Result<Vec<(DMatrix<f64>, f64)>> {
    if j == 0 {
        return Ok(vec![(DMatrix::zeros(m, 0), 1.0)]);
    }
    if j == m {
        return Ok(vec![(DMatrix::identity(m, m), 1.0)]);
    }
    let (nodes, weights) = product_rule(m, degree);
    let total: f64 = weights.iter().sum();
    if j == 1 {
        return Ok(nodes
            .iter()
            .zip(&weights)
            .map(|(y, w)| (DMatrix::from_column_slice(m, 1, y.as_slice()), w / total))
            .collect());
    }
    if j == m - 1 {
        return Ok(nodes
            .iter()
            .zip(&weights)
            .map(|(y, w)| {
                let r = rotation_to_unchecked(y);
                (r.columns(0, m - 1).into_owned(), w / total)
            })
            .collect());
    }
    Err(Error::Capability(format!("no deterministic rule for Gr_{j}(R^{m})")))
}

/// Weighted frames realizing the SO(n-1)-invariant probability on one orbit {t_F = σ}.
///
/// Stores σ-independent templates (w, E'); `frames(σ)` instantiates them.
#[derive(Debug, Clone)]
pub struct OrbitRule {
    pub n: usize,
    pub i: usize,
    templates: Vec<(DVector<f64>, DMatrix<f64>)>,
    pub weights: Vec<f64>,
}

impl OrbitRule {
    /// Product rule of the given polynomial degree on S^{n-2} × Gr_{i-1}(n-2).
    pub fn product(n: usize, i: usize, degree: usize) -> Result<Self> {
        check_degree(n, i)?;
        let (ws, wweights) = product_rule(n - 1, degree);
        let wtotal: f64 = wweights.iter().sum();
        let inner = grassmann_rule(n - 2, i - 1, degree)?;
        let mut templates = Vec::new();
        let mut weights = Vec::new();
        for (w, ww) in ws.iter().zip(&wweights) {
            let w = embed(w, n);
            let b = complement_basis(&w, n);
            for (e, we) in &inner {
                templates.push((w.clone(), &b * e));
                weights.push(ww / wtotal * we);
            }
        }
        Ok(Self { n, i, templates, weights })
    }

    /// `count` random orbit templates with equal weights.
    pub fn monte_carlo(n: usize, i: usize, count: usize, seed: u64) -> Result<Self> {
        check_degree(n, i)?;
        let mut rng = substream(seed, 2);
        let mut templates = Vec::with_capacity(count);
        for _ in 0..count {
            let w = embed(&random_unit(n - 1, &mut rng), n);
            let b = complement_basis(&w, n);
            let e = if i == 1 {
                DMatrix::zeros(n - 2, 0)
            } else {
                haar_frame(n - 2, i - 1, &mut rng).basis
            };
            templates.push((w, &b * e));
        }
        Ok(Self { n, i, templates, weights: vec![1.0 / count as f64; count] })
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn frames(&self, sigma: f64) -> impl Iterator<Item = (GrassmannFrame, f64)> + '_ {
        self.templates
            .iter()
            .zip(&self.weights)
            .map(move |((w, rest), &wt)| (orbit_frame(sigma, w, rest), wt))
    }
}

/// Rule for the orbit parameter under Haar measure: σ² ~ Beta(i/2, (n-i)/2).
///
/// Returns (σ_q, p_q) with Σ p_q = 1.
pub fn orbit_parameter_rule(n: usize, i: usize, m: usize) -> Result<Vec<(f64, f64)>> {
    check_degree(n, i)?;
    let a = (n - i) as f64 / 2.0 - 1.0;
    let b = i as f64 / 2.0 - 1.0;
    let r = gauss_jacobi(m, a, b);
    let total: f64 = r.weights.iter().sum();
    Ok(r.nodes
        .iter()
        .zip(&r.weights)
        .map(|(&y, &w)| (((1.0 + y) / 2.0).sqrt(), w / total))
        .collect())
}

/// Haar frames stratified on σ² into equal-probability strata, `per_stratum` each.
#[derive(Debug, Clone)]
pub struct StratifiedSample {
    pub frames: Vec<GrassmannFrame>,
    pub strata: usize,
    pub per_stratum: usize,
}

pub fn grassmann_sample_stratified(
    n: usize,
    i: usize,
    strata: usize,
    per_stratum: usize,
    seed: u64,
) -> Result<StratifiedSample> {
    check_degree(n, i)?;
    if strata == 0 || per_stratum == 0 {
        return Err(Error::Domain("empty stratification".into()));
    }
    let beta = Beta::new(i as f64 / 2.0, (n - i) as f64 / 2.0)
        .map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = substream(seed, 3);
    let mut frames = Vec::with_capacity(strata * per_stratum);
    for h in 0..strata {
        for _ in 0..per_stratum {
            let p = (h as f64 + rng.random::<f64>()) / strata as f64;
            let x = beta.inverse_cdf(p.clamp(1e-15, 1.0 - 1e-15)).clamp(0.0, 1.0);
            let w = embed(&random_unit(n - 1, &mut rng), n);
            let b = complement_basis(&w, n);
            let rest = if i == 1 {
                DMatrix::zeros(n, 0)
            } else {
                &b * haar_frame(n - 2, i - 1, &mut rng).basis
            };
            frames.push(orbit_frame(x.sqrt(), &w, &rest));
        }
    }
    Ok(StratifiedSample { frames, strata, per_stratum })
}

/// Mean, standard error and effective sample size of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub effective_samples: f64,
}

impl Estimate {
    pub fn plain(values: &[f64]) -> Estimate {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Estimate {
            mean,
            std_error: (var / n as f64).sqrt(),
            samples: n,
            effective_samples: n as f64,
        }
    }

    /// Values grouped by stratum in consecutive runs of `per_stratum`.
    pub fn stratified(values: &[f64], per_stratum: usize) -> Estimate {
        let n = values.len();
        let strata = n / per_stratum;
        let naive = Estimate::plain(values);
        let mut mean = 0.0;
        let mut var = 0.0;
        for chunk in values.chunks(per_stratum) {
            let m = chunk.iter().sum::<f64>() / chunk.len() as f64;
            mean += m;
            if chunk.len() > 1 {
                let s2 = chunk.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (chunk.len() - 1) as f64;
                var += s2 / chunk.len() as f64;
            }
        }
        mean /= strata as f64;
        var /= (strata * strata) as f64;
        let ess = if var > 0.0 {
            n as f64 * naive.std_error.powi(2) / var
        } else {
            n as f64
        };
        Estimate { mean, std_error: var.sqrt(), samples: n, effective_samples: ess }
    }
}
