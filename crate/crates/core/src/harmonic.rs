//! Zonal function algebra over Legendre polynomials P_k^n normalized by P_k^n(1) = 1.

use crate::error::{Error, Result};
use crate::jacobi::gauss_jacobi;
use crate::scalar::{self, Real};
use crate::sphquad::{pole, product_rule, rotation_to_unchecked, sphere_area};
use nalgebra::DVector;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Default band limit.
pub const DEFAULT_BAND_LIMIT: usize = 24;

fn check_t<T: Real>(t: T) -> Result<()> {
    let slack = T::of(1e-12);
    if t.abs() > T::one() + slack || t.is_nan() {
        return Err(Error::Domain(format!("|t| = {} exceeds 1", t.abs())));
    }
    Ok(())
}

/// P_k^n(t) by three-term recurrence.
pub fn legendre<T: Real>(n: usize, k: usize, t: T) -> Result<T> {
    check_t(t)?;
    Ok(legendre_all(n, k, t)[k])
}

/// [P_0^n(t), …, P_K^n(t)].
pub fn legendre_all<T: Real>(n: usize, kmax: usize, t: T) -> Vec<T> {
    let mut p = Vec::with_capacity(kmax + 1);
    p.push(T::one());
    if kmax >= 1 {
        p.push(t);
    }
    for k in 1..kmax {
        let a = T::of_usize(2 * k + n - 2);
        let next = (a * t * p[k] - T::of_usize(k) * p[k - 1]) / T::of_usize(k + n - 2);
        p.push(next);
    }
    p
}

/// Values and first two derivatives of P_0^n..P_K^n at t.
pub fn legendre_all_derivs<T: Real>(n: usize, kmax: usize, t: T) -> (Vec<T>, Vec<T>, Vec<T>) {
    let mut p = vec![T::one()];
    let mut d1 = vec![T::zero()];
    let mut d2 = vec![T::zero()];
    if kmax >= 1 {
        p.push(t);
        d1.push(T::one());
        d2.push(T::zero());
    }
    let two = T::of(2.0);
    for k in 1..kmax {
        let a = T::of_usize(2 * k + n - 2);
        let b = T::of_usize(k);
        let c = T::of_usize(k + n - 2);
        p.push((a * t * p[k] - b * p[k - 1]) / c);
        d1.push((a * (p[k] + t * d1[k]) - b * d1[k - 1]) / c);
        d2.push((a * (two * d1[k] + t * d2[k]) - b * d2[k - 1]) / c);
    }
    (p, d1, d2)
}

/// Dimension of the space of degree-k spherical harmonics on S^{n-1}.
pub fn harmonic_dimension<T: Real>(n: usize, k: usize) -> T {
    match k {
        0 => T::one(),
        1 => T::of_usize(n),
        _ => scalar::binomial::<T>(n + k - 1, k) - scalar::binomial::<T>(n + k - 3, k - 2),
    }
}

/// ∫_{-1}^{1} P_k^n(t)² (1-t²)^{(n-3)/2} dt.
pub fn legendre_norm<T: Real>(n: usize, k: usize) -> T {
    scalar::omega::<T>(n) / (scalar::omega::<T>(n - 1) * harmonic_dimension::<T>(n, k))
}

/// Zonal profile f̄ on [-1, 1] given by Legendre coefficients in dimension n.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalFunction<T: Real = f64> {
    pub n: usize,
    pub coeffs: Vec<T>,
}

impl<T: Real> ZonalFunction<T> {
    pub fn new(n: usize, coeffs: Vec<T>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![T::zero()] } else { coeffs };
        Self { n, coeffs }
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self::new(n, vec![c])
    }

    /// The single Legendre polynomial P_k^n.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut c = vec![T::zero(); k + 1];
        c[k] = T::one();
        Self::new(n, c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, t: T) -> T {
        let p = legendre_all(self.n, self.degree(), t);
        self.coeffs.iter().zip(&p).fold(T::zero(), |acc, (&c, &pk)| acc + c * pk)
    }

    /// (f̄, f̄', f̄'') at t.
    pub fn eval_derivs(&self, t: T) -> (T, T, T) {
        let (p, d1, d2) = legendre_all_derivs(self.n, self.degree(), t);
        let mut out = (T::zero(), T::zero(), T::zero());
        for (k, &c) in self.coeffs.iter().enumerate() {
            out.0 = out.0 + c * p[k];
            out.1 = out.1 + c * d1[k];
            out.2 = out.2 + c * d2[k];
        }
        out
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::new(self.n, self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "zonal functions of different dimensions");
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.n, (0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn with_coeff(&self, k: usize, value: T) -> Self {
        let mut c = self.coeffs.clone();
        if c.len() <= k {
            c.resize(k + 1, T::zero());
        }
        c[k] = value;
        Self::new(self.n, c)
    }

    pub fn even_part(&self) -> Self {
        self.map_coeffs(|k, c| if k % 2 == 0 { c } else { T::zero() })
    }

    pub fn odd_part(&self) -> Self {
        self.map_coeffs(|k, c| if k % 2 == 1 { c } else { T::zero() })
    }

    pub fn truncated(&self, kmax: usize) -> Self {
        Self::new(self.n, self.coeffs.iter().take(kmax + 1).copied().collect())
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, T) -> T) -> Self {
        Self::new(self.n, self.coeffs.iter().enumerate().map(|(k, &c)| f(k, c)).collect())
    }

    /// Funk–Hecke multiplier λ_k = ω_{n-1} ∫ f̄ P_k^n (1-t²)^{(n-3)/2} dt.
    pub fn funk_hecke_multiplier(&self, k: usize) -> T {
        scalar::omega::<T>(self.n - 1) * legendre_norm::<T>(self.n, k) * self.coeff(k)
    }

    /// ∫_{S^{n-1}} f̄(⟨w,u⟩) du.
    pub fn sphere_integral(&self) -> T {
        self.funk_hecke_multiplier(0)
    }

    pub fn cast<U: Real>(&self) -> ZonalFunction<U> {
        ZonalFunction::new(
            self.n,
            self.coeffs.iter().map(|c| U::of(c.to_f64().expect("finite"))).collect(),
        )
    }

    /// Max |f̄| on an equispaced grid of `m` + 1 points in θ.
    pub fn sup_norm(&self, m: usize) -> T {
        (0..=m)
            .map(|j| {
                let th = T::PI() * T::of_usize(j) / T::of_usize(m);
                self.eval(th.cos()).abs()
            })
            .fold(T::zero(), T::max)
    }

    /// Minimum of f̄ on an equispaced grid in θ.
    pub fn min_on_grid(&self, m: usize) -> (T, T) {
        let mut best = (T::infinity(), T::one());
        for j in 0..=m {
            let t = (T::PI() * T::of_usize(j) / T::of_usize(m)).cos();
            let v = self.eval(t);
            if v < best.0 {
                best = (v, t);
            }
        }
        best
    }
}

/// Legendre coefficients of a profile by Gauss–Jacobi inner products with `nodes` points.
pub fn expand_zonal_with(f: impl Fn(f64) -> f64, n: usize, kmax: usize, nodes: usize) -> ZonalFunction<f64> {
    let lam = (n as f64 - 3.0) / 2.0;
    let rule = gauss_jacobi(nodes, lam, lam);
    let mut acc = vec![0.0; kmax + 1];
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let ft = f(t) * w;
        for (a, p) in acc.iter_mut().zip(legendre_all(n, kmax, t)) {
            *a += ft * p;
        }
    }
    let coeffs = acc
        .iter()
        .enumerate()
        .map(|(k, a)| a / legendre_norm::<f64>(n, k))
        .collect();
    ZonalFunction::new(n, coeffs)
}

/// Band-limited Legendre expansion up to degree K.
pub fn expand_zonal(f: impl Fn(f64) -> f64, n: usize, kmax: usize) -> ZonalFunction<f64> {
    expand_zonal_with(f, n, kmax, (2 * kmax + 32).max(96))
}

/// Named sequence of per-degree multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierTransform<T: Real = f64> {
    pub name: &'static str,
    pub n: usize,
    pub multipliers: Vec<T>,
}

impl<T: Real> MultiplierTransform<T> {
    pub fn apply(&self, f: &ZonalFunction<T>) -> ZonalFunction<T> {
        assert_eq!(f.n, self.n, "transform and profile dimensions differ");
        assert!(self.multipliers.len() > f.degree(), "multiplier table too short");
        f.map_coeffs(|k, c| c * self.multipliers[k])
    }

    /// Degrees whose multiplier vanishes.
    pub fn kernel_degrees(&self, tol: T) -> Vec<usize> {
        self.multipliers
            .iter()
            .enumerate()
            .filter(|(_, m)| m.abs() <= tol)
            .map(|(k, _)| k)
            .collect()
    }
}

fn cosine_cache() -> &'static Mutex<HashMap<(usize, usize), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// m_k = ω_{n-1} ∫ |t| P_k^n(t) (1-t²)^{(n-3)/2} dt, zero for odd k.
pub fn cosine_multiplier(n: usize, k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    if let Some(&m) = cosine_cache().lock().expect("cosine cache").get(&(n, k)) {
        return m;
    }
    // x = t² turns the even integrand into a polynomial of degree k/2 against (1-x)^λ.
    let lam = (n as f64 - 3.0) / 2.0;
    let rule = gauss_jacobi(k / 2 + 4, lam, 0.0);
    let integral = rule.integrate(|y| {
        let t = ((1.0 + y) / 2.0).sqrt();
        legendre_all(n, k, t)[k]
    }) / 2f64.powf(lam + 1.0);
    let m = sphere_area(n - 1) * integral;
    cosine_cache().lock().expect("cosine cache").insert((n, k), m);
    m
}

pub fn cosine_transform_of(n: usize, kmax: usize) -> MultiplierTransform<f64> {
    MultiplierTransform { name: "cosine", n, multipliers: (0..=kmax).map(|k| cosine_multiplier(n, k)).collect() }
}

/// (Cf)(u) = ∫ |⟨u,v⟩| f(⟨v,ē⟩) dv.
pub fn cosine_transform<T: Real>(f: &ZonalFunction<T>) -> ZonalFunction<T> {
    f.map_coeffs(|k, c| c * T::of(cosine_multiplier(f.n, k)))
}

/// b_k = -(k-1)(k+n-1)/(n-1).
pub fn box_multiplier<T: Real>(n: usize, k: usize) -> T {
    let k = T::of_usize(k);
    let n = T::of_usize(n);
    -(k - T::one()) * (k + n - T::one()) / (n - T::one())
}

pub fn box_transform<T: Real>(n: usize, kmax: usize) -> MultiplierTransform<T> {
    MultiplierTransform { name: "box", n, multipliers: (0..=kmax).map(|k| box_multiplier(n, k)).collect() }
}

/// □_n h = h + Δ_S h / (n-1).
pub fn box_operator<T: Real>(h: &ZonalFunction<T>) -> ZonalFunction<T> {
    h.map_coeffs(|k, c| c * box_multiplier::<T>(h.n, k))
}

/// Spectral inverse of □_n on profiles without a degree-1 component.
pub fn inverse_box<T: Real>(h: &ZonalFunction<T>) -> Result<ZonalFunction<T>> {
    let c1 = h.coeff(1);
    if c1.abs() > T::of(1e-10) {
        return Err(Error::NonzeroLinearPart(c1.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(h.map_coeffs(|k, c| if k == 1 { T::zero() } else { c / box_multiplier::<T>(h.n, k) }))
}

/// SO(n-1)-invariant measure on S^{n-1}: a density m(⟨v,ē⟩) dv plus circle atoms.
///
/// An atom (t, w) is the invariant measure of total mass w on {⟨v,ē⟩ = t}.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalMeasure {
    pub n: usize,
    pub density: Option<ZonalFunction<f64>>,
    pub atoms: Vec<(f64, f64)>,
}

impl ZonalMeasure {
    pub fn from_density(density: ZonalFunction<f64>) -> Self {
        Self { n: density.n, density: Some(density), atoms: vec![] }
    }

    pub fn from_atoms(n: usize, atoms: Vec<(f64, f64)>) -> Self {
        Self { n, density: None, atoms }
    }

    /// Uniform probability on the sphere.
    pub fn uniform(n: usize) -> Self {
        Self::from_density(ZonalFunction::constant(n, 1.0 / sphere_area(n)))
    }

    /// a_k = ∫ P_k^n(⟨v,ē⟩) dμ(v).
    pub fn moment(&self, k: usize) -> f64 {
        let dens = self.density.as_ref().map_or(0.0, |d| d.funk_hecke_multiplier(k));
        let atoms: f64 = self.atoms.iter().map(|&(t, w)| w * legendre_all(self.n, k, t)[k]).sum();
        dens + atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.moment(0)
    }
}

/// (μ ∗ g)(u) = Σ_j w_j ḡ(⟨u, v_j⟩) for a finite atomic μ.
pub fn conv_measure_zonal<'a>(
    points: &'a [DVector<f64>],
    weights: &'a [f64],
    g: &'a ZonalFunction<f64>,
) -> impl Fn(&DVector<f64>) -> f64 + 'a {
    move |u| {
        points
            .iter()
            .zip(weights)
            .map(|(v, w)| w * g.eval(u.dot(v).clamp(-1.0, 1.0)))
            .sum()
    }
}

/// (g ∗ μ)(u) = ∫ g(ϑ_u v) dμ(v) for a zonal μ, by circle averages on S^{n-2} slices.
///
/// `degree` sets the polynomial exactness of the slice rule and the t-rule size.
pub fn conv_fn_zonal_measure<'a>(
    g: &'a (dyn Fn(&DVector<f64>) -> f64 + 'a),
    mu: &'a ZonalMeasure,
    degree: usize,
) -> impl Fn(&DVector<f64>) -> f64 + 'a {
    let n = mu.n;
    let (circle, cw) = product_rule(n - 1, degree);
    let ctotal: f64 = cw.iter().sum();
    let lam = (n as f64 - 3.0) / 2.0;
    let trule = gauss_jacobi(degree / 2 + 2, lam, lam);
    let e = pole(n);
    move |u: &DVector<f64>| {
        let r = rotation_to_unchecked(u);
        let slice_avg = |t: f64| -> f64 {
            let s = (1.0 - t * t).max(0.0).sqrt();
            let mut acc = 0.0;
            for (y, w) in circle.iter().zip(&cw) {
                let mut v = &e * t;
                for j in 0..n - 1 {
                    v[j] += s * y[j];
                }
                acc += w * g(&(&r * v));
            }
            acc / ctotal
        };
        let mut total = 0.0;
        if let Some(d) = &mu.density {
            let inner: f64 = trule
                .nodes
                .iter()
                .zip(&trule.weights)
                .map(|(&t, &w)| w * d.eval(t) * slice_avg(t))
                .sum();
            total += sphere_area(n - 1) * inner;
        }
        for &(t, w) in &mu.atoms {
            total += w * slice_avg(t);
        }
        total
    }
}

/// Spectral g ∗ μ for zonal g: coefficients g_k a_k[μ].
pub fn convolve_zonal(g: &ZonalFunction<f64>, mu: &ZonalMeasure) -> ZonalFunction<f64> {
    g.map_coeffs(|k, c| c * mu.moment(k))
}

/// Spectral ∫ f̄(⟨u,v⟩) s̄(⟨v,ē⟩) dv: coefficients λ_k[f] s_k.
pub fn funk_hecke(f: &ZonalFunction<f64>, s: &ZonalFunction<f64>) -> ZonalFunction<f64> {
    s.map_coeffs(|k, c| c * f.funk_hecke_multiplier(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_legendre_closed_form() {
        for n in 3..=6 {
            for &t in &[-0.9, -0.2, 0.0, 0.4, 1.0] {
                let p2 = legendre::<f64>(n, 2, t).unwrap();
                assert!((p2 - (n as f64 * t * t - 1.0) / (n as f64 - 1.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = ZonalFunction::<f64>::new(4, vec![0.3, -0.2, 0.5, 0.1, -0.05, 0.02]);
        let h = 1e-5;
        for &t in &[-0.7, 0.1, 0.6] {
            let (_, d1, d2) = f.eval_derivs(t);
            let fd1 = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
            let fd2 = (f.eval(t + h) - 2.0 * f.eval(t) + f.eval(t - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-8);
            assert!((d2 - fd2).abs() < 1e-4);
        }
    }

    #[test]
    fn harmonic_dimensions() {
        assert_eq!(harmonic_dimension::<f64>(3, 4), 9.0);
        assert_eq!(harmonic_dimension::<f64>(4, 2), 9.0);
        assert_eq!(harmonic_dimension::<f64>(5, 1), 5.0);
    }

    #[test]
    fn inverse_box_rejects_linear_part() {
        let h = ZonalFunction::new(3, vec![1.0, 0.1]);
        assert!(matches!(inverse_box(&h), Err(Error::NonzeroLinearPart(_))));
    }
}
