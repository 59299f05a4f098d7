//! Minkowski valuations given by generating functions, spherical Crofton measures,
//! the Steiner map J, and nonnegative combinations of these.

use crate::bodies::{ConvexBody, RevolutionBody, SupportField};
use crate::error::{Error, Result};
use crate::harmonic::{
    box_operator, convolve_zonal, cosine_transform, funk_hecke, ZonalFunction, ZonalMeasure,
};
use crate::jacobi::gauss_jacobi;
use crate::sphquad::{
    orbit_parameter_rule, pole, rotation_to_unchecked, sphere_area, unit_ball_volume, GrassmannFrame, OrbitRule,
    SphereGrid,
};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// h(ΦK, u) = ∫ f(⟨u,v⟩) dS_i(K, v).
    Generating(ZonalFunction<f64>),
    /// h(ΦK, u) = Σ_a w_a · mean of V_i(K | ϑ_u F) over the orbit {t_F = σ_a}.
    Crofton { atoms: Vec<(f64, f64)>, nonneg: bool },
    /// JK = K - s(K).
    SteinerJ,
    Combination(Vec<(f64, ValuationSpec)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationSpec {
    pub n: usize,
    pub i: usize,
    pub repr: Representation,
}

/// A spec together with its ball radius: Φ B^n = r B^n.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSpec {
    pub spec: ValuationSpec,
    pub radius: f64,
    /// Radius recovered by applying the spec to the unit ball through a non-ball route.
    pub verified_radius: Option<f64>,
}

/// Orbit quadrature used by the Crofton path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitChoice {
    Product { degree: usize },
    MonteCarlo { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplyParams {
    pub orbit: OrbitChoice,
}

impl Default for ApplyParams {
    fn default() -> Self {
        Self { orbit: OrbitChoice::Product { degree: 6 } }
    }
}

fn check_degree(n: usize, i: usize) -> Result<()> {
    if i == 0 || i >= n {
        return Err(Error::DegreeOutOfRange { n, i });
    }
    Ok(())
}

impl ValuationSpec {
    pub fn generating(f: ZonalFunction<f64>, i: usize) -> Result<Self> {
        check_degree(f.n, i)?;
        Ok(Self { n: f.n, i, repr: Representation::Generating(f) })
    }

    /// Crofton spec from orbit atoms (σ, w); the nonneg flag is set iff every w ≥ 0.
    pub fn crofton(n: usize, i: usize, atoms: Vec<(f64, f64)>) -> Result<Self> {
        check_degree(n, i)?;
        if let Some(&(s, _)) = atoms.iter().find(|(s, _)| !(0.0..=1.0).contains(s)) {
            return Err(Error::Domain(format!("orbit parameter {s} outside [0, 1]")));
        }
        let nonneg = atoms.iter().all(|&(_, w)| w >= 0.0);
        Ok(Self { n, i, repr: Representation::Crofton { atoms, nonneg } })
    }

    pub fn steiner_j(n: usize) -> Self {
        Self { n, i: 1, repr: Representation::SteinerJ }
    }

    pub fn combination(parts: Vec<(f64, ValuationSpec)>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Domain("empty combination".into()))?;
        let (n, i) = (first.1.n, first.1.i);
        for (w, s) in &parts {
            if *w < 0.0 {
                return Err(Error::Domain(format!("negative combination weight {w}")));
            }
            if s.n != n || s.i != i {
                return Err(Error::Domain("combination parts differ in dimension or degree".into()));
            }
        }
        Ok(Self { n, i, repr: Representation::Combination(parts) })
    }

    pub fn tag(&self) -> &'static str {
        match self.repr {
            Representation::Generating(_) => "generating",
            Representation::Crofton { .. } => "crofton",
            Representation::SteinerJ => "steiner_j",
            Representation::Combination(_) => "combination",
        }
    }

    /// True iff the spec is given by a nonnegative Crofton measure.
    pub fn is_nonneg_crofton(&self) -> bool {
        match &self.repr {
            Representation::Crofton { nonneg, .. } => *nonneg,
            Representation::Combination(parts) => parts.iter().all(|(w, s)| *w >= 0.0 && s.is_nonneg_crofton()),
            _ => false,
        }
    }

    /// Φ(-K) = Φ(K) for all K.
    pub fn is_even(&self) -> bool {
        match &self.repr {
            Representation::Generating(f) => f.odd_part().coeffs.iter().all(|c| *c == 0.0),
            Representation::Crofton { .. } => true,
            Representation::SteinerJ => false,
            Representation::Combination(parts) => parts.iter().all(|(_, s)| s.is_even()),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let repr = match &self.repr {
            Representation::Generating(f) => Representation::Generating(f.scaled(s)),
            Representation::Crofton { atoms, .. } => Representation::Crofton {
                atoms: atoms.iter().map(|&(t, w)| (t, w * s)).collect(),
                nonneg: atoms.iter().all(|&(_, w)| w * s >= 0.0),
            },
            Representation::SteinerJ => Representation::Combination(vec![(s, self.clone())]),
            Representation::Combination(parts) => {
                Representation::Combination(parts.iter().map(|(w, p)| (w * s, p.clone())).collect())
            }
        };
        Self { n: self.n, i: self.i, repr }
    }

    /// r with Φ B^n = r B^n.
    pub fn ball_radius(&self) -> f64 {
        match &self.repr {
            Representation::Generating(f) => f.sphere_integral(),
            Representation::Crofton { atoms, .. } => {
                unit_ball_volume(self.i) * atoms.iter().map(|(_, w)| w).sum::<f64>()
            }
            Representation::SteinerJ => 1.0,
            Representation::Combination(parts) => parts.iter().map(|(w, s)| w * s.ball_radius()).sum(),
        }
    }
}

/// Π_i: the orbit atom σ = 0 with weight κ_{n-1}/κ_i, so that Π_i B^n = κ_{n-1} B^n.
pub fn projection_body_spec(n: usize, i: usize) -> Result<ValuationSpec> {
    check_degree(n, i)?;
    ValuationSpec::crofton(n, i, vec![(0.0, unit_ball_volume(n - 1) / unit_ball_volume(i))])
}

/// Computes r, then re-derives it from the unit ball through a general route when one exists.
pub fn normalization_radius(spec: &ValuationSpec) -> Result<NormalizedSpec> {
    let radius = spec.ball_radius();
    if radius <= 0.0 {
        return Err(Error::Refused(format!("ball image radius {radius} is not positive")));
    }
    let n = spec.n;
    let probe_rev = RevolutionBody::new_unchecked(ZonalFunction::constant(n, 1.0));
    let verified_radius = match apply_zonal(spec, &probe_rev, &ApplyParams::default()) {
        Ok(z) => Some(z.coeff(0)),
        Err(_) => {
            let e = ConvexBody::ellipsoid(DMatrix::identity(n, n));
            let u = pole(n);
            node_values(spec, &e, std::slice::from_ref(&u), &ApplyParams::default()).ok().map(|v| v[0])
        }
    };
    Ok(NormalizedSpec { spec: spec.clone(), radius, verified_radius })
}

impl NormalizedSpec {
    /// The same valuation scaled so that its ball image has radius `target`.
    pub fn rescaled(&self, target: f64) -> NormalizedSpec {
        let s = target / self.radius;
        NormalizedSpec {
            spec: self.spec.scaled(s),
            radius: target,
            verified_radius: self.verified_radius.map(|r| r * s),
        }
    }
}

/// h(ΦK, ·) on the grid.
pub fn apply(spec: &ValuationSpec, k: &ConvexBody, grid: &Arc<SphereGrid>, params: &ApplyParams) -> Result<SupportField> {
    if k.dim() != spec.n || grid.n != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, got: k.dim().max(grid.n) });
    }
    let values = node_values(spec, k, &grid.nodes, params)?;
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite support value {v}")));
    }
    Ok(SupportField { grid: Arc::clone(grid), values, valid: None })
}

/// h(ΦK, u) at arbitrary unit vectors.
pub fn node_values(spec: &ValuationSpec, k: &ConvexBody, nodes: &[DVector<f64>], params: &ApplyParams) -> Result<Vec<f64>> {
    if let ConvexBody::Ball { radius, .. } = k {
        let v = match &spec.repr {
            Representation::SteinerJ => *radius,
            _ => spec.ball_radius() * radius.powi(spec.i as i32),
        };
        return Ok(vec![v; nodes.len()]);
    }
    if let ConvexBody::Revolution(r) = k {
        match apply_zonal(spec, r, params) {
            Ok(z) => {
                let n = spec.n;
                return Ok(nodes.iter().map(|u| z.eval(u[n - 1].clamp(-1.0, 1.0))).collect());
            }
            Err(Error::Capability(msg)) => {
                if !matches!(spec.repr, Representation::Crofton { .. } | Representation::Combination(_)) {
                    return Err(Error::Capability(msg));
                }
            }
            Err(e) => return Err(e),
        }
    }
    match &spec.repr {
        Representation::Combination(parts) => {
            let mut out = vec![0.0; nodes.len()];
            for (w, s) in parts {
                for (o, v) in out.iter_mut().zip(node_values(s, k, nodes, params)?) {
                    *o += w * v;
                }
            }
            Ok(out)
        }
        Representation::SteinerJ => {
            if spec.i != 1 {
                return Err(Error::Capability("the Steiner map has degree 1".into()));
            }
            let s = k.steiner_point();
            Ok(nodes.iter().map(|u| k.support(u) - s.dot(u)).collect())
        }
        Representation::Generating(f) => {
            let n = spec.n;
            match k {
                ConvexBody::Zonotope { .. } if spec.i == n - 1 => {
                    let atoms = k.area_measure_top()?;
                    let (pts, ws): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
                    let g = crate::harmonic::conv_measure_zonal(&pts, &ws, f);
                    Ok(nodes.iter().map(g).collect())
                }
                _ => Err(Error::Capability(format!(
                    "generating-function path for a {} at degree {} (zonotopes need i = n-1, bodies of revolution i = 1 or n-1)",
                    k.variant_name(),
                    spec.i
                ))),
            }
        }
        Representation::Crofton { atoms, .. } => crofton_values(spec.n, spec.i, atoms, k, nodes, params),
    }
}

fn orbit_rule(n: usize, i: usize, params: &ApplyParams) -> Result<OrbitRule> {
    match params.orbit {
        OrbitChoice::Product { degree } => OrbitRule::product(n, i, degree),
        OrbitChoice::MonteCarlo { count, seed } => OrbitRule::monte_carlo(n, i, count, seed),
    }
}

/// Orbit-averaged Crofton evaluation: ϑ_u F ranges over the whole SO(n-1) orbit, so the choice of ϑ_u is immaterial.
fn crofton_values(
    n: usize,
    i: usize,
    atoms: &[(f64, f64)],
    k: &ConvexBody,
    nodes: &[DVector<f64>],
    params: &ApplyParams,
) -> Result<Vec<f64>> {
    let rule = orbit_rule(n, i, params)?;
    let frames: Vec<(DMatrix<f64>, f64)> = atoms
        .iter()
        .flat_map(|&(sigma, w)| rule.frames(sigma).map(move |(f, p)| (f.basis, w * p)).collect::<Vec<_>>())
        .collect();
    let kappa_i = unit_ball_volume(i);
    let mut out = Vec::with_capacity(nodes.len());
    for u in nodes {
        let r = rotation_to_unchecked(u);
        let value = match k {
            ConvexBody::Zonotope { generators, .. } => {
                let v = DMatrix::from_fn(n, generators.len(), |row, c| generators[c][row]);
                let rv = r.transpose() * v;
                frames
                    .iter()
                    .map(|(b, w)| w * ConvexBody::zonotope_projection_coords(&(b.transpose() * &rv)))
                    .sum()
            }
            ConvexBody::Ellipsoid { matrix, .. } => {
                let ra = r.transpose() * matrix;
                frames
                    .iter()
                    .map(|(b, w)| {
                        let g = b.transpose() * &ra;
                        w * kappa_i * (&g * g.transpose()).determinant().max(0.0).sqrt()
                    })
                    .sum()
            }
            _ => {
                let mut acc = 0.0;
                for (b, w) in &frames {
                    let f = GrassmannFrame { basis: &r * b };
                    acc += w * k.projection_function(&f)?;
                }
                acc
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// Spectral image of a body of revolution; exact on band-limited profiles.
///
/// `params` mirrors `apply`; the spectral route needs no orbit rule.
#[allow(clippy::only_used_in_recursion)]
pub fn apply_zonal(spec: &ValuationSpec, k: &RevolutionBody, params: &ApplyParams) -> Result<ZonalFunction<f64>> {
    let n = spec.n;
    if k.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: k.n() });
    }
    let h = &k.profile;
    match &spec.repr {
        Representation::SteinerJ => {
            if spec.i != 1 {
                return Err(Error::Capability("the Steiner map has degree 1".into()));
            }
            Ok(h.with_coeff(1, 0.0))
        }
        Representation::Combination(parts) => {
            let mut acc = ZonalFunction::constant(n, 0.0);
            for (w, s) in parts {
                acc = acc.add(&apply_zonal(s, k, params)?.scaled(*w));
            }
            Ok(acc)
        }
        Representation::Generating(f) => {
            if spec.i == 1 {
                Ok(funk_hecke(f, &box_operator(h)))
            } else if spec.i == n - 1 {
                Ok(funk_hecke(f, &k.area_measure_top()))
            } else {
                Err(Error::Capability(format!(
                    "generating-function path for bodies of revolution at degree {}",
                    spec.i
                )))
            }
        }
        Representation::Crofton { atoms, .. } => {
            if spec.i == 1 {
                // Width profile averaged over circles at height σ.
                let width = h.even_part().scaled(2.0);
                Ok(convolve_zonal(&width, &ZonalMeasure::from_atoms(n, atoms.clone())))
            } else if spec.i == n - 1 {
                // V_{n-1}(K | w^⊥) = ½ C(S_{n-1})(w), and |⟨w,u⟩| = √(1-σ²) on the orbit.
                let shadow = cosine_transform(&k.area_measure_top()).scaled(0.5);
                let heights =
                    atoms.iter().map(|&(s, w)| ((1.0 - s * s).max(0.0).sqrt(), w)).collect();
                Ok(convolve_zonal(&shadow, &ZonalMeasure::from_atoms(n, heights)))
            } else {
                Err(Error::Capability(format!("spectral Crofton path for bodies of revolution at degree {}", spec.i)))
            }
        }
    }
}

/// Crofton density, with respect to the Haar probability on Gr_i, of the valuation whose
/// generating function is C ḡ.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDensity {
    pub n: usize,
    pub i: usize,
    pub g: ZonalFunction<f64>,
}

pub fn crofton_from_generating(g: &ZonalFunction<f64>, i: usize) -> Result<OrbitDensity> {
    check_degree(g.n, i)?;
    Ok(OrbitDensity { n: g.n, i, g: g.clone() })
}

impl OrbitDensity {
    /// φ(σ) on the orbit {t_F = σ}.
    pub fn eval(&self, sigma: f64) -> f64 {
        let (n, i) = (self.n, self.i);
        let s = (1.0 - sigma * sigma).max(0.0).sqrt();
        let lead = 2.0 * unit_ball_volume(n - 1) / unit_ball_volume(i);
        if i == n - 1 {
            return lead * sphere_area(n) * 0.5 * (self.g.eval(s) + self.g.eval(-s));
        }
        let a = (n as f64 - i as f64 - 3.0) / 2.0;
        let rule = gauss_jacobi(self.g.degree() / 2 + 2, a, a);
        let slice = rule.integrate(|t| self.g.eval(s * t));
        lead * sphere_area(n) / sphere_area(n - i) * sphere_area(n - i - 1) * slice
    }

    /// (σ_q, p_q φ(σ_q)) from the Haar law of the orbit parameter.
    pub fn atoms(&self, m: usize) -> Result<Vec<(f64, f64)>> {
        Ok(orbit_parameter_rule(self.n, self.i, m)?
            .into_iter()
            .map(|(s, p)| (s, p * self.eval(s)))
            .collect())
    }

    pub fn to_spec(&self, m: usize) -> Result<ValuationSpec> {
        ValuationSpec::crofton(self.n, self.i, self.atoms(m)?)
    }

    pub fn min_on_grid(&self, m: usize) -> (f64, f64) {
        (0..=m)
            .map(|j| {
                let s = j as f64 / m as f64;
                (self.eval(s), s)
            })
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
    }
}

/// Pre-cosine profile ḡ of L_α: C ḡ = 1 + α P_2^n.
pub fn lalpha_pre_cosine(alpha: f64, n: usize) -> ZonalFunction<f64> {
    let c = 1.0 / (2.0 * unit_ball_volume(n - 1));
    ZonalFunction::new(n, vec![c, 0.0, c * (n as f64 + 1.0) * alpha])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree1Class {
    Monotone,
    WeaklyMonotone,
    Neither,
}

/// Classification of the degree-1 valuation h(ΦK,·) = h(K,·) ∗ μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degree1Report {
    pub class: Degree1Class,
    /// min of the density over t.
    pub min_density: f64,
    /// max over α of min_t (m(t) + α t).
    pub best_linear_shift: f64,
    pub alpha: f64,
}

pub fn classify_degree1(mu: &ZonalMeasure) -> Degree1Report {
    const M: usize = 4096;
    let ts: Vec<f64> = (0..=M).map(|j| (std::f64::consts::PI * j as f64 / M as f64).cos()).collect();
    let dens: Vec<f64> = match &mu.density {
        Some(d) => ts.iter().map(|&t| d.eval(t)).collect(),
        None => vec![0.0; ts.len()],
    };
    let scale = dens.iter().fold(1e-300f64, |a, b| a.max(b.abs()));
    let tol = 1e-10 * scale.max(1.0);
    let min_density = dens.iter().cloned().fold(f64::INFINITY, f64::min);
    let atoms_ok = mu.atoms.iter().all(|&(_, w)| w >= 0.0);
    let shifted = |a: f64| ts.iter().zip(&dens).map(|(t, m)| m + a * t).fold(f64::INFINITY, f64::min);
    // Concave in α: ternary search.
    let (mut lo, mut hi) = (-4.0 * scale - 1.0, 4.0 * scale + 1.0);
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if shifted(a) < shifted(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let best = shifted(alpha);
    let class = if !atoms_ok {
        Degree1Class::Neither
    } else if min_density >= -tol {
        Degree1Class::Monotone
    } else if best >= -tol {
        Degree1Class::WeaklyMonotone
    } else {
        Degree1Class::Neither
    };
    Degree1Report { class, min_density, best_linear_shift: best, alpha }
}

/// h(K,·) ∗ μ for a body of revolution, spectrally.
pub fn degree1_image(mu: &ZonalMeasure, k: &RevolutionBody) -> ZonalFunction<f64> {
    convolve_zonal(&k.profile, mu)
}
