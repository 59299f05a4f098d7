//! Convex bodies given by support functions: balls, ellipsoids, zonotopes, bodies of revolution.

use crate::error::{Error, Result};
use crate::harmonic::{box_operator, expand_zonal_with, ZonalFunction};
use crate::jacobi::composite;
use crate::lp::min_cost_combination;
use crate::sphquad::{pole, sphere_area, unit_ball_volume, GrassmannFrame, SphereGrid};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::Arc;

/// Relative tolerance of the support-function validity test.
pub const VALIDITY_TOL: f64 = 1e-6;
/// Directions on the full meridian circle used by the validity test.
pub const MERIDIAN_DIRECTIONS: usize = 4096;
/// Directions per half meridian used for volumes and projections.
pub const POLYGON_DIRECTIONS: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Ball { center: DVector<f64>, radius: f64 },
    /// K = A·B^n + center.
    Ellipsoid { matrix: DMatrix<f64>, center: DVector<f64> },
    /// K = Σ_j [-v_j, v_j] + center.
    Zonotope { generators: Vec<DVector<f64>>, center: DVector<f64> },
    Revolution(RevolutionBody),
}

/// Body of revolution about ē with support h(K, u) = h̄(⟨u, ē⟩).
#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionBody {
    pub profile: ZonalFunction<f64>,
}

/// Outcome of a support-function test: `violation` is relative to the profile scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub valid: bool,
    pub violation: f64,
}

/// Support values of a body on a sphere grid.
#[derive(Debug, Clone)]
pub struct SupportField {
    pub grid: Arc<SphereGrid>,
    pub values: Vec<f64>,
    pub valid: Option<bool>,
}

fn det_abs(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        0 => 1.0,
        1 => m[(0, 0)].abs(),
        2 => (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).abs(),
        _ => m.clone().lu().determinant().abs(),
    }
}

/// Calls `f` with every k-subset of 0..m in lexicographic order.
pub(crate) fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut p = k;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if idx[p] != p + m - k {
                break;
            }
            if p == 0 {
                return;
            }
        }
        if idx[p] == p + m - k {
            return;
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// 2^i Σ_{|J|=i} |det G_J| for the i × m coordinate matrix G of the generators.
fn zonotope_volume_from_coords(g: &DMatrix<f64>) -> f64 {
    let i = g.nrows();
    let m = g.ncols();
    let mut total = 0.0;
    let mut sub = DMatrix::zeros(i, i);
    for_each_subset(m, i, |j| {
        for (c, &col) in j.iter().enumerate() {
            sub.set_column(c, &g.column(col));
        }
        total += det_abs(&sub);
    });
    2f64.powi(i as i32) * total
}

impl ConvexBody {
    pub fn ball(n: usize, radius: f64) -> Self {
        ConvexBody::Ball { center: DVector::zeros(n), radius }
    }

    pub fn ellipsoid(matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        ConvexBody::Ellipsoid { matrix, center: DVector::zeros(n) }
    }

    pub fn zonotope(generators: Vec<DVector<f64>>) -> Self {
        let n = generators.first().map_or(0, |g| g.len());
        ConvexBody::Zonotope { generators, center: DVector::zeros(n) }
    }

    /// The cube [-s, s]^n.
    pub fn cube(n: usize, half_side: f64) -> Self {
        let gens = (0..n)
            .map(|j| {
                let mut v = DVector::zeros(n);
                v[j] = half_side;
                v
            })
            .collect();
        Self::zonotope(gens)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Ellipsoid { matrix, .. } => matrix.nrows(),
            ConvexBody::Zonotope { center, .. } => center.len(),
            ConvexBody::Revolution(r) => r.profile.n,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            ConvexBody::Ball { .. } => "Ball",
            ConvexBody::Ellipsoid { .. } => "Ellipsoid",
            ConvexBody::Zonotope { .. } => "Zonotope",
            ConvexBody::Revolution(_) => "RevolutionBody",
        }
    }

    pub fn support(&self, u: &DVector<f64>) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => center.dot(u) + radius * u.norm(),
            ConvexBody::Ellipsoid { matrix, center } => center.dot(u) + (matrix.transpose() * u).norm(),
            ConvexBody::Zonotope { generators, center } => {
                center.dot(u) + generators.iter().map(|v| v.dot(u).abs()).sum::<f64>()
            }
            ConvexBody::Revolution(r) => r.support(u),
        }
    }

    pub fn support_field(&self, grid: &Arc<SphereGrid>) -> SupportField {
        SupportField {
            grid: Arc::clone(grid),
            values: grid.nodes.iter().map(|u| self.support(u)).collect(),
            valid: Some(true),
        }
    }

    /// Translate by x. Bodies of revolution only move along their axis.
    pub fn translated(&self, x: &DVector<f64>) -> Result<Self> {
        Ok(match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball { center: center + x, radius: *radius },
            ConvexBody::Ellipsoid { matrix, center } => {
                ConvexBody::Ellipsoid { matrix: matrix.clone(), center: center + x }
            }
            ConvexBody::Zonotope { generators, center } => {
                ConvexBody::Zonotope { generators: generators.clone(), center: center + x }
            }
            ConvexBody::Revolution(r) => {
                let n = r.profile.n;
                let off_axis = x.rows(0, n - 1).norm();
                if off_axis > 1e-14 {
                    return Err(Error::Capability("bodies of revolution translate along the axis only".into()));
                }
                let c1 = r.profile.coeff(1);
                ConvexBody::Revolution(RevolutionBody { profile: r.profile.with_coeff(1, c1 + x[n - 1]) })
            }
        })
    }

    /// Image under the linear map T (balls become ellipsoids).
    pub fn linear_image(&self, t: &DMatrix<f64>) -> Result<Self> {
        Ok(match self {
            ConvexBody::Ball { center, radius } => {
                ConvexBody::Ellipsoid { matrix: t * *radius, center: t * center }
            }
            ConvexBody::Ellipsoid { matrix, center } => {
                ConvexBody::Ellipsoid { matrix: t * matrix, center: t * center }
            }
            ConvexBody::Zonotope { generators, center } => ConvexBody::Zonotope {
                generators: generators.iter().map(|g| t * g).collect(),
                center: t * center,
            },
            ConvexBody::Revolution(_) => {
                return Err(Error::Capability("linear images of bodies of revolution".into()))
            }
        })
    }

    /// -K.
    pub fn reflected(&self) -> Self {
        match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball { center: -center, radius: *radius },
            ConvexBody::Ellipsoid { matrix, center } => {
                ConvexBody::Ellipsoid { matrix: matrix.clone(), center: -center }
            }
            ConvexBody::Zonotope { generators, center } => {
                ConvexBody::Zonotope { generators: generators.clone(), center: -center }
            }
            ConvexBody::Revolution(r) => ConvexBody::Revolution(RevolutionBody {
                profile: r.profile.map_coeffs(|k, c| if k % 2 == 1 { -c } else { c }),
            }),
        }
    }

    /// V_i(K|F), the i-volume of the projection onto span F.
    pub fn projection_function(&self, f: &GrassmannFrame) -> Result<f64> {
        let i = f.i();
        if f.n() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: f.n() });
        }
        match self {
            ConvexBody::Ball { radius, .. } => Ok(unit_ball_volume(i) * radius.powi(i as i32)),
            ConvexBody::Ellipsoid { matrix, .. } => {
                let qa = f.basis.transpose() * matrix;
                let g = &qa * qa.transpose();
                Ok(unit_ball_volume(i) * g.determinant().max(0.0).sqrt())
            }
            ConvexBody::Zonotope { generators, .. } => {
                let g = DMatrix::from_fn(i, generators.len(), |r, c| f.basis.column(r).dot(&generators[c]));
                Ok(zonotope_volume_from_coords(&g))
            }
            ConvexBody::Revolution(r) => match i {
                1 => {
                    let u = f.basis.column(0).into_owned();
                    Ok(r.support(&u) + r.support(&-&u))
                }
                2 => Ok(r.planar_projection_area(&f.basis.column(0).into_owned(), &f.basis.column(1).into_owned())),
                _ => Err(Error::Capability(format!(
                    "projection function of a body of revolution for i = {i} (only i = 1, 2)"
                ))),
            },
        }
    }

    /// Zonotope-only cheap projection: generators already expressed in frame coordinates.
    pub(crate) fn zonotope_projection_coords(g: &DMatrix<f64>) -> f64 {
        zonotope_volume_from_coords(g)
    }

    pub fn volume(&self) -> Result<f64> {
        let n = self.dim();
        match self {
            ConvexBody::Ball { radius, .. } => Ok(unit_ball_volume(n) * radius.powi(n as i32)),
            ConvexBody::Ellipsoid { matrix, .. } => Ok(unit_ball_volume(n) * matrix.determinant().abs()),
            ConvexBody::Zonotope { generators, .. } => {
                let g = DMatrix::from_fn(n, generators.len(), |r, c| generators[c][r]);
                Ok(zonotope_volume_from_coords(&g))
            }
            ConvexBody::Revolution(r) => r.volume(),
        }
    }

    /// s(K) = (1/κ_n) ∫ h(K,u) u du, exact for every variant.
    pub fn steiner_point(&self) -> DVector<f64> {
        match self {
            ConvexBody::Ball { center, .. }
            | ConvexBody::Ellipsoid { center, .. }
            | ConvexBody::Zonotope { center, .. } => center.clone(),
            ConvexBody::Revolution(r) => pole(r.profile.n) * r.profile.coeff(1),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexBody::Ball { radius, .. } => 2.0 * radius,
            ConvexBody::Ellipsoid { matrix, .. } => {
                2.0 * matrix.clone().svd(false, false).singular_values.max()
            }
            ConvexBody::Zonotope { generators, .. } => {
                let m = generators.len();
                let n = self.dim();
                let mut best: f64 = 0.0;
                if m == 0 {
                    return 0.0;
                }
                for mask in 0u64..(1u64 << (m - 1)) {
                    let mut x = generators[m - 1].clone();
                    for (j, g) in generators.iter().take(m - 1).enumerate() {
                        if mask >> j & 1 == 1 {
                            x -= g;
                        } else {
                            x += g;
                        }
                    }
                    best = best.max(x.norm());
                }
                let _ = n;
                2.0 * best
            }
            ConvexBody::Revolution(r) => r.diameter(),
        }
    }

    /// Facet normals and facet areas of a zonotope: the top-order area measure.
    pub fn area_measure_top(&self) -> Result<Vec<(DVector<f64>, f64)>> {
        let ConvexBody::Zonotope { generators, .. } = self else {
            return Err(Error::Capability(format!("atomic area measure of a {}", self.variant_name())));
        };
        let n = self.dim();
        let mut atoms = Vec::new();
        let mut sub = DMatrix::zeros(n, n - 1);
        for_each_subset(generators.len(), n - 1, |j| {
            for (c, &col) in j.iter().enumerate() {
                sub.set_column(c, &generators[col]);
            }
            // Generalized cross product via cofactors.
            let nu = DVector::from_fn(n, |r, _| {
                let minor = sub.clone().remove_row(r);
                let sign = if (r + n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * minor.determinant()
            });
            let len = nu.norm();
            if len > 1e-12 {
                let w = 2f64.powi(n as i32 - 1) * len;
                let unit = nu / len;
                atoms.push((unit.clone(), w));
                atoms.push((-unit, w));
            }
        });
        Ok(atoms)
    }
}

impl RevolutionBody {
    /// Validated body of revolution.
    pub fn new(profile: ZonalFunction<f64>) -> Result<Self> {
        let v = is_support_function_zonal(&profile);
        if !v.valid {
            return Err(Error::NotSupportFunction(v.violation));
        }
        Ok(Self { profile })
    }

    pub fn new_unchecked(profile: ZonalFunction<f64>) -> Self {
        Self { profile }
    }

    pub fn n(&self) -> usize {
        self.profile.n
    }

    pub fn support(&self, u: &DVector<f64>) -> f64 {
        let n = self.n();
        let norm = u.norm();
        if norm == 0.0 {
            return 0.0;
        }
        norm * self.profile.eval((u[n - 1] / norm).clamp(-1.0, 1.0))
    }

    /// Radius of curvature of the meridian: h̄ - t h̄' + (1-t²) h̄''.
    pub fn meridian_curvature(&self, t: f64) -> f64 {
        meridian_curvature(&self.profile, t)
    }

    pub fn volume(&self) -> Result<f64> {
        meridian_volume(&self.profile, POLYGON_DIRECTIONS)
    }

    pub fn polar_volume(&self) -> Result<f64> {
        polar_volume_zonal(&self.profile, 512)
    }

    pub fn diameter(&self) -> f64 {
        (0..=2048)
            .map(|j| {
                let t = (PI * j as f64 / 2048.0).cos();
                self.profile.eval(t) + self.profile.eval(-t)
            })
            .fold(0.0, f64::max)
    }

    /// First-order area measure density □_n h̄.
    pub fn area_measure_first(&self) -> Result<ZonalFunction<f64>> {
        let s = box_operator(&self.profile);
        let (min, _) = s.min_on_grid(4096);
        if min < -1e-6 {
            return Err(Error::NotSupportFunction(-min));
        }
        Ok(s)
    }

    /// Density of S_{n-1}: (h̄ - t h̄' + (1-t²) h̄'') (h̄ - t h̄')^{n-2}, expanded exactly.
    pub fn area_measure_top(&self) -> ZonalFunction<f64> {
        let n = self.n();
        let k = self.profile.degree();
        let deg = (n - 1) * k;
        let f = |t: f64| {
            let (h, d1, d2) = self.profile.eval_derivs(t);
            let r1 = h - t * d1 + (1.0 - t * t) * d2;
            let r2 = h - t * d1;
            r1 * r2.powi(n as i32 - 2)
        };
        expand_zonal_with(f, n, deg, deg + 8)
    }

    /// Area of the projection onto span{a, b} (orthonormal), from the planar support function.
    pub fn planar_projection_area(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let area = |m: usize| {
            let h: Vec<f64> = (0..m)
                .map(|j| {
                    let phi = 2.0 * PI * j as f64 / m as f64;
                    self.support(&(a * phi.cos() + b * phi.sin()))
                })
                .collect();
            circumscribed_polygon_area(&h)
        };
        let coarse = area(POLYGON_DIRECTIONS / 2);
        let fine = area(POLYGON_DIRECTIONS);
        (4.0 * fine - coarse) / 3.0
    }
}

pub fn meridian_curvature(profile: &ZonalFunction<f64>, t: f64) -> f64 {
    let (h, d1, d2) = profile.eval_derivs(t);
    h - t * d1 + (1.0 - t * t) * d2
}

/// Vertices of consecutive support lines for equally spaced directions φ_j = 2πj/m.
fn circumscribed_polygon(h: &[f64]) -> Vec<(f64, f64)> {
    let m = h.len();
    let dphi = 2.0 * PI / m as f64;
    (0..m)
        .map(|j| {
            let k = (j + 1) % m;
            let (p0, p1) = (j as f64 * dphi, (j + 1) as f64 * dphi);
            // Solve x cos φ + y sin φ = h for both lines.
            let det = p0.cos() * p1.sin() - p0.sin() * p1.cos();
            let x = (h[j] * p1.sin() - h[k] * p0.sin()) / det;
            let y = (p0.cos() * h[k] - p1.cos() * h[j]) / det;
            (x, y)
        })
        .collect()
}

fn circumscribed_polygon_area(h: &[f64]) -> f64 {
    let v = circumscribed_polygon(h);
    let m = v.len();
    0.5 * (0..m)
        .map(|j| {
            let (a, b) = (v[j], v[(j + 1) % m]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<f64>()
        .abs()
}

/// Volume of the body of revolution with meridian support H(θ) = h̄(cos θ).
///
/// Integrates ω_{n-1} r^{n-2} over the circumscribed half-meridian polygon exactly,
/// then extrapolates in the number of directions.
pub fn meridian_volume(profile: &ZonalFunction<f64>, m: usize) -> Result<f64> {
    let n = profile.n;
    let vol = |m: usize| {
        // Directions (sin θ, cos θ), θ = πj/m; polygon from the top axis point to the bottom one.
        let h: Vec<f64> = (0..=m).map(|j| profile.eval((PI * j as f64 / m as f64).cos())).collect();
        let mut pts = vec![(0.0, h[0])];
        for j in 0..m {
            let (t0, t1) = (PI * j as f64 / m as f64, PI * (j + 1) as f64 / m as f64);
            let det = t0.sin() * t1.cos() - t0.cos() * t1.sin();
            let r = (h[j] * t1.cos() - h[j + 1] * t0.cos()) / det;
            let z = (t0.sin() * h[j + 1] - t1.sin() * h[j]) / det;
            pts.push((r, z));
        }
        pts.push((0.0, -h[m]));
        // ∮ F dz with F = ω_{n-1} r^{n-1}/(n-1); the axis segment contributes nothing.
        let p = (n - 1) as i32;
        let mut total = 0.0;
        for w in pts.windows(2) {
            let ((r0, z0), (r1, z1)) = (w[0], w[1]);
            let dr = r1 - r0;
            let seg = if dr.abs() < 1e-14 {
                r0.powi(p)
            } else {
                (r1.powi(p + 1) - r0.powi(p + 1)) / ((p + 1) as f64 * dr)
            };
            total += (z1 - z0) * seg;
        }
        sphere_area(n - 1) / (n - 1) as f64 * total.abs()
    };
    let coarse = vol(m / 2);
    let fine = vol(m);
    let v = (4.0 * fine - coarse) / 3.0;
    if !v.is_finite() {
        return Err(Error::Degenerate("meridian polygon".into()));
    }
    Ok(v)
}

/// (1/n) ω_{n-1} ∫_0^π h̄(cos θ)^{-n} sin^{n-2} θ dθ.
pub fn polar_volume_zonal(profile: &ZonalFunction<f64>, panels: usize) -> Result<f64> {
    let n = profile.n;
    let bad = std::cell::Cell::new(None);
    let integral = composite(0.0, PI, panels, 8, |th| {
        let h = profile.eval(th.cos());
        if h <= 0.0 {
            bad.set(Some(h));
            return 0.0;
        }
        h.powi(-(n as i32)) * th.sin().powi(n as i32 - 2)
    });
    if let Some(h) = bad.get() {
        return Err(Error::OriginNotInterior(h));
    }
    Ok(sphere_area(n - 1) / n as f64 * integral)
}

/// (1/n) Σ_j w_j h(u_j)^{-n}.
pub fn polar_volume(field: &SupportField) -> Result<f64> {
    let n = field.grid.n;
    let mut total = 0.0;
    for (h, w) in field.values.iter().zip(&field.grid.weights) {
        if *h <= 0.0 {
            return Err(Error::OriginNotInterior(*h));
        }
        total += w * h.powi(-(n as i32));
    }
    Ok(total / n as f64)
}

/// (1/n) Σ_j w_j ρ(u_j)^n for the radial function of ∩_j {x : ⟨x,u_j⟩ ≤ h(u_j)}.
pub fn volume_from_field(field: &SupportField) -> Result<f64> {
    let n = field.grid.n;
    let nodes = &field.grid.nodes;
    let mut total = 0.0;
    for (u, w) in nodes.iter().zip(&field.grid.weights) {
        let mut rho = f64::INFINITY;
        for (v, h) in nodes.iter().zip(&field.values) {
            let c = u.dot(v);
            if c > 1e-12 {
                rho = rho.min(h / c);
            }
        }
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::OriginNotInterior(rho));
        }
        total += w * rho.powi(n as i32);
    }
    Ok(total / n as f64)
}

/// (1/κ_n) Σ_j w_j h(u_j) u_j.
pub fn steiner_point_field(field: &SupportField) -> DVector<f64> {
    let n = field.grid.n;
    let mut s = DVector::zeros(n);
    for ((h, w), u) in field.values.iter().zip(&field.grid.weights).zip(&field.grid.nodes) {
        s += u * (h * w);
    }
    s / unit_ball_volume(n)
}

/// LP re-support test for a zonal profile on the meridian circle.
///
/// The halfplanes {⟨x,u_j⟩ ≤ H_j} with H = h̄ - c_1 t are intersected by polar
/// duality (convex hull of u_j / H_j); each constraint must be tight.
pub fn is_support_function_zonal(profile: &ZonalFunction<f64>) -> Validity {
    is_support_function_zonal_with(profile, MERIDIAN_DIRECTIONS)
}

pub fn is_support_function_zonal_with(profile: &ZonalFunction<f64>, m: usize) -> Validity {
    let c1 = profile.coeff(1);
    let half: Vec<f64> = (0..=m / 2)
        .map(|j| {
            let t = (2.0 * PI * j as f64 / m as f64).cos();
            profile.eval(t) - c1 * t
        })
        .collect();
    let h: Vec<f64> = (0..m).map(|j| half[if j <= m / 2 { j } else { m - j }]).collect();
    planar_support_validity(&h)
}

/// Tightness test for planar support values at φ_j = 2πj/m.
pub(crate) fn planar_support_validity(h: &[f64]) -> Validity {
    let m = h.len();
    let scale = h.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    if let Some(&bad) = h.iter().find(|&&v| v <= 0.0) {
        return Validity { valid: false, violation: (scale - bad) / scale + 1.0 };
    }
    let dirs: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let p = 2.0 * PI * j as f64 / m as f64;
            (p.cos(), p.sin())
        })
        .collect();
    let pts: Vec<(f64, f64)> = dirs.iter().zip(h).map(|(d, &v)| (d.0 / v, d.1 / v)).collect();
    let hull = convex_hull(&pts);
    let angles: Vec<f64> = hull.iter().map(|p| p.1.atan2(p.0)).collect();
    let k = hull.len();
    let mut worst: f64 = 0.0;
    for (j, d) in dirs.iter().enumerate() {
        let phi = d.1.atan2(d.0);
        // Hull vertices are sorted by angle; the bracketing edge ends at the first vertex at or past φ.
        let idx = angles.partition_point(|&a| a < phi);
        let e = (idx + k - 1) % k;
        let a = hull[e];
        let b = hull[(e + 1) % k];
        let (ex, ey) = (b.0 - a.0, b.1 - a.1);
        let num = ex * a.1 - ey * a.0;
        let den = ex * d.1 - ey * d.0;
        let rho = num / den;
        let recomputed = 1.0 / rho;
        worst = worst.max((h[j] - recomputed) / scale);
    }
    Validity { valid: worst <= VALIDITY_TOL, violation: worst.max(0.0) }
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p: Vec<(f64, f64)> = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // Sort by angle so edges can be located by angular search.
    lower.sort_by(|a, b| a.1.atan2(a.0).total_cmp(&b.1.atan2(b.0)));
    lower
}

/// LP re-support test for a field on a sphere grid: each sampled value must equal
/// the support function of the halfspace intersection it defines.
pub fn is_support_function_field(field: &SupportField) -> Validity {
    let scale = field.values.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let cols: Vec<DVector<f64>> = field.grid.nodes.clone();
    let mut worst: f64 = 0.0;
    for (j, u) in cols.iter().enumerate() {
        match min_cost_combination(&cols, &field.values, u, j) {
            Some(v) => worst = worst.max((field.values[j] - v) / scale),
            None => return Validity { valid: false, violation: f64::INFINITY },
        }
    }
    Validity { valid: worst <= VALIDITY_TOL, violation: worst.max(0.0) }
}

impl SupportField {
    pub fn constant(grid: &Arc<SphereGrid>, value: f64) -> Self {
        SupportField { grid: Arc::clone(grid), values: vec![value; grid.len()], valid: Some(true) }
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn scaled(&self, s: f64) -> Self {
        SupportField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * s).collect(),
            valid: if s >= 0.0 { self.valid } else { None },
        }
    }

    pub fn add(&self, other: &SupportField) -> Self {
        SupportField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            valid: match (self.valid, other.valid) {
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
        }
    }

    pub fn validate(mut self) -> Self {
        self.valid = Some(is_support_function_field(&self).valid);
        self
    }

    /// Relative sup-distance to the nearest constant after removing the Steiner point:
    /// (max - min)/(max + min).
    pub fn distance_to_ball(&self) -> f64 {
        let s = steiner_point_field(self);
        let centered: Vec<f64> = self.values.iter().zip(&self.grid.nodes).map(|(h, u)| h - s.dot(u)).collect();
        let max = centered.iter().cloned().fold(f64::MIN, f64::max);
        let min = centered.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / (max + min)
    }
}

/// Relative sup-distance of a zonal profile to the nearest constant.
pub fn distance_to_ball_zonal(profile: &ZonalFunction<f64>) -> f64 {
    let centered = profile.with_coeff(1, 0.0);
    let mut max = f64::MIN;
    let mut min = f64::MAX;
    for j in 0..=2048 {
        let v = centered.eval((PI * j as f64 / 2048.0).cos());
        max = max.max(v);
        min = min.min(v);
    }
    (max - min) / (max + min)
}
