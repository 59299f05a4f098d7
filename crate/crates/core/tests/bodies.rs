use approx::assert_relative_eq;
use crofton::bodies::*;
use crofton::harmonic::{expand_zonal, ZonalFunction};
use crofton::sphquad::{grassmann_sample, sphere_grid, unit_ball_volume, GrassmannFrame, GridKind};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::Arc;

fn frame(cols: &[&[f64]]) -> GrassmannFrame {
    let n = cols[0].len();
    GrassmannFrame::new(DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])).unwrap()
}

/// Support profile of the ellipsoid with radial semi-axis a and axial semi-axis b.
fn spheroid(n: usize, a: f64, b: f64, k: usize) -> ZonalFunction<f64> {
    expand_zonal(|t| (a * a * (1.0 - t * t) + b * b * t * t).sqrt(), n, k)
}

#[test]
fn support_examples() {
    let u = DVector::from_vec(vec![1.0, 1.0, 1.0]) / 3f64.sqrt();
    assert_relative_eq!(ConvexBody::cube(3, 1.0).support(&u), 3f64.sqrt(), epsilon = 1e-14);
    assert_relative_eq!(ConvexBody::ball(3, 1.0).support(&u), 1.0);
    let e = ConvexBody::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0])));
    assert_relative_eq!(e.support(&DVector::from_vec(vec![1.0, 0.0, 0.0])), 2.0);
}

#[test]
fn projection_examples() {
    let f12 = frame(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
    assert_relative_eq!(ConvexBody::ball(3, 2.0).projection_function(&f12).unwrap(), 4.0 * PI);
    assert_relative_eq!(ConvexBody::cube(3, 1.0).projection_function(&f12).unwrap(), 4.0, epsilon = 1e-12);
    let e = ConvexBody::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0])));
    let f23 = frame(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
    assert_relative_eq!(e.projection_function(&f23).unwrap(), PI, epsilon = 1e-12);
}

fn hull_area(mut p: Vec<(f64, f64)>) -> f64 {
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    let m = hull.len();
    0.5 * (0..m).map(|j| hull[j].0 * hull[(j + 1) % m].1 - hull[(j + 1) % m].0 * hull[j].1).sum::<f64>()
}

#[test]
fn ellipsoid_shadow_matches_hull_of_boundary_samples() {
    // Independent oracle: area of the convex hull of projected boundary points.
    let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.1, 1.0, 0.2, 0.0, 0.4, 0.7]);
    let e = ConvexBody::ellipsoid(a.clone());
    let f = grassmann_sample(3, 2, 3, 11).unwrap();
    for fr in &f {
        let mut pts = Vec::new();
        for p in 0..200 {
            for q in 0..100 {
                let (th, ph) = (PI * (q as f64 + 0.5) / 100.0, 2.0 * PI * p as f64 / 200.0);
                let x = &a * DVector::from_vec(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                let y = fr.basis.transpose() * x;
                pts.push((y[0], y[1]));
            }
        }
        let area = hull_area(pts);
        let exact = e.projection_function(fr).unwrap();
        assert!((area - exact).abs() / exact < 1e-3, "{area} vs {exact}");
    }
}

#[test]
fn volumes() {
    assert_relative_eq!(ConvexBody::cube(3, 1.0).volume().unwrap(), 8.0, epsilon = 1e-12);
    let e = ConvexBody::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0])));
    assert_relative_eq!(e.volume().unwrap(), 8.0 * PI / 3.0, epsilon = 1e-12);
    for n in 3..=5 {
        let ball = RevolutionBody::new(ZonalFunction::constant(n, 1.0)).unwrap();
        assert!((ball.volume().unwrap() / unit_ball_volume(n) - 1.0).abs() < 1e-6);
        let s = RevolutionBody::new(spheroid(n, 1.3, 0.8, 24)).unwrap();
        let exact = unit_ball_volume(n) * 1.3f64.powi(n as i32 - 1) * 0.8;
        assert!((s.volume().unwrap() / exact - 1.0).abs() < 1e-5, "n={n}");
    }
}

#[test]
fn radial_volume_of_sampled_field_agrees() {
    let grid = Arc::new(sphere_grid(3, 24, GridKind::ProductRule, 0).unwrap());
    let f = ConvexBody::ball(3, 1.0).support_field(&grid);
    let v = volume_from_field(&f).unwrap();
    assert!((v / unit_ball_volume(3) - 1.0).abs() < 5e-3, "{v}");
}

#[test]
fn polar_volumes() {
    let grid = Arc::new(sphere_grid(3, 64, GridKind::ProductRule, 0).unwrap());
    let e = ConvexBody::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 0.5])));
    let pv = polar_volume(&e.support_field(&grid)).unwrap();
    assert!((pv - unit_ball_volume(3)).abs() < 1e-3);
    let r = polar_volume(&ConvexBody::ball(3, 2.0).support_field(&grid)).unwrap();
    assert_relative_eq!(r, unit_ball_volume(3) / 8.0, epsilon = 1e-10);
    let fine = Arc::new(sphere_grid(3, 256, GridKind::ProductRule, 0).unwrap());
    let cube = polar_volume(&ConvexBody::cube(3, 1.0).support_field(&fine)).unwrap();
    assert!((cube - 4.0 / 3.0).abs() < 2e-3, "{cube}");
    for n in 3..=5 {
        let s = spheroid(n, 1.3, 0.8, 24);
        let exact = unit_ball_volume(n) / (1.3f64.powi(n as i32 - 1) * 0.8);
        assert!((polar_volume_zonal(&s, 512).unwrap() / exact - 1.0).abs() < 1e-6);
    }
    let bad = SupportField { grid: grid.clone(), values: vec![-1.0; grid.len()], valid: None };
    assert!(polar_volume(&bad).is_err());
}

#[test]
fn steiner_points() {
    let grid = Arc::new(sphere_grid(3, 16, GridKind::ProductRule, 0).unwrap());
    let c = DVector::from_vec(vec![0.3, -0.2, 0.5]);
    let b = ConvexBody::ball(3, 1.0).translated(&c).unwrap();
    assert_relative_eq!((b.steiner_point() - &c).norm(), 0.0, epsilon = 1e-14);
    let s = steiner_point_field(&b.support_field(&grid));
    assert!((s - &c).norm() < 1e-10);
    let z = ConvexBody::zonotope(vec![DVector::from_vec(vec![1.0, 0.2, 0.0]), DVector::from_vec(vec![0.0, 1.0, 0.3])]);
    assert_eq!(z.steiner_point().norm(), 0.0);
    assert!(steiner_point_field(&z.support_field(&grid)).norm() < 1e-2);
}

#[test]
fn zonotope_area_atoms() {
    let atoms = ConvexBody::cube(3, 1.0).area_measure_top().unwrap();
    assert_eq!(atoms.len(), 6);
    for (v, w) in &atoms {
        assert_relative_eq!(*w, 4.0, epsilon = 1e-12);
        assert_relative_eq!(v.amax(), 1.0, epsilon = 1e-12);
    }
    let z = ConvexBody::zonotope(vec![
        DVector::from_vec(vec![1.0, 0.2, 0.1]),
        DVector::from_vec(vec![-0.3, 0.8, 0.0]),
        DVector::from_vec(vec![0.2, 0.1, 0.9]),
        DVector::from_vec(vec![0.5, -0.5, 0.4]),
    ]);
    let atoms = z.area_measure_top().unwrap();
    let closed: DVector<f64> = atoms.iter().fold(DVector::zeros(3), |acc, (v, w)| acc + v * *w);
    assert!(closed.norm() < 1e-12);
    // Cauchy's formula on a fixed direction.
    let u = DVector::from_vec(vec![0.3, -0.4, 0.866]).normalize();
    let shadow: f64 = 0.5 * atoms.iter().map(|(v, w)| w * u.dot(v).abs()).sum::<f64>();
    let r = crofton::sphquad::rotation_to(&u).unwrap();
    let f = GrassmannFrame::new(r.columns(0, 2).into_owned()).unwrap();
    assert_relative_eq!(z.projection_function(&f).unwrap(), shadow, epsilon = 1e-10);
}

#[test]
fn first_area_measure() {
    let ball = RevolutionBody::new(ZonalFunction::constant(3, 1.0)).unwrap();
    let s = ball.area_measure_first().unwrap();
    assert_relative_eq!(s.coeff(0), 1.0);
    let h = RevolutionBody::new(ZonalFunction::new(3, vec![1.0, 0.0, 0.3])).unwrap();
    let s = h.area_measure_first().unwrap();
    assert_relative_eq!(s.coeff(2), -0.6, epsilon = 1e-14);
    assert_eq!(s.coeff(1), 0.0);
}

#[test]
fn top_area_measure_of_revolution_bodies() {
    for n in 3..=5 {
        let ball = RevolutionBody::new(ZonalFunction::constant(n, 1.0)).unwrap();
        assert_relative_eq!(ball.area_measure_top().coeff(0), 1.0, epsilon = 1e-12);
    }
    // Spheroid surface area in R^3 in closed form.
    let (a, b) = (1.0f64, 0.6f64);
    let e = (1.0 - b * b / (a * a)).sqrt();
    let exact = 2.0 * PI * a * a * (1.0 + (1.0 - e * e) / e * e.atanh());
    let s = RevolutionBody::new(spheroid(3, a, b, 24)).unwrap().area_measure_top();
    assert!((s.sphere_integral() / exact - 1.0).abs() < 1e-6);
}

#[test]
fn lalpha_validity_examples() {
    let h = |a: f64| ZonalFunction::new(3, vec![1.0, 0.0, a]);
    assert!(is_support_function_zonal(&h(0.3)).valid);
    assert!(!is_support_function_zonal(&h(0.6)).valid);
    assert!(!is_support_function_zonal(&h(-0.45)).valid);
    assert!(is_support_function_zonal(&h(0.5)).valid);
    assert!(is_support_function_zonal(&h(-0.4)).valid);
}

#[test]
fn field_validity() {
    let grid = Arc::new(sphere_grid(3, 8, GridKind::ProductRule, 0).unwrap());
    let cube = ConvexBody::cube(3, 1.0).support_field(&grid);
    assert!(is_support_function_field(&cube).valid);
    let mut dented = cube.clone();
    dented.values[7] += 0.2;
    assert!(!is_support_function_field(&dented).valid);
}

#[test]
fn revolution_projection_routes() {
    let h = RevolutionBody::new(spheroid(4, 1.2, 0.7, 24)).unwrap();
    let k = ConvexBody::Revolution(h);
    // Plane containing the axis: an ellipse with semi-axes 1.2 and 0.7.
    let f = frame(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
    assert!((k.projection_function(&f).unwrap() / (PI * 1.2 * 0.7) - 1.0).abs() < 1e-5);
    let l = frame(&[&[0.0, 0.0, 0.0, 1.0]]);
    assert!((k.projection_function(&l).unwrap() - 1.4).abs() < 1e-6);
    let g = frame(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
    assert!(matches!(k.projection_function(&g), Err(crofton::Error::Capability(_))));
}

#[test]
fn diameters() {
    assert_relative_eq!(ConvexBody::cube(3, 1.0).diameter(), 2.0 * 3f64.sqrt(), epsilon = 1e-12);
    let e = ConvexBody::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0])));
    assert_relative_eq!(e.diameter(), 4.0, epsilon = 1e-12);
    let s = RevolutionBody::new(spheroid(3, 1.3, 0.8, 24)).unwrap();
    assert!((s.diameter() - 2.6).abs() < 1e-6);
}

mod properties {
    use super::*;
    use crofton::sphquad::{haar_frame, random_unit, substream};
    use proptest::prelude::*;
    use rand::Rng;

    fn rotation(n: usize, seed: u64) -> DMatrix<f64> {
        let q = haar_frame(n, n, &mut substream(seed, 3)).basis;
        if q.determinant() < 0.0 {
            let mut q = q;
            q.column_mut(0).neg_mut();
            q
        } else {
            q
        }
    }

    fn zonotope(n: usize, m: usize, seed: u64) -> ConvexBody {
        let mut rng = substream(seed, 4);
        ConvexBody::zonotope((0..m).map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 24, rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed), ..ProptestConfig::default() })]

        #[test]
        fn support_is_rotation_equivariant(seed in 0u64..10_000, n in 3usize..=5) {
            let rho = rotation(n, seed);
            let mut rng = substream(seed, 5);
            let bodies = [
                zonotope(n, 4, seed),
                ConvexBody::ellipsoid(DMatrix::from_fn(n, n, |r, c| if r == c { 2.0 } else { 0.0 } + rng.random_range(-0.3..0.3))),
                ConvexBody::ball(n, 1.7),
            ];
            for k in &bodies {
                let rk = k.linear_image(&rho).unwrap();
                for _ in 0..5 {
                    let u = random_unit(n, &mut rng);
                    prop_assert!((rk.support(&(&rho * &u)) - k.support(&u)).abs() < 1e-10);
                }
            }
            // Bodies of revolution only under rotations fixing the pole.
            let r = RevolutionBody::new(ZonalFunction::new(n, vec![1.0, 0.1, 0.15, 0.02])).unwrap();
            let q = rotation(n - 1, seed + 1);
            let mut fix = DMatrix::identity(n, n);
            fix.view_mut((0, 0), (n - 1, n - 1)).copy_from(&q);
            let u = random_unit(n, &mut rng);
            prop_assert!((r.support(&(&fix * &u)) - r.support(&u)).abs() < 1e-12);
        }

        #[test]
        fn zonotope_volume_matches_hit_or_miss(seed in 0u64..10_000) {
            let z = zonotope(3, 5, seed);
            let exact = z.volume().unwrap();
            let ConvexBody::Zonotope { generators, .. } = &z else { unreachable!() };
            let bound: Vec<f64> = (0..3).map(|j| generators.iter().map(|g| g[j].abs()).sum()).collect();
            // Exact H-representation: facet normals are cross products of generator pairs.
            let mut dirs = Vec::new();
            for a in 0..generators.len() {
                for b in a + 1..generators.len() {
                    let c = generators[a].cross(&generators[b]);
                    if c.norm() > 1e-12 {
                        dirs.push(c.normalize());
                    }
                }
            }
            let hs: Vec<f64> = dirs.iter().map(|u| generators.iter().map(|g| g.dot(u).abs()).sum()).collect();
            let mut rng = substream(seed, 6);
            let m = 4000;
            let hits = (0..m)
                .filter(|_| {
                    let x = DVector::from_fn(3, |j, _| rng.random_range(-bound[j]..bound[j]));
                    dirs.iter().zip(&hs).all(|(u, h)| u.dot(&x).abs() <= *h)
                })
                .count();
            let box_vol: f64 = bound.iter().map(|b| 2.0 * b).product();
            let p = hits as f64 / m as f64;
            let est = p * box_vol;
            let se = box_vol * (p * (1.0 - p) / m as f64).sqrt();
            prop_assert!((est - exact).abs() <= 3.0 * se, "{} vs {}", est, exact);
        }

        #[test]
        fn cauchy_cross_check(seed in 0u64..10_000, n in 3usize..=4) {
            let z = zonotope(n, 5, seed);
            let atoms = z.area_measure_top().unwrap();
            let mut rng = substream(seed, 7);
            for _ in 0..3 {
                let u = random_unit(n, &mut rng);
                let f = haar_frame(n, n, &mut rng).basis;
                // Orthonormal basis of u^⊥ from Gram–Schmidt against u.
                let mut cols: Vec<DVector<f64>> = Vec::new();
                for c in 0..n {
                    let mut v = f.column(c).into_owned();
                    v -= &u * u.dot(&v);
                    for w in &cols {
                        v -= w * w.dot(&v);
                    }
                    if v.norm() > 1e-6 && cols.len() < n - 1 {
                        cols.push(v.normalize());
                    }
                }
                let shadow = z.projection_function(&GrassmannFrame::new(DMatrix::from_columns(&cols)).unwrap()).unwrap();
                let cauchy: f64 = 0.5 * atoms.iter().map(|(v, w)| w * v.dot(&u).abs()).sum::<f64>();
                prop_assert!((shadow - cauchy).abs() < 1e-8 * shadow.max(1.0));
            }
        }

        #[test]
        fn santalo_products_stay_below_the_ball(seed in 0u64..10_000) {
            let z = zonotope(3, 5, seed);
            let grid = Arc::new(sphere_grid(3, 48, GridKind::ProductRule, 0).unwrap());
            let polar = polar_volume(&z.support_field(&grid)).unwrap();
            let product = polar * z.volume().unwrap();
            let kk = unit_ball_volume(3).powi(2);
            prop_assert!(product <= kk * 1.01, "{} vs {}", product, kk);
            let mut rng = substream(seed, 8);
            let a = DMatrix::from_fn(3, 3, |r, c| if r == c { 1.5 } else { 0.0 } + rng.random_range(-0.5..0.5));
            let e = ConvexBody::ellipsoid(a);
            let pe = polar_volume(&e.support_field(&grid)).unwrap() * e.volume().unwrap();
            prop_assert!(pe <= kk * 1.01 && pe >= kk * 0.97, "{}", pe);
        }
    }
}
