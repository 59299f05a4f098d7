use crofton::harmonic::ZonalFunction;
use crofton::jacobi::composite;
use crofton::sphquad::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn ball_volumes() {
    assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
    assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    for n in 2..8 {
        assert!((sphere_area(n) - n as f64 * unit_ball_volume(n)).abs() < 1e-13);
    }
}

#[test]
fn grids_integrate_constants_and_second_moments() {
    let g = sphere_grid(3, 32, GridKind::ProductRule, 0).unwrap();
    assert!((g.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
    let e = pole(3);
    let m2 = g.integrate(|u| u.dot(&e).powi(2));
    // Cylinder coordinates: the t-marginal of surface measure on S² is 2π dt.
    let oracle = composite(-1.0, 1.0, 8, 8, |t| 2.0 * PI * t * t);
    assert!((m2 - oracle).abs() < 1e-12 && (oracle - 4.0 * PI / 3.0).abs() < 1e-12);
    for n in [4, 5] {
        for kind in [GridKind::ProductRule, GridKind::MonteCarlo] {
            let g = sphere_grid(n, 12, kind, 7).unwrap();
            let total: f64 = g.weights.iter().sum();
            assert!((total - sphere_area(n)).abs() < 1e-9 * sphere_area(n), "{n} {kind:?}");
        }
    }
}

#[test]
fn zonal_integration_anchors() {
    assert!((integrate_zonal(|_| 1.0, 3, 8).unwrap() - 4.0 * PI).abs() < 1e-13);
    assert!((integrate_zonal(|t| t * t, 3, 8).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
    let p2 = ZonalFunction::basis(3, 2);
    assert!(integrate_zonal(|t| p2.eval(t), 3, 8).unwrap().abs() < 1e-13);
    assert!(matches!(integrate_zonal(|t| if t > 0.5 { f64::INFINITY } else { 1.0 }, 3, 9), Err(crofton::Error::NonIntegrable(_))));
}

#[test]
fn rotations_map_the_pole() {
    let mut rng = substream(1, 0);
    for n in 3..=5 {
        assert!((rotation_to(&pole(n)).unwrap() - DMatrix::identity(n, n)).norm() < 1e-14);
        for _ in 0..100 {
            let u = random_unit(n, &mut rng);
            let r = rotation_to(&u).unwrap();
            assert!((&r * pole(n) - &u).norm() < 1e-13);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
            assert!((r.transpose() * &r - DMatrix::identity(n, n)).norm() < 1e-12);
        }
    }
    assert!(matches!(rotation_to(&DVector::from_vec(vec![1.0, 1.0, 0.0])), Err(crofton::Error::NotUnit(_))));
}

#[test]
fn grassmann_sample_moments_and_determinism() {
    let (n, i) = (4, 2);
    let a = grassmann_sample(n, i, 20_000, 5).unwrap();
    let b = grassmann_sample(n, i, 20_000, 5).unwrap();
    assert_eq!(a, b);
    let vals: Vec<f64> = a.iter().map(|f| f.orbit_parameter().powi(2)).collect();
    let e = Estimate::plain(&vals);
    assert!((e.mean - i as f64 / n as f64).abs() < 3.0 * e.std_error + 1e-12, "{e:?}");
}

#[test]
fn orbit_parameter_extremes_and_invariance() {
    let n = 4;
    let contains = GrassmannFrame::new(DMatrix::from_columns(&[pole(n), DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])])).unwrap();
    assert!((orbit_parameter(&contains) - 1.0).abs() < 1e-15);
    let orth = GrassmannFrame::new(DMatrix::from_columns(&[
        DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]),
        DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]),
    ]))
    .unwrap();
    assert!(orbit_parameter(&orth).abs() < 1e-15);
    let mut rng = substream(2, 0);
    let f = haar_frame(n, 2, &mut rng);
    for _ in 0..20 {
        // A rotation fixing ē: Haar orthogonal block on the first n-1 coordinates.
        let q = haar_frame(n - 1, n - 1, &mut rng).basis;
        let mut r = DMatrix::identity(n, n);
        r.view_mut((0, 0), (n - 1, n - 1)).copy_from(&q);
        assert!((orbit_parameter(&f.rotated(&r)) - orbit_parameter(&f)).abs() < 1e-12);
    }
}

/// Distance between subspaces as the Frobenius norm of the projector difference.
fn subspace_distance(a: &GrassmannFrame, b: &GrassmannFrame) -> f64 {
    (a.projector() - b.projector()).norm()
}

#[test]
fn equal_orbit_parameters_are_related_by_a_rotation_fixing_the_pole() {
    let n = 4;
    let mut rng = substream(3, 0);
    let e = pole(n);
    for _ in 0..10 {
        let f = haar_frame(n, 2, &mut rng);
        let sigma = f.orbit_parameter();
        // Canonical representative: σ ē + s w along with a complement orthogonal to ē.
        let w = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let rest = DMatrix::from_columns(&[DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0])]);
        let g = orbit_frame(sigma, &w, &rest);
        assert!((g.orbit_parameter() - sigma).abs() < 1e-12);
        // Build ρ fixing ē: send the ē^⊥-part of F's pole projection to w, and F's complement to `rest`.
        let p = f.projector() * &e;
        let mut a = p.clone() - &e * p.dot(&e);
        let na = a.norm();
        a /= na;
        let ph = p.normalize();
        let b0 = f.basis.column(0).into_owned();
        let b1 = f.basis.column(1).into_owned();
        let b = if (&b0 - &ph * ph.dot(&b0)).norm() > (&b1 - &ph * ph.dot(&b1)).norm() { b0 } else { b1 };
        let c = (&b - &ph * ph.dot(&b)).normalize();
        let mut src = vec![a.clone(), c.clone()];
        let mut dst = vec![w.clone(), rest.column(0).into_owned()];
        let g_c = g.projector() * &dst[1];
        assert!((g_c - &dst[1]).norm() < 1e-12);
        let third = {
            let mut v = DVector::from_vec(vec![0.3, 0.5, 0.7, 0.0]);
            for s in &src {
                v -= s * s.dot(&v);
            }
            v.normalize()
        };
        src.push(third);
        dst.push(DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]));
        src.push(e.clone());
        dst.push(e.clone());
        let s = DMatrix::from_columns(&src);
        let d = DMatrix::from_columns(&dst);
        let mut rho = &d * s.transpose();
        if rho.determinant() < 0.0 {
            let mut d2 = d.clone();
            d2.column_mut(2).neg_mut();
            rho = &d2 * s.transpose();
        }
        assert!((&rho * &e - &e).norm() < 1e-12);
        let d = subspace_distance(&f.rotated(&rho), &g);
        assert!(d < 1e-8, "{d}");
    }
}

#[test]
fn different_seeds_agree_within_three_errors() {
    let vals = |seed| {
        let f = grassmann_sample(3, 1, 5_000, seed).unwrap();
        Estimate::plain(&f.iter().map(|f| f.orbit_parameter()).collect::<Vec<_>>())
    };
    let (a, b) = (vals(1), vals(2));
    assert!((a.mean - b.mean).abs() < 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed), ..ProptestConfig::default() })]

    #[test]
    fn grid_and_zonal_integration_agree(
        n in 3usize..=5,
        c in prop::collection::vec(-1.0..1.0f64, 7),
        w in prop::collection::vec(-1.0..1.0f64, 5),
    ) {
        let w = DVector::from_iterator(n, w.into_iter().take(n));
        prop_assume!(w.norm() > 0.1);
        let w = w.normalize();
        let f = ZonalFunction::new(n, c);
        let exact = integrate_zonal(|t| f.eval(t), n, 16).unwrap();
        let g = sphere_grid(n, 16, GridKind::ProductRule, 0).unwrap();
        let approx = g.integrate(|u| f.eval(u.dot(&w).clamp(-1.0, 1.0)));
        prop_assert!((exact - approx).abs() < 1e-9 * (1.0 + exact.abs()), "{} vs {}", exact, approx);
    }

    #[test]
    fn frames_are_orthonormal(n in 3usize..=5, seed in 0u64..1000) {
        let mut rng = substream(seed, 9);
        for i in 1..n {
            let f = haar_frame(n, i, &mut rng);
            let g = f.basis.transpose() * &f.basis;
            prop_assert!((g - DMatrix::identity(i, i)).norm() < 1e-12);
            let t = f.orbit_parameter();
            prop_assert!((0.0..=1.0).contains(&t));
        }
    }
}
