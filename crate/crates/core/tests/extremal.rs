use crofton::bodies::{ConvexBody, RevolutionBody};
use crofton::extremal::*;
use crofton::harmonic::{ZonalFunction, ZonalMeasure};
use crofton::minkval::{normalization_radius, projection_body_spec, ApplyParams, ValuationSpec};
use crofton::quermass::McParams;
use crofton::sphquad::unit_ball_volume;
use nalgebra::{DMatrix, DVector};

fn params(n: usize, samples: usize) -> ChainParams {
    ChainParams::new(n, 12, 20, McParams { samples, seed: 3, stratified: true }, ApplyParams::default()).unwrap()
}

#[test]
fn ball_chain_is_an_equality() {
    for n in [3, 4] {
        let p = params(n, 2_000);
        let kn = unit_ball_volume(n).powi(n as i32);
        for i in 1..n {
            let spec = normalization_radius(&projection_body_spec(n, i).unwrap()).unwrap();
            let r = chain_report(&ConvexBody::ball(n, 1.0), &spec, &p).unwrap();
            for q in r.q {
                assert!((q - kn).abs() < 5e-3 * kn, "n={n} i={i}: {q} vs {kn}");
            }
            assert!(r.left_equal && r.right_equal && !r.violated());
        }
    }
}

#[test]
fn chain_orders_a_zonotope_and_skips_signed_specs() {
    let n = 3;
    let p = params(n, 20_000);
    let z = ConvexBody::zonotope(vec![
        DVector::from_vec(vec![1.0, 0.2, -0.3]),
        DVector::from_vec(vec![-0.4, 0.9, 0.1]),
        DVector::from_vec(vec![0.2, -0.5, 0.8]),
        DVector::from_vec(vec![0.6, 0.6, 0.6]),
    ]);
    let spec = normalization_radius(&projection_body_spec(n, 2).unwrap()).unwrap();
    let r = chain_report(&z, &spec, &p).unwrap();
    assert!(!r.violated(), "{r:?}");
    // For i = n-1 the middle and right quantities are the same integral of shadow areas.
    assert!(r.right_equal && r.q[0] > r.q[1], "{r:?}");
    let spec1 = normalization_radius(&projection_body_spec(n, 1).unwrap()).unwrap();
    let r1 = chain_report(&z, &spec1, &p).unwrap();
    assert!(!r1.violated() && r1.q[1] > r1.q[2], "{r1:?}");
    let signed = ValuationSpec::crofton(n, 2, vec![(0.0, 1.0), (0.9, -0.2)]).unwrap();
    let r = chain_report(&z, &normalization_radius(&signed).unwrap(), &p).unwrap();
    assert_eq!(r.right, Verdict::Skipped);
    assert!(r.notice.is_some());
}

#[test]
fn ball_calibrated_left_and_scale_invariance() {
    let n = 3;
    let p = params(n, 20_000);
    let spec = normalization_radius(&projection_body_spec(n, 2).unwrap()).unwrap();
    let b = ball_calibrated_left(&ConvexBody::ball(n, 1.0), &spec, &p).unwrap();
    assert!(b.equality && b.image_distance < 1e-10);
    let cube = ConvexBody::cube(n, 1.0);
    let c = ball_calibrated_left(&cube, &spec, &p).unwrap();
    assert_eq!(c.verdict, Verdict::Ordered);
    assert!(!c.equality && c.image_distance > 1e-2);
    let c2 = ball_calibrated_left(&ConvexBody::cube(n, 2.0), &spec, &p).unwrap();
    assert!((c.q - c2.q).abs() < 3.0 * (c.std_error.powi(2) + c2.std_error.powi(2)).sqrt() + 1e-9 * c.q);
}

#[test]
fn lutwak_polar_width_cases() {
    let n = 3;
    let p = params(n, 20_000);
    let b = lutwak_polar_width(&ConvexBody::ball(n, 1.0), &p).unwrap();
    assert!((b.value - b.bound).abs() < 1e-12 * b.bound && b.equality);
    let cube = lutwak_polar_width(&ConvexBody::cube(n, 1.0), &p).unwrap();
    assert!(cube.value > cube.bound && !cube.equality);
    let e = ConvexBody::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 0.5])));
    let r = lutwak_polar_width(&e, &p).unwrap();
    assert!(r.value > r.bound && r.verdict == Verdict::Ordered);
}

#[test]
fn volume_products_at_the_ball() {
    let n = 3;
    let p = params(n, 1_000);
    let spec = normalization_radius(&projection_body_spec(n, 2).unwrap()).unwrap().rescaled(unit_ball_volume(2));
    let (v, _) = volume_product(&spec.spec, &ConvexBody::ball(n, 1.0), true, &p).unwrap();
    let expected = unit_ball_volume(3).powi(3) / unit_ball_volume(2).powi(3);
    assert!((v - expected).abs() < 1e-8 * expected, "{v} vs {expected}");
    let j = ValuationSpec::steiner_j(n);
    let cube = ConvexBody::cube(n, 1.0);
    let (s, _) = volume_product(&j, &cube, true, &p).unwrap();
    assert!((s - 8.0 * 4.0 / 3.0).abs() < 0.05 * s, "{s}");
    let moved = cube.translated(&DVector::from_vec(vec![0.3, -0.2, 0.1])).unwrap();
    let (t, _) = volume_product(&j, &moved, true, &p).unwrap();
    assert!((s - t).abs() < 1e-9);
}

#[test]
fn psi_lambda_ball_radius_and_domain() {
    let n = 3;
    let f1 = ZonalFunction::constant(n, 1.0 / (n as f64 * unit_ball_volume(n)));
    let s = psi_lambda(0.3, &f1).unwrap();
    let r1 = ValuationSpec::generating(f1.clone(), 1).unwrap().ball_radius();
    assert!((s.ball_radius() - (0.3 * r1 + 0.7)).abs() < 1e-12);
    assert!(s.ball_radius() >= r1.min(1.0));
    assert!(psi_lambda(0.0, &f1).is_err() && psi_lambda(1.0, &f1).is_err());
    assert!(psi_lambda(0.5, &ZonalFunction::new(n, vec![0.0, 1.0])).is_err());
}

#[test]
fn validity_projection_lands_on_support_functions() {
    let (lam, y) = project_to_valid(3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
    assert!(lam < 1.0 && lam > 0.0);
    let mut c = vec![1.0, 0.0];
    c.extend(y);
    assert!(RevolutionBody::new(ZonalFunction::new(3, c)).is_ok());
    let (lam, _) = project_to_valid(3, &[0.1]);
    assert_eq!(lam, 1.0);
}

#[test]
fn optimizer_trace_is_monotone_and_deterministic() {
    let spec = projection_body_spec(3, 2).unwrap();
    let cfg = OptimizerConfig { degree: 4, multistarts: 2, budget: 120, seed: 11, ..Default::default() };
    let a = optimize_revolution(&spec, &cfg).unwrap();
    let b = optimize_revolution(&spec, &cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.history.windows(2).all(|w| w[1].objective >= w[0].objective));
    assert!(a.best_objective <= a.ball_objective + 3.0 * (a.best_error + a.ball_error) + 1e-6 * a.ball_objective);
    assert!(a.budget_exhausted);
}

#[test]
fn cap_construction_margin_and_classification() {
    let r = cap_construction(3, 2.0, 0.05, 40).unwrap();
    assert!(r.min_one_minus_h < 0.0);
    assert!(r.margin >= 0.25, "{}", r.margin);
    assert_eq!(r.classification.class, crofton::minkval::Degree1Class::Neither);
    assert!(cap_construction(3, 0.5, 0.05, 20).is_err());
}

#[test]
fn minimizer_check() {
    let n = 3;
    let bodies = vec![
        RevolutionBody::new(ZonalFunction::constant(n, 1.0)).unwrap(),
        RevolutionBody::new(ZonalFunction::new(n, vec![1.0, 0.0, 0.3])).unwrap(),
    ];
    let rows = revolution_minimizer_check(&ZonalMeasure::uniform(n), &bodies).unwrap();
    assert!(rows[0].equality);
    assert!(rows[1].ratio > rows[1].ball_ratio && !rows[1].equality);
    let id = revolution_minimizer_check(&ZonalMeasure::from_atoms(n, vec![(1.0, 1.0)]), &bodies).unwrap();
    assert!(id.iter().all(|r| (r.ratio - 1.0).abs() < 1e-9));
    let bad = ZonalMeasure::from_atoms(n, vec![(1.0, 1.0), (0.0, -0.1)]);
    assert!(matches!(revolution_minimizer_check(&bad, &bodies), Err(crofton::Error::Refused(_))));
}

#[test]
fn shared_evaluation_matches_separate_routes() {
    let n = 3;
    let p = params(n, 5_000);
    let z = ConvexBody::zonotope(vec![
        DVector::from_vec(vec![1.0, 0.3, 0.0]),
        DVector::from_vec(vec![0.0, 0.8, -0.4]),
        DVector::from_vec(vec![0.3, 0.1, 0.9]),
    ]);
    // Radius 2κ_{n-1}, so the middle quantity goes through a rescaling.
    let spec = normalization_radius(&projection_body_spec(n, 1).unwrap().scaled(2.0)).unwrap();
    let pair = kubota_for_degree(&z, 1, &p.mc).unwrap();
    let (chain, left) = chain_and_left(&z, &spec, &p, &pair).unwrap();
    let separate = chain_report(&z, &spec, &p).unwrap();
    for j in 0..3 {
        assert!((chain.q[j] - separate.q[j]).abs() < 1e-10 * separate.q[j], "{chain:?} vs {separate:?}");
    }
    let l = left_from_parts(&z, &spec, &p, pair.w.value, pair.w.std_error, n).unwrap();
    assert_eq!(left, l);
}
