use crofton::bodies::{ConvexBody, RevolutionBody};
use crofton::harmonic::ZonalFunction;
use crofton::io::*;
use crofton::minkval::{projection_body_spec, ValuationSpec};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

#[test]
fn example_file_parses() {
    let text = "# two bodies\n[unit]\nvariant = ball\nn = 3\nradius = 1\ncenter = 0 0 0\n\n[box]\nvariant = zonotope\nn = 3\ngenerator = 1 0 0\ngenerator = 0 1 0\ngenerator = 0 0 1\n";
    let b = parse_bodies(text).unwrap();
    assert_eq!(b.len(), 2);
    assert_eq!(b[1].1.volume().unwrap(), 8.0);
    assert_eq!(parse_bodies(&write_bodies(&b)).unwrap(), b);
}

#[test]
fn malformed_inputs_report_lines() {
    let cases = [
        ("[a]\nvariant = ball\nn = 3\n", 1),
        ("[a]\nvariant = cone\nn = 3\n", 2),
        ("[a]\nvariant = ellipsoid\nn = 2\nmatrix = 1 0 0\n", 4),
        ("[a]\nvariant = revolution\nn = 3\ncoeffs = 1 0 0.9\n", 4),
        ("[a]\nvariant = ball\nn = 3\nradius = 1\n[a]\n", 5),
        ("[a]\nvariant ball\n", 2),
    ];
    for (text, line) in cases {
        match parse_bodies(text) {
            Err(crofton::Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    let bad_flag = "[p]\nvariant = crofton\nn = 3\ni = 2\nnonneg = true\natom = 0.5 -1\n";
    assert!(matches!(parse_specs(bad_flag), Err(crofton::Error::Parse { line: 5, .. })));
}

#[test]
fn spec_files_round_trip_with_nested_parts() {
    let f = ZonalFunction::new(3, vec![0.1, 0.0, 0.02]);
    let psi = ValuationSpec::combination(vec![
        (0.05, ValuationSpec::generating(f, 1).unwrap()),
        (0.95, ValuationSpec::steiner_j(3)),
    ])
    .unwrap();
    let specs = vec![("pi2".to_string(), projection_body_spec(3, 2).unwrap()), ("psi".to_string(), psi)];
    let text = write_specs(&specs);
    assert_eq!(parse_specs(&text).unwrap(), specs);
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, any::<f64>().prop_filter("finite", |x| x.is_finite())]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed), ..ProptestConfig::default() })]

    #[test]
    fn bodies_round_trip_bit_exactly(
        n in 3usize..=5,
        r in 1e-6..1e6f64,
        c in prop::collection::vec(real(), 5),
        m in prop::collection::vec(-2.0..2.0f64, 25),
        g in prop::collection::vec(-1.0..1.0f64, 30),
        a in -0.2..0.2f64,
    ) {
        let center = DVector::from_iterator(n, c.iter().copied().take(n));
        let mut matrix = DMatrix::from_iterator(n, n, m.iter().copied().take(n * n));
        matrix += DMatrix::identity(n, n) * 5.0;
        let generators = (0..6).map(|k| DVector::from_iterator(n, g[5 * k..5 * k + n].iter().copied())).collect();
        let bodies = vec![
            ("b".to_string(), ConvexBody::Ball { center: center.clone(), radius: r }),
            ("e".to_string(), ConvexBody::Ellipsoid { matrix, center: center.clone() }),
            ("z".to_string(), ConvexBody::Zonotope { generators, center }),
            ("r".to_string(), ConvexBody::Revolution(RevolutionBody::new(ZonalFunction::new(n, vec![1.0, 0.0, a, a * 0.1])).unwrap())),
        ];
        let back = parse_bodies(&write_bodies(&bodies)).unwrap();
        prop_assert_eq!(back, bodies);
    }

    #[test]
    fn crofton_specs_round_trip_bit_exactly(atoms in prop::collection::vec((0.0..=1.0f64, real()), 0..6)) {
        let specs = vec![("c".to_string(), ValuationSpec::crofton(4, 2, atoms).unwrap())];
        prop_assert_eq!(parse_specs(&write_specs(&specs)).unwrap(), specs);
    }
}
