use fracwrm::fracpoly::{
    caputo_numeric_oracle, caputo_series, riemann_liouville_series, FracOrder, FracSeries, OracleConfig, RlImage,
};
use fracwrm::gamma::gamma;
use proptest::prelude::*;

const ORDERS: [f64; 5] = [0.5, 1.2, 1.5, 2.5, 3.5];

fn poly_series() -> impl Strategy<Value = FracSeries> {
    proptest::collection::vec(-1.0f64..1.0, 1..9).prop_map(|c| FracSeries::from_poly_coeffs(&c))
}

/// Terms whose Caputo images stay nonnegative powers.
fn fractional_series(alpha: f64) -> impl Strategy<Value = FracSeries> {
    proptest::collection::vec((-1.0f64..1.0, 0.0f64..3.0), 1..5)
        .prop_map(move |v| FracSeries::from_pairs(v.into_iter().map(|(c, d)| (c, alpha + d))).unwrap())
}

#[test]
fn known_images() {
    let o = FracOrder::new(1.5).unwrap();
    let d = caputo_series(&FracSeries::monomial(1.0, 1.9).unwrap(), o).unwrap();
    assert_eq!(d.len(), 1);
    assert!((d.terms()[0].exponent - 0.4).abs() < 1e-15);
    let want = gamma(2.9).unwrap() / gamma(1.4).unwrap();
    assert!((d.terms()[0].coeff - want).abs() < 1e-14 * want);

    let u = FracSeries::from_poly_coeffs(&[0.0, 0.0, 2.0, 0.0, -2.0, 1.0]);
    let d = caputo_series(&u, FracOrder::new(3.5).unwrap()).unwrap();
    let want = FracSeries::from_pairs([
        (gamma(6.0).unwrap() / gamma(2.5).unwrap(), 1.5),
        (-2.0 * gamma(5.0).unwrap() / gamma(1.5).unwrap(), 0.5),
    ])
    .unwrap();
    for x in [0.1, 0.5, 0.9] {
        assert!((d.eval(x) - want.eval(x)).abs() < 1e-12);
    }
}

#[test]
fn constants_annihilated_by_caputo_not_rl() {
    let one = FracSeries::constant(1.0);
    let o = FracOrder::new(0.5).unwrap();
    assert!(caputo_series(&one, o).unwrap().is_empty());
    match riemann_liouville_series(&one, o).unwrap() {
        RlImage::Singular(s) => {
            // D^0.5 1 = x^-0.5 / Gamma(0.5)
            let x: f64 = 0.25;
            let want = x.powf(-0.5) / std::f64::consts::PI.sqrt();
            assert!((s.eval(x).unwrap() - want).abs() < 1e-14);
        }
        other => panic!("expected a singular image, got {other:?}"),
    }
}

#[test]
fn integer_orders_are_ordinary_derivatives() {
    let s = FracSeries::from_poly_coeffs(&[1.0, 2.0, 3.0, 4.0]);
    for m in 1..=3u32 {
        let c = caputo_series(&s, FracOrder::new(m as f64).unwrap()).unwrap();
        let d = s.diff(m).unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert!((c.eval(x) - d.eval(x)).abs() < 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn analytic_matches_oracle_polynomials(s in poly_series(), k in 0usize..5) {
        let o = FracOrder::new(ORDERS[k]).unwrap();
        let d = caputo_series(&s, o).unwrap();
        for x in [0.1, 0.5, 0.9] {
            let num = caputo_numeric_oracle(&s, o, x, &OracleConfig::default()).unwrap();
            prop_assert!((d.eval(x) - num).abs() <= 1e-8, "x={} analytic {} oracle {}", x, d.eval(x), num);
        }
    }

    #[test]
    fn analytic_matches_oracle_fractional(
        (alpha, s) in (0usize..5).prop_flat_map(|k| (Just(ORDERS[k]), fractional_series(ORDERS[k])))
    ) {
        let o = FracOrder::new(alpha).unwrap();
        let d = caputo_series(&s, o).unwrap();
        for x in [0.1, 0.5, 0.9] {
            let num = caputo_numeric_oracle(&s, o, x, &OracleConfig::default()).unwrap();
            prop_assert!((d.eval(x) - num).abs() <= 1e-8);
        }
    }

    #[test]
    fn caputo_is_linear(a in poly_series(), b in poly_series(), p in -3.0f64..3.0, q in -3.0f64..3.0, k in 0usize..5) {
        let o = FracOrder::new(ORDERS[k]).unwrap();
        let lhs = caputo_series(&a.scale(p).add(&b.scale(q)), o).unwrap();
        let rhs = caputo_series(&a, o).unwrap().scale(p).add(&caputo_series(&b, o).unwrap().scale(q));
        for x in [0.0, 0.2, 0.7, 1.0] {
            prop_assert!((lhs.eval(x) - rhs.eval(x)).abs() <= 1e-12 * (1.0 + rhs.eval(x).abs()));
        }
    }
}
