use fracwrm::expr::{parse, BinOp, Expr};
use fracwrm::gamma::gamma;
use proptest::prelude::*;

/// Trees the parser itself can produce: literals are never negative.
fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..1e6).prop_map(Expr::Num),
        (0u32..1000).prop_map(|v| Expr::Num(v as f64)),
        Just(Expr::X),
        Just(Expr::Pi),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Gamma(Box::new(e))),
            (op, inner.clone(), inner).prop_map(|(o, l, r)| Expr::Bin(o, Box::new(l), Box::new(r))),
        ]
    })
}

const P1: &str = "gamma(2.9)/gamma(1.4)*x^0.4 - (x^1.9 - 1)^3";
const P3: &str = "90.27*x^1.5 - 2*27.08*x^0.5 - 2*0.56/x^1.5 - x^10 + 4*x^9 - 4*x^8 - 4*x^7 + 8*x^6 - 4*x^4";
const P4: &str = "2 + x^2/10";

#[test]
fn benchmark_right_hand_sides() {
    let g = gamma(2.9).unwrap() / gamma(1.4).unwrap();
    let p1 = parse(P1).unwrap();
    let p3 = parse(P3).unwrap();
    let p4 = parse(P4).unwrap();
    for x in [0.1f64, 0.25, 0.5, 0.9, 1.0] {
        let f1 = g * x.powf(0.4) - (x.powf(1.9) - 1.0).powi(3);
        assert!((p1.eval(x).unwrap() - f1).abs() <= 1e-12 * (1.0 + f1.abs()));
        let f3 = 90.27 * x.powf(1.5) - 2.0 * 27.08 * x.sqrt() - 2.0 * 0.56 / x.powf(1.5) - x.powi(10) + 4.0 * x.powi(9)
            - 4.0 * x.powi(8)
            - 4.0 * x.powi(7)
            + 8.0 * x.powi(6)
            - 4.0 * x.powi(4);
        assert!((p3.eval(x).unwrap() - f3).abs() <= 1e-12 * (1.0 + f3.abs()));
        assert!((p4.eval(x).unwrap() - (2.0 + x * x / 10.0)).abs() <= 1e-15);
    }
}

#[test]
fn lowering_matches_direct_evaluation() {
    // gamma() only appears in constant position, so these lower
    for text in [P1, P4, "x^5 - 2*x^4 + 2*x^2", "(1 + x)^3 * x^0.5", "-x^2/3 + pi*x"] {
        let e = parse(text).unwrap();
        let s = e.to_frac_series().unwrap_or_else(|_| panic!("{text} should lower"));
        for x in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let want = e.eval(x).unwrap();
            assert!((s.eval(x) - want).abs() <= 1e-12 * (1.0 + want.abs()), "{text} at {x}");
        }
    }
    // x^-1.5 is a power sum but not one with nonnegative exponents
    assert!(parse(P3).unwrap().to_frac_series().is_err());
    assert!(parse("gamma(x)").unwrap().to_frac_series().is_err());
}

#[test]
fn error_offsets() {
    let e = parse("x^").unwrap_err();
    assert_eq!(e.offset, 2);
    let e = parse("2 * (x + 1").unwrap_err();
    assert_eq!(e.offset, 10);
    assert!(parse("gamma 2").is_err());
    assert!(parse("x $ 1").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(e in expr_tree()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.to_string(), printed);
    }
}
