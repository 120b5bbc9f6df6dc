use fracwrm::expr::parse;
use fracwrm::metrics::{l2_error, linf_error, Grid};
use fracwrm::poly::Polynomial;
use fracwrm::quadrature::QuadConfig;

fn trapezoid(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let inner: f64 = (1..n).map(|i| f(i as f64 * h)).sum();
    h * (inner + 0.5 * (f(0.0) + f(1.0)))
}

#[test]
fn l2_matches_fine_trapezoid() {
    let exact = parse("x^1.9 - 1").unwrap();
    let approx = Polynomial::new(vec![-1.0, 0.01, 1.13, -0.22, 0.07]);
    let rule = QuadConfig::default().build(0.0, 1.0).unwrap();
    let got = l2_error(&exact, &approx, &rule).unwrap();
    let want = trapezoid(
        |x| {
            let d = x.powf(1.9) - 1.0 - approx.eval(x);
            d * d
        },
        200_000,
    );
    assert!(((got - want) / want).abs() < 1e-6, "{got} vs {want}");
}

#[test]
fn linf_grids_sample_the_endpoints() {
    let exact = parse("x").unwrap();
    let approx = Polynomial::new(vec![0.0, 0.0]);
    assert_eq!(linf_error(&exact, &approx, Grid::Table11, (0.0, 1.0)).unwrap(), 1.0);
    assert_eq!(linf_error(&exact, &approx, Grid::Dense1001, (0.0, 1.0)).unwrap(), 1.0);
}
