use fracwrm::linalg::{lu_solve, norm_inf, LinalgError, Matrix};

fn binom(n: i128, k: i128) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact integer inverse of the n x n Hilbert matrix (1-based formula).
fn hilbert_inverse(n: usize) -> Vec<Vec<i128>> {
    let n = n as i128;
    (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    let c = binom(i + j - 2, i - 1);
                    sign * (i + j - 1) * binom(n + i - 1, n - j) * binom(n + j - 1, n - i) * c * c
                })
                .collect()
        })
        .collect()
}

fn hilbert(n: usize) -> Matrix {
    Matrix::from_rows(&(0..n).map(|i| (0..n).map(|j| 1.0 / (i + j + 1) as f64).collect()).collect::<Vec<_>>())
}

#[test]
fn hilbert_6_inverse_columns() {
    let n = 6;
    let h = hilbert(n);
    let inv = hilbert_inverse(n);
    assert_eq!(inv[0][0], 36);
    assert_eq!(inv[5][5], 698544);
    // exact check H * inv = I, scaled by lcm(1..=11) so every entry of H is an integer
    let lcm: i128 = 27720;
    for i in 0..n {
        for j in 0..n {
            let s: i128 = (0..n).map(|k| lcm / (i + k + 1) as i128 * inv[k][j]).sum();
            assert_eq!(s, if i == j { lcm } else { 0 }, "({i},{j})");
        }
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let x = lu_solve(&h, &e).unwrap();
        for i in 0..n {
            let want = inv[i][j] as f64;
            assert!(((x[i] - want) / want).abs() < 1e-6, "({i},{j}): {} vs {want}", x[i]);
        }
    }
}

#[test]
fn small_systems() {
    let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
    let x = lu_solve(&a, &[3.0, 5.0]).unwrap();
    assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    let b = [1.0, -2.0, 3.5];
    assert_eq!(lu_solve(&Matrix::identity(3), &b).unwrap(), b.to_vec());
}

#[test]
fn backward_error_bound() {
    for n in [8, 10] {
        let h = hilbert(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0).sin()).collect();
        let x = lu_solve(&h, &b).unwrap();
        let r: Vec<f64> = h.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm_inf(&r) <= 1e-10 * h.norm_inf() * norm_inf(&x));
    }
}

#[test]
fn singular_and_shape_errors() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
    assert!(matches!(lu_solve(&a, &[1.0, 1.0]), Err(LinalgError::Singular { .. })));
    assert!(matches!(lu_solve(&a, &[1.0]), Err(LinalgError::Dimension(_))));
    assert!(matches!(lu_solve(&Matrix::identity(65), &[0.0; 65]), Err(LinalgError::TooLarge(_))));
}
