//! Real matrix exponential by scaling and squaring with a Taylor core.

use crate::RMatrix;

const MAX_TERMS: usize = 40;

/// `exp(A)` for a square real matrix.
///
/// `A` is scaled by `2^-s` until its 1-norm is at most 1/2, the Taylor series
/// is summed until the next term is below machine precision relative to the
/// partial sum, and the result is squared `s` times.
pub fn expm(a: &RMatrix) -> RMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(0.5_f64.powi(squarings));

    let mut sum = RMatrix::identity(n, n);
    let mut term = RMatrix::identity(n, n);
    for k in 1..=MAX_TERMS {
        term = (&term * &scaled).unscale(k as f64);
        sum += &term;
        if one_norm(&term) <= f64::EPSILON * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Max absolute column sum.
pub fn one_norm(a: &RMatrix) -> f64 {
    a.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gives_identity() {
        assert_eq!(expm(&RMatrix::zeros(4, 4)), RMatrix::identity(4, 4));
    }

    #[test]
    fn plane_rotation() {
        for theta in [0.1, 1.0, std::f64::consts::PI, 37.5] {
            let a = RMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
            let r = expm(&a);
            let expected = RMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
            assert!((r - expected).amax() < 1e-13 * theta.max(1.0));
        }
    }

    #[test]
    fn diagonal_and_nilpotent() {
        let d = RMatrix::from_diagonal(&crate::RVector::from_column_slice(&[1.0, -2.0, 0.5]));
        let e = expm(&d);
        for (i, x) in [1.0_f64, -2.0, 0.5].iter().enumerate() {
            assert!((e[(i, i)] - x.exp()).abs() < 1e-14 * x.exp());
        }
        let nil = RMatrix::from_row_slice(2, 2, &[0.0, 3.0, 0.0, 0.0]);
        assert_eq!(expm(&nil), RMatrix::from_row_slice(2, 2, &[1.0, 3.0, 0.0, 1.0]));
    }

    #[test]
    fn agrees_with_pade_reference() {
        // nalgebra's exp uses a Padé approximant, an independent route.
        let a = RMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 * 0.4 - 0.8);
        let ours = expm(&a);
        let reference = a.clone().exp();
        assert!((ours - &reference).amax() < 1e-12 * reference.amax());
    }
}
