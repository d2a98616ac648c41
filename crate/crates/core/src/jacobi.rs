//! Cyclic Jacobi rotations for dense real symmetric matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

/// Sweep cap before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Converged when the largest off-diagonal entry is below this times `‖A‖_F`.
pub const RELATIVE_OFF_DIAGONAL: f64 = 1e-12;
/// Accepted asymmetry on input.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Eigenvalues in descending order with the matching eigenvectors as columns.
pub(crate) struct Decomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

fn max_off_diagonal(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut off = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            off = off.max(a[(p, q)].abs());
        }
    }
    off
}

pub(crate) fn decompose(input: &Matrix) -> Result<Decomposition> {
    if !input.is_square() {
        return Err(Error::Structure(alloc::format!(
            "matrix is {}x{}, expected square",
            input.rows(),
            input.cols()
        )));
    }
    if !input.is_symmetric(SYMMETRY_TOLERANCE) {
        return Err(Error::Domain("matrix is not symmetric".into()));
    }
    let n = input.rows();
    let mut a = input.clone();
    let mut v = Matrix::identity(n);
    let threshold = RELATIVE_OFF_DIAGONAL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if max_off_diagonal(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + math::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        let off = max_off_diagonal(&a);
        if off > threshold {
            return Err(Error::Numeric { what: "Jacobi eigensolver", residual: off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        // fix the sign: largest-magnitude entry positive, first one on ties
        let mut pivot = 0;
        for r in 0..n {
            if v[(r, src)].abs() > v[(pivot, src)].abs() + 1e-14 {
                pivot = r;
            }
        }
        let sign = if v[(pivot, src)] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, col)] = sign * v[(r, src)];
        }
    }
    Ok(Decomposition { values, vectors })
}

/// `A <- Pᵀ A P`, `V <- V P` for the plane rotation in `(p, q)`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(decompose(&m), Err(Error::Domain(_))));
        let m = Matrix::zeros(2, 3);
        assert!(matches!(decompose(&m), Err(Error::Structure(_))));
    }

    #[test]
    fn zero_and_empty_matrices() {
        let d = decompose(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(d.values, alloc::vec![0.0; 3]);
        let d = decompose(&Matrix::zeros(0, 0)).unwrap();
        assert!(d.values.is_empty());
    }
}
