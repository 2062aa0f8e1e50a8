//! Floating-point kernels: rank with a tolerance, symmetric eigenvalues,
//! operator norms and orthonormalization.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[inline]
fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Numerical rank of the column space: Gram-Schmidt with column pivoting,
/// stopping once the largest residual column is at most
/// `eps * (largest original column norm)`.
pub fn rank(m: &Matrix<f64>, eps: f64) -> usize {
    let mut cols = m.column_vecs();
    let scale = cols.iter().map(|c| norm(c)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let threshold = eps * scale;
    let mut rank = 0;
    while !cols.is_empty() {
        let (best, best_norm) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm(c)))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_norm <= threshold {
            break;
        }
        let q: Vec<f64> = cols.swap_remove(best).iter().map(|x| x / best_norm).collect();
        for c in cols.iter_mut() {
            // Two passes keep the residuals orthogonal to working precision.
            for _ in 0..2 {
                let d = dot(&q, c);
                for (x, qi) in c.iter_mut().zip(&q) {
                    *x -= d * qi;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigenvalues(m: &Matrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Precondition("eigenvalues of a non-square matrix"));
    }
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = m.row_vecs();
    // Symmetrize to remove rounding asymmetry in callers' products.
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = avg;
            a[j][i] = avg;
        }
    }
    let frob = sqrt(a.iter().flatten().map(|x| x * x).sum());
    if frob == 0.0 {
        return Ok(vec![0.0; n]);
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if sqrt(off) <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn symmetric_spectrum_bounds(m: &Matrix<f64>) -> Result<(f64, f64)> {
    let eig = symmetric_eigenvalues(m)?;
    match (eig.first(), eig.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(Error::EmptyFamily),
    }
}

/// Largest singular value, from the spectrum of `MᵀM`.
pub fn operator_norm(m: &Matrix<f64>) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = m.transpose().mul(m).expect("conformable");
    let (_, hi) = symmetric_spectrum_bounds(&gram).expect("square");
    sqrt(hi.max(0.0))
}

/// Smallest singular value of an `n × k` matrix with `k ≤ n`.
pub fn min_singular_value(m: &Matrix<f64>) -> f64 {
    if m.cols() == 0 {
        return f64::INFINITY;
    }
    let gram = m.transpose().mul(m).expect("conformable");
    let (lo, _) = symmetric_spectrum_bounds(&gram).expect("square");
    sqrt(lo.max(0.0))
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(m: &Matrix<f64>) -> Option<Matrix<f64>> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let mut a = m.row_vecs();
    let mut inv = Matrix::<f64>::identity(n).row_vecs();
    let scale = a.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(p, c);
        inv.swap(p, c);
        let d = a[c][c];
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for i in 0..n {
            if i == c {
                continue;
            }
            let f = a[i][c];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[i][j] -= f * a[c][j];
                inv[i][j] -= f * inv[c][j];
            }
        }
    }
    Matrix::from_rows_with_cols(&inv, n).ok()
}

/// Orthonormal basis (as columns) of the column span, dropping columns whose
/// residual falls below `eps` times the largest column norm.
pub fn orthonormal_columns(m: &Matrix<f64>, eps: f64) -> Matrix<f64> {
    let n = m.rows();
    let cols = m.column_vecs();
    let scale = cols.iter().map(|c| norm(c)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        let mut v = c;
        for _ in 0..2 {
            for q in &basis {
                let d = dot(q, &v);
                for (x, qi) in v.iter_mut().zip(q) {
                    *x -= d * qi;
                }
            }
        }
        let nv = norm(&v);
        if nv > eps * scale && nv > 0.0 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    Matrix::from_columns(n, &basis).expect("columns of length n")
}

/// Orthonormal basis (as columns) of the orthogonal complement of the column
/// span of `m`.
pub fn complement_columns(m: &Matrix<f64>, eps: f64) -> Matrix<f64> {
    let n = m.rows();
    let q = orthonormal_columns(m, eps);
    let mut basis = q.column_vecs();
    let start = basis.len();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let d = dot(b, &v);
                for (x, bi) in v.iter_mut().zip(b) {
                    *x -= d * bi;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    Matrix::from_columns(n, &basis[start..]).expect("columns of length n")
}

pub fn max_abs_entry(m: &Matrix<f64>) -> f64 {
    m.entries().iter().fold(0.0, |acc, x| acc.max(x.abs()))
}
