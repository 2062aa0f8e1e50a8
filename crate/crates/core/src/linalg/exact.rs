//! Exact kernels over the rationals.
//!
//! Rank and determinants go through fraction-free (Bareiss) elimination on
//! integer rows: every rational row is first rescaled to a primitive integer
//! vector, which leaves spans unchanged.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::scalar::{lcm_of_denominators, Rational};
use crate::subspace::SubspaceBasis;

/// Rescales by a positive factor to an integer vector with coprime entries.
/// The zero vector maps to the zero vector.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let lcm = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    primitive_part(ints)
}

pub(crate) fn primitive_part(mut ints: Vec<BigInt>) -> Vec<BigInt> {
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut ints {
            *x = &*x / &g;
        }
    }
    ints
}

pub fn integer_to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().cloned().map(Rational::from_integer).collect()
}

/// Fraction-free elimination in place. Returns the rank and the sign of the
/// row permutation applied.
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (usize, bool) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut flipped = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            flipped = !flipped;
        }
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        r += 1;
    }
    (r, flipped)
}

pub fn integer_rank(rows: &[Vec<BigInt>]) -> usize {
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut a = rows.to_vec();
    bareiss(&mut a, cols).0
}

pub fn integer_determinant(rows: &[Vec<BigInt>]) -> Result<BigInt> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition("determinant of a non-square matrix"));
    }
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = rows.to_vec();
    let (rank, flipped) = bareiss(&mut a, n);
    if rank < n {
        return Ok(BigInt::zero());
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if flipped { -det } else { det })
}

/// Dimension of the column space.
pub fn rank(m: &Matrix<Rational>) -> usize {
    let rows: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| primitive_integer_vector(m.row(i))).collect();
    if m.cols() == 0 {
        return 0;
    }
    integer_rank(&rows)
}

pub fn determinant(m: &Matrix<Rational>) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::Precondition("determinant of a non-square matrix"));
    }
    // det(M) = det(D M) / prod(d_i) where D rescales each row to integers.
    let mut scale = Rational::one();
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let lcm = lcm_of_denominators(m.row(i));
        rows.push(
            m.row(i)
                .iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect::<Vec<_>>(),
        );
        scale /= Rational::from_integer(lcm);
    }
    Ok(Rational::from_integer(integer_determinant(&rows)?) * scale)
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &Matrix<Rational>) -> (Matrix<Rational>, Vec<usize>) {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.row_vecs();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = &*x - &factor * p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let out = Matrix::from_rows_with_cols(&a, cols).expect("rows keep their width");
    (out, pivots)
}

/// Basis of `{x : Mx = 0}` as primitive integer-valued vectors, in the order
/// of the free columns of the reduced echelon form.
pub fn nullspace_vectors(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    let cols = m.cols();
    let (r, pivots) = rref(m);
    let mut out = Vec::new();
    let mut pivot_iter = pivots.iter().peekable();
    for free in 0..cols {
        if pivot_iter.peek() == Some(&&free) {
            pivot_iter.next();
            continue;
        }
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = -r.get(i, free).clone();
        }
        out.push(integer_to_rational(&primitive_integer_vector(&x)));
    }
    out
}

pub fn nullspace(m: &Matrix<Rational>) -> SubspaceBasis {
    let vectors = nullspace_vectors(m);
    SubspaceBasis::from_independent_columns(m.cols(), vectors)
}

/// Primitive integer basis of the orthogonal complement of the span of
/// `rows` in `Z^n`.
pub(crate) fn integer_complement(rows: &[&[BigInt]], n: usize) -> Vec<Vec<BigInt>> {
    let rational: Vec<Vec<Rational>> = rows.iter().map(|r| integer_to_rational(r)).collect();
    let m = Matrix::from_rows_with_cols(&rational, n).expect("uniform rows");
    nullspace_vectors(&m)
        .into_iter()
        .map(|v| v.into_iter().map(|x| x.numer().clone()).collect())
        .collect()
}

/// A particular solution of `Ax = b` (free variables set to zero), if any.
pub fn solve(a: &Matrix<Rational>, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let column = Matrix::from_columns(b.len(), &[b.to_vec()])?;
    let augmented = a.hstack(&column)?;
    let (r, pivots) = rref(&augmented);
    if pivots.last() == Some(&a.cols()) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); a.cols()];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r.get(i, a.cols()).clone();
    }
    Ok(Some(x))
}

pub fn inverse(m: &Matrix<Rational>) -> Option<Matrix<Rational>> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let augmented = m.hstack(&Matrix::identity(n)).ok()?;
    let (r, pivots) = rref(&augmented);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let rows: Vec<Vec<Rational>> = (0..n).map(|i| r.row(i)[n..].to_vec()).collect();
    Matrix::from_rows_with_cols(&rows, n).ok()
}

/// `P = B (BᵀB)⁻¹ Bᵀ`, the orthogonal projection onto the column span of `B`.
pub fn projection_matrix(w: &SubspaceBasis) -> Result<Matrix<Rational>> {
    let n = w.ambient_dim();
    if w.dim() == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let b = w.basis();
    let bt = b.transpose();
    let gram = bt.mul(b)?;
    let gram_inv = inverse(&gram).ok_or(Error::DependentBasis)?;
    b.mul(&gram_inv)?.mul(&bt)
}

/// Whether every basis vector of `u` is orthogonal to every basis vector of `v`.
pub fn perp_orthogonal(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<bool> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim(),
            found: v.ambient_dim(),
        });
    }
    let uc = u.basis().column_vecs();
    let vc = v.basis().column_vecs();
    Ok(uc.iter().all(|a| vc.iter().all(|b| dot(a, b).is_zero())))
}

/// Indices of a maximal independent subfamily, chosen greedily in order.
pub fn independent_indices(vectors: &[Vec<Rational>], n: usize) -> Vec<usize> {
    let mut chosen: Vec<Vec<BigInt>> = Vec::new();
    let mut indices = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != n {
            continue;
        }
        chosen.push(primitive_integer_vector(v));
        if integer_rank(&chosen) == chosen.len() {
            indices.push(i);
        } else {
            chosen.pop();
        }
    }
    indices
}

/// Coefficients `c ≠ 0` with `Σ c_i v_i = 0`, when the vectors are dependent.
pub fn dependency(vectors: &[Vec<Rational>], n: usize) -> Option<Vec<Rational>> {
    let m = Matrix::from_columns(n, vectors).ok()?;
    nullspace_vectors(&m).into_iter().next()
}

pub fn has_positive_entries(v: &[Rational]) -> bool {
    v.iter().any(Signed::is_positive)
}
