use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::exact;
use crate::matrix::{dot, Matrix};
use crate::scalar::Rational;

/// A subspace of `R^n` given by an `n × d` matrix with independent columns.
/// `d = 0` is the zero subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    basis: Matrix<Rational>,
}

impl SubspaceBasis {
    /// Wraps a basis matrix, rejecting dependent columns.
    pub fn new(basis: Matrix<Rational>) -> Result<Self> {
        if basis.cols() > basis.rows() || exact::rank(&basis) != basis.cols() {
            return Err(Error::DependentBasis);
        }
        Ok(Self { basis })
    }

    pub fn from_columns(n: usize, columns: Vec<Vec<Rational>>) -> Result<Self> {
        for c in &columns {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
        }
        Self::new(Matrix::from_columns(n, &columns)?)
    }

    /// Caller guarantees the columns are independent.
    pub(crate) fn from_independent_columns(n: usize, columns: Vec<Vec<Rational>>) -> Self {
        Self {
            basis: Matrix::from_columns(n, &columns).expect("columns of length n"),
        }
    }

    /// Span of arbitrary vectors, keeping a greedy independent subset.
    pub fn span_of(n: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let keep = exact::independent_indices(vectors, n);
        Ok(Self::from_independent_columns(
            n,
            keep.into_iter().map(|i| vectors[i].clone()).collect(),
        ))
    }

    pub fn zero(n: usize) -> Self {
        Self {
            basis: Matrix::zeros(n, 0),
        }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            basis: Matrix::identity(n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<Rational> {
        &self.basis
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        self.basis.column_vecs()
    }

    pub fn projection(&self) -> Matrix<Rational> {
        exact::projection_matrix(self).expect("independent basis")
    }

    /// `W^⊥`, the nullspace of `Bᵀ`.
    pub fn orthogonal_complement(&self) -> Self {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Self::whole(n);
        }
        exact::nullspace(&self.basis.transpose())
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient_dim() {
            return false;
        }
        // v ∈ W iff v ⊥ W^⊥.
        self.orthogonal_complement()
            .columns()
            .iter()
            .all(|c| dot(c, v).is_zero())
    }

    /// Whether the subspace is spanned by canonical basis vectors; returns the
    /// coordinate support if so.
    pub fn coordinate_support(&self) -> Option<Vec<usize>> {
        let n = self.ambient_dim();
        let support: Vec<usize> = (0..n)
            .filter(|&i| self.basis.row(i).iter().any(|x| !x.is_zero()))
            .collect();
        (support.len() == self.dim()).then_some(support)
    }
}
