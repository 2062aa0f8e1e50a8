//! Finite frames of vectors in `R^n`.

mod retrieval;

pub use retrieval::*;

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{exact, float};
use crate::matrix::{dot, Matrix};
use crate::scalar::{to_f64, Mode, Rational};
use crate::search::{SearchOptions, SpanFamily};

/// An ordered family of `m ≥ 1` vectors in `R^n`. Zero vectors are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    dim: usize,
    vectors: Vec<Vec<Rational>>,
}

impl Frame {
    pub fn new(dim: usize, vectors: Vec<Vec<Rational>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition("ambient dimension must be positive"));
        }
        if vectors.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        Ok(Self { dim, vectors })
    }

    /// Infers the dimension from the first vector.
    pub fn from_vectors(vectors: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = vectors.first().ok_or(Error::EmptyFamily)?.len();
        Self::new(dim, vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[Rational] {
        &self.vectors[i]
    }

    /// `m × n`, one frame vector per row.
    pub fn analysis_matrix(&self) -> Matrix<Rational> {
        Matrix::from_rows_with_cols(&self.vectors, self.dim).expect("uniform lengths")
    }

    /// `S = Σ f_i f_iᵀ`.
    pub fn frame_operator(&self) -> Matrix<Rational> {
        let a = self.analysis_matrix();
        a.transpose().mul(&a).expect("conformable")
    }

    /// `G_ij = ⟨f_i, f_j⟩`.
    pub fn gram(&self) -> Matrix<Rational> {
        let a = self.analysis_matrix();
        a.mul(&a.transpose()).expect("conformable")
    }

    /// `{a_i f_i}`.
    pub fn scaled(&self, factors: &[Rational]) -> Result<Self> {
        if factors.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: factors.len(),
            });
        }
        let vectors = self
            .vectors
            .iter()
            .zip(factors)
            .map(|(v, a)| v.iter().map(|x| x * a).collect())
            .collect();
        Self::new(self.dim, vectors)
    }

    /// `{T f_i}`.
    pub fn transformed(&self, t: &Matrix<Rational>) -> Result<Self> {
        if t.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.cols(),
            });
        }
        let vectors = self.vectors.iter().map(|v| t.mul_vec(v)).collect::<Result<Vec<_>>>()?;
        Self::new(t.rows(), vectors)
    }

    pub fn spans(&self) -> bool {
        exact::rank(&self.analysis_matrix()) == self.dim
    }

    pub fn is_independent(&self) -> bool {
        exact::rank(&self.analysis_matrix()) == self.len()
    }

    pub(crate) fn family(&self) -> SpanFamily {
        SpanFamily::new(
            self.dim,
            self.vectors
                .iter()
                .map(|v| alloc::vec![exact::primitive_integer_vector(v)])
                .collect(),
        )
    }
}

/// Lower and upper frame bounds: the extreme eigenvalues of `S`.
pub fn frame_bounds(frame: &Frame, mode: Mode) -> Result<(f64, f64)> {
    crate::linalg::symmetric_spectrum_bounds(&frame.frame_operator(), mode)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RieszBounds {
    Riesz { lower: f64, upper: f64 },
    NotRiesz,
}

/// Extreme eigenvalues of the Gram matrix, or `NotRiesz` when the lower one
/// vanishes to within the mode tolerance.
pub fn riesz_bounds(frame: &Frame, mode: Mode) -> Result<RieszBounds> {
    let eps = mode.require_float()?;
    let g = frame.gram().map(to_f64);
    let (lower, upper) = float::symmetric_spectrum_bounds(&g)?;
    if lower <= eps * upper.max(1.0) {
        return Ok(RieszBounds::NotRiesz);
    }
    Ok(RieszBounds::Riesz { lower, upper })
}

/// A linearly dependent subfamily with its dependency coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DependencyWitness {
    pub subset: Vec<usize>,
    pub coefficients: Vec<Rational>,
}

impl DependencyWitness {
    /// `Σ c_k f_{subset_k} = 0` with some `c_k ≠ 0`.
    pub fn verify(&self, frame: &Frame) -> bool {
        if self.subset.len() != self.coefficients.len()
            || self.subset.iter().any(|&i| i >= frame.len())
            || self.coefficients.iter().all(Zero::is_zero)
        {
            return false;
        }
        let mut sum = alloc::vec![Rational::zero(); frame.dim()];
        for (&i, c) in self.subset.iter().zip(&self.coefficients) {
            for (s, x) in sum.iter_mut().zip(frame.vector(i)) {
                *s = &*s + c * x;
            }
        }
        sum.iter().all(Zero::is_zero)
    }
}

fn dependency_of(frame: &Frame, subset: Vec<usize>) -> DependencyWitness {
    let vectors: Vec<Vec<Rational>> = subset.iter().map(|&i| frame.vector(i).to_vec()).collect();
    let coefficients = exact::dependency(&vectors, frame.dim()).expect("subset is dependent");
    DependencyWitness { subset, coefficients }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spark {
    /// Smallest size of a dependent subfamily; `m + 1` if none exists.
    pub value: usize,
    pub witness: Option<DependencyWitness>,
}

pub fn spark(frame: &Frame, opts: &SearchOptions) -> Spark {
    let family = frame.family();
    let (m, n) = (frame.len(), frame.dim());
    for k in 1..=m.min(n) {
        if let Some(subset) = family.first_dependent(k, opts) {
            return Spark {
                value: k,
                witness: Some(dependency_of(frame, subset)),
            };
        }
    }
    if m > n {
        // Any n + 1 vectors in R^n are dependent.
        let subset: Vec<usize> = (0..=n).collect();
        return Spark {
            value: n + 1,
            witness: Some(dependency_of(frame, subset)),
        };
    }
    Spark {
        value: m + 1,
        witness: None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FullSpark {
    pub holds: bool,
    /// Lexicographically first `n`-subset that fails to span.
    pub witness: Option<DependencyWitness>,
}

pub fn is_full_spark(frame: &Frame, opts: &SearchOptions) -> Result<FullSpark> {
    let (m, n) = (frame.len(), frame.dim());
    if m < n {
        return Err(Error::TooFewVectors { m, n });
    }
    let witness = frame.family().first_dependent(n, opts).map(|s| dependency_of(frame, s));
    Ok(FullSpark {
        holds: witness.is_none(),
        witness,
    })
}

/// The constant `A` when `S = A·I` exactly.
pub fn tightness_constant(frame: &Frame) -> Option<Rational> {
    let s = frame.frame_operator();
    let a = s.get(0, 0).clone();
    (s == Matrix::identity(frame.dim()).scale(&a) && !a.is_zero()).then_some(a)
}

pub fn is_parseval(frame: &Frame) -> bool {
    tightness_constant(frame).is_some_and(|a| a.is_one())
}

pub fn is_gram_diagonal(frame: &Frame) -> bool {
    let v = frame.vectors();
    (0..v.len()).all(|i| (0..i).all(|j| dot(&v[i], &v[j]).is_zero()))
}
