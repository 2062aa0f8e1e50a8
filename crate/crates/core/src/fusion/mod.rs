//! Fusion frames: weighted families of subspaces, their constructions, and a
//! norm-retrieval decision combiner.

mod construct;
mod coordinate;
mod decide;
mod onb;

pub use construct::*;
pub use coordinate::*;
pub use decide::*;
pub use onb::*;

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::exact;
use crate::matrix::Matrix;
use crate::scalar::{to_f64, Mode, Rational};
use crate::search::SpanFamily;
use crate::subspace::SubspaceBasis;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSubspace {
    subspace: SubspaceBasis,
    weight: Rational,
}

impl WeightedSubspace {
    pub fn new(subspace: SubspaceBasis, weight: Rational) -> Result<Self> {
        if !weight.is_positive() {
            return Err(Error::NonPositiveWeight { member: 0 });
        }
        Ok(Self { subspace, weight })
    }

    pub fn subspace(&self) -> &SubspaceBasis {
        &self.subspace
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }
}

/// A non-empty list of weighted subspaces of one `R^n`, with the orthogonal
/// projections cached.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionFrame {
    ambient_dim: usize,
    members: Vec<WeightedSubspace>,
    projections: Vec<Matrix<Rational>>,
}

impl FusionFrame {
    pub fn new(ambient_dim: usize, members: Vec<WeightedSubspace>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::Precondition("ambient dimension must be positive"));
        }
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for w in &members {
            if w.subspace.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: w.subspace.ambient_dim(),
                });
            }
        }
        let projections = members.iter().map(|w| w.subspace.projection()).collect();
        Ok(Self {
            ambient_dim,
            members,
            projections,
        })
    }

    /// Builds members from basis columns and weights, reporting the index of
    /// the offending member on error.
    pub fn from_bases(ambient_dim: usize, parts: Vec<(Vec<Vec<Rational>>, Rational)>) -> Result<Self> {
        let mut members = Vec::with_capacity(parts.len());
        for (member, (basis, weight)) in parts.into_iter().enumerate() {
            let subspace = SubspaceBasis::from_columns(ambient_dim, basis)?;
            let w = WeightedSubspace::new(subspace, weight).map_err(|e| match e {
                Error::NonPositiveWeight { .. } => Error::NonPositiveWeight { member },
                other => other,
            })?;
            members.push(w);
        }
        Self::new(ambient_dim, members)
    }

    /// Unit weights.
    pub fn unweighted(ambient_dim: usize, bases: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        Self::from_bases(ambient_dim, bases.into_iter().map(|b| (b, Rational::one())).collect())
    }

    /// Each nonzero frame vector becomes the line it spans, with unit weight.
    pub fn from_frame_lines(frame: &crate::frame::Frame) -> Result<Self> {
        let bases = frame
            .vectors()
            .iter()
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .map(|v| alloc::vec![v.clone()])
            .collect();
        Self::unweighted(frame.dim(), bases)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn members(&self) -> &[WeightedSubspace] {
        &self.members
    }

    pub fn projection(&self, i: usize) -> &Matrix<Rational> {
        &self.projections[i]
    }

    pub fn projections(&self) -> &[Matrix<Rational>] {
        &self.projections
    }

    /// Same subspaces, new weights.
    pub fn reweighted(&self, weights: &[Rational]) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: weights.len(),
            });
        }
        let mut members = Vec::with_capacity(self.len());
        for (member, (w, v)) in self.members.iter().zip(weights).enumerate() {
            if !v.is_positive() {
                return Err(Error::NonPositiveWeight { member });
            }
            members.push(WeightedSubspace {
                subspace: w.subspace.clone(),
                weight: v.clone(),
            });
        }
        Ok(Self {
            ambient_dim: self.ambient_dim,
            members,
            projections: self.projections.clone(),
        })
    }

    /// `Σ v_i² P_i`.
    pub fn fusion_operator(&self) -> Matrix<Rational> {
        let n = self.ambient_dim;
        self.members
            .iter()
            .zip(&self.projections)
            .fold(Matrix::zeros(n, n), |acc, (w, p)| {
                acc.add(&p.scale(&(&w.weight * &w.weight))).expect("square")
            })
    }

    /// `‖P_i x‖² = ⟨P_i x, x⟩` for every member.
    pub fn measurements(&self, x: &[Rational]) -> Vec<Rational> {
        self.projections
            .iter()
            .map(|p| crate::matrix::dot(&p.mul_vec(x).expect("length n"), x))
            .collect()
    }

    /// Coordinate support of every member when all are spanned by canonical
    /// basis vectors.
    pub fn coordinate_supports(&self) -> Option<Vec<Vec<usize>>> {
        self.members.iter().map(|w| w.subspace.coordinate_support()).collect()
    }

    pub(crate) fn family(&self) -> SpanFamily {
        SpanFamily::new(
            self.ambient_dim,
            self.members
                .iter()
                .map(|w| {
                    w.subspace
                        .columns()
                        .iter()
                        .map(|c| exact::primitive_integer_vector(c))
                        .collect()
                })
                .collect(),
        )
    }
}

/// Extreme eigenvalues of `Σ v_i² P_i`.
pub fn fusion_bounds(ff: &FusionFrame, mode: Mode) -> Result<(f64, f64)> {
    mode.require_float()?;
    crate::linalg::float::symmetric_spectrum_bounds(&ff.fusion_operator().map(to_f64))
}

/// The constant `A > 0` when `Σ v_i² P_i = A·I` exactly.
pub fn tightness_constant(ff: &FusionFrame) -> Option<Rational> {
    let s = ff.fusion_operator();
    let a = s.get(0, 0).clone();
    (!a.is_zero() && s == Matrix::identity(ff.ambient_dim()).scale(&a)).then_some(a)
}
