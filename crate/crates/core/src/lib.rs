//! Exact-arithmetic deciders for phase retrieval and norm retrieval by finite
//! real frames and fusion frames.
//!
//! Every verdict the crate labels *certified* is produced with exact rational
//! arithmetic and carries a witness that can be re-checked without repeating
//! the search that found it. Floating point is used only where the underlying
//! quantity is irrational by nature (spectral bounds, operator norms, Haar
//! sampling) and results derived from it are labeled accordingly.
//!
//! The crate is `no_std` + `alloc`. The default `std` feature only adds
//! multi-threaded subset sweeps; results are bit-identical with and without it.
#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod frame;
pub mod fusion;
pub mod linalg;
pub mod matrix;
pub mod perturbation;
pub mod random;
pub mod scalar;
pub mod search;
pub mod sequences;
pub mod subspace;

pub use error::{Error, Result};
pub use frame::Frame;
pub use fusion::{FusionFrame, WeightedSubspace};
pub use matrix::Matrix;
pub use scalar::{Mode, Rational};
pub use search::SearchOptions;
pub use subspace::SubspaceBasis;

/// Three-valued outcome of a decision procedure.
///
/// `CertifiedYes` and `CertifiedNo` carry the evidence for the verdict;
/// `Undecided` records how much searching was done before giving up.
#[derive(Clone, Debug, PartialEq)]
pub enum Decision<Y, N> {
    CertifiedYes(Y),
    CertifiedNo(N),
    Undecided(Undecided),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Undecided {
    pub trials: usize,
    pub seed: u64,
}

impl<Y, N> Decision<Y, N> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::CertifiedYes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Decision::CertifiedNo(_))
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Decision::Undecided(_))
    }

    pub fn kind(&self) -> Verdict {
        match self {
            Decision::CertifiedYes(_) => Verdict::CertifiedYes,
            Decision::CertifiedNo(_) => Verdict::CertifiedNo,
            Decision::Undecided(_) => Verdict::Undecided,
        }
    }

    pub fn no_witness(&self) -> Option<&N> {
        match self {
            Decision::CertifiedNo(w) => Some(w),
            _ => None,
        }
    }
}

/// The bare verdict of a [`Decision`], without evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    CertifiedYes,
    CertifiedNo,
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedYes => "CertifiedYes",
            Verdict::CertifiedNo => "CertifiedNo",
            Verdict::Undecided => "Undecided",
        }
    }
}
