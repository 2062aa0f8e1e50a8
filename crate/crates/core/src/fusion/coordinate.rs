//! Exact decisions for subspaces with commuting projections.
//!
//! When the projections commute, `R^n` splits into joint eigenspaces
//! ("atoms") and `‖P_i x‖²` is a sum of per-atom energies. The measurements
//! then determine `‖x‖²` exactly when the all-ones vector lies in the row
//! space of the member/atom incidence matrix. Axis-aligned subspaces are the
//! case where every atom is a coordinate line.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::decide::{span_gap_witness, NrNo, NrYes};
use super::FusionFrame;
use crate::error::{Error, Result};
use crate::linalg::exact;
use crate::matrix::Matrix;
use crate::scalar::{exact_sqrt, Rational};
use crate::search::SearchOptions;
use crate::subspace::SubspaceBasis;
use crate::Decision;

fn supports(ff: &FusionFrame) -> Result<Vec<Vec<usize>>> {
    ff.members()
        .iter()
        .enumerate()
        .map(|(member, w)| {
            w.subspace()
                .coordinate_support()
                .ok_or(Error::NonAxisAligned { member })
        })
        .collect()
}

fn incidence(n: usize, supports: &[Vec<usize>]) -> Matrix<Rational> {
    let rows: Vec<Vec<Rational>> = supports
        .iter()
        .map(|s| {
            let mut row = vec![Rational::zero(); n];
            for &k in s {
                row[k] = Rational::one();
            }
            row
        })
        .collect();
    Matrix::from_rows_with_cols(&rows, n).expect("rows of length n")
}

/// Coefficients `c` with `Σ c_i r_i = 1` for the rows `r_i` of `m`.
fn row_space_coefficients(m: &Matrix<Rational>) -> Option<Vec<Rational>> {
    let ones = vec![Rational::one(); m.cols()];
    exact::solve(&m.transpose(), &ones).expect("conformable")
}

/// Exact norm-retrieval decision for axis-aligned members.
pub fn coordinate_nr_decision(ff: &FusionFrame) -> Result<Decision<NrYes, NrNo>> {
    let n = ff.ambient_dim();
    let m = incidence(n, &supports(ff)?);
    if let Some(c) = row_space_coefficients(&m) {
        return Ok(Decision::CertifiedYes(NrYes::IndicatorRowSpace(c)));
    }
    // 1 ∉ rowspace(M) = (ker M)^⊥, so some kernel vector has nonzero sum.
    let mut kernel = exact::nullspace_vectors(&m)
        .into_iter()
        .find(|k| !k.iter().fold(Rational::zero(), |a, x| a + x).is_zero())
        .ok_or(Error::InternalInconsistency("kernel orthogonal to the all-ones vector"))?;
    if kernel.iter().fold(Rational::zero(), |a, x| a + x).is_negative() {
        kernel = kernel.into_iter().map(|x| -x).collect();
    }
    Ok(Decision::CertifiedNo(NrNo::squared_pair(kernel)))
}

/// Search for `ε ∈ {±1}^m` and an integer `K ≥ 1` with `Σ ε_i 1_{I_i} = K·1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignCondition {
    pub epsilons: Vec<i8>,
    pub k: i64,
}

impl SignCondition {
    pub fn verify(&self, ff: &FusionFrame) -> bool {
        let Some(sup) = ff.coordinate_supports() else {
            return false;
        };
        if self.epsilons.len() != sup.len() || self.k < 1 || self.epsilons.iter().any(|e| e.abs() != 1) {
            return false;
        }
        let mut sums = vec![0i64; ff.ambient_dim()];
        for (s, &e) in sup.iter().zip(&self.epsilons) {
            for &k in s {
                sums[k] += e as i64;
            }
        }
        sums.iter().all(|&s| s == self.k)
    }
}

/// Masks are tried in increasing order, bit `i` set meaning `ε_i = −1`, so the
/// all-plus assignment comes first.
pub fn t13_sign_condition(ff: &FusionFrame, opts: &SearchOptions) -> Result<Option<SignCondition>> {
    let sup = supports(ff)?;
    let m = sup.len();
    opts.check_members(m)?;
    let n = ff.ambient_dim();
    let mut sums = vec![0i64; n];
    for mask in 0u64..(1u64 << m) {
        sums.iter_mut().for_each(|s| *s = 0);
        for (i, s) in sup.iter().enumerate() {
            let sign = if mask >> i & 1 == 1 { -1 } else { 1 };
            for &k in s {
                sums[k] += sign;
            }
        }
        let k = sums[0];
        if k >= 1 && sums.iter().all(|&s| s == k) {
            let epsilons = (0..m).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            return Ok(Some(SignCondition { epsilons, k }));
        }
    }
    Ok(None)
}

pub fn projections_commute(ff: &FusionFrame) -> bool {
    let ps = ff.projections();
    (0..ps.len()).all(|i| (0..i).all(|j| ps[i].mul(&ps[j]).expect("square") == ps[j].mul(&ps[i]).expect("square")))
}

/// Joint eigenspaces of commuting projections: a basis of each nonzero atom
/// and the members whose range contains it.
pub fn atoms(ff: &FusionFrame) -> Vec<(SubspaceBasis, Vec<bool>)> {
    let n = ff.ambient_dim();
    let id: Matrix<Rational> = Matrix::identity(n);
    let mut current = vec![(SubspaceBasis::whole(n), Vec::new())];
    for p in ff.projections() {
        let q = id.sub(p).expect("square");
        let mut next = Vec::new();
        for (atom, flags) in current {
            for (map, inside) in [(p, true), (&q, false)] {
                let images: Vec<Vec<Rational>> = atom
                    .columns()
                    .iter()
                    .map(|c| map.mul_vec(c).expect("length n"))
                    .collect();
                let part = SubspaceBasis::span_of(n, &images).expect("length n");
                if part.dim() > 0 {
                    let mut f: Vec<bool> = flags.clone();
                    f.push(inside);
                    next.push((part, f));
                }
            }
        }
        current = next;
    }
    current
}

/// Exact decision when all projections commute; `None` otherwise.
pub fn commuting_nr_decision(ff: &FusionFrame) -> Result<Option<Decision<NrYes, NrNo>>> {
    if !projections_commute(ff) {
        return Ok(None);
    }
    let atoms = atoms(ff);
    let rows: Vec<Vec<Rational>> = (0..ff.len())
        .map(|i| {
            atoms
                .iter()
                .map(|(_, flags)| if flags[i] { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let m = Matrix::from_rows_with_cols(&rows, atoms.len())?;
    if let Some(c) = row_space_coefficients(&m) {
        let yes = NrYes::ProjectionSpan(c);
        if !yes.verify(ff) {
            return Err(Error::InternalInconsistency(
                "atom coefficients do not resolve the identity",
            ));
        }
        return Ok(Some(Decision::CertifiedYes(yes)));
    }
    // One vector per atom: a ∈ span{P_i a} would force 1 into the row space.
    let n = ff.ambient_dim();
    let mut a = vec![Rational::zero(); n];
    for (atom, _) in &atoms {
        let c = &atom.columns()[0];
        for (x, y) in a.iter_mut().zip(c) {
            *x = &*x + y;
        }
    }
    span_gap_witness(ff, &a)
        .map(|w| Some(Decision::CertifiedNo(w)))
        .ok_or(Error::InternalInconsistency("atom sum lies in its projection span"))
}

pub(crate) fn squared_roots(u_sq: &[Rational], v_sq: &[Rational]) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let u: Option<Vec<Rational>> = u_sq.iter().map(exact_sqrt).collect();
    let v: Option<Vec<Rational>> = v_sq.iter().map(exact_sqrt).collect();
    Some((u?, v?))
}
