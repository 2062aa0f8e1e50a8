use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{tightness_constant, DependencyWitness, Frame};
use crate::error::{Error, Result};
use crate::linalg::exact::integer_to_rational;
use crate::matrix::{add_vec, dot, norm_sq, sub_vec};
use crate::scalar::Rational;
use crate::search::SearchOptions;
use crate::Decision;

/// A partition where neither side spans: `a ⊥ span I` and `b ⊥ span Iᶜ`, both
/// nonzero. Then `a + b` and `a − b` have identical measurement magnitudes
/// but are not equal up to sign.
#[derive(Clone, Debug, PartialEq)]
pub struct PrFailWitness {
    pub subset: Vec<usize>,
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
}

impl PrFailWitness {
    pub fn x(&self) -> Vec<Rational> {
        add_vec(&self.a, &self.b)
    }

    pub fn y(&self) -> Vec<Rational> {
        sub_vec(&self.a, &self.b)
    }

    pub fn verify(&self, frame: &Frame) -> bool {
        let n = frame.dim();
        if self.a.len() != n || self.b.len() != n || !valid_subset(&self.subset, frame.len()) {
            return false;
        }
        if self.a.iter().all(Zero::is_zero) || self.b.iter().all(Zero::is_zero) {
            return false;
        }
        let (x, y) = (self.x(), self.y());
        (0..frame.len()).all(|i| {
            let f = frame.vector(i);
            let side_ok = if self.subset.contains(&i) {
                dot(&self.a, f).is_zero()
            } else {
                dot(&self.b, f).is_zero()
            };
            side_ok && dot(&x, f).abs() == dot(&y, f).abs()
        })
    }
}

/// `x ⊥ span I`, `y ⊥ span Iᶜ` with `⟨x, y⟩ ≠ 0`; `u = x + y` and `v = x − y`
/// have identical measurement magnitudes and different norms.
#[derive(Clone, Debug, PartialEq)]
pub struct NrFailWitness {
    pub subset: Vec<usize>,
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub u: Vec<Rational>,
    pub v: Vec<Rational>,
}

impl NrFailWitness {
    pub(crate) fn from_pair(subset: Vec<usize>, x: Vec<Rational>, y: Vec<Rational>) -> Self {
        let u = add_vec(&x, &y);
        let v = sub_vec(&x, &y);
        Self { subset, x, y, u, v }
    }

    pub fn verify(&self, frame: &Frame) -> bool {
        let n = frame.dim();
        if [&self.x, &self.y, &self.u, &self.v].iter().any(|w| w.len() != n) || !valid_subset(&self.subset, frame.len())
        {
            return false;
        }
        if self.u != add_vec(&self.x, &self.y) || self.v != sub_vec(&self.x, &self.y) {
            return false;
        }
        if dot(&self.x, &self.y).is_zero() || norm_sq(&self.u) == norm_sq(&self.v) {
            return false;
        }
        (0..frame.len()).all(|i| {
            let f = frame.vector(i);
            let side_ok = if self.subset.contains(&i) {
                dot(&self.x, f).is_zero()
            } else {
                dot(&self.y, f).is_zero()
            };
            side_ok && dot(&self.u, f).abs() == dot(&self.v, f).abs()
        })
    }
}

fn valid_subset(subset: &[usize], m: usize) -> bool {
    subset.windows(2).all(|w| w[0] < w[1]) && subset.iter().all(|&i| i < m)
}

/// Re-checkable evidence about a frame.
#[derive(Clone, Debug, PartialEq)]
pub enum RetrievalCertificate {
    PrFail(PrFailWitness),
    NrFail(NrFailWitness),
    /// A dependent subfamily, e.g. an `n`-subset refuting full spark.
    Dependency(DependencyWitness),
    Tightness(Rational),
}

impl RetrievalCertificate {
    pub fn verify(&self, frame: &Frame) -> bool {
        match self {
            RetrievalCertificate::PrFail(w) => w.verify(frame),
            RetrievalCertificate::NrFail(w) => w.verify(frame),
            RetrievalCertificate::Dependency(w) => w.verify(frame),
            RetrievalCertificate::Tightness(a) => tightness_constant(frame).as_ref() == Some(a),
        }
    }
}

/// Evidence for a positive verdict reached by exhausting every partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exhaustive {
    /// Largest subset size visited (`⌊m/2⌋`).
    pub max_subset: usize,
}

fn first_int(basis: &[Vec<BigInt>]) -> Vec<Rational> {
    integer_to_rational(&basis[0])
}

/// The lexicographically smallest `I` (by size, then lex) with neither side
/// spanning, or `None` if the complement property holds.
pub fn complement_property_witness(frame: &Frame, opts: &SearchOptions) -> Result<Option<PrFailWitness>> {
    let family = frame.family();
    let hit = family.first_partition(opts, |i, rest| {
        let a = family.complement(i);
        let b = family.complement(rest);
        Some((first_int(&a), first_int(&b)))
    })?;
    Ok(hit.map(|(subset, (a, b))| PrFailWitness { subset, a, b }))
}

pub fn has_complement_property(frame: &Frame, opts: &SearchOptions) -> Result<bool> {
    Ok(complement_property_witness(frame, opts)?.is_none())
}

pub fn does_phase_retrieval(frame: &Frame, opts: &SearchOptions) -> Result<Decision<Exhaustive, PrFailWitness>> {
    match complement_property_witness(frame, opts)? {
        Some(w) => Ok(Decision::CertifiedNo(w)),
        None => {
            let (m, n) = (frame.len(), frame.dim());
            if m + 1 < 2 * n {
                return Err(Error::InternalInconsistency(
                    "complement property holds with fewer than 2n - 1 vectors",
                ));
            }
            Ok(Decision::CertifiedYes(Exhaustive { max_subset: m / 2 }))
        }
    }
}

/// Norm retrieval holds iff `(span I)^⊥ ⊥ (span Iᶜ)^⊥` for every `I`. Only
/// partitions where neither side spans can fail, and the condition is
/// symmetric in `I ↔ Iᶜ`.
pub fn does_norm_retrieval(frame: &Frame, opts: &SearchOptions) -> Result<Decision<Exhaustive, NrFailWitness>> {
    let family = frame.family();
    let hit = family.first_partition(opts, |i, rest| {
        let xs = family.complement(i);
        let ys = family.complement(rest);
        xs.iter().find_map(|x| {
            ys.iter()
                .find_map(|y| (!dot(x, y).is_zero()).then(|| (integer_to_rational(x), integer_to_rational(y))))
        })
    })?;
    Ok(match hit {
        Some((subset, (x, y))) => Decision::CertifiedNo(NrFailWitness::from_pair(subset, x, y)),
        None => Decision::CertifiedYes(Exhaustive {
            max_subset: frame.len() / 2,
        }),
    })
}

/// Outcome of checking "independent `n`-set doing norm retrieval is
/// orthogonal" on one frame.
#[derive(Clone, Debug, PartialEq)]
pub enum Implication {
    /// Norm retrieval fails; nothing to check.
    Vacuous(NrFailWitness),
    /// Norm retrieval holds and the Gram matrix is diagonal.
    Confirmed,
    /// Norm retrieval holds but two vectors are not orthogonal.
    Violated { i: usize, j: usize },
}

impl Implication {
    pub fn holds(&self) -> bool {
        !matches!(self, Implication::Violated { .. })
    }

    pub fn exercised(&self) -> bool {
        !matches!(self, Implication::Vacuous(_))
    }
}

pub fn check_orthogonality_of_independent_nr(frame: &Frame, opts: &SearchOptions) -> Result<Implication> {
    if frame.len() != frame.dim() || !frame.is_independent() {
        return Err(Error::Precondition("expected n independent vectors in R^n"));
    }
    match does_norm_retrieval(frame, opts)? {
        Decision::CertifiedNo(w) => Ok(Implication::Vacuous(w)),
        Decision::Undecided(_) => Err(Error::InternalInconsistency("exact sweep returned undecided")),
        Decision::CertifiedYes(_) => {
            let v = frame.vectors();
            for i in 0..v.len() {
                for j in 0..i {
                    if !dot(&v[i], &v[j]).is_zero() {
                        return Ok(Implication::Violated { i: j, j: i });
                    }
                }
            }
            Ok(Implication::Confirmed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::tests::frame;
    use crate::scalar::int;
    use alloc::vec;

    fn o() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn complement_property_examples() {
        let w = complement_property_witness(&frame(&[&[1, 0], &[0, 1]]), &o())
            .unwrap()
            .unwrap();
        assert_eq!(w.subset, vec![0]);
        assert!(w.verify(&frame(&[&[1, 0], &[0, 1]])));
        assert!(has_complement_property(&frame(&[&[1, 0], &[0, 1], &[1, 1]]), &o()).unwrap());
        let e3 = frame(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(complement_property_witness(&e3, &o()).unwrap().unwrap().subset, vec![0]);
    }

    #[test]
    fn phase_retrieval_examples() {
        let f = frame(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(does_phase_retrieval(&f, &o()).unwrap().is_yes());
        let f = frame(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]);
        let d = does_phase_retrieval(&f, &o()).unwrap();
        let w = d.no_witness().unwrap();
        assert!(w.verify(&f));
        // {e3} and its complement {e1, e2, e1+e2} both miss R^3; no smaller
        // subset fails, so the witness is a singleton rather than {e1, e2}.
        assert_eq!(w.subset, vec![2]);
    }

    #[test]
    fn non_spanning_frame_fails_at_empty_subset() {
        let f = frame(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0]]);
        let w = complement_property_witness(&f, &o()).unwrap().unwrap();
        assert!(w.subset.is_empty());
        let d = does_norm_retrieval(&f, &o()).unwrap();
        let w = d.no_witness().unwrap();
        assert!(w.subset.is_empty());
        assert!(w.verify(&f));
    }

    #[test]
    fn norm_retrieval_examples() {
        let f = frame(&[&[1, 0], &[1, 1]]);
        let d = does_norm_retrieval(&f, &o()).unwrap();
        let w = d.no_witness().unwrap().clone();
        assert_eq!(w.subset, vec![0]);
        assert!(w.verify(&f));
        // x ∝ e2 and y ∝ (1,-1): ⟨x, y⟩ = ∓1.
        assert_eq!(w.x[0], int(0));
        assert_eq!(w.y[0], -w.y[1].clone());
        assert!(does_norm_retrieval(&frame(&[&[1, 0], &[0, 1], &[1, 1]]), &o())
            .unwrap()
            .is_yes());
        assert!(does_norm_retrieval(&frame(&[&[0, 1], &[1, 0]]), &o()).unwrap().is_yes());
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let f = frame(&[&[1, 0], &[1, 1]]);
        let mut w = does_norm_retrieval(&f, &o()).unwrap().no_witness().unwrap().clone();
        assert!(w.verify(&f));
        w.u[0] = &w.u[0] + int(1);
        assert!(!w.verify(&f));
    }

    #[test]
    fn orthogonality_implication() {
        assert!(matches!(
            check_orthogonality_of_independent_nr(&frame(&[&[1, 0], &[1, 1]]), &o()).unwrap(),
            Implication::Vacuous(_)
        ));
        assert_eq!(
            check_orthogonality_of_independent_nr(&frame(&[&[2, 0], &[0, 3]]), &o()).unwrap(),
            Implication::Confirmed
        );
        assert!(check_orthogonality_of_independent_nr(&frame(&[&[1, 0], &[2, 0]]), &o()).is_err());
    }

    #[test]
    fn jobs_do_not_change_witnesses() {
        let f = frame(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        let serial = does_norm_retrieval(&f, &o()).unwrap();
        let parallel = does_norm_retrieval(&f, &SearchOptions::with_jobs(8)).unwrap();
        assert_eq!(serial, parallel);
        let serial = complement_property_witness(&f, &o()).unwrap();
        let parallel = complement_property_witness(&f, &SearchOptions::with_jobs(8)).unwrap();
        assert_eq!(serial, parallel);
    }
}
