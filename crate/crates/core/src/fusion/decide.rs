use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::coordinate::{commuting_nr_decision, coordinate_nr_decision, squared_roots};
use super::{tightness_constant, FusionFrame};
use crate::error::{Error, Result};
use crate::linalg::exact;
use crate::matrix::{add_vec, dot, norm_sq, sub_vec, Matrix};
use crate::scalar::{int, Rational};
use crate::search::SearchOptions;
use crate::subspace::SubspaceBasis;
use crate::{Decision, Undecided};

/// Why a fusion frame does norm retrieval.
#[derive(Clone, Debug, PartialEq)]
pub enum NrYes {
    /// `Σ v_i² P_i = A·I`.
    Tight(Rational),
    /// Axis-aligned members with `Σ c_i 1_{I_i} = 1`.
    IndicatorRowSpace(Vec<Rational>),
    /// `Σ c_i P_i = I`, so `‖x‖² = Σ c_i ‖P_i x‖²`.
    ProjectionSpan(Vec<Rational>),
    /// Every member is a line (or zero) and the exhaustive subset sweep found
    /// no failure. There is no compact certificate.
    RankOneFrame,
}

impl NrYes {
    /// Re-checks the certificate; `None` when there is nothing compact to check.
    pub fn check(&self, ff: &FusionFrame) -> Option<bool> {
        match self {
            NrYes::RankOneFrame => None,
            other => Some(other.verify(ff)),
        }
    }

    pub fn verify(&self, ff: &FusionFrame) -> bool {
        let n = ff.ambient_dim();
        match self {
            NrYes::Tight(a) => tightness_constant(ff).as_ref() == Some(a),
            NrYes::IndicatorRowSpace(c) => {
                let Some(supports) = ff.coordinate_supports() else {
                    return false;
                };
                if c.len() != supports.len() {
                    return false;
                }
                let mut sum = vec![Rational::zero(); n];
                for (ci, s) in c.iter().zip(&supports) {
                    for &k in s {
                        sum[k] = &sum[k] + ci;
                    }
                }
                sum.iter().all(One::is_one)
            }
            NrYes::ProjectionSpan(c) => c.len() == ff.len() && combine(ff, c) == Matrix::identity(n),
            NrYes::RankOneFrame => ff.members().iter().all(|w| w.subspace().dim() <= 1),
        }
    }
}

fn combine(ff: &FusionFrame, c: &[Rational]) -> Matrix<Rational> {
    let n = ff.ambient_dim();
    ff.projections()
        .iter()
        .zip(c)
        .fold(Matrix::zeros(n, n), |acc, (p, ci)| {
            acc.add(&p.scale(ci)).expect("square")
        })
}

/// Why a fusion frame fails norm retrieval. Every variant re-verifies exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum NrNo {
    /// Axis-aligned members: coordinate energies `u_sq`, `v_sq ≥ 0` with equal
    /// sums over every member's support and different totals. `roots` holds
    /// the vectors themselves when every entry is a rational square.
    SquaredPair {
        kernel: Vec<Rational>,
        u_sq: Vec<Rational>,
        v_sq: Vec<Rational>,
        roots: Option<(Vec<Rational>, Vec<Rational>)>,
    },
    /// `x` is killed by the members in `subset`, `y` by the rest, and
    /// `⟨x, y⟩ ≠ 0`; `u = x + y`, `v = x − y`.
    Pair {
        subset: Vec<usize>,
        x: Vec<Rational>,
        y: Vec<Rational>,
        u: Vec<Rational>,
        v: Vec<Rational>,
    },
    /// `x ∉ span{P_i x}`; with `b` the residual of `x` off that span,
    /// `u = x + b` and `v = x − b`.
    SpanGap {
        x: Vec<Rational>,
        u: Vec<Rational>,
        v: Vec<Rational>,
    },
}

impl NrNo {
    pub(crate) fn squared_pair(kernel: Vec<Rational>) -> Self {
        let u_sq: Vec<Rational> = kernel
            .iter()
            .map(|k| if k.is_positive() { k.clone() } else { Rational::zero() })
            .collect();
        let v_sq: Vec<Rational> = kernel
            .iter()
            .map(|k| if k.is_negative() { -k.clone() } else { Rational::zero() })
            .collect();
        let roots = squared_roots(&u_sq, &v_sq);
        NrNo::SquaredPair {
            kernel,
            u_sq,
            v_sq,
            roots,
        }
    }

    /// The pair `(u, v)` of actual vectors, when available.
    pub fn pair(&self) -> Option<(&[Rational], &[Rational])> {
        match self {
            NrNo::SquaredPair { roots, .. } => roots.as_ref().map(|(u, v)| (u.as_slice(), v.as_slice())),
            NrNo::Pair { u, v, .. } | NrNo::SpanGap { u, v, .. } => Some((u, v)),
        }
    }

    pub fn verify(&self, ff: &FusionFrame) -> bool {
        let n = ff.ambient_dim();
        let pair_ok = |u: &[Rational], v: &[Rational]| {
            u.len() == n && v.len() == n && ff.measurements(u) == ff.measurements(v) && norm_sq(u) != norm_sq(v)
        };
        match self {
            NrNo::SquaredPair {
                kernel,
                u_sq,
                v_sq,
                roots,
            } => {
                let Some(supports) = ff.coordinate_supports() else {
                    return false;
                };
                if u_sq.len() != n || v_sq.len() != n || kernel != &sub_vec(u_sq, v_sq) {
                    return false;
                }
                if u_sq.iter().chain(v_sq).any(Signed::is_negative) {
                    return false;
                }
                let total = |s: &[usize], w: &[Rational]| s.iter().fold(Rational::zero(), |a, &k| a + &w[k]);
                let all: Vec<usize> = (0..n).collect();
                let energies_ok =
                    supports.iter().all(|s| total(s, u_sq) == total(s, v_sq)) && total(&all, u_sq) != total(&all, v_sq);
                let roots_ok = roots.as_ref().is_none_or(|(u, v)| {
                    u.iter().zip(u_sq).all(|(r, s)| &(r * r) == s)
                        && v.iter().zip(v_sq).all(|(r, s)| &(r * r) == s)
                        && pair_ok(u, v)
                });
                energies_ok && roots_ok
            }
            NrNo::Pair { subset, x, y, u, v } => {
                if x.len() != n || y.len() != n || subset.iter().any(|&j| j >= ff.len()) {
                    return false;
                }
                let killed = (0..ff.len()).all(|j| {
                    let w = if subset.contains(&j) { x } else { y };
                    ff.projection(j).mul_vec(w).expect("length n").iter().all(Zero::is_zero)
                });
                killed && !dot(x, y).is_zero() && u == &add_vec(x, y) && v == &sub_vec(x, y) && pair_ok(u, v)
            }
            NrNo::SpanGap { x, u, v } => {
                if x.len() != n {
                    return false;
                }
                let images = images(ff, x);
                let mut with_x = images.clone();
                with_x.push(x.clone());
                let r = exact::rank(&Matrix::from_rows_with_cols(&images, n).expect("length n"));
                let rx = exact::rank(&Matrix::from_rows_with_cols(&with_x, n).expect("length n"));
                rx == r + 1 && pair_ok(u, v)
            }
        }
    }
}

fn images(ff: &FusionFrame, x: &[Rational]) -> Vec<Vec<Rational>> {
    ff.projections()
        .iter()
        .map(|p| p.mul_vec(x).expect("length n"))
        .collect()
}

/// The `SpanGap` witness for `x`, if `x ∉ span{P_i x}`.
pub fn span_gap_witness(ff: &FusionFrame, x: &[Rational]) -> Option<NrNo> {
    let n = ff.ambient_dim();
    if x.len() != n || x.iter().all(Zero::is_zero) {
        return None;
    }
    let images = images(ff, x);
    let ints: Vec<Vec<_>> = images.iter().map(|v| exact::primitive_integer_vector(v)).collect();
    if exact::integer_rank(&ints) == n {
        return None;
    }
    let span = SubspaceBasis::span_of(n, &images).expect("length n");
    let p = span.projection().mul_vec(x).expect("length n");
    let b = sub_vec(x, &p);
    if b.iter().all(Zero::is_zero) {
        return None;
    }
    Some(NrNo::SpanGap {
        x: x.to_vec(),
        u: add_vec(x, &b),
        v: sub_vec(x, &b),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub trials: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
        }
    }
}

pub fn is_tight_then_nr(ff: &FusionFrame) -> Decision<NrYes, NrNo> {
    match tightness_constant(ff) {
        Some(a) => Decision::CertifiedYes(NrYes::Tight(a)),
        None => Decision::Undecided(Undecided { trials: 0, seed: 0 }),
    }
}

/// Coefficients `c` with `Σ c_i P_i = I`, if any.
pub fn projection_span(ff: &FusionFrame) -> Option<Vec<Rational>> {
    let n = ff.ambient_dim();
    let m = ff.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..n {
        for c in r..n {
            rows.push((0..m).map(|i| ff.projection(i).get(r, c).clone()).collect::<Vec<_>>());
            rhs.push(if r == c { Rational::one() } else { Rational::zero() });
        }
    }
    let a = Matrix::from_rows_with_cols(&rows, m).expect("uniform rows");
    exact::solve(&a, &rhs).expect("conformable")
}

/// For every `J`, `∩_{j∈J} W_j^⊥` must be orthogonal to `∩_{j∉J} W_j^⊥`.
/// Returns a refuting pair, or `None` when the condition holds (which does
/// not by itself certify norm retrieval).
pub fn necessary_orthogonality_check(ff: &FusionFrame, opts: &SearchOptions) -> Result<Option<NrNo>> {
    let family = ff.family();
    let hit = family.first_partition(opts, |j, rest| {
        let xs = family.complement(j);
        let ys = family.complement(rest);
        xs.iter().find_map(|x| {
            ys.iter().find_map(|y| {
                (!dot(x, y).is_zero()).then(|| (exact::integer_to_rational(x), exact::integer_to_rational(y)))
            })
        })
    })?;
    Ok(hit.map(|(subset, (x, y))| NrNo::Pair {
        u: add_vec(&x, &y),
        v: sub_vec(&x, &y),
        subset,
        x,
        y,
    }))
}

const GRID: i64 = 5;
const PATTERN_DIM_LIMIT: usize = 6;

/// Looks for an exact `x ∉ span{P_i x}`: first every 0/1 pattern (for
/// `n ≤ 6`), then `trials` integer vectors on `[−5, 5]^n`, every other one
/// with a random set of coordinates zeroed.
pub fn t5_span_falsifier(ff: &FusionFrame, budget: &Budget) -> Decision<NrYes, NrNo> {
    let n = ff.ambient_dim();
    let mut tried = 0usize;
    if n <= PATTERN_DIM_LIMIT {
        for mask in 1u32..(1u32 << n) {
            let x: Vec<Rational> = (0..n).map(|k| int(i64::from(mask >> k & 1))).collect();
            tried += 1;
            if let Some(w) = span_gap_witness(ff, &x) {
                return Decision::CertifiedNo(w);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for t in 0..budget.trials {
        let sparse = t % 2 == 1;
        let x: Vec<Rational> = (0..n)
            .map(|_| {
                let v = rng.random_range(-GRID..=GRID);
                if sparse && rng.random_bool(0.5) {
                    int(0)
                } else {
                    int(v)
                }
            })
            .collect();
        tried += 1;
        if let Some(w) = span_gap_witness(ff, &x) {
            return Decision::CertifiedNo(w);
        }
    }
    Decision::Undecided(Undecided {
        trials: tried,
        seed: budget.seed,
    })
}

/// Which step of [`decide_norm_retrieval`] produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NrRule {
    Tight,
    CoordinateRowSpace,
    CommutingAtoms,
    ProjectionSpan,
    NecessaryOrthogonality,
    RankOneFrame,
    SpanFalsifier,
    Exhausted,
}

impl NrRule {
    pub fn as_str(self) -> &'static str {
        match self {
            NrRule::Tight => "tight",
            NrRule::CoordinateRowSpace => "coordinate-row-space",
            NrRule::CommutingAtoms => "commuting-atoms",
            NrRule::ProjectionSpan => "projection-span",
            NrRule::NecessaryOrthogonality => "necessary-orthogonality",
            NrRule::RankOneFrame => "rank-one-frame",
            NrRule::SpanFalsifier => "span-falsifier",
            NrRule::Exhausted => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionVerdict {
    pub decision: Decision<NrYes, NrNo>,
    pub rule: NrRule,
}

/// Runs the sufficient conditions, exact deciders and falsifiers in turn and
/// stops at the first conclusive one.
pub fn decide_norm_retrieval(ff: &FusionFrame, budget: &Budget, opts: &SearchOptions) -> Result<FusionVerdict> {
    let done = |decision, rule| Ok(FusionVerdict { decision, rule });
    if let d @ Decision::CertifiedYes(_) = is_tight_then_nr(ff) {
        return done(d, NrRule::Tight);
    }
    match coordinate_nr_decision(ff) {
        Ok(d) => return done(d, NrRule::CoordinateRowSpace),
        Err(Error::NonAxisAligned { .. }) => {}
        Err(e) => return Err(e),
    }
    if let Some(d) = commuting_nr_decision(ff)? {
        return done(d, NrRule::CommutingAtoms);
    }
    if let Some(c) = projection_span(ff) {
        return done(Decision::CertifiedYes(NrYes::ProjectionSpan(c)), NrRule::ProjectionSpan);
    }
    if let Some(w) = necessary_orthogonality_check(ff, opts)? {
        return done(Decision::CertifiedNo(w), NrRule::NecessaryOrthogonality);
    }
    // For lines the orthogonality condition is also sufficient.
    if ff.members().iter().all(|w| w.subspace().dim() <= 1) {
        return done(Decision::CertifiedYes(NrYes::RankOneFrame), NrRule::RankOneFrame);
    }
    match t5_span_falsifier(ff, budget) {
        d @ Decision::CertifiedNo(_) => done(d, NrRule::SpanFalsifier),
        d => done(d, NrRule::Exhausted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::tests::{axis, e, lines};
    use crate::scalar::ratio;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn skew_hyperplanes() -> FusionFrame {
        // Complements of e1, e2 and (1,-1,0).
        FusionFrame::unweighted(
            3,
            vec![
                vec![v(&[0, 1, 0]), v(&[0, 0, 1])],
                vec![v(&[1, 0, 0]), v(&[0, 0, 1])],
                vec![v(&[1, 1, 0]), v(&[0, 0, 1])],
            ],
        )
        .unwrap()
    }

    #[test]
    fn pipeline_on_named_examples() {
        let o = SearchOptions::default();
        let b = Budget::default();
        let r = decide_norm_retrieval(&axis(3, &[&[1, 2], &[0, 2]]), &b, &o).unwrap();
        assert!(r.decision.is_no());
        assert_eq!(r.rule, NrRule::CoordinateRowSpace);
        let r = decide_norm_retrieval(&axis(4, &[&[0, 3], &[1, 3], &[2, 3], &[3]]), &b, &o).unwrap();
        assert!(r.decision.is_yes());
        assert_eq!(r.rule, NrRule::CoordinateRowSpace);
        let r = decide_norm_retrieval(&axis(3, &[&[0, 1], &[1, 2], &[0, 2]]), &b, &o).unwrap();
        assert_eq!(r.rule, NrRule::Tight);
    }

    #[test]
    fn skew_hyperplanes_stay_undecided() {
        let ff = skew_hyperplanes();
        let r = decide_norm_retrieval(&ff, &Budget::default(), &SearchOptions::default()).unwrap();
        assert_eq!(r.rule, NrRule::Exhausted);
        assert_eq!(
            r.decision,
            Decision::Undecided(Undecided {
                trials: 10_007,
                seed: 0
            })
        );
    }

    #[test]
    fn skew_third_projection() {
        let ff = skew_hyperplanes();
        let p = ff.projection(2);
        let x = v(&[3, -1, 4]);
        assert_eq!(p.mul_vec(&x).unwrap(), vec![int(1), int(1), int(4)]);
        let half = ratio(1, 2);
        assert_eq!(p.get(0, 1), &half);
    }

    #[test]
    fn necessary_check_examples() {
        let o = SearchOptions::default();
        assert_eq!(
            necessary_orthogonality_check(&axis(3, &[&[1, 2], &[0, 2]]), &o).unwrap(),
            None
        );
        let ff = lines(2, &[&[1, 0], &[1, 1]]);
        let w = necessary_orthogonality_check(&ff, &o).unwrap().unwrap();
        assert!(w.verify(&ff));
        match &w {
            NrNo::Pair { subset, .. } => assert_eq!(subset, &vec![0]),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            necessary_orthogonality_check(&axis(2, &[&[0], &[1]]), &o).unwrap(),
            None
        );
    }

    #[test]
    fn span_falsifier_examples() {
        let b = Budget::default();
        let ff = axis(3, &[&[1, 2], &[0, 2]]);
        let w = t5_span_falsifier(&ff, &b);
        assert!(w.no_witness().unwrap().verify(&ff));
        let whole = axis(3, &[&[0, 1, 2]]);
        assert!(t5_span_falsifier(&whole, &Budget { trials: 50, seed: 1 }).is_undecided());
    }

    #[test]
    fn rank_one_frames_follow_the_vector_decision() {
        let o = SearchOptions::default();
        let b = Budget::default();
        let r = decide_norm_retrieval(&lines(2, &[&[1, 0], &[1, 1]]), &b, &o).unwrap();
        assert!(r.decision.is_no());
        let r = decide_norm_retrieval(&lines(2, &[&[1, 2], &[2, -1], &[1, 1]]), &b, &o).unwrap();
        assert!(r.decision.is_yes());
    }

    #[test]
    fn tampered_certificates_fail() {
        let ff = axis(4, &[&[0, 3], &[1, 3], &[2, 3], &[3]]);
        assert!(NrYes::IndicatorRowSpace(v(&[1, 1, 1, -2])).verify(&ff));
        assert!(!NrYes::IndicatorRowSpace(v(&[1, 1, 1, -1])).verify(&ff));
        assert!(NrYes::ProjectionSpan(v(&[1, 1, 1, -2])).verify(&ff));
        let bad = NrNo::SpanGap {
            x: e(0, 4),
            u: e(0, 4),
            v: e(1, 4),
        };
        assert!(!bad.verify(&ff));
    }
}
