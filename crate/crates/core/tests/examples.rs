//! Worked examples exercised through the public API.

use retrieval_core::frame::{
    check_orthogonality_of_independent_nr, does_norm_retrieval, does_phase_retrieval, frame_bounds, spark, Frame,
};
use retrieval_core::fusion::{
    coordinate_nr_decision, decide_norm_retrieval, extend_to_superspace, t13_sign_condition, Budget, FusionFrame,
    NrRule,
};
use retrieval_core::linalg::exact::projection_matrix;
use retrieval_core::matrix::norm_sq;
use retrieval_core::scalar::{int, ratio, Mode, Rational};
use retrieval_core::{Decision, Matrix, SearchOptions, SubspaceBasis, Verdict};

fn e(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| int((i == j) as i64)).collect()
}

fn v(xs: &[i64]) -> Vec<Rational> {
    xs.iter().copied().map(int).collect()
}

fn opts() -> SearchOptions {
    SearchOptions::default()
}

fn hyperplanes_r3() -> FusionFrame {
    FusionFrame::unweighted(
        3,
        vec![
            vec![e(3, 1), e(3, 2)],
            vec![e(3, 0), e(3, 2)],
            vec![v(&[1, 1, 0]), e(3, 2)],
        ],
    )
    .unwrap()
}

#[test]
fn plane_counterexample_fails_norm_retrieval() {
    let ff = FusionFrame::unweighted(3, vec![vec![e(3, 1), e(3, 2)], vec![e(3, 0), e(3, 2)]]).unwrap();
    let verdict = decide_norm_retrieval(&ff, &Budget::default(), &opts()).unwrap();
    assert_eq!(verdict.rule, NrRule::CoordinateRowSpace);
    let Decision::CertifiedNo(w) = &verdict.decision else {
        panic!("{verdict:?}")
    };
    assert!(w.verify(&ff));
    // Same measurements, different norms.
    let (x, y) = (v(&[2, 2, 1]), v(&[1, 1, 2]));
    assert_eq!(ff.measurements(&x), ff.measurements(&y));
    assert_eq!((norm_sq(&x), norm_sq(&y)), (int(9), int(6)));
}

#[test]
fn hyperplanes_stay_undecided() {
    let ff = hyperplanes_r3();
    let verdict = decide_norm_retrieval(&ff, &Budget { trials: 2000, seed: 5 }, &opts()).unwrap();
    assert!(verdict.decision.is_undecided(), "{verdict:?}");
    // The third member is not axis aligned.
    assert!(coordinate_nr_decision(&ff).is_err() || coordinate_nr_decision(&ff).unwrap().is_undecided());
}

#[test]
fn extension_of_hyperplanes_adds_e4() {
    let ext = extend_to_superspace(&hyperplanes_r3(), 3, 4).unwrap();
    let expected = FusionFrame::unweighted(
        4,
        vec![
            vec![e(4, 1), e(4, 2), e(4, 3)],
            vec![e(4, 0), e(4, 2), e(4, 3)],
            vec![v(&[1, 1, 0, 0]), e(4, 2), e(4, 3)],
        ],
    )
    .unwrap();
    assert_eq!(ext.projections(), expected.projections());
}

#[test]
fn indicator_rule_separates_from_sign_condition() {
    let ff = FusionFrame::unweighted(
        4,
        vec![
            vec![e(4, 0), e(4, 3)],
            vec![e(4, 1), e(4, 3)],
            vec![e(4, 2), e(4, 3)],
            vec![e(4, 3)],
        ],
    )
    .unwrap();
    assert!(coordinate_nr_decision(&ff).unwrap().is_yes());
    assert_eq!(t13_sign_condition(&ff, &opts()).unwrap(), None);

    let triple = FusionFrame::unweighted(
        3,
        vec![vec![e(3, 0), e(3, 1)], vec![e(3, 1), e(3, 2)], vec![e(3, 0), e(3, 2)]],
    )
    .unwrap();
    let s = t13_sign_condition(&triple, &opts()).unwrap().unwrap();
    assert_eq!((s.epsilons, s.k), (vec![1, 1, 1], 2));
}

#[test]
fn tilted_plane_projection_closed_form() {
    let w = SubspaceBasis::span_of(3, &[v(&[1, 1, 0]), e(3, 2)]).unwrap();
    let p = projection_matrix(&w).unwrap();
    let h = ratio(1, 2);
    let expected = Matrix::from_vec(
        3,
        3,
        vec![
            h.clone(),
            h.clone(),
            int(0),
            h.clone(),
            h,
            int(0),
            int(0),
            int(0),
            int(1),
        ],
    )
    .unwrap();
    assert_eq!(p, expected);
}

#[test]
fn plane_triple_decisions() {
    let f = Frame::new(2, vec![v(&[1, 0]), v(&[0, 1]), v(&[1, 1])]).unwrap();
    assert!(does_phase_retrieval(&f, &opts()).unwrap().is_yes());
    assert!(does_norm_retrieval(&f, &opts()).unwrap().is_yes());
    let (lo, hi) = frame_bounds(&f, Mode::float()).unwrap();
    assert!((lo - 1.0).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);

    let four = Frame::new(2, vec![v(&[1, 0]), v(&[0, 1]), v(&[1, 1]), v(&[1, -1])]).unwrap();
    assert_eq!(spark(&four, &opts()).value, 3);
}

#[test]
fn skewed_basis_fails_norm_retrieval() {
    // Complements of e1 and e1 + e2 are e2 and (1, -1); their inner product is -1.
    let f = Frame::new(2, vec![v(&[1, 0]), v(&[1, 1])]).unwrap();
    let Decision::CertifiedNo(w) = does_norm_retrieval(&f, &opts()).unwrap() else {
        panic!()
    };
    assert_eq!(w.subset, vec![0]);
    assert!(w.verify(&f));
    let imp = check_orthogonality_of_independent_nr(&f, &opts()).unwrap();
    assert!(imp.holds() && !imp.exercised());

    let scaled = Frame::new(2, vec![v(&[2, 0]), v(&[0, 3])]).unwrap();
    let imp = check_orthogonality_of_independent_nr(&scaled, &opts()).unwrap();
    assert!(imp.holds() && imp.exercised());
}

#[test]
fn near_orthogonal_triple_fails() {
    let f = Frame::new(3, vec![vec![int(1), ratio(1, 100), int(0)], e(3, 1), e(3, 2)]).unwrap();
    assert_eq!(does_norm_retrieval(&f, &opts()).unwrap().kind(), Verdict::CertifiedNo);
}
