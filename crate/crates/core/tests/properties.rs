use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use retrieval_core::frame::{does_norm_retrieval, does_phase_retrieval, is_full_spark, spark, Frame};
use retrieval_core::fusion::{apply_unitary, decide_norm_retrieval, Budget, FusionFrame};
use retrieval_core::linalg::exact;
use retrieval_core::matrix::Matrix;
use retrieval_core::perturbation::{build_s_operator, normalization_stability_check, random_setup};
use retrieval_core::random::{positive_rationals, rational_orthogonal};
use retrieval_core::scalar::{format_rational, int, parse_rational, ratio, Mode, Rational};
use retrieval_core::sequences::{bessel_violation_probe, finitely_full_spark_check, Truncation, VectorSequenceRule};
use retrieval_core::{Decision, SearchOptions, SubspaceBasis};

fn opts() -> SearchOptions {
    SearchOptions::default()
}

fn frame_strategy(n: usize, m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Frame> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), m).prop_map(move |rows| {
        Frame::new(n, rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect()).unwrap()
    })
}

fn matrix_strategy() -> impl Strategy<Value = Matrix<Rational>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-4i64..=4, r * c)
            .prop_map(move |v| Matrix::from_vec(r, c, v.into_iter().map(int).collect()).unwrap())
    })
}

/// Axis-aligned unweighted fusion frame from coordinate bitmasks.
fn axis_frame(n: usize, masks: &[u8]) -> Option<FusionFrame> {
    let bases: Vec<Vec<Vec<Rational>>> = masks
        .iter()
        .map(|&mask| {
            (0..n)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| (0..n).map(|j| int((j == k) as i64)).collect())
                .collect()
        })
        .collect();
    if bases.iter().any(Vec::is_empty) {
        return None;
    }
    FusionFrame::unweighted(n, bases).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_is_transpose_invariant(m in matrix_strategy()) {
        prop_assert_eq!(exact::rank(&m), exact::rank(&m.transpose()));
    }

    #[test]
    fn nullspace_is_kernel_of_full_dimension(m in matrix_strategy()) {
        let ns = exact::nullspace_vectors(&m);
        prop_assert_eq!(ns.len() + exact::rank(&m), m.cols());
        for v in &ns {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rational_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = ratio(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn phase_retrieval_needs_enough_vectors(f in frame_strategy(3, 1..=6)) {
        let d = does_phase_retrieval(&f, &opts()).unwrap();
        if d.is_yes() {
            prop_assert!(f.len() + 1 >= 2 * f.dim());
        }
        if let Decision::CertifiedNo(w) = &d {
            prop_assert!(w.verify(&f));
        }
    }

    #[test]
    fn full_spark_with_enough_vectors_does_phase_retrieval(f in frame_strategy(2, 3..=5)) {
        if is_full_spark(&f, &opts()).unwrap().holds {
            prop_assert!(does_phase_retrieval(&f, &opts()).unwrap().is_yes());
        }
    }

    #[test]
    fn phase_retrieval_implies_norm_retrieval(f in frame_strategy(3, 3..=7)) {
        if does_phase_retrieval(&f, &opts()).unwrap().is_yes() {
            prop_assert!(does_norm_retrieval(&f, &opts()).unwrap().is_yes());
        }
    }

    #[test]
    fn norm_retrieval_witnesses_verify(f in frame_strategy(3, 1..=6)) {
        if let Decision::CertifiedNo(w) = does_norm_retrieval(&f, &opts()).unwrap() {
            prop_assert!(w.verify(&f));
        }
    }

    #[test]
    fn spark_witness_verifies(f in frame_strategy(3, 1..=6)) {
        let s = spark(&f, &opts());
        prop_assert!(s.value >= 1 && s.value <= f.len() + 1);
        if let Some(w) = s.witness {
            prop_assert_eq!(w.subset.len(), s.value);
            prop_assert!(w.verify(&f));
        }
    }

    #[test]
    fn verdicts_survive_scaling_and_rotation(f in frame_strategy(3, 2..=5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pr = does_phase_retrieval(&f, &opts()).unwrap().kind();
        let nr = does_norm_retrieval(&f, &opts()).unwrap().kind();
        let scaled = f.scaled(&positive_rationals(&mut rng, f.len(), 7)).unwrap();
        let turned = f.transformed(&rational_orthogonal(&mut rng, 3)).unwrap();
        for g in [&scaled, &turned] {
            prop_assert_eq!(does_phase_retrieval(g, &opts()).unwrap().kind(), pr);
            prop_assert_eq!(does_norm_retrieval(g, &opts()).unwrap().kind(), nr);
        }
    }

    #[test]
    fn sweeps_do_not_depend_on_jobs(f in frame_strategy(3, 2..=7)) {
        let a = does_norm_retrieval(&f, &opts()).unwrap();
        let b = does_norm_retrieval(&f, &SearchOptions::with_jobs(4)).unwrap();
        prop_assert_eq!(a, b);
        let a = does_phase_retrieval(&f, &opts()).unwrap();
        let b = does_phase_retrieval(&f, &SearchOptions::with_jobs(3)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn projections_are_symmetric_idempotent(f in frame_strategy(4, 1..=3)) {
        let w = SubspaceBasis::span_of(4, f.vectors()).unwrap();
        let p = exact::projection_matrix(&w).unwrap();
        prop_assert!(p.is_symmetric());
        prop_assert_eq!(p.mul(&p).unwrap(), p.clone());
        for v in f.vectors() {
            prop_assert_eq!(&p.mul_vec(v).unwrap(), v);
        }
    }

    #[test]
    fn fusion_verdicts_ignore_weights_and_rotations(
        masks in prop::collection::vec(1u8..16, 1..=5),
        seed in any::<u64>(),
    ) {
        let Some(ff) = axis_frame(4, &masks) else { return Ok(()); };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = decide_norm_retrieval(&ff, &Budget::default(), &opts()).unwrap();
        prop_assert!(!base.decision.is_undecided());
        let heavy = ff.reweighted(&positive_rationals(&mut rng, ff.len(), 9)).unwrap();
        let turned = apply_unitary(&ff, &rational_orthogonal(&mut rng, 4), Mode::Exact).unwrap();
        for g in [&heavy, &turned] {
            let d = decide_norm_retrieval(g, &Budget::default(), &opts()).unwrap();
            prop_assert_eq!(d.decision.kind(), base.decision.kind());
            if let Decision::CertifiedNo(w) = &d.decision {
                prop_assert!(w.verify(g));
            }
            if let Decision::CertifiedYes(y) = &d.decision {
                prop_assert_ne!(y.check(g), Some(false));
            }
        }
    }

    #[test]
    fn s_operator_bounds(seed in any::<u64>(), n in 2usize..=6, pick in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = [0.01, 0.1, 0.4][pick];
        let d = 1 + (seed as usize) % (n - 1);
        let setup = random_setup(&mut rng, n, d, eps).unwrap();
        let r = build_s_operator(&setup, Mode::float()).unwrap();
        prop_assert!(r.report.all_hold(), "{:?}", r.report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn normalization_bound(
        phi in prop::collection::vec(prop::collection::vec(-40i64..=40, 3), 1..=6),
        delta in prop::collection::vec(prop::collection::vec(-8i64..=8, 3), 6),
    ) {
        let to_frame = |rows: &Vec<Vec<i64>>, den: i64| {
            Frame::new(3, rows.iter().map(|r| r.iter().map(|&x| ratio(x, den)).collect()).collect()).unwrap()
        };
        let psi_rows: Vec<Vec<i64>> = phi.iter().zip(&delta).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
        let (f, g) = (to_frame(&phi, 20), to_frame(&psi_rows, 20));
        let norms = |fr: &Frame| fr.vectors().iter().map(|v| v.iter().map(|x| { let y = retrieval_core::scalar::to_f64(x); y * y }).sum::<f64>().sqrt()).collect::<Vec<_>>();
        let all: Vec<f64> = norms(&f).into_iter().chain(norms(&g)).collect();
        if all.iter().all(|&x| (0.5..=2.0).contains(&x)) {
            let r = normalization_stability_check(&f, &g, 0.5, 2.0).unwrap();
            prop_assert!(r.all_hold());
        }
    }

    #[test]
    fn bessel_sum_is_linear(n in 2usize..=200) {
        let t = bessel_violation_probe(n).unwrap();
        prop_assert_eq!(t.len(), n - 1);
        for &(k, v) in &t {
            prop_assert_eq!(v, k as u64 - 1);
        }
    }
}

#[test]
fn powers_of_two_family_is_finitely_full_spark_in_small_windows() {
    let caps = Truncation::default();
    for n in 1..=4 {
        let rule = VectorSequenceRule::PowersOfTwoFamily(n);
        for size in 1..=3.min(n) {
            let mut idx: Vec<usize> = (1..=size).collect();
            loop {
                for trunc in size..=16 {
                    let c = finitely_full_spark_check(&rule, &idx, trunc, &caps, &opts()).unwrap();
                    assert!(c.holds, "n={n} I={idx:?} N={trunc}");
                }
                // Next increasing index set inside 1..=n.
                let Some(p) = (0..size).rev().find(|&i| idx[i] < n - size + i + 1) else {
                    break;
                };
                idx[p] += 1;
                for q in p + 1..size {
                    idx[q] = idx[q - 1] + 1;
                }
            }
        }
    }
}
