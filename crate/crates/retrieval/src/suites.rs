//! Seeded randomized suites that check a theorem's statement on many
//! instances, each decided exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retrieval_core::frame::{does_norm_retrieval, does_phase_retrieval, is_full_spark, Frame};
use retrieval_core::fusion::{
    apply_unitary, coordinate_nr_decision, decide_norm_retrieval, t13_sign_condition, Budget, FusionFrame,
};
use retrieval_core::perturbation::{
    build_s_operator, normalization_stability_check, random_setup, riesz_nr_orthogonality_suite,
};
use retrieval_core::random::{positive_rationals, rational_orthogonal};
use retrieval_core::scalar::{int, ratio, to_f64, Mode, Rational};
use retrieval_core::{Result, SearchOptions};
use serde_json::{json, Value};

use crate::input::Theorem;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub passed: bool,
    pub details: Value,
}

pub fn run_suite(
    theorem: Theorem,
    samples: usize,
    seed: u64,
    mode: Mode,
    opts: &SearchOptions,
) -> Result<SuiteOutcome> {
    match theorem {
        Theorem::Tt => {
            let r = riesz_nr_orthogonality_suite(samples, seed, opts)?;
            Ok(SuiteOutcome {
                passed: r.passed(),
                details: json!({
                    "cases": r.cases,
                    "nr_yes": r.nr_yes,
                    "orthogonal": r.orthogonal,
                    "exceptions": r.exceptions,
                    "near_orthogonal": r.near_orthogonal,
                    "near_orthogonal_exceptions": r.near_orthogonal_exceptions,
                }),
            })
        }
        Theorem::FullSparkPr => full_spark_pr(samples, seed, opts),
        Theorem::SOperator => s_operator(samples, seed, mode),
        Theorem::Normalization => normalization(samples, seed),
        Theorem::SignCondition => sign_condition(samples, seed, opts),
        Theorem::Invariance => invariance(samples, seed, opts),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries `p/q` with `|p| ≤ 2`, `q ∈ {1, 2}`.
pub fn random_rational_frame<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<Frame> {
    let vectors = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| ratio(rng.random_range(-2..=2), rng.random_range(1..=2)))
                .collect()
        })
        .collect();
    Frame::new(n, vectors)
}

/// Frames in `R³`: with `m = 5`, phase retrieval must coincide with full
/// spark; with `m ≤ 4` it must fail.
fn full_spark_pr(samples: usize, seed: u64, opts: &SearchOptions) -> Result<SuiteOutcome> {
    let mut rng = rng(seed);
    let (mut full, mut pr, mut exceptions) = (0usize, 0usize, Vec::new());
    for case in 0..samples {
        let f = random_rational_frame(&mut rng, 3, 5)?;
        let spark_ok = is_full_spark(&f, opts)?.holds;
        let pr_ok = does_phase_retrieval(&f, opts)?.is_yes();
        full += spark_ok as usize;
        pr += pr_ok as usize;
        if spark_ok != pr_ok || (pr_ok && f.len() + 1 < 2 * f.dim()) {
            exceptions.push(case);
        }
    }
    let short = samples / 4;
    let mut short_exceptions = Vec::new();
    for case in 0..short {
        let m = rng.random_range(1..=4);
        let f = random_rational_frame(&mut rng, 3, m)?;
        if does_phase_retrieval(&f, opts)?.is_yes() {
            short_exceptions.push(case);
        }
    }
    Ok(SuiteOutcome {
        passed: exceptions.is_empty() && short_exceptions.is_empty(),
        details: json!({
            "cases": samples,
            "full_spark": full,
            "pr_yes": pr,
            "exceptions": exceptions,
            "short_cases": short,
            "short_exceptions": short_exceptions,
        }),
    })
}

pub const S_OPERATOR_EPSILONS: [f64; 3] = [0.01, 0.1, 0.4];

fn s_operator(samples: usize, seed: u64, mode: Mode) -> Result<SuiteOutcome> {
    let mode = match mode {
        Mode::Exact => Mode::float(),
        m => m,
    };
    let mut rng = rng(seed);
    let mut failures = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for case in 0..samples {
        let eps = S_OPERATOR_EPSILONS[case % 3];
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..n);
        let setup = random_setup(&mut rng, n, d, eps)?;
        let r = build_s_operator(&setup, mode)?.report;
        for item in &r.items {
            if item.bound > 0.0 && item.kind == retrieval_core::perturbation::BoundKind::AtMost {
                worst_ratio = worst_ratio.max(item.measured / item.bound);
            }
        }
        let first = r
            .failures()
            .next()
            .map(|item| json!({ "case": case, "item": item.name, "measured": item.measured, "bound": item.bound }));
        failures.extend(first);
    }
    Ok(SuiteOutcome {
        passed: failures.is_empty(),
        details: json!({
            "cases": samples,
            "epsilons": S_OPERATOR_EPSILONS,
            "failures": failures,
            "worst_ratio": worst_ratio,
        }),
    })
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn to_rational(x: f64) -> Rational {
    ratio((x * 1e6).round() as i64, 1_000_000)
}

fn norm(v: &[Rational]) -> f64 {
    v.iter().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt()
}

/// Independent pairs `φ`, `ψ` in `R^n` with all norms in `[1/2, 2]`.
fn normalization(samples: usize, seed: u64) -> Result<SuiteOutcome> {
    let (a, b) = (0.5, 2.0);
    let mut rng = rng(seed);
    let mut failures = Vec::new();
    let mut cases = 0;
    while cases < samples {
        let n = rng.random_range(1..=5);
        let scale = rng.random_range(0.001..0.5);
        let mut phi = Vec::with_capacity(n);
        let mut psi = Vec::with_capacity(n);
        for _ in 0..n {
            let r = rng.random_range(0.6..1.9);
            let f: Vec<Rational> = random_unit(&mut rng, n).iter().map(|x| to_rational(r * x)).collect();
            let g: Vec<Rational> = f
                .iter()
                .zip(random_unit(&mut rng, n))
                .map(|(x, d)| x + to_rational(scale * d))
                .collect();
            phi.push(f);
            psi.push(g);
        }
        let in_range = phi.iter().chain(&psi).all(|v| (a..=b).contains(&norm(v)));
        let (phi, psi) = (Frame::new(n, phi)?, Frame::new(n, psi)?);
        if !in_range || !phi.is_independent() || !psi.is_independent() {
            continue;
        }
        let r = normalization_stability_check(&phi, &psi, a, b)?;
        if !r.all_hold() {
            failures.push(cases);
        }
        cases += 1;
    }
    Ok(SuiteOutcome {
        passed: failures.is_empty(),
        details: json!({ "cases": cases, "a": a, "b": b, "failures": failures }),
    })
}

/// Axis-aligned unweighted members from coordinate bitmasks; `None` if a
/// mask is empty.
pub fn axis_fusion(n: usize, masks: &[u32]) -> Option<FusionFrame> {
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

pub fn random_axis_fusion<R: Rng>(rng: &mut R) -> FusionFrame {
    loop {
        let n = rng.random_range(2..=5);
        let m = rng.random_range(1..=5);
        let masks: Vec<u32> = (0..m).map(|_| rng.random_range(1..(1u32 << n))).collect();
        if let Some(ff) = axis_fusion(n, &masks) {
            return ff;
        }
    }
}

/// When signs `ε_i` and `K ≥ 1` give `Σ ε_i 1_{I_i} = K·1`, the coordinate
/// decision must be yes.
fn sign_condition(samples: usize, seed: u64, opts: &SearchOptions) -> Result<SuiteOutcome> {
    let mut rng = rng(seed);
    let (mut applicable, mut yes, mut exceptions) = (0usize, 0usize, Vec::new());
    for case in 0..samples {
        let ff = random_axis_fusion(&mut rng);
        let d = coordinate_nr_decision(&ff)?;
        yes += d.is_yes() as usize;
        if let Some(s) = t13_sign_condition(&ff, opts)? {
            applicable += 1;
            if !s.verify(&ff) || !d.is_yes() {
                exceptions.push(case);
            }
        }
    }
    Ok(SuiteOutcome {
        passed: exceptions.is_empty(),
        details: json!({
            "cases": samples,
            "sign_condition_found": applicable,
            "nr_yes": yes,
            "exceptions": exceptions,
        }),
    })
}

fn invariance_frame<R: Rng>(rng: &mut R) -> Result<Frame> {
    let n = rng.random_range(2..=4);
    let m = rng.random_range(n..=2 * n);
    random_rational_frame(rng, n, m)
}

/// Verdicts must not change under positive rescaling of the vectors, exact
/// orthogonal transforms, or changes of fusion weights.
pub fn invariance(samples: usize, seed: u64, opts: &SearchOptions) -> Result<SuiteOutcome> {
    let mut rng = rng(seed);
    let budget = Budget::default();
    let mut mismatches = serde_json::Map::new();
    let mut record = |name: &str, case: usize| {
        mismatches
            .entry(name.to_string())
            .or_insert_with(|| Value::Array(Vec::new()))
            .as_array_mut()
            .expect("array")
            .push(json!(case));
    };
    for case in 0..samples {
        let f = invariance_frame(&mut rng)?;
        let pr = does_phase_retrieval(&f, opts)?.kind();
        let nr = does_norm_retrieval(&f, opts)?.kind();
        let g = f.scaled(&positive_rationals(&mut rng, f.len(), 9))?;
        if does_phase_retrieval(&g, opts)?.kind() != pr || does_norm_retrieval(&g, opts)?.kind() != nr {
            record("scaling", case);
        }
    }
    for case in 0..samples {
        let f = invariance_frame(&mut rng)?;
        let pr = does_phase_retrieval(&f, opts)?.kind();
        let nr = does_norm_retrieval(&f, opts)?.kind();
        let g = f.transformed(&rational_orthogonal(&mut rng, f.dim()))?;
        if does_phase_retrieval(&g, opts)?.kind() != pr || does_norm_retrieval(&g, opts)?.kind() != nr {
            record("unitary", case);
        }
        let ff = random_axis_fusion(&mut rng);
        let base = decide_norm_retrieval(&ff, &budget, opts)?.decision.kind();
        let turned = apply_unitary(&ff, &rational_orthogonal(&mut rng, ff.ambient_dim()), Mode::Exact)?;
        if decide_norm_retrieval(&turned, &budget, opts)?.decision.kind() != base {
            record("fusion-unitary", case);
        }
    }
    for case in 0..samples {
        let ff = random_axis_fusion(&mut rng);
        let base = decide_norm_retrieval(&ff, &budget, opts)?.decision.kind();
        let heavy = ff.reweighted(&positive_rationals(&mut rng, ff.len(), 9))?;
        if decide_norm_retrieval(&heavy, &budget, opts)?.decision.kind() != base {
            record("weights", case);
        }
    }
    Ok(SuiteOutcome {
        passed: mismatches.is_empty(),
        details: json!({ "trials_per_family": samples, "mismatches": mismatches }),
    })
}
