use alloc::vec::Vec;

use libm::sqrt;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{BoundItem, BoundReport};
use crate::error::{Error, Result};
use crate::frame::{does_norm_retrieval, does_phase_retrieval, is_full_spark, is_gram_diagonal, Frame};
use crate::random::{integer_frame, positive_rationals, rational_orthogonal};
use crate::scalar::{ratio, to_f64, Rational};
use crate::search::SearchOptions;
use crate::Decision;

fn norm_f64(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

fn unit(v: &[Rational]) -> Vec<f64> {
    let f: Vec<f64> = v.iter().map(to_f64).collect();
    let n = norm_f64(&f);
    f.into_iter().map(|x| x / n).collect()
}

/// Outcome of re-deciding norm retrieval on perturbed copies of a frame that
/// fails it.
#[derive(Clone, Debug, PartialEq)]
pub struct NrStabilityReport {
    /// Partition index set of the original failure.
    pub subset: Vec<usize>,
    /// `√2 − ‖x̂ − ŷ‖` for the unit witness pair, signs aligned.
    pub delta: f64,
    /// Total perturbation budget, chosen with `2ε/(1 − ε) < δ/3`.
    pub epsilon: f64,
    /// Denominator of every perturbation entry.
    pub denominator: u64,
    pub samples: usize,
    pub still_failing: usize,
    /// Samples whose perturbed frame does norm retrieval.
    pub regained: Vec<usize>,
    /// Largest `Σ ‖x_i − y_i‖` over the samples.
    pub max_total: f64,
}

impl NrStabilityReport {
    pub fn all_fail(&self) -> bool {
        self.regained.is_empty() && self.still_failing == self.samples
    }
}

/// Random rational perturbation with `Σ_i ‖δ_i‖ < budget`: a Gaussian
/// direction scaled to a uniform fraction of the budget, entries truncated
/// toward zero to multiples of `1/denominator`.
fn bounded_perturbation<R: Rng>(rng: &mut R, m: usize, n: usize, budget: f64, denominator: u64) -> Vec<Vec<Rational>> {
    let g: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect())
        .collect();
    let total: f64 = g.iter().map(|v| norm_f64(v)).sum();
    let size = budget * rng.random_range(0.0..1.0);
    let d = denominator as f64;
    let den = BigInt::from(denominator);
    g.iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    let k = (x / total * size * d).trunc() as i64;
                    Rational::new(BigInt::from(k), den.clone())
                })
                .collect()
        })
        .collect()
}

fn total_size(p: &[Vec<Rational>]) -> f64 {
    p.iter()
        .map(|v| norm_f64(&v.iter().map(to_f64).collect::<Vec<_>>()))
        .sum()
}

/// For a frame with `m ≤ 2n − 2` failing norm retrieval, perturbs it by
/// small exact rational amounts and re-decides each copy exactly.
pub fn nr_failure_stability_experiment(
    frame: &Frame,
    samples: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<NrStabilityReport> {
    let (m, n) = (frame.len(), frame.dim());
    if m + 2 > 2 * n {
        return Err(Error::Precondition("need m <= 2n - 2"));
    }
    let witness = match does_norm_retrieval(frame, opts)? {
        Decision::CertifiedNo(w) => w,
        _ => return Err(Error::Precondition("frame must fail norm retrieval")),
    };
    let x = unit(&witness.x);
    let mut y = unit(&witness.y);
    if x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
        y.iter_mut().for_each(|v| *v = -*v);
    }
    let dist = norm_f64(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>());
    let delta = sqrt(2.0) - dist;
    let epsilon = 0.99 * delta / (6.0 + delta);
    let mut denominator: u64 = 1_000_000;
    while (denominator as f64) * epsilon < 1000.0 && denominator < 1_000_000_000_000_000 {
        denominator *= 10;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut still_failing = 0;
    let mut regained = Vec::new();
    let mut max_total: f64 = 0.0;
    for sample in 0..samples {
        let delta_vectors = bounded_perturbation(&mut rng, m, n, epsilon, denominator);
        max_total = max_total.max(total_size(&delta_vectors));
        let vectors = frame
            .vectors()
            .iter()
            .zip(&delta_vectors)
            .map(|(f, d)| f.iter().zip(d).map(|(a, b)| a + b).collect())
            .collect();
        let perturbed = Frame::new(n, vectors)?;
        match does_norm_retrieval(&perturbed, opts)? {
            Decision::CertifiedNo(_) => still_failing += 1,
            _ => regained.push(sample),
        }
    }
    Ok(NrStabilityReport {
        subset: witness.subset,
        delta,
        epsilon,
        denominator,
        samples,
        still_failing,
        regained,
        max_total,
    })
}

/// Full spark and phase retrieval rates under fine-grid perturbations.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub samples: usize,
    /// Entries move by `k/grid²` with `|k| ≤ grid`.
    pub grid: u64,
    pub original_full_spark: bool,
    pub full_spark: usize,
    pub pr_yes: usize,
    /// Full spark samples not doing phase retrieval; always empty for a
    /// correct decider.
    pub exceptions: Vec<usize>,
}

impl DensityReport {
    pub fn full_spark_fraction(&self) -> f64 {
        if self.samples == 0 {
            return 1.0;
        }
        self.full_spark as f64 / self.samples as f64
    }
}

/// Perturbs a frame with `m ≥ 2n − 1` and counts full spark copies, each of
/// which is also decided for phase retrieval.
pub fn full_spark_density_experiment(
    frame: &Frame,
    samples: usize,
    seed: u64,
    grid: u64,
    opts: &SearchOptions,
) -> Result<DensityReport> {
    let (m, n) = (frame.len(), frame.dim());
    if m + 1 < 2 * n {
        return Err(Error::Precondition("need m >= 2n - 1"));
    }
    if grid == 0 {
        return Err(Error::Precondition("grid must be positive"));
    }
    opts.check_members(m)?;
    let original_full_spark = is_full_spark(frame, opts)?.holds;
    let g = grid as i64;
    let den = BigInt::from(grid) * BigInt::from(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut full_spark = 0;
    let mut pr_yes = 0;
    let mut exceptions = Vec::new();
    for sample in 0..samples {
        let vectors = frame
            .vectors()
            .iter()
            .map(|f| {
                f.iter()
                    .map(|a| a + Rational::new(BigInt::from(rng.random_range(-g..=g)), den.clone()))
                    .collect()
            })
            .collect();
        let perturbed = Frame::new(n, vectors)?;
        let spark_ok = is_full_spark(&perturbed, opts)?.holds;
        let pr = does_phase_retrieval(&perturbed, opts)?.is_yes();
        full_spark += spark_ok as usize;
        pr_yes += pr as usize;
        if spark_ok && !pr {
            exceptions.push(sample);
        }
    }
    Ok(DensityReport {
        samples,
        grid,
        original_full_spark,
        full_spark,
        pr_yes,
        exceptions,
    })
}

/// Checks `Σ‖φ̂_i − ψ̂_i‖ ≤ (2B/A²)·Σ‖φ_i − ψ_i‖` for families with all norms
/// in `[A, B]`.
pub fn normalization_stability_check(phi: &Frame, psi: &Frame, a: f64, b: f64) -> Result<BoundReport> {
    if phi.len() != psi.len() || phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.len(),
            found: psi.len(),
        });
    }
    if !(a > 0.0 && a <= b) {
        return Err(Error::Precondition("need 0 < A <= B"));
    }
    let to_f = |v: &[Rational]| -> Vec<f64> { v.iter().map(to_f64).collect() };
    let mut lhs = 0.0;
    let mut diff = 0.0;
    for i in 0..phi.len() {
        let (f, g) = (to_f(phi.vector(i)), to_f(psi.vector(i)));
        let (nf, ng) = (norm_f64(&f), norm_f64(&g));
        if [nf, ng].iter().any(|&x| x < a - super::SLACK || x > b + super::SLACK) {
            return Err(Error::BoundSandwich { index: i });
        }
        diff += norm_f64(&f.iter().zip(&g).map(|(x, y)| x - y).collect::<Vec<_>>());
        lhs += norm_f64(&f.iter().zip(&g).map(|(x, y)| x / nf - y / ng).collect::<Vec<_>>());
    }
    Ok(BoundReport {
        items: alloc::vec![BoundItem::at_most(
            "normalized difference",
            lhs,
            2.0 * b / (a * a) * diff
        )],
        notes: Vec::new(),
    })
}

/// Outcome of comparing norm retrieval with orthogonality on independent
/// `n`-sets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub cases: usize,
    pub nr_yes: usize,
    pub orthogonal: usize,
    /// Cases where the norm retrieval verdict differs from "Gram matrix is
    /// diagonal".
    pub exceptions: Vec<usize>,
    pub near_orthogonal: usize,
    /// Near-orthogonal cases that break orthogonality yet do norm retrieval.
    pub near_orthogonal_exceptions: Vec<usize>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.exceptions.is_empty() && self.near_orthogonal_exceptions.is_empty()
    }
}

fn independent_set<R: Rng>(rng: &mut R, n: usize) -> Result<Frame> {
    loop {
        let f = integer_frame(rng, n, n, 3)?;
        if f.is_independent() {
            return Ok(f);
        }
    }
}

/// Columns of a rational orthogonal matrix with random positive scalings.
fn scaled_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Result<Frame> {
    let t = rational_orthogonal(rng, n);
    let f = Frame::new(n, t.column_vecs())?;
    f.scaled(&positive_rationals(rng, n, 5))
}

/// `{e_i + x_i}` with small rational `x_i`; each `x_i` is zero with
/// probability 1/2.
fn near_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Result<Frame> {
    let vectors = (0..n)
        .map(|i| {
            let sparse = rng.random_bool(0.5);
            (0..n)
                .map(|k| {
                    let base = if k == i { Rational::one() } else { Rational::zero() };
                    if sparse || k == i {
                        base
                    } else {
                        base + ratio(rng.random_range(-10..=10), 1000)
                    }
                })
                .collect()
        })
        .collect();
    Frame::new(n, vectors)
}

/// Random independent `n`-sets in `R^n` (`2 ≤ n ≤ 5`) cycling through
/// integer sets, scaled rational orthonormal bases and near-orthogonal
/// perturbations of the standard basis.
pub fn riesz_nr_orthogonality_suite(samples: usize, seed: u64, opts: &SearchOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    for case in 0..samples {
        let n = rng.random_range(2..=5);
        let near = case % 3 == 2;
        let frame = match case % 3 {
            0 => independent_set(&mut rng, n)?,
            1 => scaled_orthogonal(&mut rng, n)?,
            _ => near_orthogonal(&mut rng, n)?,
        };
        if !frame.is_independent() {
            continue;
        }
        report.cases += 1;
        let yes = does_norm_retrieval(&frame, opts)?.is_yes();
        let orth = is_gram_diagonal(&frame);
        report.nr_yes += yes as usize;
        report.orthogonal += orth as usize;
        if yes != orth {
            report.exceptions.push(case);
        }
        if near {
            report.near_orthogonal += 1;
            if !orth && yes {
                report.near_orthogonal_exceptions.push(case);
            }
        }
    }
    Ok(report)
}
