//! Phase-retrieval falsifier through random orthonormal bases of the members.
//!
//! If some concatenation of orthonormal bases of the `W_i` fails the
//! complement property, the fusion frame fails phase retrieval. Sampling is in
//! floating point; a failing sample is turned into an exact certificate when
//! possible: nonzero rational `a`, `b` with `⟨P_i a, b⟩ = 0` for every member,
//! so that `a + b` and `a − b` have equal projection norms.

use alloc::vec::Vec;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::FusionFrame;
use crate::error::Result;
use crate::linalg::{exact, float};
use crate::matrix::{dot, Matrix};
use crate::scalar::{simplest_within, to_f64, Rational};
use crate::search::{find_combination, SearchOptions};
use crate::{Decision, Undecided};

#[derive(Clone, Debug, PartialEq)]
pub enum PrFalsification {
    /// Exact: `a, b ≠ 0` and `⟨P_i a, b⟩ = 0` for all `i`.
    Exact {
        sample: usize,
        subset: Vec<usize>,
        a: Vec<Rational>,
        b: Vec<Rational>,
    },
    /// The sampled concatenation failed the complement property in floating
    /// point but no exact pair could be recovered.
    FloatConfidence { sample: usize, subset: Vec<usize> },
}

impl PrFalsification {
    pub fn is_exact(&self) -> bool {
        matches!(self, PrFalsification::Exact { .. })
    }

    /// Exact re-check; `None` for float-confidence results.
    pub fn check(&self, ff: &FusionFrame) -> Option<bool> {
        match self {
            PrFalsification::Exact { a, b, .. } => Some(pr_pair_ok(ff, a, b)),
            PrFalsification::FloatConfidence { .. } => None,
        }
    }
}

pub(crate) fn pr_pair_ok(ff: &FusionFrame, a: &[Rational], b: &[Rational]) -> bool {
    let n = ff.ambient_dim();
    a.len() == n
        && b.len() == n
        && !a.iter().all(Zero::is_zero)
        && !b.iter().all(Zero::is_zero)
        && ff
            .projections()
            .iter()
            .all(|p| dot(&p.mul_vec(a).expect("length n"), b).is_zero())
}

/// A Haar-distributed orthonormal basis of each member, concatenated.
pub fn random_onb_concatenation(ff: &FusionFrame, rng: &mut ChaCha8Rng, eps: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for w in ff.members() {
        let d = w.subspace().dim();
        if d == 0 {
            continue;
        }
        let q = float::orthonormal_columns(&w.subspace().basis().map(to_f64), eps);
        let g: Vec<f64> = (0..d * d).map(|_| StandardNormal.sample(rng)).collect();
        let r = float::orthonormal_columns(&Matrix::from_vec(d, d, g).expect("d × d"), eps);
        let rotated = q.mul(&r).expect("conformable");
        out.extend(rotated.column_vecs());
    }
    out
}

fn float_rank(vectors: &[&Vec<f64>], n: usize, eps: f64) -> usize {
    let cols: Vec<Vec<f64>> = vectors.iter().map(|v| (*v).clone()).collect();
    float::rank(&Matrix::from_columns(n, &cols).expect("length n"), eps)
}

fn snap(a: &[f64], eps: f64) -> Vec<Rational> {
    a.iter()
        .map(|&x| simplest_within(x, eps).unwrap_or_else(Rational::zero))
        .collect()
}

/// Nonzero `b` with `⟨P_i a, b⟩ = 0` for all `i`, if one exists.
fn partner(ff: &FusionFrame, a: &[Rational]) -> Option<Vec<Rational>> {
    let n = ff.ambient_dim();
    if a.iter().all(Zero::is_zero) {
        return None;
    }
    let rows: Vec<Vec<Rational>> = ff
        .projections()
        .iter()
        .map(|p| p.mul_vec(a).expect("length n"))
        .collect();
    let m = Matrix::from_rows_with_cols(&rows, n).expect("length n");
    exact::nullspace_vectors(&m).into_iter().next()
}

pub fn concat_onb_falsifier_pr(
    ff: &FusionFrame,
    samples: usize,
    seed: u64,
    eps: f64,
    opts: &SearchOptions,
) -> Result<Decision<(), PrFalsification>> {
    let n = ff.ambient_dim();
    let total: usize = ff.members().iter().map(|w| w.subspace().dim()).sum();
    opts.check_members(total)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for sample in 0..samples {
        let vectors = random_onb_concatenation(ff, &mut rng, eps);
        let m = vectors.len();
        let failure = (0..=m / 2).find_map(|k| {
            find_combination(m, k, |subset| {
                let rest = crate::search::complement_indices(m, subset);
                let side: Vec<&Vec<f64>> = subset.iter().map(|&i| &vectors[i]).collect();
                let other: Vec<&Vec<f64>> = rest.iter().map(|&i| &vectors[i]).collect();
                (float_rank(&side, n, eps) < n && float_rank(&other, n, eps) < n).then(|| {
                    (
                        subset.to_vec(),
                        side.iter().map(|v| (*v).clone()).collect::<Vec<_>>(),
                        other.iter().map(|v| (*v).clone()).collect::<Vec<_>>(),
                    )
                })
            })
        });
        let Some((subset, side, other)) = failure else {
            continue;
        };
        for group in [&side, &other] {
            let comp = float::complement_columns(&Matrix::from_columns(n, group).expect("length n"), eps);
            for a_float in comp.column_vecs() {
                let a = snap(&a_float, eps);
                if let Some(b) = partner(ff, &a) {
                    return Ok(Decision::CertifiedNo(PrFalsification::Exact { sample, subset, a, b }));
                }
            }
        }
        return Ok(Decision::CertifiedNo(PrFalsification::FloatConfidence {
            sample,
            subset,
        }));
    }
    Ok(Decision::Undecided(Undecided { trials: samples, seed }))
}
