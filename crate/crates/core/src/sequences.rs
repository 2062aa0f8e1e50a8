//! Rule-generated vector sequences in `ℓ²` and truncated checks on them.
//!
//! Every check here looks at finitely many vectors and coordinates, so a
//! pass is evidence up to the truncation only.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::frame::{complement_property_witness, is_full_spark, Frame, PrFailWitness};
use crate::scalar::Rational;
use crate::search::SearchOptions;

/// A deterministic rule for the vectors `f_1, f_2, …`; indices and
/// coordinates are 1-based throughout.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorSequenceRule {
    /// `f_i = e_i`.
    Canonical,
    /// `f_i = Σ_{k=0}^{n−1} e_{k+1} / (2^i + k)`.
    PowersOfTwoFamily(usize),
    /// `e_i + e_j` for `i < j`, ordered by `j` then `i`.
    PairSums,
    /// A finite list; coordinates past a vector's length are zero.
    ExplicitList(Vec<Vec<Rational>>),
}

/// `(i, j)` with `i < j` for the `t`-th pair in order of `j`, then `i`.
pub fn pair_of(t: usize) -> (usize, usize) {
    let mut j = 2;
    let mut first = 1;
    while first + (j - 1) <= t {
        first += j - 1;
        j += 1;
    }
    (t - first + 1, j)
}

impl VectorSequenceRule {
    /// Number of vectors, if finite.
    pub fn len(&self) -> Option<usize> {
        match self {
            VectorSequenceRule::ExplicitList(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `⟨f_i, e_k⟩`.
    pub fn coordinate(&self, i: usize, k: usize) -> Result<Rational> {
        if i == 0 || k == 0 {
            return Err(Error::Precondition("indices are 1-based"));
        }
        let one = |b: bool| if b { Rational::one() } else { Rational::zero() };
        Ok(match self {
            VectorSequenceRule::Canonical => one(i == k),
            VectorSequenceRule::PowersOfTwoFamily(n) => {
                if k > *n {
                    Rational::zero()
                } else {
                    let exponent = u32::try_from(i).map_err(|_| Error::CapExceeded {
                        what: "sequence index",
                        value: i,
                        cap: u32::MAX as usize,
                    })?;
                    let denom = BigInt::from(2u8).pow(exponent) + BigInt::from(k - 1);
                    Rational::new(BigInt::one(), denom)
                }
            }
            VectorSequenceRule::PairSums => {
                let (a, b) = pair_of(i);
                one(k == a || k == b)
            }
            VectorSequenceRule::ExplicitList(v) => {
                let f = v
                    .get(i - 1)
                    .ok_or(Error::Precondition("index past the end of the list"))?;
                f.get(k - 1).cloned().unwrap_or_else(Rational::zero)
            }
        })
    }

    /// `P_I f_i` in the coordinates of `I`.
    pub fn projected(&self, i: usize, coords: &[usize]) -> Result<Vec<Rational>> {
        coords.iter().map(|&k| self.coordinate(i, k)).collect()
    }
}

/// Hard limits for truncated checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub max_index_set: usize,
    pub max_vectors: usize,
    /// Cap on `C(N, |I|)`, the number of subsets a full spark check visits.
    pub max_subsets: u64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            max_index_set: 12,
            max_vectors: 64,
            max_subsets: 5_000_000,
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSparkCheck {
    /// Every `|I|`-subset of `{P_I f_1, …, P_I f_N}` spans.
    pub holds: bool,
    /// First dependent `|I|`-subset, as 1-based vector indices.
    pub witness: Option<Vec<usize>>,
    pub truncation: usize,
}

/// Full spark of `{P_I f_k}_{k ≤ N}` in the coordinates `I`.
pub fn finitely_full_spark_check(
    rule: &VectorSequenceRule,
    coords: &[usize],
    truncation: usize,
    caps: &Truncation,
    opts: &SearchOptions,
) -> Result<FiniteSparkCheck> {
    let d = coords.len();
    if d == 0 || coords.windows(2).any(|w| w[0] >= w[1]) || coords[0] == 0 {
        return Err(Error::Precondition(
            "coordinate set must be nonempty, 1-based and increasing",
        ));
    }
    if d > caps.max_index_set {
        return Err(Error::CapExceeded {
            what: "index set size",
            value: d,
            cap: caps.max_index_set,
        });
    }
    if truncation > caps.max_vectors {
        return Err(Error::CapExceeded {
            what: "truncation",
            value: truncation,
            cap: caps.max_vectors,
        });
    }
    if truncation < d {
        return Err(Error::TooFewVectors { m: truncation, n: d });
    }
    let subsets = binomial(truncation, d);
    if subsets > caps.max_subsets {
        return Err(Error::CapExceeded {
            what: "subset count",
            value: usize::try_from(subsets).unwrap_or(usize::MAX),
            cap: usize::try_from(caps.max_subsets).unwrap_or(usize::MAX),
        });
    }
    let vectors = (1..=truncation)
        .map(|i| rule.projected(i, coords))
        .collect::<Result<Vec<_>>>()?;
    let fs = is_full_spark(&Frame::new(d, vectors)?, opts)?;
    Ok(FiniteSparkCheck {
        holds: fs.holds,
        witness: fs.witness.map(|w| w.subset.iter().map(|i| i + 1).collect()),
        truncation,
    })
}

/// `{e_i + e_j}_{1 ≤ i < j ≤ n}` in `R^n`.
pub fn pair_sums(n: usize) -> Result<Frame> {
    let m = n * n.saturating_sub(1) / 2;
    let rule = VectorSequenceRule::PairSums;
    let vectors = (1..=m)
        .map(|t| (1..=n).map(|k| rule.coordinate(t, k)).collect())
        .collect::<Result<Vec<_>>>()?;
    Frame::new(n, vectors)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedCp {
    pub n: usize,
    pub holds: bool,
    pub witness: Option<PrFailWitness>,
}

pub const PAIR_SUMS_MAX_DIM: usize = 8;

/// Exact complement property check on the pair sums in `R^n`, `2 ≤ n ≤ 8`.
pub fn truncated_complement_property(n: usize, opts: &SearchOptions) -> Result<TruncatedCp> {
    if n > PAIR_SUMS_MAX_DIM {
        return Err(Error::CapExceeded {
            what: "dimension",
            value: n,
            cap: PAIR_SUMS_MAX_DIM,
        });
    }
    let frame = pair_sums(n)?;
    let opts = SearchOptions {
        max_members: opts.max_members.max(frame.len()),
        ..*opts
    };
    let witness = complement_property_witness(&frame, &opts)?;
    Ok(TruncatedCp {
        n,
        holds: witness.is_none(),
        witness,
    })
}

pub const BESSEL_MAX_DIM: usize = 512;

/// `Σ_{i<j≤t} |⟨e_1, e_i + e_j⟩|²` for `t = 2, …, n`.
pub fn bessel_violation_probe(n: usize) -> Result<Vec<(usize, u64)>> {
    if n > BESSEL_MAX_DIM {
        return Err(Error::CapExceeded {
            what: "truncation",
            value: n,
            cap: BESSEL_MAX_DIM,
        });
    }
    let rule = VectorSequenceRule::PairSums;
    let mut table = Vec::new();
    let mut total = Rational::zero();
    let mut t = 1;
    for j in 2..=n {
        // Pairs (i, j) with i < j occupy the next j − 1 indices.
        for _ in 1..j {
            let c = rule.coordinate(t, 1)?;
            total += &c * &c;
            t += 1;
        }
        let value = total.to_integer();
        table.push((
            j,
            u64::try_from(value).map_err(|_| Error::InternalInconsistency("overflow"))?,
        ));
    }
    Ok(table)
}
