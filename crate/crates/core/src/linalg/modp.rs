//! Rank modulo the Mersenne prime `2^61 - 1`.
//!
//! Reduction mod p never increases rank, so a full rank mod p certifies full
//! rank over the rationals. A deficient rank mod p is only a hint and is always
//! confirmed exactly by the caller.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

pub(crate) const MODULUS: u64 = (1 << 61) - 1;

#[inline]
fn reduce128(x: u128) -> u64 {
    let lo = (x as u64) & MODULUS;
    let hi = (x >> 61) as u64;
    let s = lo + hi;
    let s = (s & MODULUS) + (s >> 61);
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
pub(crate) fn mul(a: u64, b: u64) -> u64 {
    reduce128(a as u128 * b as u128)
}

#[inline]
pub(crate) fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

pub(crate) fn reduce(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(MODULUS))
        .to_u64()
        .expect("residue fits in u64")
}

pub(crate) fn reduce_vector(v: &[BigInt]) -> Vec<u64> {
    v.iter().map(reduce).collect()
}

/// Row echelon basis that grows one vector at a time and can be rolled back.
///
/// Rows are never rewritten after insertion, so truncating to an earlier
/// length restores exactly the earlier state.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<u64>)>,
    scratch: Vec<u64>,
}

impl Echelon {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::with_capacity(dim),
            scratch: Vec::with_capacity(dim),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.rows.truncate(len);
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub(crate) fn insert(&mut self, v: &[u64]) -> bool {
        if self.is_full() {
            return false;
        }
        self.scratch.clear();
        self.scratch.extend_from_slice(v);
        for (pivot, row) in &self.rows {
            let c = self.scratch[*pivot];
            if c == 0 {
                continue;
            }
            let p = row[*pivot];
            for (x, r) in self.scratch.iter_mut().zip(row) {
                *x = sub(mul(p, *x), mul(c, *r));
            }
        }
        match self.scratch.iter().position(|&x| x != 0) {
            Some(pivot) => {
                self.rows.push((pivot, self.scratch.clone()));
                true
            }
            None => false,
        }
    }
}
