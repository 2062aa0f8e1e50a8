//! Seeded generators for exact test instances.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::frame::Frame;
use crate::matrix::Matrix;
use crate::scalar::{int, ratio, Rational};

pub fn integer_vector<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Vec<Rational> {
    (0..n).map(|_| int(rng.random_range(-bound..=bound))).collect()
}

/// `m` vectors with integer entries in `[−bound, bound]`.
pub fn integer_frame<R: Rng>(rng: &mut R, n: usize, m: usize, bound: i64) -> Result<Frame> {
    Frame::new(n, (0..m).map(|_| integer_vector(rng, n, bound)).collect())
}

/// Positive rationals `p/q` with `1 ≤ p, q ≤ bound`.
pub fn positive_rationals<R: Rng>(rng: &mut R, count: usize, bound: i64) -> Vec<Rational> {
    (0..count)
        .map(|_| ratio(rng.random_range(1..=bound), rng.random_range(1..=bound)))
        .collect()
}

const TRIPLES: [(i64, i64, i64); 3] = [(3, 4, 5), (5, 12, 13), (8, 15, 17)];

/// An exactly orthogonal rational `n × n` matrix: a product of Givens
/// rotations by Pythagorean angles, then random sign flips and a random
/// coordinate permutation.
pub fn rational_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    let mut t: Matrix<Rational> = Matrix::identity(n);
    if n >= 2 {
        for _ in 0..2 * n {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let (a, b, c) = TRIPLES[rng.random_range(0..TRIPLES.len())];
            let (cs, sn) = (ratio(a, c), ratio(b, c));
            let mut g: Matrix<Rational> = Matrix::identity(n);
            g.set(i, i, cs.clone());
            g.set(j, j, cs);
            g.set(i, j, -sn.clone());
            g.set(j, i, sn);
            t = g.mul(&t).expect("square");
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut out: Matrix<Rational> = Matrix::zeros(n, n);
    for (r, &src) in perm.iter().enumerate() {
        let flip = rng.random_bool(0.5);
        for c in 0..n {
            let v = t.get(src, c).clone();
            out.set(r, c, if flip { -v } else { v });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonal_matrices_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..6 {
            let t = rational_orthogonal(&mut rng, n);
            assert_eq!(t.transpose().mul(&t).unwrap(), Matrix::identity(n));
        }
    }
}
