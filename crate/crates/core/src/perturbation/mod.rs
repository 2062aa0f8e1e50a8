//! Perturbation experiments: the S-operator for a near-identity map between
//! subspaces, stability of norm-retrieval failure under small perturbations,
//! density of full spark frames, and stability of normalization.

mod experiments;

pub use experiments::{
    full_spark_density_experiment, normalization_stability_check, nr_failure_stability_experiment,
    riesz_nr_orthogonality_suite, DensityReport, NrStabilityReport, SuiteReport,
};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::float;
use crate::matrix::Matrix;
use crate::scalar::Mode;

/// Slack added to every float inequality.
pub const SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundItem {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub kind: BoundKind,
    pub holds: bool,
}

impl BoundItem {
    pub fn at_most(name: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            kind: BoundKind::AtMost,
            holds: measured <= bound + SLACK,
        }
    }

    pub fn at_least(name: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            kind: BoundKind::AtLeast,
            holds: measured >= bound - SLACK,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundReport {
    pub items: Vec<BoundItem>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.items.iter().all(|i| i.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundItem> {
        self.items.iter().filter(|i| !i.holds)
    }
}

/// A basis of `X` (columns, `n × d`), the images `T x_j` of those columns
/// (spanning `Y`), and `ε` with `‖(I − T)|_X‖ < ε < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationSetup {
    x: Matrix<f64>,
    images: Matrix<f64>,
    epsilon: f64,
}

fn projection_from_columns(b: &Matrix<f64>) -> Option<(Matrix<f64>, Matrix<f64>)> {
    let ginv = float::inverse(&b.transpose().mul(b).ok()?)?;
    let p = b.mul(&ginv).ok()?.mul(&b.transpose()).ok()?;
    Some((p, ginv))
}

impl PerturbationSetup {
    pub fn new(x: Matrix<f64>, images: Matrix<f64>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
        if images.rows() != x.rows() || images.cols() != x.cols() {
            return Err(Error::DimensionMismatch {
                expected: x.cols(),
                found: images.cols(),
            });
        }
        if x.cols() == 0 || x.cols() > x.rows() || float::rank(&x, 1e-12) < x.cols() {
            return Err(Error::DependentBasis);
        }
        let s = Self { x, images, epsilon };
        if s.distance_from_identity() >= epsilon {
            return Err(Error::Precondition(
                "need the distance from T to the identity below epsilon",
            ));
        }
        Ok(s)
    }

    /// `T` given as an `n × n` matrix acting on the columns of `x`.
    pub fn from_map(x: Matrix<f64>, t: &Matrix<f64>, epsilon: f64) -> Result<Self> {
        let images = t.mul(&x)?;
        Self::new(x, images, epsilon)
    }

    pub fn ambient_dim(&self) -> usize {
        self.x.rows()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn x_basis(&self) -> &Matrix<f64> {
        &self.x
    }

    pub fn images(&self) -> &Matrix<f64> {
        &self.images
    }

    /// `P` and `T P`.
    fn p_and_tp(&self) -> (Matrix<f64>, Matrix<f64>) {
        let (p, ginv) = projection_from_columns(&self.x).expect("independent basis");
        let tp = self
            .images
            .mul(&ginv)
            .expect("d × d")
            .mul(&self.x.transpose())
            .expect("d × n");
        (p, tp)
    }

    /// `‖(I − T) P‖`.
    pub fn distance_from_identity(&self) -> f64 {
        let (p, tp) = self.p_and_tp();
        float::operator_norm(&p.sub(&tp).expect("n × n"))
    }
}

/// Random setup: Gaussian `X` of dimension `d` in `R^n`, and `T = I + E` on
/// `X` with `‖E P‖` a uniform fraction in `[0.05, 0.95)` of `ε`.
pub fn random_setup<R: Rng>(rng: &mut R, n: usize, d: usize, epsilon: f64) -> Result<PerturbationSetup> {
    let gaussian = |rng: &mut R, r: usize, c: usize| -> Matrix<f64> {
        let v: Vec<f64> = (0..r * c).map(|_| StandardNormal.sample(rng)).collect();
        Matrix::from_vec(r, c, v).expect("r × c")
    };
    let x = loop {
        let x = gaussian(rng, n, d);
        if float::min_singular_value(&x) > 1e-3 {
            break x;
        }
    };
    let (p, _) = projection_from_columns(&x).ok_or(Error::DependentBasis)?;
    let g = gaussian(rng, n, n);
    let size = float::operator_norm(&g.mul(&p)?);
    let target = epsilon * rng.random_range(0.05..0.95);
    let e = g.scale(&(target / size));
    let images = x.add(&e.mul(&x)?)?;
    PerturbationSetup::new(x, images, epsilon)
}

/// The operators of the construction and the bound checks.
#[derive(Clone, Debug, PartialEq)]
pub struct SOperator {
    pub s: Matrix<f64>,
    pub q: Matrix<f64>,
    pub report: BoundReport,
}

fn unit_samples(n_basis: &Matrix<f64>) -> Vec<Vec<f64>> {
    let cols = n_basis.column_vecs();
    let mut out = cols.clone();
    for w in cols.windows(2) {
        let v: Vec<f64> = w[0].iter().zip(&w[1]).map(|(a, b)| (a + b) / sqrt(2.0)).collect();
        out.push(v);
    }
    if cols.len() > 2 {
        let k = cols.len() as f64;
        let n = n_basis.rows();
        out.push(
            (0..n)
                .map(|r| cols.iter().map(|c| c[r]).sum::<f64>() / sqrt(k))
                .collect(),
        );
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

/// `S = T P + (I − P)` and `Q = S P S⁻¹`, with the norm estimates on `S`,
/// `S⁻¹`, `Q` and `P − Q` checked against their `ε` bounds.
pub fn build_s_operator(setup: &PerturbationSetup, mode: Mode) -> Result<SOperator> {
    let eps_tol = mode.require_float()?;
    let eps = setup.epsilon;
    let n = setup.ambient_dim();
    let id: Matrix<f64> = Matrix::identity(n);
    let (p, tp) = setup.p_and_tp();
    let s = tp.add(&id.sub(&p)?)?;
    let s_inv = float::inverse(&s).ok_or(Error::InternalInconsistency("S is singular"))?;
    let q = s.mul(&p)?.mul(&s_inv)?;
    let (py, _) = projection_from_columns(&setup.images).ok_or(Error::DependentBasis)?;

    let scale = 1.0 + float::operator_norm(&q);
    let pq = float::operator_norm(&p.sub(&q)?);
    let mut items = vec![
        BoundItem::at_most("|I - S|", float::operator_norm(&id.sub(&s)?), eps),
        BoundItem::at_most("|S|", float::operator_norm(&s), 1.0 + eps),
        BoundItem::at_most("|S^-1|", float::operator_norm(&s_inv), 1.0 / (1.0 - eps)),
        BoundItem::at_most("|I - S^-1|", float::operator_norm(&id.sub(&s_inv)?), eps / (1.0 - eps)),
        BoundItem::at_most("|Q^2 - Q|", float::operator_norm(&q.mul(&q)?.sub(&q)?) / scale, 0.0),
        BoundItem::at_most(
            "|(I - P_Y) Q|",
            float::operator_norm(&id.sub(&py)?.mul(&q)?) / scale,
            0.0,
        ),
        BoundItem::at_most(
            "|Q P_Y - P_Y|",
            float::operator_norm(&q.mul(&py)?.sub(&py)?) / scale,
            0.0,
        ),
        BoundItem::at_most("|P - Q| (2e/(1-e))", pq, 2.0 * eps / (1.0 - eps)),
        BoundItem::at_most("|P - Q| ((1+e^2)/(1-e))", pq, (1.0 + eps * eps) / (1.0 - eps)),
    ];

    let mut notes = Vec::new();
    let perp = float::complement_columns(&setup.x, eps_tol);
    if perp.cols() == 0 {
        notes.push("X is the whole space; the bounds on its complement are vacuous".into());
    } else {
        let iq = id.sub(&q)?;
        items.push(BoundItem::at_most(
            "|Q x| for unit x perp X",
            float::operator_norm(&q.mul(&perp)?),
            eps,
        ));
        items.push(BoundItem::at_least(
            "|(I - Q) x| for unit x perp X",
            float::min_singular_value(&iq.mul(&perp)?),
            1.0 - eps,
        ));
        let worst = unit_samples(&perp)
            .iter()
            .map(|x| {
                let y = iq.mul_vec(x).expect("length n");
                let ny = norm(&y);
                norm(&x.iter().zip(&y).map(|(a, b)| a - b / ny).collect::<Vec<_>>())
            })
            .fold(0.0, f64::max);
        items.push(BoundItem::at_most(
            "|x - (I-Q)x/|(I-Q)x|| for unit x perp X",
            worst,
            2.0 * eps / (1.0 - eps),
        ));
        notes.push("|Q x| is bounded on the orthogonal complement of X only".into());
    }
    Ok(SOperator {
        s,
        q,
        report: BoundReport { items, notes },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn col(v: &[f64]) -> Matrix<f64> {
        Matrix::from_columns(v.len(), &[v.to_vec()]).unwrap()
    }

    #[test]
    fn identity_map_gives_identity() {
        let x = Matrix::from_columns(3, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]]).unwrap();
        let setup = PerturbationSetup::new(x.clone(), x, 0.1).unwrap();
        let r = build_s_operator(&setup, Mode::float()).unwrap();
        assert!(float::max_abs_entry(&r.s.sub(&Matrix::identity(3)).unwrap()) < 1e-12);
        assert!(r.report.all_hold(), "{:?}", r.report);
    }

    #[test]
    fn rotated_line() {
        let (c, s) = (libm::cos(0.1), libm::sin(0.1));
        let setup = PerturbationSetup::new(col(&[1.0, 0.0]), col(&[c, s]), 0.1).unwrap();
        assert!((setup.distance_from_identity() - 2.0 * libm::sin(0.05)).abs() < 1e-12);
        let r = build_s_operator(&setup, Mode::float()).unwrap();
        assert!(r.report.all_hold(), "{:?}", r.report);
        // S = [[c, 0], [s, 1]] and Q = S P S⁻¹ = [[1, 0], [s/c, 0]].
        assert!((r.s.get(1, 0) - s).abs() < 1e-12);
        assert!((r.q.get(1, 0) - s / c).abs() < 1e-12);
        assert!(r.q.get(1, 1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_epsilon_and_shapes() {
        let x = col(&[1.0, 0.0]);
        assert_eq!(
            PerturbationSetup::new(x.clone(), x.clone(), 1.0),
            Err(Error::EpsilonOutOfRange(1.0))
        );
        assert_eq!(
            PerturbationSetup::new(x.clone(), x.clone(), 0.0),
            Err(Error::EpsilonOutOfRange(0.0))
        );
        let y = Matrix::from_columns(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            PerturbationSetup::new(x.clone(), y, 0.5),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(PerturbationSetup::new(x, col(&[0.0, 1.0]), 0.5).is_err());
        let setup = PerturbationSetup::new(col(&[1.0, 0.0]), col(&[1.0, 0.01]), 0.5).unwrap();
        assert_eq!(
            build_s_operator(&setup, Mode::Exact),
            Err(Error::UnsupportedInExactMode)
        );
    }

    #[test]
    fn random_planes_in_r5() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let setup = random_setup(&mut rng, 5, 2, 0.05).unwrap();
            assert!(setup.distance_from_identity() < 0.05);
            let r = build_s_operator(&setup, Mode::float()).unwrap();
            assert!(r.report.all_hold(), "{:?}", r.report);
        }
    }
}
