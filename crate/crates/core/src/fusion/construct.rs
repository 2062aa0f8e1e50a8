use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{FusionFrame, WeightedSubspace};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::float;
use crate::matrix::Matrix;
use crate::scalar::{to_f64, Mode, Rational};
use crate::subspace::SubspaceBasis;

/// `{v_i f_ij}` for local families `{f_ij}_j ⊂ W_i`.
pub fn weighted_local_concat(ff: &FusionFrame, local: &[Vec<Vec<Rational>>]) -> Result<Frame> {
    if local.len() != ff.len() {
        return Err(Error::DimensionMismatch {
            expected: ff.len(),
            found: local.len(),
        });
    }
    let mut vectors = Vec::new();
    for (member, (w, fs)) in ff.members().iter().zip(local).enumerate() {
        for (vector, f) in fs.iter().enumerate() {
            if !w.subspace().contains(f) {
                return Err(Error::NotInSubspace { member, vector });
            }
            vectors.push(f.iter().map(|x| x * w.weight()).collect());
        }
    }
    Frame::new(ff.ambient_dim(), vectors)
}

pub fn is_orthogonal(t: &Matrix<Rational>, mode: Mode) -> bool {
    if !t.is_square() {
        return false;
    }
    let n = t.rows();
    match mode {
        Mode::Exact => t.transpose().mul(t).expect("square") == Matrix::identity(n),
        Mode::Float { eps } => {
            let f = t.map(to_f64);
            let d = f
                .transpose()
                .mul(&f)
                .expect("square")
                .sub(&Matrix::identity(n))
                .expect("square");
            float::max_abs_entry(&d) <= eps
        }
    }
}

/// `{(T W_i, v_i)}` for orthogonal `T`.
pub fn apply_unitary(ff: &FusionFrame, t: &Matrix<Rational>, mode: Mode) -> Result<FusionFrame> {
    if t.rows() != ff.ambient_dim() || !is_orthogonal(t, mode) {
        return Err(Error::NonUnitary);
    }
    let members = ff
        .members()
        .iter()
        .map(|w| {
            let b = t.mul(w.subspace().basis())?;
            WeightedSubspace::new(SubspaceBasis::new(b)?, w.weight().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    FusionFrame::new(ff.ambient_dim(), members)
}

/// Result of [`split_subspaces`]: the split frame and a notice per dropped
/// zero subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub frame: FusionFrame,
    pub notices: Vec<String>,
}

/// Replaces each `W_i` by `Q_i W_i` and `(I − Q_i) W_i`, where `Q_i` is an
/// orthogonal projection mapping `W_i` into itself. Zero parts are dropped.
pub fn split_subspaces(ff: &FusionFrame, qs: &[Matrix<Rational>]) -> Result<Split> {
    let n = ff.ambient_dim();
    if qs.len() != ff.len() {
        return Err(Error::DimensionMismatch {
            expected: ff.len(),
            found: qs.len(),
        });
    }
    let id: Matrix<Rational> = Matrix::identity(n);
    let mut members = Vec::new();
    let mut notices = Vec::new();
    for (member, (w, q)) in ff.members().iter().zip(qs).enumerate() {
        let invalid = Error::InvalidProjection { member };
        if q.rows() != n || !q.is_square() || !q.is_symmetric() || &q.mul(q)? != q {
            return Err(invalid);
        }
        let inside = w.subspace().columns();
        let images: Vec<Vec<Rational>> = inside.iter().map(|c| q.mul_vec(c)).collect::<Result<_>>()?;
        if !images.iter().all(|c| w.subspace().contains(c)) {
            return Err(invalid);
        }
        let rest = id.sub(q)?;
        let others: Vec<Vec<Rational>> = inside.iter().map(|c| rest.mul_vec(c)).collect::<Result<_>>()?;
        for (label, part) in [("Q", images), ("I-Q", others)] {
            let s = SubspaceBasis::span_of(n, &part)?;
            if s.dim() == 0 {
                notices.push(alloc::format!("member {member}: {label} part is zero and was dropped"));
            } else {
                members.push(WeightedSubspace::new(s, w.weight().clone())?);
            }
        }
    }
    Ok(Split {
        frame: FusionFrame::new(n, members)?,
        notices,
    })
}

/// `{W_i ⊕ span{e_{k+1}, …, e_n}}` for members inside the first `k`
/// coordinates.
pub fn extend_to_superspace(ff: &FusionFrame, k: usize, n: usize) -> Result<FusionFrame> {
    let d = ff.ambient_dim();
    if k > d || k > n || k == 0 {
        return Err(Error::Precondition("need 0 < k ≤ ambient dimension and k ≤ n"));
    }
    let mut members = Vec::with_capacity(ff.len());
    for (member, w) in ff.members().iter().enumerate() {
        let b = w.subspace().basis();
        if (k..d).any(|r| b.row(r).iter().any(|x| !x.is_zero())) {
            return Err(Error::ContainmentViolation { member });
        }
        let mut columns: Vec<Vec<Rational>> = w
            .subspace()
            .columns()
            .into_iter()
            .map(|c| {
                let mut v: Vec<Rational> = c.into_iter().take(k).collect();
                v.resize(n, Rational::zero());
                v
            })
            .collect();
        for extra in k..n {
            let mut e = alloc::vec![Rational::zero(); n];
            e[extra] = Rational::one();
            columns.push(e);
        }
        members.push(WeightedSubspace::new(
            SubspaceBasis::from_columns(n, columns)?,
            w.weight().clone(),
        )?);
    }
    FusionFrame::new(n, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::does_phase_retrieval;
    use crate::fusion::{coordinate_nr_decision, tests::axis, tests::e, tests::lines};
    use crate::scalar::{int, ratio};
    use crate::search::SearchOptions;
    use alloc::vec;

    #[test]
    fn local_concat_reproduces_vector_frame() {
        let ff = lines(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        let local: Vec<Vec<Vec<Rational>>> = ff.members().iter().map(|w| w.subspace().columns()).collect();
        let f = weighted_local_concat(&ff, &local).unwrap();
        assert!(does_phase_retrieval(&f, &SearchOptions::default()).unwrap().is_yes());
        let heavy = ff.reweighted(&[int(2), int(2), int(2)]).unwrap();
        let f = weighted_local_concat(&heavy, &local).unwrap();
        assert_eq!(f.vector(2), &[int(2), int(2)]);
        assert!(does_phase_retrieval(&f, &SearchOptions::default()).unwrap().is_yes());
    }

    #[test]
    fn local_concat_of_onb_split_fails_pr() {
        let ff = axis(3, &[&[0, 1], &[2]]);
        let local = vec![vec![e(0, 3), e(1, 3)], vec![e(2, 3)]];
        let f = weighted_local_concat(&ff, &local).unwrap();
        assert!(does_phase_retrieval(&f, &SearchOptions::default()).unwrap().is_no());
        let bad = vec![vec![e(0, 3)], vec![e(0, 3)]];
        assert_eq!(
            weighted_local_concat(&ff, &bad),
            Err(Error::NotInSubspace { member: 1, vector: 0 })
        );
    }

    #[test]
    fn unitary_maps() {
        let ff = axis(3, &[&[1, 2], &[0, 2]]);
        assert_eq!(apply_unitary(&ff, &Matrix::identity(3), Mode::Exact).unwrap(), ff);
        let perm = Matrix::from_rows(&[
            vec![int(0), int(1), int(0)],
            vec![int(0), int(0), int(1)],
            vec![int(1), int(0), int(0)],
        ])
        .unwrap();
        let moved = apply_unitary(&ff, &perm, Mode::Exact).unwrap();
        assert!(coordinate_nr_decision(&moved).unwrap().is_no());
        let rot = Matrix::from_rows(&[vec![ratio(3, 5), ratio(-4, 5)], vec![ratio(4, 5), ratio(3, 5)]]).unwrap();
        let pair = axis(2, &[&[0], &[1]]);
        let turned = apply_unitary(&pair, &rot, Mode::Exact).unwrap();
        let q0 = rot.mul(pair.projection(0)).unwrap().mul(&rot.transpose()).unwrap();
        assert_eq!(turned.projection(0), &q0);
        let skew = Matrix::from_rows(&[vec![int(1), int(1)], vec![int(0), int(1)]]).unwrap();
        assert_eq!(apply_unitary(&pair, &skew, Mode::Exact), Err(Error::NonUnitary));
    }

    #[test]
    fn splitting() {
        let ff = axis(2, &[&[0, 1]]);
        let q = Matrix::diagonal(&[int(1), int(0)]);
        let s = split_subspaces(&ff, &[q]).unwrap();
        assert_eq!(s.frame, axis(2, &[&[0], &[1]]));
        let s = split_subspaces(&ff, &[Matrix::identity(2)]).unwrap();
        assert_eq!(s.notices.len(), 1);
        assert_eq!(s.frame.len(), 1);
        let not_projection = Matrix::diagonal(&[int(2), int(0)]);
        assert_eq!(
            split_subspaces(&ff, &[not_projection]),
            Err(Error::InvalidProjection { member: 0 })
        );
    }

    #[test]
    fn tight_triple_split_by_coordinates_stays_yes() {
        let ff = axis(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        let qs = [
            Matrix::diagonal(&[int(1), int(0), int(0)]),
            Matrix::diagonal(&[int(0), int(1), int(0)]),
            Matrix::diagonal(&[int(0), int(0), int(1)]),
        ];
        let s = split_subspaces(&ff, &qs).unwrap();
        assert!(coordinate_nr_decision(&s.frame).unwrap().is_yes());
    }

    #[test]
    fn extension() {
        let ff = axis(2, &[&[0], &[1]]);
        let ext = extend_to_superspace(&ff, 2, 3).unwrap();
        assert_eq!(ext, axis(3, &[&[0, 2], &[1, 2]]));
        assert!(coordinate_nr_decision(&ext).unwrap().is_no());
        assert_eq!(extend_to_superspace(&ff, 2, 2).unwrap(), ff);
        let inside = axis(3, &[&[0], &[2]]);
        assert_eq!(
            extend_to_superspace(&inside, 2, 4),
            Err(Error::ContainmentViolation { member: 1 })
        );
    }
}
