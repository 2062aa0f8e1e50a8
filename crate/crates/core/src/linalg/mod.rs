//! Linear-algebra kernels. [`exact`] works over the rationals and is what
//! every certified verdict rests on; [`float`] serves spectral bounds and
//! sampling.

pub mod exact;
pub mod float;
pub(crate) mod modp;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{to_f64, Mode, Rational};

/// Extreme eigenvalues of a symmetric rational matrix, computed in float mode.
pub fn symmetric_spectrum_bounds(m: &Matrix<Rational>, mode: Mode) -> Result<(f64, f64)> {
    mode.require_float()?;
    if !m.is_symmetric() {
        return Err(Error::Precondition("matrix is not symmetric"));
    }
    float::symmetric_spectrum_bounds(&m.map(to_f64))
}
