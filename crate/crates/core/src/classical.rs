//! Two-beam interference of a quasi-monochromatic classical source.
//!
//! The normalized line shape j(k)/N about the line center k0 reuses the shift
//! laws of [`fluctuations`](crate::fluctuations), with the optical path
//! difference ΔS taking the place of the momentum argument. The visibility is
//! the modulus of the same characteristic function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluctuations::ShiftDistribution;

/// Normalized spectral line: `shape` is the distribution of the wavenumber
/// offset from the line center `k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDistribution {
    shape: ShiftDistribution,
    k0: f64,
}

impl SpectralDistribution {
    /// Accepts rectangular, Gaussian and double-Gaussian (any peak ratio) shapes.
    pub fn new(shape: ShiftDistribution, k0: f64) -> Result<Self> {
        let shape = shape.checked()?;
        match shape {
            ShiftDistribution::Rect { .. }
            | ShiftDistribution::Gaussian { .. }
            | ShiftDistribution::DoubleGaussian { .. } => {}
            other => {
                return Err(Error::Unsupported(format!("{} is not a spectral line shape", other.name())));
            }
        }
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(Error::invalid(format!("line center must be positive, got {k0}")));
        }
        Ok(SpectralDistribution { shape, k0 })
    }

    pub fn shape(&self) -> &ShiftDistribution {
        &self.shape
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }
}

/// |Ω(ΔS)| = √(C² + S²).
pub fn classical_visibility(spec: &SpectralDistribution, path_diff: f64) -> f64 {
    spec.shape.char_fn_complex(path_diff).norm()
}

/// Screen intensity with N = 1: 1 + |Ω(ΔS)| cos(k0 ΔS + φ(ΔS)), tan φ = S/C.
pub fn screen_intensity(spec: &SpectralDistribution, path_diff: f64) -> f64 {
    let omega = spec.shape.char_fn_complex(path_diff);
    1.0 + omega.norm() * (spec.k0 * path_diff + omega.arg()).cos()
}
