//! Incoming states: Gaussian wave packets and monochromatic beams.
//!
//! Units are ħ = 1, positions in Å and wavenumbers in Å⁻¹, so momentum and
//! wavenumber are the same coordinate.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of momentum standard deviations kept on each side of `k0` when a
/// momentum integral is truncated to a finite window.
pub const MOMENTUM_WINDOW: f64 = 8.0;

/// Minimum-uncertainty Gaussian packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGaussian")]
pub struct GaussianPacket {
    k0: f64,
    delta: f64,
    x0: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGaussian {
    k0: f64,
    delta: f64,
    #[serde(default)]
    x0: f64,
}

impl TryFrom<RawGaussian> for GaussianPacket {
    type Error = Error;

    fn try_from(raw: RawGaussian) -> Result<Self> {
        GaussianPacket::new(raw.k0, raw.delta, raw.x0)
    }
}

impl GaussianPacket {
    pub fn new(k0: f64, delta: f64, x0: f64) -> Result<Self> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(Error::invalid(format!("packet k0 must be positive, got {k0}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid(format!("packet width delta must be positive, got {delta}")));
        }
        if !x0.is_finite() {
            return Err(Error::invalid(format!("packet x0 must be finite, got {x0}")));
        }
        Ok(GaussianPacket { k0, delta, x0 })
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// Spatial spread δ.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Momentum spread, δ_k = 1 / (2δ).
    pub fn delta_k(&self) -> f64 {
        0.5 / self.delta
    }

    /// Momentum window `[k0 - 8 δ_k, k0 + 8 δ_k]` holding all but ~1e-15 of the mass.
    pub fn momentum_window(&self) -> (f64, f64) {
        let half = MOMENTUM_WINDOW * self.delta_k();
        (self.k0 - half, self.k0 + half)
    }

    /// P_in(k) = √(2δ²/π) exp(−2δ²(k−k0)²).
    pub fn momentum_density(&self, k: f64) -> f64 {
        let d2 = self.delta * self.delta;
        let dk = k - self.k0;
        (2.0 * d2 / PI).sqrt() * (-2.0 * d2 * dk * dk).exp()
    }

    /// ψ(x) = (2πδ²)^{-1/4} exp[−(x−x0)²/4δ² + i k0 x].
    pub fn position_wavefunction(&self, x: f64) -> Complex64 {
        let d2 = self.delta * self.delta;
        let dx = x - self.x0;
        let modulus = (2.0 * PI * d2).powf(-0.25) * (-dx * dx / (4.0 * d2)).exp();
        Complex64::from_polar(modulus, self.k0 * x)
    }

    /// φ(k) = (2δ²/π)^{1/4} exp[−δ²(k−k0)² − i(k−k0)x0], the Fourier partner of ψ.
    pub fn momentum_wavefunction(&self, k: f64) -> Complex64 {
        let d2 = self.delta * self.delta;
        let dk = k - self.k0;
        let modulus = (2.0 * d2 / PI).powf(0.25) * (-d2 * dk * dk).exp();
        Complex64::from_polar(modulus, -dk * self.x0)
    }
}

/// Incoming state of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WavePacket {
    Gaussian(GaussianPacket),
    Monochromatic { k: f64 },
}

impl WavePacket {
    pub fn gaussian(k0: f64, delta: f64, x0: f64) -> Result<Self> {
        GaussianPacket::new(k0, delta, x0).map(WavePacket::Gaussian)
    }

    pub fn monochromatic(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!("monochromatic wavenumber must be positive, got {k}")));
        }
        Ok(WavePacket::Monochromatic { k })
    }

    /// Re-checks the invariants, for values built through the public enum.
    pub fn validate(&self) -> Result<()> {
        match *self {
            WavePacket::Gaussian(g) => GaussianPacket::new(g.k0, g.delta, g.x0).map(|_| ()),
            WavePacket::Monochromatic { k } => WavePacket::monochromatic(k).map(|_| ()),
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianPacket> {
        match self {
            WavePacket::Gaussian(g) => Some(g),
            WavePacket::Monochromatic { .. } => None,
        }
    }

    /// Mean wavenumber: `k0` or the beam wavenumber.
    pub fn mean_wavenumber(&self) -> f64 {
        match *self {
            WavePacket::Gaussian(g) => g.k0,
            WavePacket::Monochromatic { k } => k,
        }
    }

    pub fn momentum_density(&self, k: f64) -> Result<f64> {
        match self {
            WavePacket::Gaussian(g) => Ok(g.momentum_density(k)),
            WavePacket::Monochromatic { .. } => Err(Error::DeltaDensity(
                "a monochromatic beam has no pointwise momentum density",
            )),
        }
    }

    pub fn position_wavefunction(&self, x: f64) -> Result<Complex64> {
        match self {
            WavePacket::Gaussian(g) => Ok(g.position_wavefunction(x)),
            WavePacket::Monochromatic { .. } => Err(Error::Unsupported(
                "a monochromatic plane wave is not normalizable in position".into(),
            )),
        }
    }
}
