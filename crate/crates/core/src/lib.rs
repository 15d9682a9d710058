//! Decoherence of matter waves in a Mach-Zehnder interferometer subject to
//! random path-length shifts.

pub mod bessel;
pub mod classical;
pub mod error;
pub mod fluctuations;
pub mod interferometer;
pub mod montecarlo;
pub mod packets;
pub mod quadrature;
pub mod wigner;

pub use classical::{classical_visibility, screen_intensity, SpectralDistribution};
pub use error::{Error, Result};
pub use fluctuations::ShiftDistribution;
pub use interferometer::{
    channel_rates, decoherence_operational, decoherence_scan, fringe_scan, generalized_visibility,
    spectral_visibility, Channel, ChannelRates, DecoherenceReport, FringeScan, GeneralizedVisibility, Method,
    ScanOptions,
};
pub use montecarlo::{run_ensemble, EnsembleRun};
pub use packets::{GaussianPacket, WavePacket};
pub use wigner::{purity_decoherence, GridSpec, WignerGrid};
