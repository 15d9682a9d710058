//! Ensemble observables of a Mach–Zehnder interferometer with a fluctuating
//! phase shifter: output momentum densities, channel rates, spectral and
//! generalized visibility, and the operational decoherence parameter
//! ε = 1 − 𝒱.
//!
//! Every law entering here must be symmetric, so Ω(k) is real and the
//! averaged ordinary-channel operator is ½[1 + Ω(k) cos(kΔ0)].

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::j0;
use crate::error::{Error, Result};
use crate::fluctuations::ShiftDistribution;
use crate::packets::{GaussianPacket, WavePacket, MOMENTUM_WINDOW};
use crate::quadrature::{integrate, Tolerance};

/// Tolerance of the momentum integrals ∫ P_in(k) Ω(k) cos(kΔ0) dk. The
/// absolute part sits above the summed per-segment roundoff floor
/// (≈ 50 ε ∫ P_in ≈ 1.1e-14), which cancelling fringe terms would otherwise hit.
pub const MOMENTUM_TOLERANCE: Tolerance = Tolerance::new(1e-13, 1e-12);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Ordinary,
    Extraordinary,
}

impl Channel {
    fn sign(self) -> f64 {
        match self {
            Channel::Ordinary => 1.0,
            Channel::Extraordinary => -1.0,
        }
    }
}

fn gaussian_only(packet: &WavePacket) -> Result<&GaussianPacket> {
    packet.validate()?;
    packet
        .as_gaussian()
        .ok_or(Error::DeltaDensity("monochromatic beams have no pointwise momentum density"))
}

/// P_{O/E}(k) = ½ P_in(k) [1 ± Ω(k) cos(kΔ0)].
pub fn output_momentum_density(
    packet: &WavePacket,
    dist: &ShiftDistribution,
    delta0: f64,
    k: f64,
    channel: Channel,
) -> Result<f64> {
    let g = gaussian_only(packet)?;
    let dist = dist.symmetric()?;
    let fringe = dist.char_fn(k) * (k * delta0).cos();
    Ok(0.5 * g.momentum_density(k) * (1.0 + channel.sign() * fringe))
}

/// Ordinary-channel density computed through the spin-splitting operator
/// O′(Δ) = ½[e^{−ikΔ/2} + e^{ikΔ/2}] of the longitudinal Stern–Gerlach setup:
/// P_in(k) ⟨|O′(Δ)|²⟩ with ⟨e^{ikΔ}⟩ = Ω(k) e^{ikΔ0}.
pub fn magnetic_channel_density(packet: &WavePacket, dist: &ShiftDistribution, delta0: f64, k: f64) -> Result<f64> {
    let g = gaussian_only(packet)?;
    let dist = dist.symmetric()?;
    // |O′|² = ¼ (e^{−ikΔ/2} + e^{ikΔ/2})(e^{ikΔ/2} + e^{−ikΔ/2}) = ¼ (2 + e^{ikΔ} + e^{−ikΔ})
    let forward = dist.char_fn_complex(k) * Complex64::from_polar(1.0, k * delta0);
    let backward = forward.conj();
    let mean_sq = 0.25 * (Complex64::new(2.0, 0.0) + forward + backward);
    Ok(g.momentum_density(k) * mean_sq.re)
}

/// Fringe contrast of the momentum-k component, |Ω(k)|.
pub fn spectral_visibility(dist: &ShiftDistribution, k: f64) -> f64 {
    dist.char_fn(k).abs()
}

/// Relative detection frequencies of the two output ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRates {
    pub ordinary: f64,
    pub extraordinary: f64,
}

/// ⟨Ω(k) cos(kΔ0)⟩ over the incoming momentum distribution.
fn fringe_term(packet: &WavePacket, dist: &ShiftDistribution, delta0: f64) -> Result<f64> {
    match packet {
        WavePacket::Monochromatic { k } => Ok(dist.char_fn(*k) * (k * delta0).cos()),
        WavePacket::Gaussian(g) => {
            let (lo, hi) = g.momentum_window();
            let q = integrate(
                |k| g.momentum_density(k) * dist.char_fn(k) * (k * delta0).cos(),
                lo,
                hi,
                MOMENTUM_TOLERANCE,
            )?;
            Ok(q.value)
        }
    }
}

/// N_O = ½[1 + ∫ P_in Ω cos(kΔ0) dk], N_E = 1 − N_O.
pub fn channel_rates(packet: &WavePacket, dist: &ShiftDistribution, delta0: f64) -> Result<ChannelRates> {
    packet.validate()?;
    let dist = dist.symmetric()?;
    let ordinary = (0.5 * (1.0 + fringe_term(packet, &dist, delta0)?)).clamp(0.0, 1.0);
    Ok(ChannelRates {
        ordinary,
        extraordinary: 1.0 - ordinary,
    })
}

/// Channel rates over a list of mean shifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub packet: WavePacket,
    pub dist: ShiftDistribution,
    pub delta0_values: Vec<f64>,
    pub n_ordinary: Vec<f64>,
    pub n_extraordinary: Vec<f64>,
}

pub fn fringe_scan(packet: &WavePacket, dist: &ShiftDistribution, delta0_values: Vec<f64>) -> Result<FringeScan> {
    let rates = delta0_values
        .par_iter()
        .map(|&d0| channel_rates(packet, dist, d0))
        .collect::<Result<Vec<_>>>()?;
    Ok(FringeScan {
        packet: *packet,
        dist: dist.symmetric()?,
        delta0_values,
        n_ordinary: rates.iter().map(|r| r.ordinary).collect(),
        n_extraordinary: rates.iter().map(|r| r.extraordinary).collect(),
    })
}

/// Search settings for the maximization over Δ0.
///
/// The coarse grid spans `[0, periods·2π/k_lo + 8δ + w_extent]` with step
/// `π/(step_divisor·k_hi)`, where `[k_lo, k_hi]` bounds the momentum support
/// and `w_extent` is the effective half-width of the shift law. The best grid
/// point is then refined by golden-section search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub periods: f64,
    pub step_divisor: f64,
    pub refine_tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            periods: 2.0,
            step_divisor: 16.0,
            refine_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedVisibility {
    pub value: f64,
    pub argmax_delta0: f64,
}

/// 𝒱 = max_{Δ0 ≥ 0} |∫ P_in(k) Ω(k) cos(kΔ0) dk| by deterministic scan.
pub fn generalized_visibility(packet: &WavePacket, dist: &ShiftDistribution) -> Result<GeneralizedVisibility> {
    generalized_visibility_with(packet, dist, ScanOptions::default())
}

pub fn generalized_visibility_with(
    packet: &WavePacket,
    dist: &ShiftDistribution,
    opts: ScanOptions,
) -> Result<GeneralizedVisibility> {
    packet.validate()?;
    let dist = dist.symmetric()?;
    let objective = |d0: f64| fringe_term(packet, &dist, d0).map(f64::abs);
    maximize_over_delta0(packet, &dist, opts, objective)
}

/// The bound ⟨𝒱(k)⟩ = ∫ P_in(k) |Ω(k)| dk on the generalized visibility.
pub fn local_visibility_bound(packet: &WavePacket, dist: &ShiftDistribution) -> Result<f64> {
    packet.validate()?;
    let dist = dist.symmetric()?;
    match packet {
        WavePacket::Monochromatic { k } => Ok(spectral_visibility(&dist, *k)),
        WavePacket::Gaussian(g) => {
            let (lo, hi) = g.momentum_window();
            let q = integrate(
                |k| g.momentum_density(k) * spectral_visibility(&dist, k),
                lo,
                hi,
                MOMENTUM_TOLERANCE,
            )?;
            Ok(q.value)
        }
    }
}

fn search_interval(packet: &WavePacket, dist: &ShiftDistribution, opts: ScanOptions) -> (f64, f64) {
    let (k_lo, k_hi, spread) = match packet {
        WavePacket::Monochromatic { k } => (*k, *k, 0.0),
        WavePacket::Gaussian(g) => {
            let half = MOMENTUM_WINDOW * g.delta_k();
            // Packets whose momentum window reaches k ≤ 0 keep the fringe
            // period of half the mean wavenumber.
            ((g.k0() - half).max(0.5 * g.k0()), g.k0() + half, 8.0 * g.delta())
        }
    };
    let upper = opts.periods * 2.0 * PI / k_lo + spread + dist.effective_half_width();
    let step = PI / (opts.step_divisor * k_hi);
    (upper, step)
}

fn maximize_over_delta0<F>(
    packet: &WavePacket,
    dist: &ShiftDistribution,
    opts: ScanOptions,
    objective: F,
) -> Result<GeneralizedVisibility>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(opts.periods > 0.0 && opts.step_divisor > 0.0 && opts.refine_tolerance > 0.0) {
        return Err(Error::invalid("scan options must be positive"));
    }
    let (upper, step) = search_interval(packet, dist, opts);
    let n = (upper / step).ceil() as usize + 1;
    let values = (0..n)
        .into_par_iter()
        .map(|i| objective(i as f64 * step))
        .collect::<Result<Vec<_>>>()?;
    let (best_i, best) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });

    let center = best_i as f64 * step;
    let (x, fx) = golden_section_max(&objective, (center - step).max(0.0), center + step, opts.refine_tolerance)?;
    Ok(if fx > best {
        GeneralizedVisibility {
            value: fx,
            argmax_delta0: x,
        }
    } else {
        GeneralizedVisibility {
            value: best,
            argmax_delta0: center,
        }
    })
}

fn golden_section_max<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    QuadratureScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceReport {
    pub generalized_visibility: f64,
    pub epsilon_operational: f64,
    pub argmax_delta0: f64,
    pub method: Method,
    /// Entropy of the shift law in nats; `None` for a point mass (−∞).
    pub entropy_of_shifts: Option<f64>,
}

impl DecoherenceReport {
    fn new(visibility: GeneralizedVisibility, method: Method, dist: &ShiftDistribution) -> Result<Self> {
        let entropy_of_shifts = match dist.entropy() {
            Ok(s) => Some(s),
            Err(Error::AtomicDistribution(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(DecoherenceReport {
            generalized_visibility: visibility.value,
            epsilon_operational: 1.0 - visibility.value,
            argmax_delta0: visibility.argmax_delta0,
            method,
            entropy_of_shifts,
        })
    }
}

/// ε for a Gaussian packet under Gaussian noise:
/// 1 − √(δ²/(δ²+σ²/4)) exp(−[δ²/(δ²+σ²/4)] σ²k0²/2).
pub fn epsilon_gaussian_packet_gaussian_noise(packet: &GaussianPacket, sigma: f64) -> f64 {
    let d2 = packet.delta() * packet.delta();
    let shrink = d2 / (d2 + 0.25 * sigma * sigma);
    let k0 = packet.k0();
    1.0 - shrink.sqrt() * (-shrink * sigma * sigma * k0 * k0 / 2.0).exp()
}

/// ε_k = 1 − e^{−k²σ²/2}.
pub fn epsilon_monochromatic_gaussian_noise(k: f64, sigma: f64) -> f64 {
    1.0 - (-0.5 * k * k * sigma * sigma).exp()
}

/// ε_k = 1 − |J0(√2 kσ)|.
pub fn epsilon_monochromatic_arcsine_noise(k: f64, sigma: f64) -> f64 {
    1.0 - j0(SQRT_2 * k * sigma).abs()
}

/// Operational decoherence parameter, using an exact formula when one exists
/// for the (packet, law) pair and the Δ0 scan otherwise.
pub fn decoherence_operational(packet: &WavePacket, dist: &ShiftDistribution) -> Result<DecoherenceReport> {
    packet.validate()?;
    let dist = dist.symmetric()?;
    let exact = |epsilon: f64| GeneralizedVisibility {
        value: 1.0 - epsilon,
        argmax_delta0: 0.0,
    };
    match (packet, dist) {
        (WavePacket::Gaussian(g), ShiftDistribution::Gaussian { sigma }) => DecoherenceReport::new(
            exact(epsilon_gaussian_packet_gaussian_noise(g, sigma)),
            Method::ClosedForm,
            &dist,
        ),
        (WavePacket::Monochromatic { k }, ShiftDistribution::Gaussian { sigma }) => DecoherenceReport::new(
            exact(epsilon_monochromatic_gaussian_noise(*k, sigma)),
            Method::ClosedForm,
            &dist,
        ),
        (WavePacket::Monochromatic { k }, ShiftDistribution::Arcsine { sigma }) => DecoherenceReport::new(
            exact(epsilon_monochromatic_arcsine_noise(*k, sigma)),
            Method::ClosedForm,
            &dist,
        ),
        // A monochromatic beam reduces 𝒱 to the spectral visibility |Ω(k)|.
        (WavePacket::Monochromatic { k }, _) => DecoherenceReport::new(
            exact(1.0 - spectral_visibility(&dist, *k)),
            Method::ClosedForm,
            &dist,
        ),
        _ => decoherence_scan(packet, &dist, ScanOptions::default()),
    }
}

/// Operational decoherence by the numerical route only.
///
/// Gaussian packets integrate P_in Ω cos(kΔ0) by adaptive quadrature at each
/// scan point; monochromatic beams scan |Ω(k) cos(kΔ0)| with Ω(k) itself
/// obtained by quadrature over the shift law.
pub fn decoherence_scan(packet: &WavePacket, dist: &ShiftDistribution, opts: ScanOptions) -> Result<DecoherenceReport> {
    packet.validate()?;
    let dist = dist.symmetric()?;
    let visibility = match packet {
        WavePacket::Gaussian(_) => generalized_visibility_with(packet, &dist, opts)?,
        WavePacket::Monochromatic { k } => {
            let omega = match dist {
                ShiftDistribution::Delta => 1.0,
                _ => dist.char_fn_numeric(*k)?.real,
            };
            maximize_over_delta0(packet, &dist, opts, |d0| Ok((omega * (k * d0).cos()).abs()))?
        }
    };
    DecoherenceReport::new(visibility, Method::QuadratureScan, &dist)
}
