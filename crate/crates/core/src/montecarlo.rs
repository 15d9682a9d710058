//! Stochastic oracle: per-event shift draws rebuild the ensemble observables
//! without going through the characteristic function.
//!
//! Draws are split into fixed-size chunks. Chunk `c` draws from ChaCha8 with
//! key `seed` and stream `c`, and chunk sums are merged in chunk order, so a
//! run is bit-identical for any number of threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluctuations::ShiftDistribution;
use crate::packets::WavePacket;
use crate::wigner::wigner_ordinary;

/// Name and version of the random stream layout; changes whenever the
/// sequence of draws for a given seed changes.
pub const GENERATOR: &str = "chacha8-v1";

/// Draws per chunk (and per generator stream).
pub const CHUNK_SIZE: u64 = 4096;

pub const DEFAULT_HISTOGRAM_BINS: usize = 64;

fn default_bins() -> usize {
    DEFAULT_HISTOGRAM_BINS
}

/// Configuration of an ensemble run; `collected` is filled by [`run_ensemble`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleRun {
    pub seed: u64,
    pub n_samples: u64,
    pub packet: WavePacket,
    pub dist: ShiftDistribution,
    pub delta0: f64,
    /// Also simulate one Bernoulli detector click per event.
    #[serde(default)]
    pub clicks: bool,
    /// Momentum histogram bins over the packet's momentum window.
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    /// Phase-space points `[x, k]` at which W_O(x, k, Δ_i) is sample-averaged.
    #[serde(default)]
    pub wigner_probes: Vec<[f64; 2]>,
    #[serde(default, skip_deserializing)]
    pub collected: Option<Collected>,
}

impl EnsembleRun {
    pub fn new(seed: u64, n_samples: u64, packet: WavePacket, dist: ShiftDistribution, delta0: f64) -> Self {
        EnsembleRun {
            seed,
            n_samples,
            packet,
            dist,
            delta0,
            clicks: false,
            histogram_bins: DEFAULT_HISTOGRAM_BINS,
            wigner_probes: Vec::new(),
            collected: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collected {
    pub generator: String,
    /// Sample mean of the per-event ordinary-channel probability.
    pub n_ordinary: f64,
    /// Standard error of `n_ordinary` from the sample variance (0 for one draw).
    pub n_ordinary_std_error: f64,
    /// Ordinary-channel clicks when click simulation is on.
    pub ordinary_clicks: Option<u64>,
    /// Absent for monochromatic beams.
    pub histogram: Option<MomentumHistogram>,
    pub wigner: Vec<WignerProbe>,
}

/// Momentum samples drawn from P_in, one per event. Samples outside the
/// window are counted in the end bins, so `counts` sums to the draw count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Per-bin sums of cos²(kΔ_i/2): the ordinary-channel share of each count.
    pub ordinary_weights: Vec<f64>,
}

impl MomentumHistogram {
    /// Estimated ordinary-channel momentum density at each bin.
    pub fn ordinary_density(&self, n_samples: u64) -> Vec<f64> {
        self.ordinary_weights
            .iter()
            .zip(self.edges.windows(2))
            .map(|(w, e)| w / (n_samples as f64 * (e[1] - e[0])))
            .collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerProbe {
    pub x: f64,
    pub k: f64,
    pub mean: f64,
    pub std_error: f64,
}

/// Ordinary-channel probability for a fixed shift: ½[1 + e^{−Δ²/8δ²} cos(k0Δ)]
/// for a Gaussian packet, cos²(kΔ/2) for a monochromatic beam.
pub fn ordinary_probability(packet: &WavePacket, shift: f64) -> f64 {
    match packet {
        WavePacket::Gaussian(g) => {
            let d2 = g.delta() * g.delta();
            0.5 * (1.0 + (-shift * shift / (8.0 * d2)).exp() * (g.k0() * shift).cos())
        }
        WavePacket::Monochromatic { k } => {
            let c = (0.5 * k * shift).cos();
            c * c
        }
    }
}

#[derive(Debug, Clone)]
struct Partial {
    sum: f64,
    sum_sq: f64,
    clicks: u64,
    counts: Vec<u64>,
    weights: Vec<f64>,
    probe_sum: Vec<f64>,
    probe_sum_sq: Vec<f64>,
}

impl Partial {
    fn new(bins: usize, probes: usize) -> Self {
        Partial {
            sum: 0.0,
            sum_sq: 0.0,
            clicks: 0,
            counts: vec![0; bins],
            weights: vec![0.0; bins],
            probe_sum: vec![0.0; probes],
            probe_sum_sq: vec![0.0; probes],
        }
    }

    fn absorb(&mut self, other: &Partial) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.clicks += other.clicks;
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        for (a, b) in self.probe_sum.iter_mut().zip(&other.probe_sum) {
            *a += b;
        }
        for (a, b) in self.probe_sum_sq.iter_mut().zip(&other.probe_sum_sq) {
            *a += b;
        }
    }
}

/// Runs the ensemble and returns the configuration with `collected` filled.
pub fn run_ensemble(mut config: EnsembleRun) -> Result<EnsembleRun> {
    if config.n_samples == 0 {
        return Err(Error::invalid("ensemble needs at least one sample"));
    }
    config.packet.validate()?;
    let dist = config.dist.symmetric()?;
    if !config.delta0.is_finite() {
        return Err(Error::invalid(format!("delta0 must be finite, got {}", config.delta0)));
    }
    let gaussian = config.packet.as_gaussian().copied();
    if gaussian.is_none() && !config.wigner_probes.is_empty() {
        return Err(Error::Unsupported("Wigner probes need a Gaussian packet".into()));
    }
    if config.wigner_probes.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("Wigner probe coordinates must be finite"));
    }
    let edges = match gaussian {
        Some(g) => {
            if config.histogram_bins == 0 {
                return Err(Error::invalid("histogram needs at least one bin"));
            }
            let (lo, hi) = g.momentum_window();
            let step = (hi - lo) / config.histogram_bins as f64;
            (0..=config.histogram_bins).map(|i| lo + i as f64 * step).collect()
        }
        None => Vec::new(),
    };
    let bins = edges.len().saturating_sub(1);
    let probes = &config.wigner_probes;
    let n = config.n_samples;
    let chunks = n.div_ceil(CHUNK_SIZE);

    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(chunk);
            let draws = CHUNK_SIZE.min(n - chunk * CHUNK_SIZE);
            let mut part = Partial::new(bins, probes.len());
            for _ in 0..draws {
                let shift = dist.sample(&mut rng, config.delta0);
                let p = ordinary_probability(&config.packet, shift);
                part.sum += p;
                part.sum_sq += p * p;
                if let Some(g) = gaussian {
                    let z: f64 = rng.sample(StandardNormal);
                    let k = g.k0() + g.delta_k() * z;
                    let bin = (((k - edges[0]) / (edges[1] - edges[0])).floor().max(0.0) as usize).min(bins - 1);
                    let c = (0.5 * k * shift).cos();
                    part.counts[bin] += 1;
                    part.weights[bin] += c * c;
                    for (i, &[x, kp]) in probes.iter().enumerate() {
                        let w = wigner_ordinary(&g, shift, x, kp);
                        part.probe_sum[i] += w;
                        part.probe_sum_sq[i] += w * w;
                    }
                }
                if config.clicks && rng.random::<f64>() < p {
                    part.clicks += 1;
                }
            }
            part
        })
        .collect();

    let mut total = Partial::new(bins, probes.len());
    for part in &partials {
        total.absorb(part);
    }

    let nf = n as f64;
    let std_error = |sum: f64, sum_sq: f64| {
        if n < 2 {
            return 0.0;
        }
        let mean = sum / nf;
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    };
    let wigner = probes
        .iter()
        .enumerate()
        .map(|(i, &[x, k])| WignerProbe {
            x,
            k,
            mean: total.probe_sum[i] / nf,
            std_error: std_error(total.probe_sum[i], total.probe_sum_sq[i]),
        })
        .collect();
    config.collected = Some(Collected {
        generator: GENERATOR.to_string(),
        n_ordinary: total.sum / nf,
        n_ordinary_std_error: std_error(total.sum, total.sum_sq),
        ordinary_clicks: config.clicks.then_some(total.clicks),
        histogram: gaussian.map(|_| MomentumHistogram {
            edges,
            counts: total.counts,
            ordinary_weights: total.weights,
        }),
        wigner,
    });
    Ok(config)
}

/// Binomial standard error √(p(1−p)/n) of a channel rate p.
pub fn binomial_std_error(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Root-mean-square error of `n_ordinary` against `analytic` over
/// `replicas` independent seeds (`seed`, `seed + 1`, ...) at each size.
pub fn rms_error_curve(base: &EnsembleRun, sizes: &[u64], replicas: u64, analytic: f64) -> Result<Vec<(u64, f64)>> {
    let mut config = base.clone();
    config.clicks = false;
    config.wigner_probes.clear();
    sizes
        .iter()
        .map(|&n| {
            let mut sq = 0.0;
            for r in 0..replicas {
                let mut run = config.clone();
                run.n_samples = n;
                run.seed = base.seed.wrapping_add(r);
                let got = run_ensemble(run)?.collected.expect("filled by run_ensemble").n_ordinary;
                sq += (got - analytic).powi(2);
            }
            Ok((n, (sq / replicas as f64).sqrt()))
        })
        .collect()
}

/// Least-squares slope of ln(error) against ln(n).
pub fn log_log_slope(points: &[(u64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, e)| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Phase-space probe lattice of `n × n` points spanning the region between
/// the two humps of the ordinary channel and its momentum spread.
pub fn probe_lattice(packet: &crate::packets::GaussianPacket, delta0: f64, n: usize) -> Vec<[f64; 2]> {
    let x_lo = packet.x0() - delta0.max(0.0) - 2.0 * packet.delta();
    let x_hi = packet.x0() - delta0.min(0.0) + 2.0 * packet.delta();
    let k_lo = packet.k0() - 2.0 * packet.delta_k();
    let k_hi = packet.k0() + 2.0 * packet.delta_k();
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
    (0..n)
        .flat_map(|i| (0..n).map(move |j| [at(x_lo, x_hi, i), at(k_lo, k_hi, j)]))
        .collect()
}
