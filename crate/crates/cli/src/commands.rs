//! Subcommand bodies. Each returns the complete output bytes.

use mzlab::fluctuations::{arcsine_entropy_literature, ShiftDistribution};
use mzlab::interferometer::epsilon_gaussian_packet_gaussian_noise;
use mzlab::montecarlo::{binomial_std_error, log_log_slope, rms_error_curve, GENERATOR};
use mzlab::wigner::{purity_decoherence, GridSpec, WignerGrid};
use mzlab::{
    channel_rates, classical_visibility, decoherence_operational, fringe_scan, run_ensemble, screen_intensity,
    EnsembleRun, GaussianPacket, SpectralDistribution, WavePacket,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{num, Csv, Format};
use crate::scenario::{self, invalid, NoiseFamily, SurfaceMode};

fn json<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn no_binary(command: &str) -> anyhow::Error {
    invalid(format!("{command} has no binary output; use csv or json"))
}

pub fn fringes(s: &scenario::Fringes, format: Format) -> anyhow::Result<Vec<u8>> {
    let scan = fringe_scan(&s.packet, &s.dist, s.delta0.resolve("delta0")?)?;
    match format {
        Format::Json => json(&scan),
        Format::Binary => Err(no_binary("fringes")),
        Format::Csv => {
            let mut csv = Csv::new(&["delta0", "n_ordinary", "n_extraordinary"]);
            for ((d0, o), e) in scan.delta0_values.iter().zip(&scan.n_ordinary).zip(&scan.n_extraordinary) {
                csv.row([num(*d0), num(*o), num(*e)]);
            }
            Ok(csv.into_bytes())
        }
    }
}

#[derive(Serialize)]
struct SurfacePoint {
    delta: f64,
    sigma: f64,
    epsilon: f64,
}

pub fn decoherence_surface(s: &scenario::DecoherenceSurface, format: Format) -> anyhow::Result<Vec<u8>> {
    let deltas = s.delta.resolve("delta")?;
    let sigmas = s.sigma.resolve("sigma")?;
    let delta0 = match s.mode {
        SurfaceMode::Purity => Some(s.mean_shift()?),
        SurfaceMode::Operational => None,
    };
    let lattice: Vec<(f64, f64)> = deltas
        .iter()
        .flat_map(|&d| sigmas.iter().map(move |&sg| (d, sg)))
        .collect();
    let points = lattice
        .par_iter()
        .map(|&(delta, sigma)| -> anyhow::Result<SurfacePoint> {
            let packet = GaussianPacket::new(s.k0, delta, 0.0)?;
            let law = s.noise.law(sigma)?;
            let epsilon = match delta0 {
                None if s.noise == NoiseFamily::Gaussian => epsilon_gaussian_packet_gaussian_noise(&packet, sigma),
                None => decoherence_operational(&WavePacket::Gaussian(packet), &law)?.epsilon_operational,
                Some(delta0) => {
                    let spec = GridSpec::covering(&packet, law.std_dev(), delta0, s.grid.nx, s.grid.nk)?;
                    let grid = match law {
                        ShiftDistribution::Gaussian { sigma } => WignerGrid::averaged(&packet, sigma, delta0, spec)?,
                        ShiftDistribution::Delta => WignerGrid::averaged(&packet, 0.0, delta0, spec)?,
                        other => WignerGrid::averaged_numeric(&packet, &other, delta0, spec)?,
                    };
                    purity_decoherence(&grid)?
                }
            };
            Ok(SurfacePoint { delta, sigma, epsilon })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    match format {
        Format::Json => json(&points),
        Format::Binary => Err(no_binary("decoherence-surface")),
        Format::Csv => {
            let mut csv = Csv::new(&["delta", "sigma", "epsilon"]);
            for p in &points {
                csv.row([num(p.delta), num(p.sigma), num(p.epsilon)]);
            }
            Ok(csv.into_bytes())
        }
    }
}

#[derive(Serialize)]
struct CurvePoint {
    k_sigma: f64,
    epsilon_gaussian: f64,
    epsilon_arcsine: f64,
}

pub fn visibility_curve(s: &scenario::VisibilityCurve, format: Format) -> anyhow::Result<Vec<u8>> {
    let beam = WavePacket::monochromatic(s.k)?;
    let points = s
        .k_sigma
        .resolve("k_sigma")?
        .into_iter()
        .map(|ks| -> anyhow::Result<CurvePoint> {
            let sigma = ks / s.k;
            Ok(CurvePoint {
                k_sigma: ks,
                epsilon_gaussian: decoherence_operational(&beam, &ShiftDistribution::gaussian(sigma)?)?
                    .epsilon_operational,
                epsilon_arcsine: decoherence_operational(&beam, &ShiftDistribution::arcsine(sigma)?)?
                    .epsilon_operational,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    match format {
        Format::Json => json(&points),
        Format::Binary => Err(no_binary("visibility-curve")),
        Format::Csv => {
            let mut csv = Csv::new(&["k_sigma", "epsilon_gaussian", "epsilon_arcsine"]);
            for p in &points {
                csv.row([num(p.k_sigma), num(p.epsilon_gaussian), num(p.epsilon_arcsine)]);
            }
            Ok(csv.into_bytes())
        }
    }
}

#[derive(Serialize)]
struct GridSummary {
    sigma: f64,
    nx: usize,
    nk: usize,
    x_min: f64,
    x_max: f64,
    k_min: f64,
    k_max: f64,
    trace: f64,
    boundary_ratio: f64,
    epsilon_purity: f64,
}

pub fn wigner_map(s: &scenario::WignerMap, format: Format) -> anyhow::Result<Vec<u8>> {
    let grids = s
        .sigma
        .resolve("sigma")?
        .into_iter()
        .map(|sigma| -> anyhow::Result<(WignerGrid, f64)> {
            let law = s.noise.law(sigma)?;
            let spec = GridSpec::covering(&s.packet, law.std_dev(), s.delta0, s.grid.nx, s.grid.nk)?;
            let grid = match (s.noise, law) {
                (_, ShiftDistribution::Delta) | (NoiseFamily::Gaussian, _) => {
                    WignerGrid::averaged(&s.packet, sigma, s.delta0, spec)?
                }
                _ => WignerGrid::averaged_numeric(&s.packet, &law, s.delta0, spec)?,
            };
            let epsilon = purity_decoherence(&grid)?;
            Ok((grid, epsilon))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    match format {
        Format::Json => {
            let summaries: Vec<GridSummary> = grids
                .iter()
                .map(|(g, epsilon)| GridSummary {
                    sigma: g.meta().sigma,
                    nx: g.spec().x.len,
                    nk: g.spec().k.len,
                    x_min: g.spec().x.min,
                    x_max: g.spec().x.max,
                    k_min: g.spec().k.min,
                    k_max: g.spec().k.max,
                    trace: g.trace_estimate(),
                    boundary_ratio: g.boundary_ratio(),
                    epsilon_purity: *epsilon,
                })
                .collect();
            json(&summaries)
        }
        Format::Binary => {
            let mut bytes = Vec::new();
            for (g, _) in &grids {
                g.write_binary(&mut bytes)?;
            }
            Ok(bytes)
        }
        Format::Csv => {
            let mut csv = Csv::new(&["grid", "sigma", "x", "k", "w"]);
            for (index, (g, _)) in grids.iter().enumerate() {
                let sigma = num(g.meta().sigma);
                for (x, k, w) in g.triples() {
                    csv.row([index.to_string(), sigma.clone(), num(x), num(k), num(w)]);
                }
            }
            Ok(csv.into_bytes())
        }
    }
}

#[derive(Serialize)]
struct ClassicalPoint {
    shape_index: usize,
    shape: &'static str,
    path_diff: f64,
    visibility: f64,
    intensity: f64,
}

pub fn classical(s: &scenario::Classical, format: Format) -> anyhow::Result<Vec<u8>> {
    if s.shapes.is_empty() {
        return Err(invalid("classical: at least one spectral shape is required"));
    }
    let spectra = s
        .shapes
        .iter()
        .map(|&shape| SpectralDistribution::new(shape, s.k0))
        .collect::<mzlab::Result<Vec<_>>>()?;
    let path_diffs = s.path_diff.resolve("path_diff")?;
    let mut points = Vec::with_capacity(spectra.len() * path_diffs.len());
    for (shape_index, spectrum) in spectra.iter().enumerate() {
        for &path_diff in &path_diffs {
            points.push(ClassicalPoint {
                shape_index,
                shape: spectrum.shape().name(),
                path_diff,
                visibility: classical_visibility(spectrum, path_diff),
                intensity: screen_intensity(spectrum, path_diff),
            });
        }
    }
    match format {
        Format::Json => json(&points),
        Format::Binary => Err(no_binary("classical")),
        Format::Csv => {
            let mut csv = Csv::new(&["shape_index", "shape", "path_diff", "visibility", "intensity"]);
            for p in &points {
                csv.row([
                    p.shape_index.to_string(),
                    p.shape.to_string(),
                    num(p.path_diff),
                    num(p.visibility),
                    num(p.intensity),
                ]);
            }
            Ok(csv.into_bytes())
        }
    }
}

/// Arcsine entropy discrepancy attached to entropy reports.
pub const ARCSINE_NOTE: &str = "arcsine: quadrature entropy is ln(sigma) + ln(pi/sqrt(2)); the commonly \
quoted closed form ln(sigma) - ln(2)/2 (literature_entropy column) is lower by ln(pi)";

#[derive(Serialize)]
struct EntropyPoint {
    distribution: &'static str,
    scale: f64,
    sigma: f64,
    entropy: f64,
    literature_entropy: Option<f64>,
}

#[derive(Serialize)]
struct EntropyReport {
    rows: Vec<EntropyPoint>,
    notes: Vec<&'static str>,
}

pub fn entropy(s: &scenario::Entropy, format: Format) -> anyhow::Result<Vec<u8>> {
    if s.laws.is_empty() {
        return Err(invalid("entropy: at least one law is required"));
    }
    let scales = s.scale.resolve("scale")?;
    if let Some(bad) = scales.iter().find(|v| **v <= 0.0) {
        return Err(invalid(format!("entropy: scale factors must be positive, got {bad}")));
    }
    let mut rows = Vec::new();
    let mut arcsine_seen = false;
    for law in &s.laws {
        let law = law.checked()?;
        for &scale in &scales {
            let scaled = law.scaled(scale);
            let literature_entropy = match scaled {
                ShiftDistribution::Arcsine { sigma } => {
                    arcsine_seen = true;
                    Some(arcsine_entropy_literature(sigma))
                }
                _ => None,
            };
            rows.push(EntropyPoint {
                distribution: scaled.name(),
                scale,
                sigma: scaled.std_dev(),
                entropy: scaled.entropy()?,
                literature_entropy,
            });
        }
    }
    let notes = if arcsine_seen { vec![ARCSINE_NOTE] } else { Vec::new() };
    for note in &notes {
        eprintln!("note: {note}");
    }
    match format {
        Format::Json => json(&EntropyReport { rows, notes }),
        Format::Binary => Err(no_binary("entropy")),
        Format::Csv => {
            let mut csv = Csv::new(&["distribution", "scale", "sigma", "entropy", "literature_entropy"]);
            for p in &rows {
                csv.row([
                    p.distribution.to_string(),
                    num(p.scale),
                    num(p.sigma),
                    num(p.entropy),
                    p.literature_entropy.map(num).unwrap_or_default(),
                ]);
            }
            Ok(csv.into_bytes())
        }
    }
}

/// Allowed slope window around −½ for the error-versus-n fit.
pub const SLOPE_WINDOW: f64 = 0.15;

#[derive(Serialize)]
struct CaseReport {
    name: String,
    n_samples: u64,
    analytic: f64,
    empirical: f64,
    std_error: f64,
    binomial_band: f64,
    abs_error: f64,
    ordinary_clicks: Option<u64>,
    pass: bool,
}

#[derive(Serialize)]
struct ConvergenceReport {
    case: String,
    sizes: Vec<u64>,
    rms_errors: Vec<f64>,
    replicas: u64,
    slope: f64,
    pass: bool,
}

#[derive(Serialize)]
struct MonteCarloReport {
    generator: &'static str,
    seed: u64,
    cases: Vec<CaseReport>,
    convergence: Option<ConvergenceReport>,
    pass: bool,
}

pub fn montecarlo(s: &scenario::MonteCarlo, seed: Option<u64>, format: Format) -> anyhow::Result<Vec<u8>> {
    let seed = seed.unwrap_or(s.seed);
    if s.cases.is_empty() {
        return Err(invalid("montecarlo: at least one case is required"));
    }
    let runs: Vec<(EnsembleRun, f64)> = s
        .cases
        .iter()
        .map(|c| -> anyhow::Result<_> {
            let mut run = EnsembleRun::new(seed, c.n_samples.unwrap_or(s.n_samples), c.packet, c.dist, c.delta0);
            run.clicks = c.clicks;
            let analytic = channel_rates(&c.packet, &c.dist, c.delta0)?.ordinary;
            Ok((run, analytic))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut cases = Vec::with_capacity(runs.len());
    for (case, (run, analytic)) in s.cases.iter().zip(&runs) {
        let n = run.n_samples;
        let collected = run_ensemble(run.clone())?.collected.expect("filled by run_ensemble");
        let band = 3.0 * binomial_std_error(*analytic, n);
        let abs_error = (collected.n_ordinary - analytic).abs();
        cases.push(CaseReport {
            name: case.name.clone(),
            n_samples: n,
            analytic: *analytic,
            empirical: collected.n_ordinary,
            std_error: collected.n_ordinary_std_error,
            binomial_band: band,
            abs_error,
            ordinary_clicks: collected.ordinary_clicks,
            pass: abs_error <= band + 1e-12,
        });
    }

    let convergence = match &s.convergence {
        None => None,
        Some(c) => {
            let (run, analytic) = runs
                .get(c.case)
                .ok_or_else(|| invalid(format!("convergence case index {} out of range", c.case)))?;
            if c.sizes.len() < 2 || c.replicas == 0 {
                return Err(invalid("convergence needs at least two sizes and one replica"));
            }
            let curve = rms_error_curve(run, &c.sizes, c.replicas, *analytic)?;
            let slope = log_log_slope(&curve);
            Some(ConvergenceReport {
                case: s.cases[c.case].name.clone(),
                sizes: curve.iter().map(|p| p.0).collect(),
                rms_errors: curve.iter().map(|p| p.1).collect(),
                replicas: c.replicas,
                slope,
                pass: (slope + 0.5).abs() <= SLOPE_WINDOW,
            })
        }
    };
    let pass = cases.iter().all(|c| c.pass) && convergence.as_ref().is_none_or(|c| c.pass);
    let report = MonteCarloReport {
        generator: GENERATOR,
        seed,
        cases,
        convergence,
        pass,
    };
    match format {
        Format::Json => json(&report),
        Format::Binary => Err(no_binary("montecarlo")),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "name",
                "n_samples",
                "analytic",
                "empirical",
                "std_error",
                "binomial_band",
                "abs_error",
                "pass",
            ]);
            for c in &report.cases {
                csv.row([
                    c.name.clone(),
                    c.n_samples.to_string(),
                    num(c.analytic),
                    num(c.empirical),
                    num(c.std_error),
                    num(c.binomial_band),
                    num(c.abs_error),
                    c.pass.to_string(),
                ]);
            }
            Ok(csv.into_bytes())
        }
    }
}
