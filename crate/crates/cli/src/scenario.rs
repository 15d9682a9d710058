//! Scenario files: one JSON object per subcommand, unknown keys rejected.

use std::fmt;
use std::path::PathBuf;

use mzlab::wigner::DEFAULT_GRID_POINTS;
use mzlab::{GaussianPacket, ShiftDistribution, WavePacket};
use serde::Deserialize;

/// A scenario that cannot be run as written.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

/// Either an explicit list or `count` evenly spaced points from `start` to
/// `stop` inclusive.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Range(Range),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Values {
    pub fn resolve(&self, name: &str) -> anyhow::Result<Vec<f64>> {
        let values = match self {
            Values::List(v) => v.clone(),
            Values::Range(r) => {
                if r.count == 0 {
                    return Err(invalid(format!("{name}: range count must be positive")));
                }
                if r.count == 1 {
                    vec![r.start]
                } else {
                    let last = (r.count - 1) as f64;
                    (0..r.count)
                        .map(|i| {
                            let t = i as f64 / last;
                            r.start * (1.0 - t) + r.stop * t
                        })
                        .collect()
                }
            }
        };
        if values.is_empty() {
            return Err(invalid(format!("{name}: no values given")));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(invalid(format!("{name}: non-finite value {bad}")));
        }
        Ok(values)
    }
}

fn no_shift() -> ShiftDistribution {
    ShiftDistribution::Delta
}

fn unit_k() -> f64 {
    1.0
}

/// Shift-law family parameterized by its standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    #[default]
    Gaussian,
    Arcsine,
    Rect,
}

impl NoiseFamily {
    pub fn law(self, sigma: f64) -> mzlab::Result<ShiftDistribution> {
        match self {
            NoiseFamily::Gaussian => ShiftDistribution::gaussian(sigma),
            NoiseFamily::Arcsine => ShiftDistribution::arcsine(sigma),
            NoiseFamily::Rect => ShiftDistribution::rect(sigma),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    pub nx: usize,
    pub nk: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            nx: DEFAULT_GRID_POINTS,
            nk: DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fringes {
    pub packet: WavePacket,
    #[serde(default = "no_shift")]
    pub dist: ShiftDistribution,
    pub delta0: Values,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceMode {
    Operational,
    Purity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoherenceSurface {
    pub mode: SurfaceMode,
    pub k0: f64,
    pub delta: Values,
    pub sigma: Values,
    #[serde(default)]
    pub noise: NoiseFamily,
    /// Mean shift for the purity mode; give this or `k0_delta0`.
    pub delta0: Option<f64>,
    pub k0_delta0: Option<f64>,
    #[serde(default)]
    pub grid: GridSettings,
    pub output: Option<PathBuf>,
}

impl DecoherenceSurface {
    pub fn mean_shift(&self) -> anyhow::Result<f64> {
        match (self.delta0, self.k0_delta0) {
            (Some(d0), None) => Ok(d0),
            (None, Some(phase)) => Ok(phase / self.k0),
            _ => Err(invalid("purity mode needs exactly one of delta0 or k0_delta0")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilityCurve {
    #[serde(default = "unit_k")]
    pub k: f64,
    pub k_sigma: Values,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerMap {
    pub packet: GaussianPacket,
    pub delta0: f64,
    pub sigma: Values,
    #[serde(default)]
    pub noise: NoiseFamily,
    #[serde(default)]
    pub grid: GridSettings,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classical {
    pub k0: f64,
    pub shapes: Vec<ShiftDistribution>,
    pub path_diff: Values,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entropy {
    /// Laws at unit scale; each is rescaled by every entry of `scale`.
    pub laws: Vec<ShiftDistribution>,
    pub scale: Values,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloCase {
    pub name: String,
    pub packet: WavePacket,
    pub dist: ShiftDistribution,
    pub delta0: f64,
    /// Overrides the scenario-wide sample count.
    pub n_samples: Option<u64>,
    #[serde(default)]
    pub clicks: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convergence {
    /// Index into `cases`.
    pub case: usize,
    pub sizes: Vec<u64>,
    pub replicas: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarlo {
    pub seed: u64,
    pub n_samples: u64,
    pub cases: Vec<MonteCarloCase>,
    pub convergence: Option<Convergence>,
    pub output: Option<PathBuf>,
}

/// Shipped scenario files: name, subcommand, JSON text.
pub const PRESETS: &[(&str, &str, &str)] = &[
    ("fig2", "fringes", include_str!("../presets/fig2.json")),
    ("fig3", "decoherence-surface", include_str!("../presets/fig3.json")),
    ("fig4", "visibility-curve", include_str!("../presets/fig4.json")),
    ("fig5", "classical", include_str!("../presets/fig5.json")),
    ("fig6", "wigner-map", include_str!("../presets/fig6.json")),
    ("fig7", "decoherence-surface", include_str!("../presets/fig7.json")),
    ("entropy", "entropy", include_str!("../presets/entropy.json")),
    ("montecarlo", "montecarlo", include_str!("../presets/montecarlo.json")),
];

pub fn preset(name: &str, command: &str) -> anyhow::Result<&'static str> {
    let (_, owner, text) = PRESETS
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _, _)| *n).collect();
            invalid(format!("unknown preset {name:?}; available: {}", names.join(", ")))
        })?;
    if *owner != command {
        return Err(invalid(format!("preset {name:?} belongs to the {owner} subcommand")));
    }
    Ok(text)
}
