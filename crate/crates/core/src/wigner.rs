//! Wigner functions of the ordinary output channel, their ensemble average
//! over shift noise, and the purity-based decoherence parameter
//! ε = 1 − 2π ∫∫W̄² / (∫∫W̄)².
//!
//! Grids are uniform in x (Å) and k (Å⁻¹) and integrated with the trapezoidal
//! rule. Values are indexed `[ix, ik]`.

use std::f64::consts::PI;
use std::io::{self, Read, Write};

use ndarray::parallel::prelude::*;
use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluctuations::ShiftDistribution;
use crate::packets::GaussianPacket;
use crate::quadrature::{trapezoid, Tolerance};

/// Widths kept on each side of every Gaussian feature by [`GridSpec::covering`].
pub const GRID_HALF_WIDTHS: f64 = 7.0;

pub const DEFAULT_GRID_POINTS: usize = 512;

/// Largest allowed |W| on the grid boundary relative to the peak |W|.
pub const COVERAGE_LIMIT: f64 = 1e-10;

const AVERAGE_TOLERANCE: Tolerance = Tolerance::new(1e-15, 1e-11);

/// W(x, k) = (1/π) exp[−(x−x0)²/2δ²] exp[−2δ²(k−k0)²].
pub fn wigner_pure(packet: &GaussianPacket, x: f64, k: f64) -> f64 {
    let d2 = packet.delta() * packet.delta();
    let dx = x - packet.x0();
    let dk = k - packet.k0();
    (-dx * dx / (2.0 * d2)).exp() * (-2.0 * d2 * dk * dk).exp() / PI
}

/// Wigner function of the ordinary channel for a fixed shift Δ: humps at
/// x0 − Δ and x0 with weight ¼ each, and an interference ridge at x0 − Δ/2
/// modulated by cos(kΔ) with weight ½.
pub fn wigner_ordinary(packet: &GaussianPacket, shift: f64, x: f64, k: f64) -> f64 {
    let d2 = packet.delta() * packet.delta();
    let dk = k - packet.k0();
    let u = x - packet.x0();
    let hump = |c: f64| (-(u - c) * (u - c) / (2.0 * d2)).exp();
    (-2.0 * d2 * dk * dk).exp() / (4.0 * PI)
        * (hump(-shift) + hump(0.0) + 2.0 * hump(-0.5 * shift) * (k * shift).cos())
}

/// Ordinary-channel Wigner function averaged over Gaussian noise of standard
/// deviation `sigma` about the mean shift `delta0` (closed form).
pub fn wigner_averaged(packet: &GaussianPacket, sigma: f64, delta0: f64, x: f64, k: f64) -> f64 {
    let d2 = packet.delta() * packet.delta();
    let s2 = sigma * sigma;
    let dk = k - packet.k0();
    let u = x - packet.x0();
    let broad = d2 + s2;
    let ridge = d2 + 0.25 * s2;
    let fixed = (-u * u / (2.0 * d2)).exp();
    let shifted = (d2 / broad).sqrt() * (-(u + delta0) * (u + delta0) / (2.0 * broad)).exp();
    let r = u + 0.5 * delta0;
    let interference = 2.0
        * (d2 / ridge).sqrt()
        * (-(r * r + k * k * d2 * s2) / (2.0 * ridge)).exp()
        * (k * (2.0 * d2 * delta0 - u * s2) / (2.0 * ridge)).cos();
    (-2.0 * d2 * dk * dk).exp() / (4.0 * PI) * (fixed + shifted + interference)
}

/// ∫ w(Δ − Δ0) W_O(x, k, Δ) dΔ by quadrature, for any shift law.
pub fn wigner_averaged_numeric(
    packet: &GaussianPacket,
    dist: &ShiftDistribution,
    delta0: f64,
    x: f64,
    k: f64,
) -> Result<f64> {
    dist.expectation(delta0, |shift| wigner_ordinary(packet, shift, x, k), AVERAGE_TOLERANCE)
}

/// Momentum marginal of the Gaussian-noise average:
/// √(δ²/2π) exp[−2δ²(k−k0)²] [1 + exp(−k²σ²/2) cos(kΔ0)].
pub fn momentum_marginal_averaged(packet: &GaussianPacket, sigma: f64, delta0: f64, k: f64) -> f64 {
    let d2 = packet.delta() * packet.delta();
    let dk = k - packet.k0();
    (d2 / (2.0 * PI)).sqrt()
        * (-2.0 * d2 * dk * dk).exp()
        * (1.0 + (-0.5 * k * k * sigma * sigma).exp() * (k * delta0).cos())
}

/// Uniform axis of `len` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub len: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, len: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::invalid(format!("grid axis needs min < max, got [{min}, {max}]")));
        }
        if len < 2 {
            return Err(Error::invalid(format!("grid axis needs at least 2 points, got {len}")));
        }
        Ok(GridAxis { min, max, len })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.len - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.len {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    /// Same interval with `2(len − 1) + 1` points, interleaving the old ones.
    pub fn refined(&self) -> Self {
        GridAxis {
            len: 2 * (self.len - 1) + 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: GridAxis,
    pub k: GridAxis,
}

impl GridSpec {
    /// Bounds covering the fixed hump at x0, the noise-broadened hump at
    /// x0 − Δ0 and the interference ridge between them, each with
    /// [`GRID_HALF_WIDTHS`] widths of margin; `noise_std` is the standard
    /// deviation of the shift law.
    pub fn covering(packet: &GaussianPacket, noise_std: f64, delta0: f64, nx: usize, nk: usize) -> Result<Self> {
        let delta = packet.delta();
        let broad = (delta * delta + noise_std * noise_std).sqrt();
        let x0 = packet.x0();
        let lower = (x0 - GRID_HALF_WIDTHS * delta).min(x0 - delta0 - GRID_HALF_WIDTHS * broad);
        let upper = (x0 + GRID_HALF_WIDTHS * delta).max(x0 - delta0 + GRID_HALF_WIDTHS * broad);
        let half_k = GRID_HALF_WIDTHS * packet.delta_k();
        Ok(GridSpec {
            x: GridAxis::new(lower, upper, nx)?,
            k: GridAxis::new(packet.k0() - half_k, packet.k0() + half_k, nk)?,
        })
    }

    /// 512 × 512 grid from [`covering`](Self::covering).
    pub fn default_for(packet: &GaussianPacket, noise_std: f64, delta0: f64) -> Result<Self> {
        Self::covering(packet, noise_std, delta0, DEFAULT_GRID_POINTS, DEFAULT_GRID_POINTS)
    }

    pub fn refined(&self) -> Self {
        GridSpec {
            x: self.x.refined(),
            k: self.k.refined(),
        }
    }
}

/// Which state a grid holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerMeta {
    pub packet: GaussianPacket,
    /// Law of the shift about `delta0`; `Delta` for an unaveraged state.
    pub dist: ShiftDistribution,
    pub delta0: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    spec: GridSpec,
    values: Array2<f64>,
    trace_estimate: f64,
    meta: WignerMeta,
}

impl WignerGrid {
    /// Fills the grid row by row in parallel.
    pub fn from_fn<F>(spec: GridSpec, meta: WignerMeta, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let ks = spec.k.values();
        let mut values = Array2::<f64>::zeros((spec.x.len, spec.k.len));
        values
            .axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(ix, mut row)| {
                let x = spec.x.value(ix);
                for (cell, &k) in row.iter_mut().zip(&ks) {
                    *cell = f(x, k);
                }
            });
        Self::from_values(spec, meta, values)
    }

    fn try_from_fn<F>(spec: GridSpec, meta: WignerMeta, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let ks = spec.k.values();
        let mut values = Array2::<f64>::zeros((spec.x.len, spec.k.len));
        values
            .axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .try_for_each(|(ix, mut row)| {
                let x = spec.x.value(ix);
                for (cell, &k) in row.iter_mut().zip(&ks) {
                    *cell = f(x, k)?;
                }
                Ok::<(), Error>(())
            })?;
        Ok(Self::from_values(spec, meta, values))
    }

    fn from_values(spec: GridSpec, meta: WignerMeta, values: Array2<f64>) -> Self {
        let mut grid = WignerGrid {
            spec,
            values,
            trace_estimate: 0.0,
            meta,
        };
        grid.trace_estimate = grid.integrate(|w| w);
        grid
    }

    pub fn pure(packet: &GaussianPacket, spec: GridSpec) -> Self {
        let meta = WignerMeta {
            packet: *packet,
            dist: ShiftDistribution::Delta,
            delta0: 0.0,
            sigma: 0.0,
        };
        Self::from_fn(spec, meta, |x, k| wigner_pure(packet, x, k))
    }

    /// Ordinary channel for a fixed shift.
    pub fn ordinary(packet: &GaussianPacket, shift: f64, spec: GridSpec) -> Self {
        let meta = WignerMeta {
            packet: *packet,
            dist: ShiftDistribution::Delta,
            delta0: shift,
            sigma: 0.0,
        };
        Self::from_fn(spec, meta, |x, k| wigner_ordinary(packet, shift, x, k))
    }

    /// Closed-form average over Gaussian noise.
    pub fn averaged(packet: &GaussianPacket, sigma: f64, delta0: f64, spec: GridSpec) -> Result<Self> {
        let dist = ShiftDistribution::gaussian(sigma)?;
        let meta = WignerMeta {
            packet: *packet,
            dist,
            delta0,
            sigma,
        };
        Ok(Self::from_fn(spec, meta, |x, k| wigner_averaged(packet, sigma, delta0, x, k)))
    }

    /// Average over an arbitrary symmetric law by quadrature at every node.
    pub fn averaged_numeric(
        packet: &GaussianPacket,
        dist: &ShiftDistribution,
        delta0: f64,
        spec: GridSpec,
    ) -> Result<Self> {
        let dist = dist.symmetric()?;
        let meta = WignerMeta {
            packet: *packet,
            dist,
            delta0,
            sigma: dist.std_dev(),
        };
        Self::try_from_fn(spec, meta, |x, k| wigner_averaged_numeric(packet, &dist, delta0, x, k))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn meta(&self) -> &WignerMeta {
        &self.meta
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn x_values(&self) -> Vec<f64> {
        self.spec.x.values()
    }

    pub fn k_values(&self) -> Vec<f64> {
        self.spec.k.values()
    }

    /// ∫∫ W dx dk, i.e. Tr ρ of the (sub-normalized) channel state.
    pub fn trace_estimate(&self) -> f64 {
        self.trace_estimate
    }

    /// ∫∫ g(W) dx dk by the 2-D trapezoidal rule.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let (nx, nk) = self.values.dim();
        let edge = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let mut total = 0.0;
        for ((ix, ik), &w) in self.values.indexed_iter() {
            total += edge(ix, nx) * edge(ik, nk) * g(w);
        }
        total * self.spec.x.step() * self.spec.k.step()
    }

    /// ∫ W dk at each x node: the position density.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dk = self.spec.k.step();
        self.values
            .axis_iter(Axis(0))
            .map(|row| trapezoid(row.as_slice().expect("rows are contiguous"), dk))
            .collect()
    }

    /// ∫ W dx at each k node: the momentum density.
    pub fn k_marginal(&self) -> Vec<f64> {
        let dx = self.spec.x.step();
        self.values
            .axis_iter(Axis(1))
            .map(|column| trapezoid(&column.to_vec(), dx))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    /// Largest |W| on the boundary divided by the largest |W| overall.
    pub fn boundary_ratio(&self) -> f64 {
        let (nx, nk) = self.values.dim();
        let rows = [0, nx - 1].into_iter().flat_map(|ix| (0..nk).map(move |ik| (ix, ik)));
        let cols = [0, nk - 1].into_iter().flat_map(|ik| (0..nx).map(move |ix| (ix, ik)));
        let edge = rows.chain(cols).fold(0.0f64, |m, idx| m.max(self.values[idx].abs()));
        let peak = self.max_abs();
        if peak > 0.0 {
            edge / peak
        } else {
            0.0
        }
    }

    /// `(x, k, W)` triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .indexed_iter()
            .map(move |((ix, ik), &w)| (self.spec.x.value(ix), self.spec.k.value(ik), w))
    }

    /// Writes one grid record in the binary layout:
    ///
    /// | offset | type        | field                              |
    /// |--------|-------------|------------------------------------|
    /// | 0      | `[u8; 4]`   | magic `WGRD`                       |
    /// | 4      | `u32`       | layout version (1)                 |
    /// | 8      | `u64`       | nx                                 |
    /// | 16     | `u64`       | nk                                 |
    /// | 24     | `f64`       | x_min                              |
    /// | 32     | `f64`       | dx                                 |
    /// | 40     | `f64`       | k_min                              |
    /// | 48     | `f64`       | dk                                 |
    /// | 56     | `f64`       | sigma                              |
    /// | 64     | `f64`       | delta0                             |
    /// | 72     | `f64 × nx·nk` | W, x-major (`ix * nk + ik`)      |
    ///
    /// All integers and floats are little-endian. Records may be concatenated.
    pub fn write_binary<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&BINARY_VERSION.to_le_bytes())?;
        out.write_all(&(self.spec.x.len as u64).to_le_bytes())?;
        out.write_all(&(self.spec.k.len as u64).to_le_bytes())?;
        for v in [
            self.spec.x.min,
            self.spec.x.step(),
            self.spec.k.min,
            self.spec.k.step(),
            self.meta.sigma,
            self.meta.delta0,
        ] {
            out.write_all(&v.to_le_bytes())?;
        }
        for &w in self.values.iter() {
            out.write_all(&w.to_le_bytes())?;
        }
        Ok(())
    }
}

pub const BINARY_MAGIC: &[u8; 4] = b"WGRD";
pub const BINARY_VERSION: u32 = 1;

/// A grid record read back from the binary layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryGrid {
    pub nx: usize,
    pub nk: usize,
    pub x_min: f64,
    pub dx: f64,
    pub k_min: f64,
    pub dk: f64,
    pub sigma: f64,
    pub delta0: f64,
    pub values: Array2<f64>,
}

/// Reads one record written by [`WignerGrid::write_binary`]; `Ok(None)` at a
/// clean end of stream.
pub fn read_binary<R: Read>(input: &mut R) -> io::Result<Option<BinaryGrid>> {
    let mut magic = [0u8; 4];
    match input.read_exact(&mut magic) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    if &magic != BINARY_MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad grid magic"));
    }
    let mut u32_buf = [0u8; 4];
    input.read_exact(&mut u32_buf)?;
    let version = u32::from_le_bytes(u32_buf);
    if version != BINARY_VERSION {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unsupported grid layout version {version}"),
        ));
    }
    let mut u64_buf = [0u8; 8];
    let mut read_u64 = |input: &mut R| -> io::Result<u64> {
        input.read_exact(&mut u64_buf)?;
        Ok(u64::from_le_bytes(u64_buf))
    };
    let nx = read_u64(input)? as usize;
    let nk = read_u64(input)? as usize;
    let read_f64 = |input: &mut R| -> io::Result<f64> {
        let mut b = [0u8; 8];
        input.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    };
    let x_min = read_f64(input)?;
    let dx = read_f64(input)?;
    let k_min = read_f64(input)?;
    let dk = read_f64(input)?;
    let sigma = read_f64(input)?;
    let delta0 = read_f64(input)?;
    let count = nx
        .checked_mul(nk)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "grid dimensions overflow"))?;
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        data.push(read_f64(input)?);
    }
    let values = Array2::from_shape_vec((nx, nk), data).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    Ok(Some(BinaryGrid {
        nx,
        nk,
        x_min,
        dx,
        k_min,
        dk,
        sigma,
        delta0,
        values,
    }))
}

/// ε = 1 − 2π ∫∫W² / (∫∫W)², trapezoidal on the grid.
///
/// Fails when the trace is not positive or when the grid boundary still
/// carries more than [`COVERAGE_LIMIT`] of the peak |W|.
pub fn purity_decoherence(grid: &WignerGrid) -> Result<f64> {
    let trace = grid.trace_estimate();
    if trace.is_nan() || trace <= 1e-12 {
        return Err(Error::UndefinedState(trace));
    }
    let ratio = grid.boundary_ratio();
    if ratio > COVERAGE_LIMIT {
        return Err(Error::GridCoverage {
            ratio,
            limit: COVERAGE_LIMIT,
        });
    }
    let square = grid.integrate(|w| w * w);
    Ok(1.0 - 2.0 * PI * square / (trace * trace))
}
