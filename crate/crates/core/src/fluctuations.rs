//! Laws of the fluctuating phase shift and their characteristic functions.
//!
//! Every law is stored centered; the mean shift Δ0 enters only through the
//! interferometer phase. `char_fn` is the exact transform Ω(k) = ∫ w(Δ) e^{ikΔ} dΔ,
//! `char_fn_numeric` the quadrature oracle it is checked against.

use std::f64::consts::{E, FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bessel::j0;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Gaussian tails beyond this many widths are dropped from quadrature domains.
const GAUSS_TAIL: f64 = 14.0;

/// Tolerance for the characteristic-function oracle.
pub const CHAR_FN_TOLERANCE: Tolerance = Tolerance::new(1e-13, 1e-10);

const ENTROPY_TOLERANCE: Tolerance = Tolerance::new(1e-13, 1e-12);

/// Law w(Δ) of the random shift about its mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShiftDistribution {
    /// No fluctuation.
    Delta,
    Gaussian { sigma: f64 },
    /// Law of √2σ sin t with t uniform; density 1/(π√(2σ²−Δ²)) on |Δ| ≤ √2σ.
    Arcsine { sigma: f64 },
    /// Uniform on |Δ| ≤ √3σ.
    Rect { sigma: f64 },
    /// Two Gaussians of standard deviation `width` at ±separation/2. `ratio` is
    /// the height of the right peak relative to the left one.
    DoubleGaussian { separation: f64, width: f64, ratio: f64 },
}

/// Quadrature estimate of Ω(k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericCharFn {
    pub real: f64,
    pub imag: f64,
    pub abs_error: f64,
}

impl ShiftDistribution {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        ShiftDistribution::Gaussian { sigma }.checked()
    }

    pub fn arcsine(sigma: f64) -> Result<Self> {
        ShiftDistribution::Arcsine { sigma }.checked()
    }

    pub fn rect(sigma: f64) -> Result<Self> {
        ShiftDistribution::Rect { sigma }.checked()
    }

    pub fn double_gaussian(separation: f64, width: f64, ratio: f64) -> Result<Self> {
        ShiftDistribution::DoubleGaussian {
            separation,
            width,
            ratio,
        }
        .checked()
    }

    /// Validates parameters and maps zero-width laws onto `Delta`.
    pub fn checked(self) -> Result<Self> {
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be finite and non-negative, got {v}")))
            }
        };
        match self {
            ShiftDistribution::Delta => Ok(self),
            ShiftDistribution::Gaussian { sigma }
            | ShiftDistribution::Arcsine { sigma }
            | ShiftDistribution::Rect { sigma } => {
                nonneg("sigma", sigma)?;
                Ok(if sigma == 0.0 { ShiftDistribution::Delta } else { self })
            }
            ShiftDistribution::DoubleGaussian {
                separation,
                width,
                ratio,
            } => {
                nonneg("separation", separation)?;
                nonneg("width", width)?;
                if !(ratio.is_finite() && ratio > 0.0) {
                    return Err(Error::invalid(format!("peak ratio must be positive, got {ratio}")));
                }
                if width == 0.0 {
                    return Err(Error::invalid("double-Gaussian width must be positive"));
                }
                Ok(self)
            }
        }
    }

    /// Like [`checked`](Self::checked), additionally rejecting asymmetric laws.
    pub fn symmetric(self) -> Result<Self> {
        let dist = self.checked()?;
        if dist.is_symmetric() {
            Ok(dist)
        } else {
            Err(Error::Unsupported(
                "asymmetric shift laws (double-Gaussian ratio != 1) are only valid as spectra".into(),
            ))
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match *self {
            ShiftDistribution::DoubleGaussian { ratio, .. } => ratio == 1.0,
            _ => true,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ShiftDistribution::Delta => "delta",
            ShiftDistribution::Gaussian { .. } => "gaussian",
            ShiftDistribution::Arcsine { .. } => "arcsine",
            ShiftDistribution::Rect { .. } => "rect",
            ShiftDistribution::DoubleGaussian { .. } => "double_gaussian",
        }
    }

    /// Same shape with every length scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            ShiftDistribution::Delta => ShiftDistribution::Delta,
            ShiftDistribution::Gaussian { sigma } => ShiftDistribution::Gaussian { sigma: sigma * factor },
            ShiftDistribution::Arcsine { sigma } => ShiftDistribution::Arcsine { sigma: sigma * factor },
            ShiftDistribution::Rect { sigma } => ShiftDistribution::Rect { sigma: sigma * factor },
            ShiftDistribution::DoubleGaussian {
                separation,
                width,
                ratio,
            } => ShiftDistribution::DoubleGaussian {
                separation: separation * factor,
                width: width * factor,
                ratio,
            },
        }
    }

    fn peak_weights(ratio: f64) -> (f64, f64) {
        (1.0 / (1.0 + ratio), ratio / (1.0 + ratio))
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ShiftDistribution::DoubleGaussian { separation, ratio, .. } => {
                let (left, right) = Self::peak_weights(ratio);
                0.5 * separation * (right - left)
            }
            _ => 0.0,
        }
    }

    /// Standard deviation of the law.
    pub fn std_dev(&self) -> f64 {
        match *self {
            ShiftDistribution::Delta => 0.0,
            ShiftDistribution::Gaussian { sigma }
            | ShiftDistribution::Arcsine { sigma }
            | ShiftDistribution::Rect { sigma } => sigma,
            ShiftDistribution::DoubleGaussian { separation, width, .. } => {
                let m = self.mean();
                (width * width + 0.25 * separation * separation - m * m).sqrt()
            }
        }
    }

    /// Half-width of the interval outside which the law carries negligible mass.
    pub fn effective_half_width(&self) -> f64 {
        match *self {
            ShiftDistribution::Delta => 0.0,
            ShiftDistribution::Gaussian { sigma } => 8.0 * sigma,
            ShiftDistribution::Arcsine { sigma } => SQRT_2 * sigma,
            ShiftDistribution::Rect { sigma } => SQRT_3 * sigma,
            ShiftDistribution::DoubleGaussian { separation, width, .. } => 0.5 * separation + 8.0 * width,
        }
    }

    /// w(Δ). The arcsine density is +∞ at the edges of its support.
    pub fn density(&self, delta: f64) -> Result<f64> {
        Ok(match self.checked()? {
            ShiftDistribution::Delta => {
                return Err(Error::AtomicDistribution("a point mass has no density"));
            }
            ShiftDistribution::Gaussian { sigma } => normal_pdf(delta, sigma),
            ShiftDistribution::Arcsine { sigma } => {
                let edge = SQRT_2 * sigma;
                let gap = (edge - delta.abs()) * (edge + delta.abs());
                if delta.abs() > edge {
                    0.0
                } else if gap <= 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / (PI * gap.sqrt())
                }
            }
            ShiftDistribution::Rect { sigma } => {
                if delta.abs() <= SQRT_3 * sigma {
                    1.0 / (2.0 * SQRT_3 * sigma)
                } else {
                    0.0
                }
            }
            ShiftDistribution::DoubleGaussian {
                separation,
                width,
                ratio,
            } => {
                let (left, right) = Self::peak_weights(ratio);
                left * normal_pdf(delta + 0.5 * separation, width)
                    + right * normal_pdf(delta - 0.5 * separation, width)
            }
        })
    }

    /// Re Ω(k); the whole of Ω for the symmetric laws.
    pub fn char_fn(&self, k: f64) -> f64 {
        match *self {
            ShiftDistribution::Delta => 1.0,
            ShiftDistribution::Gaussian { sigma } => (-0.5 * k * k * sigma * sigma).exp(),
            ShiftDistribution::Arcsine { sigma } => j0(SQRT_2 * k * sigma),
            ShiftDistribution::Rect { sigma } => sinc(SQRT_3 * k * sigma),
            ShiftDistribution::DoubleGaussian { separation, width, .. } => {
                (-0.5 * k * k * width * width).exp() * (0.5 * k * separation).cos()
            }
        }
    }

    /// Ω(k) including the imaginary part carried by an asymmetric double Gaussian.
    pub fn char_fn_complex(&self, k: f64) -> Complex64 {
        match *self {
            ShiftDistribution::DoubleGaussian {
                separation,
                width,
                ratio,
            } => {
                let (left, right) = Self::peak_weights(ratio);
                let envelope = (-0.5 * k * k * width * width).exp();
                let half = 0.5 * k * separation;
                Complex64::new(envelope * half.cos(), envelope * (right - left) * half.sin())
            }
            _ => Complex64::new(self.char_fn(k), 0.0),
        }
    }

    /// Ω(k) by adaptive quadrature of ∫ w(Δ) cos(kΔ) dΔ and ∫ w(Δ) sin(kΔ) dΔ.
    ///
    /// The arcsine law is integrated after the substitution Δ = √2σ sin t, which
    /// removes its inverse-square-root endpoint singularities.
    pub fn char_fn_numeric(&self, k: f64) -> Result<NumericCharFn> {
        let dist = self.checked()?;
        let tol = CHAR_FN_TOLERANCE;
        let (re, im) = match dist {
            ShiftDistribution::Delta => {
                return Err(Error::AtomicDistribution("Ω of a point mass is identically 1"));
            }
            ShiftDistribution::Arcsine { sigma } => {
                let a = SQRT_2 * sigma * k;
                let re = integrate(|t| (a * t.sin()).cos() / PI, -FRAC_PI_2, FRAC_PI_2, tol)?;
                let im = integrate(|t| (a * t.sin()).sin() / PI, -FRAC_PI_2, FRAC_PI_2, tol)?;
                (re, im)
            }
            _ => {
                let (lo, hi) = dist.quadrature_domain();
                let w = |d: f64| dist.density(d).expect("validated law has a density");
                let re = integrate(|d| w(d) * (k * d).cos(), lo, hi, tol)?;
                let im = integrate(|d| w(d) * (k * d).sin(), lo, hi, tol)?;
                (re, im)
            }
        };
        Ok(NumericCharFn {
            real: re.value,
            imag: im.value,
            abs_error: re.error + im.error,
        })
    }

    /// ∫ w(Δ − Δ0) f(Δ) dΔ by adaptive quadrature; a point mass returns f(Δ0).
    pub fn expectation<F: FnMut(f64) -> f64>(&self, delta0: f64, mut f: F, tol: Tolerance) -> Result<f64> {
        let dist = self.checked()?;
        match dist {
            ShiftDistribution::Delta => Ok(f(delta0)),
            ShiftDistribution::Arcsine { sigma } => {
                let r = SQRT_2 * sigma;
                integrate(|t| f(delta0 + r * t.sin()) / PI, -FRAC_PI_2, FRAC_PI_2, tol).map(|q| q.value)
            }
            _ => {
                let (lo, hi) = dist.quadrature_domain();
                integrate(
                    |d| dist.density(d).expect("validated law has a density") * f(delta0 + d),
                    lo,
                    hi,
                    tol,
                )
                .map(|q| q.value)
            }
        }
    }

    fn quadrature_domain(&self) -> (f64, f64) {
        match *self {
            ShiftDistribution::Delta => (0.0, 0.0),
            ShiftDistribution::Gaussian { sigma } => (-GAUSS_TAIL * sigma, GAUSS_TAIL * sigma),
            ShiftDistribution::Arcsine { sigma } => (-SQRT_2 * sigma, SQRT_2 * sigma),
            ShiftDistribution::Rect { sigma } => (-SQRT_3 * sigma, SQRT_3 * sigma),
            ShiftDistribution::DoubleGaussian { separation, width, .. } => {
                let half = 0.5 * separation + GAUSS_TAIL * width;
                (-half, half)
            }
        }
    }

    /// Differential entropy −∫ w ln w dΔ in nats.
    pub fn entropy(&self) -> Result<f64> {
        let dist = self.checked()?;
        match dist {
            ShiftDistribution::Delta => Err(Error::AtomicDistribution("entropy of a point mass is -inf")),
            ShiftDistribution::Gaussian { sigma } => Ok(sigma.ln() + 0.5 * (2.0 * PI * E).ln()),
            ShiftDistribution::Arcsine { sigma } => {
                // Δ = √2σ sin t turns the integral into (2/π) ∫_0^{π/2} ln(π√2σ cos t) dt.
                let scale = PI * SQRT_2 * sigma;
                let q = integrate(|t| (scale * t.cos()).ln(), 0.0, FRAC_PI_2, ENTROPY_TOLERANCE)?;
                Ok(2.0 / PI * q.value)
            }
            _ => {
                let (lo, hi) = dist.quadrature_domain();
                let q = integrate(
                    |d| {
                        let w = dist.density(d).expect("validated law has a density");
                        if w > 0.0 {
                            -w * w.ln()
                        } else {
                            0.0
                        }
                    },
                    lo,
                    hi,
                    ENTROPY_TOLERANCE,
                )?;
                Ok(q.value)
            }
        }
    }

    /// One draw of Δ from w(Δ − Δ0).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, delta0: f64) -> f64 {
        match *self {
            ShiftDistribution::Delta => delta0,
            ShiftDistribution::Gaussian { sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                delta0 + sigma * z
            }
            ShiftDistribution::Arcsine { sigma } => {
                let t = 2.0 * PI * rng.random::<f64>();
                delta0 + SQRT_2 * sigma * t.sin()
            }
            ShiftDistribution::Rect { sigma } => delta0 + SQRT_3 * sigma * (2.0 * rng.random::<f64>() - 1.0),
            ShiftDistribution::DoubleGaussian {
                separation,
                width,
                ratio,
            } => {
                let (_, right) = Self::peak_weights(ratio);
                let center = if rng.random::<f64>() < right {
                    0.5 * separation
                } else {
                    -0.5 * separation
                };
                let z: f64 = rng.sample(StandardNormal);
                delta0 + center + width * z
            }
        }
    }
}

/// Closed-form arcsine entropy, ln σ + ln(π/√2), from the substituted integral.
pub fn arcsine_entropy_exact(sigma: f64) -> f64 {
    sigma.ln() + (PI / SQRT_2).ln()
}

/// The arcsine entropy as tabulated in the literature, ln σ − ½ ln 2.
///
/// Direct evaluation gives ln σ + ln π − ½ ln 2; the two differ by ln π.
/// Kept for side-by-side reporting only.
pub fn arcsine_entropy_literature(sigma: f64) -> f64 {
    sigma.ln() - 0.5 * 2f64.ln()
}

fn normal_pdf(x: f64, sigma: f64) -> f64 {
    let z = x / sigma;
    (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * sigma)
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}
