//! Linear optical response of a two-level vapor.
//!
//! All detunings and widths are angular frequencies (rad/s). `a0_la` is the
//! dimensionless line-center intensity optical depth `a₀·Lₐ`; what "line
//! center" means depends on [`ResponseMode`]:
//!
//! * `Homogeneous`: Lorentzian of FWHM `gamma_a` with peak `a₀`.
//! * `ApproxDoppler`: the same Lorentzian shape with the width replaced by the
//!   Doppler width and `a₀` already rescaled by the caller.
//! * `Voigt`: Maxwellian velocity average of the homogeneous line, evaluated
//!   through the Faddeeva function. `a₀` is the homogeneous (pre-rescaling)
//!   peak, so the absorption area matches the homogeneous mode.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{angular_frequency, AMU, C, K_B, RB87_MASS_AMU, TORR};
use crate::error::{Error, Result};
use crate::faddeeva::faddeeva;

/// Weak-response threshold on `2π·a₀/kₐ = a₀·λₐ`.
pub const WEAK_RESPONSE_LIMIT: f64 = 0.1;

/// Default effective cross-section mapping column density to `a₀Lₐ`, m².
pub const DEFAULT_SIGMA_EFF: f64 = 1.28e-15;

/// `(a₀Lₐ, N_D·Lₐ [m⁻²])` pairs of the four bundled presets.
pub const PRESET_CALIBRATION_PAIRS: [(f64, f64); 4] = [
    (12.0, 9.4e15),
    (70.0, 5.5e16),
    (130.0, 1.0e17),
    (170.0, 1.3e17),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseMode {
    Homogeneous,
    ApproxDoppler,
    Voigt,
}

/// Source of the Doppler width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DopplerSpec {
    /// δω_D given directly, rad/s.
    Width(f64),
    /// Derived from a temperature (K) and an atomic mass (kg).
    Thermal { temperature: f64, mass: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Line-center wavelength, m.
    pub lambda_a: f64,
    /// Natural linewidth (FWHM), rad/s.
    pub gamma_a: f64,
    pub doppler: DopplerSpec,
    pub a0_la: f64,
    /// Medium length, m.
    pub la: f64,
    pub mode: ResponseMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexResponse {
    /// Intensity absorption coefficient, 1/m.
    pub alpha: f64,
    /// Refractive index minus one.
    pub n_minus_1: f64,
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        positive("lambda_a", self.lambda_a)?;
        positive("gamma_a", self.gamma_a)?;
        positive("la", self.la)?;
        if !(self.a0_la >= 0.0 && self.a0_la.is_finite()) {
            return Err(Error::invalid(
                "a0_la",
                format!("must be finite and >= 0, got {}", self.a0_la),
            ));
        }
        match self.doppler {
            DopplerSpec::Width(w) => {
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(Error::invalid(
                        "doppler_width",
                        format!("must be >= 0, got {w}"),
                    ));
                }
            }
            DopplerSpec::Thermal { temperature, mass } => {
                doppler_width(temperature, mass, self.lambda_a)?;
            }
        }
        Ok(())
    }

    pub fn omega_a(&self) -> f64 {
        angular_frequency(self.lambda_a)
    }

    /// δω_D in rad/s (0 for an invalid thermal spec; see [`Self::validate`]).
    pub fn doppler_width(&self) -> f64 {
        match self.doppler {
            DopplerSpec::Width(w) => w,
            DopplerSpec::Thermal { temperature, mass } => {
                doppler_width(temperature, mass, self.lambda_a).unwrap_or(0.0)
            }
        }
    }

    /// Line-center absorption coefficient a₀, 1/m.
    pub fn a0(&self) -> f64 {
        self.a0_la / self.la
    }

    /// Whether the linear-response formulas are in their weak-response regime.
    pub fn is_weak_response(&self) -> bool {
        self.a0() * self.lambda_a < WEAK_RESPONSE_LIMIT
    }

    /// Width that sets the line shape in the current mode.
    pub fn effective_width(&self) -> f64 {
        match self.mode {
            ResponseMode::Homogeneous | ResponseMode::Voigt => self.gamma_a,
            ResponseMode::ApproxDoppler => self.doppler_width(),
        }
    }

    pub fn response(&self, delta: f64) -> ComplexResponse {
        let omega_a = self.omega_a();
        match self.mode {
            ResponseMode::Homogeneous => lorentz(delta, self.gamma_a, self.a0(), omega_a),
            ResponseMode::ApproxDoppler => {
                let w = self.doppler_width();
                // a zero Doppler width degenerates to the homogeneous line
                let width = if w > 0.0 { w } else { self.gamma_a };
                lorentz(delta, width, self.a0(), omega_a)
            }
            ResponseMode::Voigt => voigt(
                delta,
                self.gamma_a,
                self.doppler_width(),
                self.a0(),
                omega_a,
            ),
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

#[inline]
fn lorentz(delta: f64, gamma: f64, a0: f64, omega_a: f64) -> ComplexResponse {
    let denom = 4.0 * delta * delta + gamma * gamma;
    ComplexResponse {
        alpha: a0 * gamma * gamma / denom,
        n_minus_1: -a0 * (C / omega_a) * 2.0 * delta * gamma / denom,
    }
}

fn voigt(delta: f64, gamma: f64, doppler: f64, a0: f64, omega_a: f64) -> ComplexResponse {
    if doppler <= 0.0 {
        return lorentz(delta, gamma, a0, omega_a);
    }
    let half = 0.5 * gamma;
    // evaluate on |Δ| so alpha is exactly even and n-1 exactly odd
    let w = faddeeva(Complex64::new(delta.abs(), half) / doppler);
    let scale = a0 * half * PI.sqrt() / doppler;
    let n = -scale * (C / omega_a) * w.im;
    ComplexResponse {
        alpha: scale * w.re,
        n_minus_1: if delta < 0.0 { -n } else { n },
    }
}

/// Homogeneous two-level response with FWHM `gamma` and peak absorption `a0`.
pub fn lorentzian_response(
    delta: f64,
    gamma: f64,
    a0: f64,
    omega_a: f64,
) -> Result<ComplexResponse> {
    positive("gamma", gamma)?;
    positive("omega_a", omega_a)?;
    Ok(lorentz(delta, gamma, a0, omega_a))
}

/// Doppler-broadened response; `params.mode` must be `ApproxDoppler` or `Voigt`.
///
/// A zero Doppler width falls back to the homogeneous line.
pub fn doppler_response(delta: f64, params: &MediumParams) -> Result<ComplexResponse> {
    params.validate()?;
    match params.mode {
        ResponseMode::Homogeneous => Err(Error::invalid(
            "mode",
            "doppler_response needs approx_doppler or voigt mode",
        )),
        _ => Ok(params.response(delta)),
    }
}

/// Doppler width `δω_D = (ω/c)·√(2 k_B T / m)` in rad/s.
pub fn doppler_width(temperature: f64, mass: f64, lambda: f64) -> Result<f64> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::invalid(
            "temperature",
            format!("must be >= 0 K, got {temperature}"),
        ));
    }
    positive("mass", mass)?;
    positive("lambda", lambda)?;
    Ok(angular_frequency(lambda) / C * (2.0 * K_B * temperature / mass).sqrt())
}

/// Mass of ⁸⁷Rb, kg.
pub fn rb87_mass() -> f64 {
    RB87_MASS_AMU * AMU
}

pub const VAPOR_T_MIN: f64 = 250.0;
pub const VAPOR_T_MAX: f64 = 600.0;

/// Saturated Rb vapor pressure (liquid-phase correlation), Pa.
pub fn rb_vapor_pressure(temperature: f64) -> Result<f64> {
    if !(temperature > VAPOR_T_MIN && temperature < VAPOR_T_MAX) {
        return Err(Error::OutOfRange {
            quantity: "cell temperature (K)",
            value: temperature,
            lo: VAPOR_T_MIN,
            hi: VAPOR_T_MAX,
        });
    }
    let t = temperature;
    let log_torr = 15.882_53 - 4529.635 / t + 5.866_3e-4 * t - 2.991_38 * t.log10();
    Ok(10f64.powf(log_torr) * TORR)
}

/// Total Rb number density from the ideal-gas law, m⁻³.
pub fn rb_number_density(temperature: f64) -> Result<f64> {
    Ok(rb_vapor_pressure(temperature)? / (K_B * temperature))
}

/// Column density `N_D·Lₐ` (m⁻²) of one isotope in a cell of length `la`.
pub fn column_density_from_temperature(temperature: f64, la: f64, abundance: f64) -> Result<f64> {
    positive("la", la)?;
    if !(abundance > 0.0 && abundance <= 1.0) {
        return Err(Error::invalid(
            "abundance",
            format!("must lie in (0, 1], got {abundance}"),
        ));
    }
    Ok(rb_number_density(temperature)? * abundance * la)
}

/// How a column density is converted to `a₀Lₐ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum A0Calibration {
    /// `a₀Lₐ = σ_eff · N_D·Lₐ`, with σ_eff in m².
    CrossSection { sigma_eff: f64 },
    /// Doppler-rescaled two-level formula `(3πc²/ωₐ²)(γₐ/δω_D)·N_D`.
    Analytic {
        lambda_a: f64,
        gamma_a: f64,
        doppler_width: f64,
    },
}

impl Default for A0Calibration {
    fn default() -> Self {
        A0Calibration::CrossSection {
            sigma_eff: DEFAULT_SIGMA_EFF,
        }
    }
}

impl A0Calibration {
    /// Effective cross-section in m².
    pub fn sigma(&self) -> f64 {
        match *self {
            A0Calibration::CrossSection { sigma_eff } => sigma_eff,
            A0Calibration::Analytic {
                lambda_a,
                gamma_a,
                doppler_width,
            } => {
                let omega = angular_frequency(lambda_a);
                3.0 * PI * C * C / (omega * omega) * gamma_a / doppler_width
            }
        }
    }
}

pub fn a0_la_from_column_density(nd_la: f64, calibration: &A0Calibration) -> Result<f64> {
    if !(nd_la >= 0.0 && nd_la.is_finite()) {
        return Err(Error::invalid(
            "nd_la",
            format!("must be >= 0, got {nd_la}"),
        ));
    }
    Ok(calibration.sigma() * nd_la)
}

/// Cross-section minimizing the summed squared *relative* deviation over
/// `(a₀Lₐ, N_D·Lₐ)` pairs.
pub fn fit_sigma_eff(pairs: &[(f64, f64)]) -> f64 {
    let (num, den) = pairs.iter().fold((0.0, 0.0), |(num, den), &(a, n)| {
        let q = n / a;
        (num + q, den + q * q)
    });
    num / den
}

/// Rescale a homogeneous `a₀Lₐ` to the Doppler convention (`× γₐ/δω_D`).
pub fn doppler_rescaled_a0_la(a0_la: f64, gamma_a: f64, doppler_width: f64) -> f64 {
    a0_la * gamma_a / doppler_width
}

/// Far-wing collective coupling `g√N = √(a₀Lₐ·γ·c/(2Lc))`, rad/s.
pub fn collective_coupling_estimate(a0_la: f64, gamma: f64, lc: f64) -> f64 {
    (a0_la.max(0.0) * gamma * C / (2.0 * lc)).sqrt()
}
