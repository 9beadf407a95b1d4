//! Standing-wave two-mirror cavity with an intracavity medium.
//!
//! Plane-wave, one-dimensional model: only the total round-trip phase and
//! loss matter, so the position of the cell inside the resonator is
//! irrelevant. The atomic line is pinned onto a cavity resonance (Δ_ac = 0)
//! by anchoring the empty-cavity phase to `2π·m₀` at Δ = 0.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::C;
use crate::error::{Error, Result};
use crate::medium::MediumParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Cavity length, m.
    pub lc: f64,
    /// Length of the intracavity medium, m.
    pub la: f64,
    /// Input and output mirror intensity reflectivities.
    pub r1: f64,
    pub r2: f64,
    /// Extra round-trip intensity loss (cell faces etc.).
    pub excess_loss: f64,
    /// Operating wavelength, m.
    pub lambda: f64,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lc > 0.0 && self.lc.is_finite()) {
            return Err(Error::invalid(
                "lc",
                format!("must be > 0, got {}", self.lc),
            ));
        }
        if !(self.la > 0.0 && self.la <= self.lc) {
            return Err(Error::invalid(
                "la",
                format!("must lie in (0, lc], got {}", self.la),
            ));
        }
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::invalid(name, format!("must lie in (0, 1), got {r}")));
            }
        }
        if !(self.excess_loss >= 0.0 && self.excess_loss < 1.0) {
            return Err(Error::invalid(
                "excess_loss",
                format!("must lie in [0, 1), got {}", self.excess_loss),
            ));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(
                "lambda",
                format!("must be > 0, got {}", self.lambda),
            ));
        }
        Ok(())
    }

    /// Round-trip field amplitude of the empty cavity.
    pub fn rho(&self) -> f64 {
        (self.r1 * self.r2).sqrt() * (1.0 - self.excess_loss).sqrt()
    }

    /// Free spectral range `c/(2Lc)`, Hz.
    pub fn fsr(&self) -> f64 {
        fsr(self.lc)
    }

    pub fn finesse(&self) -> f64 {
        finesse_from_rho(self.rho())
    }

    /// Empty-cavity linewidth κ = FSR/F, Hz.
    pub fn linewidth(&self) -> f64 {
        self.fsr() / self.finesse()
    }

    /// Longitudinal order m₀ of the resonance pinned to the atomic line.
    pub fn longitudinal_order(&self) -> u64 {
        (2.0 * self.lc / self.lambda).round() as u64
    }
}

pub fn fsr(lc: f64) -> f64 {
    C / (2.0 * lc)
}

pub fn finesse_from_rho(rho: f64) -> f64 {
    PI * rho.sqrt() / (1.0 - rho)
}

/// Inverse of [`finesse_from_rho`].
pub fn rho_from_finesse(finesse: f64) -> f64 {
    // F s² + π s − F = 0 with s = √ρ
    let s = (-PI + (PI * PI + 4.0 * finesse * finesse).sqrt()) / (2.0 * finesse);
    s * s
}

/// Excess round-trip loss that brings mirrors `r1`, `r2` down to `target_finesse`.
pub fn calibrate_excess_loss(target_finesse: f64, r1: f64, r2: f64) -> Result<f64> {
    if !(target_finesse > 0.0 && target_finesse.is_finite()) {
        return Err(Error::invalid(
            "finesse",
            format!("must be > 0, got {target_finesse}"),
        ));
    }
    for (name, r) in [("r1", r1), ("r2", r2)] {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::invalid(name, format!("must lie in (0, 1), got {r}")));
        }
    }
    let max = finesse_from_rho((r1 * r2).sqrt());
    if target_finesse > max * (1.0 + 1e-12) {
        return Err(Error::InfeasibleFinesse {
            target: target_finesse,
            max,
        });
    }
    let rho = rho_from_finesse(target_finesse);
    Ok((1.0 - rho * rho / (r1 * r2)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    /// Round-trip phase relative to `2π·m₀`, rad.
    pub phase: f64,
    /// Round-trip field amplitude factor.
    pub amplitude: f64,
}

/// Cavity and medium bound together; the forward model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub cavity: CavityParams,
    pub medium: MediumParams,
}

impl Model {
    pub fn new(cavity: CavityParams, medium: MediumParams) -> Result<Self> {
        let model = Model { cavity, medium };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.cavity.validate()?;
        self.medium.validate()?;
        if (self.cavity.la - self.medium.la).abs() > 1e-12 * self.cavity.la {
            return Err(Error::invalid(
                "la",
                format!(
                    "cavity ({}) and medium ({}) disagree on the medium length",
                    self.cavity.la, self.medium.la
                ),
            ));
        }
        Ok(())
    }

    /// Same model with the atoms removed.
    pub fn empty(&self) -> Model {
        let mut m = *self;
        m.medium.a0_la = 0.0;
        m
    }

    pub fn round_trip(&self, delta: f64) -> RoundTrip {
        let r = self.medium.response(delta);
        let la = self.cavity.la;
        // the index prefactor is taken at ωₐ, which keeps φ exactly odd in Δ
        let phase = 2.0 / C * (delta * self.cavity.lc + self.medium.omega_a() * r.n_minus_1 * la);
        RoundTrip {
            phase,
            amplitude: self.cavity.rho() * (-r.alpha * la).exp(),
        }
    }

    /// Intensity transmission normalized to the empty-cavity resonance peak.
    pub fn transmission(&self, delta: f64) -> f64 {
        let r = self.medium.response(delta);
        let la = self.cavity.la;
        let phase = 2.0 / C * (delta * self.cavity.lc + self.medium.omega_a() * r.n_minus_1 * la);
        let rho = self.cavity.rho();
        let single_pass = (-r.alpha * la).exp();
        let amp = rho * single_pass;
        let s = (0.5 * phase).sin();
        let denom = (1.0 - amp) * (1.0 - amp) + 4.0 * amp * s * s;
        single_pass * (1.0 - rho) * (1.0 - rho) / denom
    }

    /// Transmission at an ordinary-frequency detuning (Hz).
    pub fn transmission_hz(&self, detuning_hz: f64) -> f64 {
        self.transmission(2.0 * PI * detuning_hz)
    }
}
