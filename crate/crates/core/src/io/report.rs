//! Schema-versioned JSON documents written by the CLI.

use serde::{Deserialize, Serialize};

use crate::cavity::Model;
use crate::constants::rad_to_hz;
use crate::fit::{FitParam, FitResult, FreeParam};
use crate::medium::ResponseMode;
use crate::spectrum::{Analysis, ModeBranches, Peak};

pub const SCHEMA_VERSION: u32 = 1;

/// Model parameters at the file boundary (frequencies in Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterSnapshot {
    pub mode: ResponseMode,
    pub lambda_m: f64,
    pub gamma_hz: f64,
    pub doppler_width_hz: f64,
    pub a0_la: f64,
    pub la_m: f64,
    pub lc_m: f64,
    pub r1: f64,
    pub r2: f64,
    pub excess_loss: f64,
    pub finesse: f64,
    pub fsr_hz: f64,
    pub linewidth_hz: f64,
    pub weak_response: bool,
}

impl From<&Model> for ParameterSnapshot {
    fn from(m: &Model) -> Self {
        ParameterSnapshot {
            mode: m.medium.mode,
            lambda_m: m.medium.lambda_a,
            gamma_hz: rad_to_hz(m.medium.gamma_a),
            doppler_width_hz: rad_to_hz(m.medium.doppler_width()),
            a0_la: m.medium.a0_la,
            la_m: m.medium.la,
            lc_m: m.cavity.lc,
            r1: m.cavity.r1,
            r2: m.cavity.r2,
            excess_loss: m.cavity.excess_loss,
            finesse: m.cavity.finesse(),
            fsr_hz: m.cavity.fsr(),
            linewidth_hz: m.cavity.linewidth(),
            weak_response: m.medium.is_weak_response(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingSource {
    Peaks,
    Roots,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub schema_version: u32,
    pub parameters: ParameterSnapshot,
    pub peaks: Vec<Peak>,
    pub g_sqrt_n_hz: Option<f64>,
    pub superstrong: bool,
    pub splitting_source: SplittingSource,
    pub split_modes: Vec<i64>,
}

impl PeakReport {
    pub fn from_analysis(model: &Model, analysis: &Analysis) -> Self {
        let from_peaks = crate::spectrum::measure_splitting(&analysis.peaks, model.cavity.fsr());
        let source = if from_peaks.is_split() {
            SplittingSource::Peaks
        } else if analysis.splitting.is_split() {
            SplittingSource::Roots
        } else {
            SplittingSource::None
        };
        PeakReport {
            schema_version: SCHEMA_VERSION,
            parameters: model.into(),
            peaks: analysis.peaks.clone(),
            g_sqrt_n_hz: analysis.splitting.g_sqrt_n_hz,
            superstrong: analysis.splitting.superstrong,
            splitting_source: source,
            split_modes: analysis.map.split_modes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub index: usize,
    /// Cell temperature in kelvin when the point came from the density model.
    pub temperature_k: Option<f64>,
    pub a0_la: f64,
    pub peak_count: usize,
    pub split_modes: Vec<i64>,
    /// Number of distinct |m| with two branches.
    pub split_order_count: usize,
    pub g_sqrt_n_hz: Option<f64>,
    pub superstrong: bool,
    pub modes: Vec<ModeBranches>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderFailure {
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub schema_version: u32,
    pub fsr_hz: f64,
    pub points: Vec<LadderPoint>,
    pub failures: Vec<LadderFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub data: String,
    pub free: Vec<FreeParam>,
    pub result: FitResult,
    pub fixed: ParameterSnapshot,
    /// `model − observed` at the best fit, on the observed grid.
    pub residual_curve: ResidualCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCurve {
    pub detuning_hz: Vec<f64>,
    pub residual: Vec<f64>,
}

impl FitReport {
    pub fn param(&self, p: FitParam) -> f64 {
        self.result.best_fit.get(p)
    }
}
