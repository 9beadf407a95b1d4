//! Transmission sweeps and their analysis: peaks, phase resonances,
//! mode-index assignment and the central normal-mode splitting.

mod crossing;
mod peaks;
mod roots;

use serde::{Deserialize, Serialize};

pub use crossing::{
    avoided_crossing_map, Branch, BranchPoint, CrossingMap, ModeBranches, SplitState,
};
pub use peaks::{find_peaks, measure_splitting, Peak, Splitting};
pub use roots::{phase_residual, solve_phase_resonances, ResonanceRoot, RootOptions};

use crate::cavity::Model;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Default half-width of the sweep window in units of the FSR.
pub const DEFAULT_WINDOW_FSR: f64 = 3.5;
/// Default sweep step, Hz.
pub const DEFAULT_STEP_HZ: f64 = 1e6;
/// Default peak detection threshold (normalized transmission).
pub const DEFAULT_THRESHOLD: f64 = 1e-3;
/// Branch visibility threshold used to decide whether a mode is split.
pub const DEFAULT_SPLIT_THRESHOLD: f64 = 1e-2;

/// Normalized transmission sampled on a uniform detuning grid (Hz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub detuning_hz: Vec<f64>,
    pub transmission: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
}

impl Spectrum {
    /// Builds a spectrum, checking that the grid is strictly increasing and
    /// uniform to 1e-6 of a step.
    pub fn new(detuning_hz: Vec<f64>, transmission: Vec<f64>) -> Result<Self> {
        if detuning_hz.len() != transmission.len() {
            return Err(Error::invalid(
                "spectrum",
                format!(
                    "{} grid points but {} values",
                    detuning_hz.len(),
                    transmission.len()
                ),
            ));
        }
        if detuning_hz.len() < 2 {
            return Err(Error::invalid("spectrum", "needs at least two samples"));
        }
        if let Some(bad) = detuning_hz
            .iter()
            .chain(&transmission)
            .find(|v| !v.is_finite())
        {
            return Err(Error::invalid(
                "spectrum",
                format!("non-finite sample {bad}"),
            ));
        }
        if !is_uniform(&detuning_hz) {
            return Err(Error::invalid(
                "spectrum",
                "grid must be strictly increasing and uniform",
            ));
        }
        Ok(Spectrum {
            detuning_hz,
            transmission,
            model: None,
        })
    }

    pub fn len(&self) -> usize {
        self.detuning_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detuning_hz.is_empty()
    }

    pub fn step(&self) -> f64 {
        let n = self.detuning_hz.len();
        (self.detuning_hz[n - 1] - self.detuning_hz[0]) / (n - 1) as f64
    }

    pub fn max(&self) -> f64 {
        self.transmission
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn is_uniform(grid: &[f64]) -> bool {
    if grid.len() < 2 {
        return false;
    }
    let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    step > 0.0
        && grid
            .windows(2)
            .all(|w| w[1] > w[0] && ((w[1] - w[0]) - step).abs() <= 1e-6 * step)
}

/// Grid of integer multiples of `step` inside `[lo, hi]`, so that windows
/// symmetric about zero give exactly mirrored grids.
pub fn detuning_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("step", format!("must be > 0, got {step}")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid(
            "range",
            format!("empty sweep range [{lo}, {hi}]"),
        ));
    }
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    if last - first < 1 {
        return Err(Error::invalid(
            "range",
            format!("[{lo}, {hi}] holds fewer than two steps of {step}"),
        ));
    }
    Ok((first..=last).map(|k| k as f64 * step).collect())
}

/// Evaluates the normalized transmission over `[lo_hz, hi_hz]`.
pub fn sweep(
    model: &Model,
    lo_hz: f64,
    hi_hz: f64,
    step_hz: f64,
    exec: Execution,
) -> Result<Spectrum> {
    model.validate()?;
    let grid = detuning_grid(lo_hz, hi_hz, step_hz)?;
    let kappa = model.cavity.linewidth();
    if step_hz > kappa / 10.0 {
        log::warn!(
            "sweep step {step_hz:.3e} Hz is coarser than a tenth of the cavity linewidth ({:.3e} Hz)",
            kappa
        );
    }
    let transmission = exec.map(&grid, |&f| model.transmission_hz(f));
    Ok(Spectrum {
        detuning_hz: grid,
        transmission,
        model: Some(*model),
    })
}

/// Sweep over `±window_fsr` free spectral ranges.
pub fn sweep_fsr(
    model: &Model,
    window_fsr: f64,
    step_hz: f64,
    exec: Execution,
) -> Result<Spectrum> {
    let half = window_fsr * model.cavity.fsr();
    sweep(model, -half, half, step_hz, exec)
}

/// Knobs for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisOptions {
    pub window_fsr: f64,
    pub step_hz: f64,
    pub threshold: f64,
    /// Half-width of the root search window, FSR units. Wider than the
    /// sweep so that branches pushed outside the plot are still classified.
    pub root_window_fsr: f64,
    pub root_step_hz: f64,
    /// Modes `-max_mode..=max_mode` are solved for.
    pub max_mode: i64,
    pub split_threshold: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            window_fsr: DEFAULT_WINDOW_FSR,
            step_hz: DEFAULT_STEP_HZ,
            threshold: DEFAULT_THRESHOLD,
            root_window_fsr: 6.0,
            root_step_hz: 1e5,
            max_mode: 8,
            split_threshold: DEFAULT_SPLIT_THRESHOLD,
        }
    }
}

/// Full pipeline output for one parameter set.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub spectrum: Spectrum,
    /// Detected peaks with mode index and branch assigned.
    pub peaks: Vec<Peak>,
    pub roots: Vec<ResonanceRoot>,
    pub map: CrossingMap,
    pub splitting: Splitting,
}

pub fn analyze(model: &Model, opts: &AnalysisOptions, exec: Execution) -> Result<Analysis> {
    let spectrum = sweep_fsr(model, opts.window_fsr, opts.step_hz, exec)?;
    let raw = find_peaks(&spectrum, opts.threshold)?;
    let fsr = model.cavity.fsr();
    let root_opts = RootOptions {
        lo_hz: -opts.root_window_fsr * fsr,
        hi_hz: opts.root_window_fsr * fsr,
        step_hz: opts.root_step_hz,
        visibility: opts.threshold,
    };
    let roots = solve_phase_resonances(model, -opts.max_mode..=opts.max_mode, &root_opts, exec)?;
    let map = avoided_crossing_map(&raw, &roots, model.cavity.linewidth(), opts.split_threshold);
    let splitting = measure_splitting(&map.peaks, fsr).or_else(|| map.central_splitting(fsr));
    Ok(Analysis {
        spectrum,
        peaks: map.peaks.clone(),
        roots,
        map,
        splitting,
    })
}
