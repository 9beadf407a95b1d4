//! The pipelines behind `simulate`, `ladder` and `fit`.

use std::path::Path;

use crate::cavity::Model;
use crate::constants::rad_to_hz;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fit::{fit_parameters, FitProblem};
use crate::spectrum::{analyze, Analysis, AnalysisOptions};

use super::config::{LadderStep, RunConfig};
use super::data::{ingest_spectrum, spectrum_to_csv, IngestOptions};
use super::report::{
    FitReport, LadderFailure, LadderPoint, LadderReport, ParameterSnapshot, PeakReport,
    ResidualCurve,
};
use super::svg::{crossing_plot, spectrum_plot, CrossingSeries};
use super::{write_file, write_json, SCHEMA_VERSION};

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn title(model: &Model) -> String {
    format!(
        "a0La = {}, doppler width = {:.1} MHz, F = {:.1}",
        model.medium.a0_la,
        rad_to_hz(model.medium.doppler_width()) / 1e6,
        model.cavity.finesse()
    )
}

fn write_simulation(
    cfg: &RunConfig,
    out: &Path,
    model: &Model,
    analysis: &Analysis,
) -> Result<PeakReport> {
    create_dir(out)?;
    let report = PeakReport::from_analysis(model, analysis);
    write_file(
        &out.join(cfg.output.spectrum()),
        &spectrum_to_csv(&analysis.spectrum),
    )?;
    write_json(&out.join(cfg.output.peaks()), &report)?;
    write_file(
        &out.join(cfg.output.plot()),
        &spectrum_plot(&analysis.spectrum, &analysis.peaks, &title(model)),
    )?;
    Ok(report)
}

fn simulate_model(
    cfg: &RunConfig,
    model: &Model,
    exec: Execution,
) -> Result<(AnalysisOptions, Analysis)> {
    let opts = cfg.analysis_options(model.cavity.fsr())?;
    let analysis = analyze(model, &opts, exec)?;
    Ok((opts, analysis))
}

/// Sweep, peak detection and splitting for one configuration. Writes the
/// spectrum CSV, the peak report and a plot into `out`.
pub fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<PeakReport> {
    let model = cfg.model()?;
    let (_, analysis) = simulate_model(cfg, &model, Execution::default())?;
    write_simulation(cfg, out, &model, &analysis)
}

/// Runs the full pipeline for every ladder point, each into its own
/// `point_NN` subdirectory, then writes the aggregate report and the
/// branch diagram. Points that fail are listed in the report and turn the
/// overall result into an error after everything else has been written.
pub fn run_ladder(cfg: &RunConfig, out: &Path) -> Result<LadderReport> {
    let steps = cfg.ladder_steps()?;
    // configuration problems shared by every point surface before any work
    let fsr_hz = cfg.cavity_params()?.fsr();
    cfg.analysis_options(fsr_hz)?;
    create_dir(out)?;

    let exec = Execution::default();
    let results: Vec<Result<LadderPoint>> = exec.map_range(steps.len(), |i| {
        let step = steps[i];
        let model = cfg.model_for(step)?;
        let (_, analysis) = simulate_model(cfg, &model, exec)?;
        let report = write_simulation(cfg, &out.join(format!("point_{i:02}")), &model, &analysis)?;
        Ok(LadderPoint {
            index: i,
            temperature_k: match step {
                LadderStep::Temperature(t) => Some(t),
                LadderStep::A0La(_) => None,
            },
            a0_la: model.medium.a0_la,
            peak_count: analysis.peaks.len(),
            split_modes: report.split_modes,
            split_order_count: analysis.map.split_order_count(),
            g_sqrt_n_hz: report.g_sqrt_n_hz,
            superstrong: report.superstrong,
            modes: analysis.map.modes,
        })
    });

    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(p) => points.push(p),
            Err(e) => {
                log::error!("ladder point {index}: {e}");
                failures.push(LadderFailure {
                    index,
                    message: e.to_string(),
                })
            }
        }
    }
    let report = LadderReport {
        schema_version: SCHEMA_VERSION,
        fsr_hz,
        points,
        failures,
    };
    write_json(&out.join(cfg.output.ladder()), &report)?;
    let series: Vec<CrossingSeries<'_>> = report
        .points
        .iter()
        .map(|p| CrossingSeries {
            label: format!("a0La = {:.1}", p.a0_la),
            modes: &p.modes,
        })
        .collect();
    write_file(
        &out.join(cfg.output.crossing()),
        &crossing_plot(&series, fsr_hz),
    )?;

    if report.failures.is_empty() {
        Ok(report)
    } else {
        Err(Error::LadderIncomplete {
            failed: report.failures.len(),
            total: steps.len(),
        })
    }
}

/// Fits the configured free parameters to measured data. `fit.json` is
/// written even when the fit does not converge; that case is then reported
/// as [`Error::NotConverged`].
pub fn run_fit(cfg: &RunConfig, data: &Path, out: &Path) -> Result<FitReport> {
    let base = cfg.model()?;
    let (free, initial, options, normalize_to) = cfg.fit_setup(&base)?;
    let observed = ingest_spectrum(data, &IngestOptions { normalize_to })?;

    let mut problem = FitProblem::new(observed, base, free, initial)
        .map_err(|e| Error::Config(format!("fit: {e}")))?;
    problem.options = options;
    // rescaled data carries no absolute intensity, so fit the amplitude too
    problem.profile_scale = normalize_to.is_some();
    let result = fit_parameters(&problem)?;

    let curve = problem.model_curve(&result.best_fit)?;
    let residual = curve
        .iter()
        .zip(&problem.observed.transmission)
        .map(|(m, o)| m - o)
        .collect();
    let report = FitReport {
        schema_version: SCHEMA_VERSION,
        data: data.display().to_string(),
        free: problem.free.clone(),
        fixed: ParameterSnapshot::from(&problem.base),
        result,
        residual_curve: ResidualCurve {
            detuning_hz: problem.observed.detuning_hz.clone(),
            residual,
        },
    };
    create_dir(out)?;
    let path = out.join(cfg.output.fit());
    write_json(&path, &report)?;
    if report.result.converged {
        Ok(report)
    } else {
        Err(Error::NotConverged { output: path })
    }
}
