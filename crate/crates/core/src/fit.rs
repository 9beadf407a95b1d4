//! Least-squares recovery of model parameters from an observed spectrum.

use serde::{Deserialize, Serialize};

use crate::cavity::Model;
use crate::constants::{hz_to_rad, rad_to_hz};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::medium::DopplerSpec;
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitParam {
    A0La,
    DopplerWidth,
    ExcessLoss,
    FreqOffset,
}

impl FitParam {
    pub const ALL: [FitParam; 4] = [
        FitParam::A0La,
        FitParam::DopplerWidth,
        FitParam::ExcessLoss,
        FitParam::FreqOffset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FitParam::A0La => "a0_la",
            FitParam::DopplerWidth => "doppler_width_hz",
            FitParam::ExcessLoss => "excess_loss",
            FitParam::FreqOffset => "freq_offset_hz",
        }
    }
}

/// The four adjustable quantities; widths and offsets in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamVector {
    pub a0_la: f64,
    pub doppler_width_hz: f64,
    pub excess_loss: f64,
    pub freq_offset_hz: f64,
}

impl ParamVector {
    pub fn from_model(model: &Model) -> Self {
        ParamVector {
            a0_la: model.medium.a0_la,
            doppler_width_hz: rad_to_hz(model.medium.doppler_width()),
            excess_loss: model.cavity.excess_loss,
            freq_offset_hz: 0.0,
        }
    }

    pub fn get(&self, p: FitParam) -> f64 {
        match p {
            FitParam::A0La => self.a0_la,
            FitParam::DopplerWidth => self.doppler_width_hz,
            FitParam::ExcessLoss => self.excess_loss,
            FitParam::FreqOffset => self.freq_offset_hz,
        }
    }

    pub fn set(&mut self, p: FitParam, v: f64) {
        match p {
            FitParam::A0La => self.a0_la = v,
            FitParam::DopplerWidth => self.doppler_width_hz = v,
            FitParam::ExcessLoss => self.excess_loss = v,
            FitParam::FreqOffset => self.freq_offset_hz = v,
        }
    }

    /// `base` with these parameters applied (the offset is applied at evaluation).
    pub fn apply(&self, base: &Model) -> Model {
        let mut m = *base;
        m.medium.a0_la = self.a0_la;
        m.medium.doppler = DopplerSpec::Width(hz_to_rad(self.doppler_width_hz));
        m.cavity.excess_loss = self.excess_loss;
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParam {
    pub param: FitParam,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Simplex diameter tolerance relative to the bound widths.
    pub tolerance: f64,
    /// Also start from five a₀Lₐ values spread log-uniformly over its bounds.
    pub multistart: bool,
    pub exec: Execution,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 2000,
            tolerance: 1e-6,
            multistart: true,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitProblem {
    pub observed: Spectrum,
    /// Supplies every fixed parameter.
    pub base: Model,
    pub free: Vec<FreeParam>,
    pub initial: ParamVector,
    /// Multiplies the model before comparison with the observation.
    pub scale: f64,
    /// Replace `scale` by the least-squares amplitude at every evaluation,
    /// for data whose absolute intensity scale is unknown.
    pub profile_scale: bool,
    pub options: FitOptions,
}

impl FitProblem {
    pub fn new(
        observed: Spectrum,
        base: Model,
        free: Vec<FreeParam>,
        initial: ParamVector,
    ) -> Result<Self> {
        let problem = FitProblem {
            observed,
            base,
            free,
            initial,
            scale: 1.0,
            profile_scale: false,
            options: FitOptions::default(),
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.free.is_empty() {
            return Err(Error::invalid("free", "no free parameters"));
        }
        for (i, f) in self.free.iter().enumerate() {
            if self.free[..i].iter().any(|g| g.param == f.param) {
                return Err(Error::invalid(
                    "free",
                    format!("{} listed twice", f.param.name()),
                ));
            }
            if !(f.lo.is_finite() && f.hi.is_finite() && f.lo < f.hi) {
                return Err(Error::invalid(
                    "bounds",
                    format!(
                        "{}: need finite lo < hi, got [{}, {}]",
                        f.param.name(),
                        f.lo,
                        f.hi
                    ),
                ));
            }
            let v = self.initial.get(f.param);
            if !(v >= f.lo && v <= f.hi) {
                return Err(Error::invalid(
                    "initial",
                    format!("{} = {v} outside [{}, {}]", f.param.name(), f.lo, f.hi),
                ));
            }
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid(
                "scale",
                format!("must be > 0, got {}", self.scale),
            ));
        }
        self.initial.apply(&self.base).validate()
    }

    /// Model transmission (scaled) on the observed grid.
    pub fn model_curve(&self, params: &ParamVector) -> Result<Vec<f64>> {
        Ok(self.scaled_curve(params)?.0)
    }

    /// Amplitude applied to the model at `params`.
    pub fn effective_scale(&self, params: &ParamVector) -> Result<f64> {
        Ok(self.scaled_curve(params)?.1)
    }

    fn scaled_curve(&self, params: &ParamVector) -> Result<(Vec<f64>, f64)> {
        let model = params.apply(&self.base);
        model.validate()?;
        let off = params.freq_offset_hz;
        let mut curve = self.options.exec.map(&self.observed.detuning_hz, |&f| {
            model.transmission_hz(f - off)
        });
        let scale = if self.profile_scale {
            let mm: f64 = curve.iter().map(|m| m * m).sum();
            let mo: f64 = curve
                .iter()
                .zip(&self.observed.transmission)
                .map(|(m, o)| m * o)
                .sum();
            if mm > 0.0 && mo > 0.0 {
                mo / mm
            } else {
                self.scale
            }
        } else {
            self.scale
        };
        curve.iter_mut().for_each(|m| *m *= scale);
        Ok((curve, scale))
    }

    fn unit_to_params(&self, u: &[f64]) -> ParamVector {
        let mut p = self.initial;
        for (f, &ui) in self.free.iter().zip(u) {
            p.set(f.param, f.lo + ui.clamp(0.0, 1.0) * (f.hi - f.lo));
        }
        p
    }

    fn params_to_unit(&self, p: &ParamVector) -> Vec<f64> {
        self.free
            .iter()
            .map(|f| (p.get(f.param) - f.lo) / (f.hi - f.lo))
            .collect()
    }
}

/// Sum of squared differences between model and observation.
pub fn residual(params: &ParamVector, problem: &FitProblem) -> Result<f64> {
    let curve = problem.model_curve(params)?;
    // summed in order so the result does not depend on thread scheduling
    Ok(curve
        .iter()
        .zip(&problem.observed.transmission)
        .map(|(m, o)| (m - o) * (m - o))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub best_fit: ParamVector,
    /// Amplitude the model was multiplied by at the best fit.
    pub scale: f64,
    pub residual: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Free parameters that ended on a bound; the true optimum may lie outside.
    pub at_bound: Vec<FitParam>,
}

struct Run {
    u: Vec<f64>,
    f: f64,
    iterations: usize,
    evaluations: usize,
    shrunk: bool,
}

/// Bounded Nelder–Mead on the unit box spanned by the bounds.
pub fn fit_parameters(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    let mut starts = vec![problem.params_to_unit(&problem.initial)];
    if problem.options.multistart {
        if let Some(k) = problem.free.iter().position(|f| f.param == FitParam::A0La) {
            let f = problem.free[k];
            for j in 0..5 {
                let t = (j as f64 + 0.5) / 5.0;
                let v = if f.lo > 0.0 {
                    f.lo * (f.hi / f.lo).powf(t)
                } else {
                    f.lo + t * (f.hi - f.lo)
                };
                let mut u = starts[0].clone();
                u[k] = (v - f.lo) / (f.hi - f.lo);
                starts.push(u);
            }
        }
    }

    let mut runs = Vec::with_capacity(starts.len());
    for u0 in starts {
        runs.push(nelder_mead(problem, u0)?);
    }
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let best = runs
        .into_iter()
        .min_by(|a, b| a.f.total_cmp(&b.f))
        .expect("at least one start");

    let at_bound: Vec<FitParam> = problem
        .free
        .iter()
        .zip(&best.u)
        .filter(|(_, &u)| u <= 1e-9 || u >= 1.0 - 1e-9)
        .map(|(f, _)| f.param)
        .collect();
    let best_fit = problem.unit_to_params(&best.u);
    Ok(FitResult {
        best_fit,
        scale: problem.effective_scale(&best_fit)?,
        residual: best.f,
        iterations,
        evaluations,
        converged: best.shrunk && at_bound.is_empty(),
        at_bound,
    })
}

fn nelder_mead(problem: &FitProblem, u0: Vec<f64>) -> Result<Run> {
    const STEP: f64 = 0.1;
    let n = u0.len();
    let opts = &problem.options;
    let mut evaluations = 0usize;
    let mut eval = |u: &[f64]| -> Result<f64> {
        evaluations += 1;
        residual(&problem.unit_to_params(u), problem)
    };
    let clamp = |u: Vec<f64>| -> Vec<f64> { u.into_iter().map(|x| x.clamp(0.0, 1.0)).collect() };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let u0 = clamp(u0);
    let f0 = eval(&u0)?;
    simplex.push((u0.clone(), f0));
    for i in 0..n {
        let mut v = u0.clone();
        v[i] = if v[i] + STEP <= 1.0 {
            v[i] + STEP
        } else {
            v[i] - STEP
        };
        let fv = eval(&v)?;
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    let mut shrunk = false;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < opts.tolerance {
            shrunk = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(v, _)| v[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let toward = |t: f64| -> Vec<f64> {
            clamp(
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect(),
            )
        };

        let xr = toward(1.0);
        let fr = eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = toward(2.0);
            let fe = eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let x = toward(0.5);
                let f = eval(&x)?;
                (x, f)
            } else {
                let x = toward(-0.5);
                let f = eval(&x)?;
                (x, f)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    let fv = eval(&v)?;
                    *vertex = (v, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (u, f) = simplex.swap_remove(0);
    Ok(Run {
        u,
        f,
        iterations,
        evaluations,
        shrunk,
    })
}
