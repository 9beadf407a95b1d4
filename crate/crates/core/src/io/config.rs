//! TOML run configuration. Frequencies are in Hz here and converted to
//! rad/s when the model is built. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cavity::{calibrate_excess_loss, CavityParams, Model};
use crate::constants::{hz_to_rad, AMU, RB87_ABUNDANCE, RB87_MASS_AMU, RB_D2_WAVELENGTH};
use crate::error::{Error, Result};
use crate::fit::{FitOptions, FitParam, FreeParam, ParamVector};
use crate::medium::{
    a0_la_from_column_density, column_density_from_temperature, doppler_width, A0Calibration,
    DopplerSpec, MediumParams, ResponseMode, DEFAULT_SIGMA_EFF,
};
use crate::spectrum::AnalysisOptions;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub medium: MediumSection,
    #[serde(default)]
    pub cavity: CavitySection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
    pub ladder: Option<LadderSection>,
    pub fit: Option<FitSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum TemperatureUnit {
    #[serde(rename = "C", alias = "celsius")]
    Celsius,
    #[serde(rename = "K", alias = "kelvin")]
    Kelvin,
}

impl TemperatureUnit {
    pub fn to_kelvin(self, t: f64) -> f64 {
        match self {
            TemperatureUnit::Celsius => t + 273.15,
            TemperatureUnit::Kelvin => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationKind {
    CrossSection,
    Analytic,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    pub mode: Option<ResponseMode>,
    pub lambda_m: Option<f64>,
    pub gamma_hz: Option<f64>,
    pub doppler_width_hz: Option<f64>,
    pub temperature: Option<f64>,
    pub temperature_unit: Option<TemperatureUnit>,
    pub mass_amu: Option<f64>,
    pub a0_la: Option<f64>,
    pub column_density_m2: Option<f64>,
    pub calibration: Option<CalibrationKind>,
    pub sigma_eff_m2: Option<f64>,
    pub abundance: Option<f64>,
    /// Fraction of atoms in the probed ground state (density model only).
    pub population_fraction: Option<f64>,
    pub la_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub lc_m: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub finesse: Option<f64>,
    pub excess_loss: Option<f64>,
    pub lambda_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Half-width of the sweep in units of the free spectral range.
    pub window_fsr: Option<f64>,
    /// Half-width of the sweep in Hz; exclusive with `window_fsr`.
    pub window_hz: Option<f64>,
    pub step_hz: Option<f64>,
    pub threshold: Option<f64>,
    pub split_threshold: Option<f64>,
    pub root_window_fsr: Option<f64>,
    pub root_step_hz: Option<f64>,
    pub max_mode: Option<i64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub spectrum: Option<PathBuf>,
    pub peaks: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub ladder: Option<PathBuf>,
    pub crossing: Option<PathBuf>,
    pub fit: Option<PathBuf>,
}

impl OutputSection {
    pub fn spectrum(&self) -> PathBuf {
        self.spectrum
            .clone()
            .unwrap_or_else(|| "spectrum.csv".into())
    }
    pub fn peaks(&self) -> PathBuf {
        self.peaks.clone().unwrap_or_else(|| "peaks.json".into())
    }
    pub fn plot(&self) -> PathBuf {
        self.plot.clone().unwrap_or_else(|| "plot.svg".into())
    }
    pub fn ladder(&self) -> PathBuf {
        self.ladder.clone().unwrap_or_else(|| "ladder.json".into())
    }
    pub fn crossing(&self) -> PathBuf {
        self.crossing
            .clone()
            .unwrap_or_else(|| "crossing.svg".into())
    }
    pub fn fit(&self) -> PathBuf {
        self.fit.clone().unwrap_or_else(|| "fit.json".into())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSection {
    pub a0_la: Option<Vec<f64>>,
    pub temperatures: Option<Vec<f64>>,
    pub temperature_unit: Option<TemperatureUnit>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub free: Vec<FitParam>,
    #[serde(default)]
    pub bounds: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    pub initial: BTreeMap<String, f64>,
    pub multistart: Option<bool>,
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
    /// Rescale ingested data so its maximum equals this value; `false` disables.
    pub normalize_to: Option<NormalizeTo>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NormalizeTo {
    Value(f64),
    Enabled(bool),
}

fn defaulted<T: std::fmt::Debug>(value: Option<T>, key: &str, default: T) -> T {
    value.unwrap_or_else(|| {
        log::info!("config: `{key}` not set, using default {default:?}");
        default
    })
}

/// One point of a ladder: the overrides applied on top of the base medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LadderStep {
    A0La(f64),
    Temperature(f64),
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s)
            .map_err(|e| Error::Config(e.message().to_string() + &span_hint(s, e.span())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn cavity_params(&self) -> Result<CavityParams> {
        let c = &self.cavity;
        let lambda = c
            .lambda_m
            .or(self.medium.lambda_m)
            .unwrap_or(RB_D2_WAVELENGTH);
        let r1 = defaulted(c.r1, "cavity.r1", 0.90);
        let r2 = defaulted(c.r2, "cavity.r2", 0.995);
        let excess_loss = match (c.finesse, c.excess_loss) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "cavity: set either `finesse` or `excess_loss`, not both".into(),
                ))
            }
            (None, Some(l)) => l,
            (f, None) => calibrate_excess_loss(defaulted(f, "cavity.finesse", 20.0), r1, r2)
                .map_err(|e| Error::Config(format!("cavity.finesse: {e}")))?,
        };
        let cavity = CavityParams {
            lc: defaulted(c.lc_m, "cavity.lc_m", 0.177),
            la: self.la(),
            r1,
            r2,
            excess_loss,
            lambda,
        };
        cavity
            .validate()
            .map_err(|e| Error::Config(format!("cavity: {e}")))?;
        Ok(cavity)
    }

    fn la(&self) -> f64 {
        defaulted(self.medium.la_m, "medium.la_m", 0.05)
    }

    fn temperature_k(&self) -> Result<Option<f64>> {
        match (self.medium.temperature, self.medium.temperature_unit) {
            (Some(t), Some(u)) => Ok(Some(u.to_kelvin(t))),
            (Some(_), None) => Err(Error::Config(
                "medium.temperature needs an explicit `temperature_unit` (\"C\" or \"K\")".into(),
            )),
            (None, _) => Ok(None),
        }
    }

    fn calibration(&self, lambda: f64, gamma: f64, doppler: f64) -> A0Calibration {
        match self
            .medium
            .calibration
            .unwrap_or(CalibrationKind::CrossSection)
        {
            CalibrationKind::CrossSection => A0Calibration::CrossSection {
                sigma_eff: self.medium.sigma_eff_m2.unwrap_or(DEFAULT_SIGMA_EFF),
            },
            CalibrationKind::Analytic => A0Calibration::Analytic {
                lambda_a: lambda,
                gamma_a: gamma,
                doppler_width: doppler,
            },
        }
    }

    /// Medium for an explicit temperature override (K), or the configured one.
    fn medium_params_at(
        &self,
        temperature_k: Option<f64>,
        a0_override: Option<f64>,
    ) -> Result<MediumParams> {
        let m = &self.medium;
        let lambda = defaulted(m.lambda_m, "medium.lambda_m", RB_D2_WAVELENGTH);
        let gamma = hz_to_rad(defaulted(m.gamma_hz, "medium.gamma_hz", 6e6));
        let mode = defaulted(m.mode, "medium.mode", ResponseMode::ApproxDoppler);
        let la = self.la();
        let mass = m.mass_amu.unwrap_or(RB87_MASS_AMU) * AMU;

        let doppler = match (m.doppler_width_hz, temperature_k) {
            (Some(w), _) => DopplerSpec::Width(hz_to_rad(w)),
            (None, Some(t)) => DopplerSpec::Thermal {
                temperature: t,
                mass,
            },
            (None, None) => {
                DopplerSpec::Width(hz_to_rad(defaulted(None, "medium.doppler_width_hz", 343e6)))
            }
        };
        let dw = match doppler {
            DopplerSpec::Width(w) => w,
            DopplerSpec::Thermal { temperature, mass } => doppler_width(temperature, mass, lambda)
                .map_err(|e| Error::Config(format!("medium.temperature: {e}")))?,
        };
        let cal = self.calibration(lambda, gamma, dw);

        let a0_la = if let Some(a) = a0_override {
            a
        } else if let Some(a) = m.a0_la {
            a
        } else if let Some(nd) = m.column_density_m2 {
            a0_la_from_column_density(nd, &cal)
                .map_err(|e| Error::Config(format!("medium.column_density_m2: {e}")))?
        } else if let Some(t) = temperature_k {
            let nd = column_density_from_temperature(t, la, m.abundance.unwrap_or(RB87_ABUNDANCE))
                .map_err(|e| Error::Config(format!("medium.temperature: {e}")))?
                * m.population_fraction.unwrap_or(1.0);
            a0_la_from_column_density(nd, &cal)
                .map_err(|e| Error::Config(format!("medium: {e}")))?
        } else {
            return Err(Error::Config(
                "medium: one of `a0_la`, `column_density_m2` or `temperature` is required".into(),
            ));
        };
        let params = MediumParams {
            lambda_a: lambda,
            gamma_a: gamma,
            doppler,
            a0_la,
            la,
            mode,
        };
        params
            .validate()
            .map_err(|e| Error::Config(format!("medium: {e}")))?;
        Ok(params)
    }

    pub fn medium_params(&self) -> Result<MediumParams> {
        self.medium_params_at(self.temperature_k()?, None)
    }

    pub fn model(&self) -> Result<Model> {
        Model::new(self.cavity_params()?, self.medium_params()?)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn model_for(&self, step: LadderStep) -> Result<Model> {
        let medium = match step {
            LadderStep::A0La(a) => self.medium_params_at(self.temperature_k()?, Some(a))?,
            LadderStep::Temperature(t) => {
                let mut cfg = self.clone();
                // a temperature ladder drives the density model
                cfg.medium.a0_la = None;
                cfg.medium.column_density_m2 = None;
                cfg.medium_params_at(Some(t), None)?
            }
        };
        Model::new(self.cavity_params()?, medium).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn analysis_options(&self, fsr_hz: f64) -> Result<AnalysisOptions> {
        let d = AnalysisOptions::default();
        let s = &self.sweep;
        let window_fsr = match (s.window_fsr, s.window_hz) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "sweep: set either `window_fsr` or `window_hz`, not both".into(),
                ))
            }
            (Some(w), None) => w,
            (None, Some(hz)) => hz / fsr_hz,
            (None, None) => d.window_fsr,
        };
        let opts = AnalysisOptions {
            window_fsr,
            step_hz: s.step_hz.unwrap_or(d.step_hz),
            threshold: s.threshold.unwrap_or(d.threshold),
            root_window_fsr: s.root_window_fsr.unwrap_or(d.root_window_fsr),
            root_step_hz: s.root_step_hz.unwrap_or(d.root_step_hz),
            max_mode: s.max_mode.unwrap_or(d.max_mode),
            split_threshold: s.split_threshold.unwrap_or(d.split_threshold),
        };
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("sweep.{key} must be > 0, got {v}")))
            }
        };
        positive("window_fsr", opts.window_fsr)?;
        positive("step_hz", opts.step_hz)?;
        positive("root_window_fsr", opts.root_window_fsr)?;
        positive("root_step_hz", opts.root_step_hz)?;
        for (key, v) in [
            ("threshold", opts.threshold),
            ("split_threshold", opts.split_threshold),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!(
                    "sweep.{key} must lie in (0, 1), got {v}"
                )));
            }
        }
        if opts.max_mode < 0 {
            return Err(Error::Config("sweep.max_mode must be >= 0".into()));
        }
        Ok(opts)
    }

    pub fn ladder_steps(&self) -> Result<Vec<LadderStep>> {
        let l = self
            .ladder
            .as_ref()
            .ok_or_else(|| Error::Config("missing [ladder] section".into()))?;
        let steps: Vec<LadderStep> = match (&l.a0_la, &l.temperatures) {
            (Some(a), None) => a.iter().map(|&v| LadderStep::A0La(v)).collect(),
            (None, Some(t)) => {
                let unit = l.temperature_unit.ok_or_else(|| {
                    Error::Config(
                        "ladder.temperatures needs `temperature_unit` (\"C\" or \"K\")".into(),
                    )
                })?;
                t.iter()
                    .map(|&v| LadderStep::Temperature(unit.to_kelvin(v)))
                    .collect()
            }
            _ => {
                return Err(Error::Config(
                    "ladder: set exactly one of `a0_la` or `temperatures`".into(),
                ))
            }
        };
        if steps.is_empty() {
            return Err(Error::Config("ladder: list is empty".into()));
        }
        Ok(steps)
    }

    /// Free parameters, initial guess and options for a fit around `base`.
    pub fn fit_setup(
        &self,
        base: &Model,
    ) -> Result<(Vec<FreeParam>, ParamVector, FitOptions, Option<f64>)> {
        let f = self
            .fit
            .as_ref()
            .ok_or_else(|| Error::Config("missing [fit] section".into()))?;
        if f.free.is_empty() {
            return Err(Error::Config("fit.free is empty".into()));
        }
        let known: Vec<&str> = FitParam::ALL.iter().map(|p| p.name()).collect();
        for key in f.bounds.keys().chain(f.initial.keys()) {
            if !known.contains(&key.as_str()) {
                return Err(Error::Config(format!("fit: unknown parameter `{key}`")));
            }
        }
        let mut initial = ParamVector::from_model(base);
        for p in FitParam::ALL {
            if let Some(&v) = f.initial.get(p.name()) {
                initial.set(p, v);
            }
        }
        let free =
            f.free
                .iter()
                .map(|&p| {
                    let [lo, hi] = *f.bounds.get(p.name()).ok_or_else(|| {
                        Error::Config(format!("fit.bounds.{} is required", p.name()))
                    })?;
                    Ok(FreeParam { param: p, lo, hi })
                })
                .collect::<Result<Vec<_>>>()?;
        let d = FitOptions::default();
        let options = FitOptions {
            max_iterations: f.max_iterations.unwrap_or(d.max_iterations),
            tolerance: f.tolerance.unwrap_or(d.tolerance),
            multistart: f.multistart.unwrap_or(d.multistart),
            exec: d.exec,
        };
        let normalize = match f.normalize_to {
            None | Some(NormalizeTo::Enabled(true)) => Some(1.0),
            Some(NormalizeTo::Enabled(false)) => None,
            Some(NormalizeTo::Value(v)) => Some(v),
        };
        Ok((free, initial, options, normalize))
    }
}

fn span_hint(src: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let line = src[..r.start.min(src.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRESET_A: &str = r#"
        [medium]
        mode = "approx_doppler"
        lambda_m = 780e-9
        gamma_hz = 6e6
        doppler_width_hz = 343e6
        a0_la = 12.0
        la_m = 0.05

        [cavity]
        lc_m = 0.177
        r1 = 0.90
        r2 = 0.995
        finesse = 20.0
    "#;

    #[test]
    fn parses_fig1a() {
        let cfg = RunConfig::from_toml_str(PRESET_A).unwrap();
        let m = cfg.model().unwrap();
        assert_eq!(m.medium.a0_la, 12.0);
        assert!((m.cavity.finesse() - 20.0).abs() < 1e-9);
        assert!((m.medium.doppler_width() - hz_to_rad(343e6)).abs() < 1e-3);
    }

    #[test]
    fn unknown_key_is_named() {
        let bad = PRESET_A.replace("a0_la = 12.0", "a0_LA = 12.0");
        let err = RunConfig::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("a0_LA"), "{err}");
        let bad = PRESET_A.to_string() + "\n[sweeep]\nstep_hz = 1e6\n";
        assert!(RunConfig::from_toml_str(&bad)
            .unwrap_err()
            .to_string()
            .contains("sweeep"));
    }

    #[test]
    fn temperature_needs_a_unit() {
        let cfg = RunConfig::from_toml_str("[medium]\ntemperature = 105\n").unwrap();
        let err = cfg.model().unwrap_err().to_string();
        assert!(err.contains("temperature_unit"), "{err}");
    }

    #[test]
    fn temperature_drives_density_and_doppler_width() {
        let cfg =
            RunConfig::from_toml_str("[medium]\ntemperature = 105\ntemperature_unit = \"C\"\n")
                .unwrap();
        let m = cfg.model().unwrap();
        assert!(matches!(m.medium.doppler, DopplerSpec::Thermal { .. }));
        assert!(m.medium.a0_la > 0.0);
        let hot = cfg.model_for(LadderStep::Temperature(393.15)).unwrap();
        assert!(hot.medium.a0_la > m.medium.a0_la);
    }

    #[test]
    fn finesse_and_loss_are_exclusive() {
        let bad = PRESET_A.replace("finesse = 20.0", "finesse = 20.0\nexcess_loss = 0.1");
        assert!(RunConfig::from_toml_str(&bad).unwrap().model().is_err());
    }

    #[test]
    fn ladder_steps() {
        let cfg =
            RunConfig::from_toml_str(&(PRESET_A.to_string() + "[ladder]\na0_la = [12, 70]\n"))
                .unwrap();
        assert_eq!(
            cfg.ladder_steps().unwrap(),
            vec![LadderStep::A0La(12.0), LadderStep::A0La(70.0)]
        );
        let cfg =
            RunConfig::from_toml_str(&(PRESET_A.to_string() + "[ladder]\ntemperatures = [105]\n"))
                .unwrap();
        assert!(cfg.ladder_steps().is_err());
        let cfg =
            RunConfig::from_toml_str(&(PRESET_A.to_string() + "[ladder]\na0_la = []\n")).unwrap();
        assert!(cfg.ladder_steps().is_err());
    }

    #[test]
    fn window_in_hz() {
        let cfg =
            RunConfig::from_toml_str(&(PRESET_A.to_string() + "[sweep]\nwindow_hz = 1.5e9\n"))
                .unwrap();
        let opts = cfg.analysis_options(750e6).unwrap();
        assert_eq!(opts.window_fsr, 2.0);
        let cfg = RunConfig::from_toml_str(&(PRESET_A.to_string() + "[sweep]\nthreshold = 1.5\n"))
            .unwrap();
        assert!(cfg
            .analysis_options(750e6)
            .unwrap_err()
            .to_string()
            .contains("sweep.threshold"));
    }

    #[test]
    fn fit_section() {
        let src = PRESET_A.to_string()
            + "[fit]\nfree = [\"a0_la\"]\nbounds = { a0_la = [1.0, 500.0] }\ninitial = { a0_la = 50.0 }\n";
        let cfg = RunConfig::from_toml_str(&src).unwrap();
        let model = cfg.model().unwrap();
        let (free, init, _, norm) = cfg.fit_setup(&model).unwrap();
        assert_eq!(
            free,
            vec![FreeParam {
                param: FitParam::A0La,
                lo: 1.0,
                hi: 500.0
            }]
        );
        assert_eq!(init.a0_la, 50.0);
        assert_eq!(norm, Some(1.0));
        let bad = src.replace("initial = { a0_la", "initial = { a0la");
        let cfg = RunConfig::from_toml_str(&bad).unwrap();
        assert!(cfg
            .fit_setup(&model)
            .unwrap_err()
            .to_string()
            .contains("a0la"));
    }
}
