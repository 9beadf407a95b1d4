use serde::{Deserialize, Serialize};

use super::{Branch, Spectrum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub position_hz: f64,
    pub height: f64,
    pub fwhm_hz: f64,
    pub mode_index: Option<i64>,
    pub branch: Option<Branch>,
}

/// Local maxima above `threshold`, refined by a three-point parabola, with
/// the FWHM taken from linearly interpolated half-height crossings.
pub fn find_peaks(spectrum: &Spectrum, threshold: f64) -> Result<Vec<Peak>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(
            "threshold",
            format!("must lie in (0, 1), got {threshold}"),
        ));
    }
    let x = &spectrum.detuning_hz;
    let y = &spectrum.transmission;
    let step = spectrum.step();
    let mut peaks = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        let (l, c, r) = (y[i - 1], y[i], y[i + 1]);
        if !(c > l && c >= r && c > threshold) {
            continue;
        }
        let curv = l - 2.0 * c + r;
        let (offset, height) = if curv < 0.0 {
            let d = 0.5 * (l - r) / curv;
            (d, c - 0.25 * (l - r) * d)
        } else {
            (0.0, c)
        };
        let position_hz = x[i] + offset * step;
        let fwhm_hz = half_width_crossings(x, y, i, 0.5 * height, step);
        peaks.push(Peak {
            position_hz,
            height,
            fwhm_hz,
            mode_index: None,
            branch: None,
        });
    }
    Ok(peaks)
}

fn half_width_crossings(x: &[f64], y: &[f64], i: usize, half: f64, step: f64) -> f64 {
    let left = (0..i).rev().find(|&j| y[j] < half).map(|j| {
        let t = (half - y[j]) / (y[j + 1] - y[j]);
        x[j] + t * (x[j + 1] - x[j])
    });
    let right = (i + 1..y.len()).find(|&j| y[j] < half).map(|j| {
        let t = (y[j - 1] - half) / (y[j - 1] - y[j]);
        x[j - 1] + t * (x[j] - x[j - 1])
    });
    match (left, right) {
        (Some(a), Some(b)) => b - a,
        (Some(a), None) => 2.0 * (x[i] - a),
        (None, Some(b)) => 2.0 * (b - x[i]),
        (None, None) => step,
    }
}

/// Central normal-mode splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Splitting {
    /// Half the separation of the central pair, Hz; `None` if not split.
    pub g_sqrt_n_hz: Option<f64>,
    pub lower_hz: Option<f64>,
    pub upper_hz: Option<f64>,
    /// `g√N ≥ FSR`.
    pub superstrong: bool,
}

impl Splitting {
    pub fn not_split() -> Self {
        Splitting {
            g_sqrt_n_hz: None,
            lower_hz: None,
            upper_hz: None,
            superstrong: false,
        }
    }

    pub fn from_pair(lower_hz: f64, upper_hz: f64, fsr_hz: f64) -> Self {
        let g = 0.5 * (upper_hz - lower_hz);
        Splitting {
            g_sqrt_n_hz: Some(g),
            lower_hz: Some(lower_hz),
            upper_hz: Some(upper_hz),
            superstrong: g >= fsr_hz,
        }
    }

    pub fn is_split(&self) -> bool {
        self.g_sqrt_n_hz.is_some()
    }

    /// `self` if split, otherwise the result of `f`.
    pub fn or_else(self, f: impl FnOnce() -> Splitting) -> Splitting {
        if self.is_split() {
            self
        } else {
            f()
        }
    }
}

/// Half-spacing of the two peaks closest to and straddling zero detuning.
///
/// When peaks carry mode indices only the m = 0 peaks are considered, so an
/// inner branch of a neighbouring mode is never mistaken for the central pair.
pub fn measure_splitting(peaks: &[Peak], fsr_hz: f64) -> Splitting {
    let assigned = peaks.iter().any(|p| p.mode_index.is_some());
    let candidates = peaks
        .iter()
        .filter(|p| !assigned || p.mode_index == Some(0));
    let mut lower: Option<f64> = None;
    let mut upper: Option<f64> = None;
    for p in candidates {
        let x = p.position_hz;
        if x < 0.0 && lower.is_none_or(|l| x > l) {
            lower = Some(x);
        } else if x > 0.0 && upper.is_none_or(|u| x < u) {
            upper = Some(x);
        }
    }
    match (lower, upper) {
        (Some(l), Some(u)) => Splitting::from_pair(l, u, fsr_hz),
        _ => Splitting::not_split(),
    }
}
