//! Two-column CSV spectra.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectrum::{is_uniform, Spectrum};

pub const MIN_SAMPLES: usize = 10;
pub const SPECTRUM_HEADER: &str = "detuning_hz,transmission";

/// `detuning_hz,transmission` with shortest round-trip decimal formatting.
pub fn spectrum_to_csv(spectrum: &Spectrum) -> String {
    let mut s = String::with_capacity(spectrum.len() * 32);
    s.push_str(SPECTRUM_HEADER);
    s.push('\n');
    for (x, y) in spectrum.detuning_hz.iter().zip(&spectrum.transmission) {
        let _ = writeln!(s, "{x},{y}");
    }
    s
}

pub fn write_spectrum_csv(path: &Path, spectrum: &Spectrum) -> Result<()> {
    super::write_file(path, &spectrum_to_csv(spectrum))
}

fn unit_scale(header: &str) -> Option<f64> {
    let h = header.trim().to_ascii_lowercase();
    if h.ends_with("_ghz") {
        Some(1e9)
    } else if h.ends_with("_mhz") {
        Some(1e6)
    } else if h.ends_with("_khz") {
        Some(1e3)
    } else if h.ends_with("_hz") {
        Some(1.0)
    } else {
        None
    }
}

/// Raw columns of a two-column CSV, frequency converted to Hz.
fn read_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(file);
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if headers.len() != 2 {
        return Err(parse_err(
            1,
            format!("expected 2 columns, found {}", headers.len()),
        ));
    }
    let scale = unit_scale(&headers[0]).ok_or_else(|| {
        parse_err(
            1,
            format!(
                "first column `{}` must declare its unit (e.g. detuning_hz, freq_mhz)",
                &headers[0]
            ),
        )
    })?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 2 {
            return Err(parse_err(
                line,
                format!("expected 2 fields, found {}", rec.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("`{}` is not a finite number", &rec[i])))
        };
        x.push(num(0)? * scale);
        y.push(num(1)?);
    }
    if x.len() < MIN_SAMPLES {
        return Err(Error::Data {
            path: path.to_path_buf(),
            reason: format!("{} samples; at least {MIN_SAMPLES} are required", x.len()),
        });
    }
    Ok((x, y))
}

/// Reads a spectrum exactly as written by [`write_spectrum_csv`].
pub fn read_spectrum_csv(path: &Path) -> Result<Spectrum> {
    let (x, y) = read_columns(path)?;
    Spectrum::new(x, y).map_err(|e| Error::Data {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    /// Rescale so the maximum equals this value; `None` keeps the raw scale.
    pub normalize_to: Option<f64>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            normalize_to: Some(1.0),
        }
    }
}

/// Loads measured scan data: non-uniform grids are resampled by linear
/// interpolation and the intensity is rescaled per `opts`.
pub fn ingest_spectrum(path: &Path, opts: &IngestOptions) -> Result<Spectrum> {
    let (x, y) = read_columns(path)?;
    let data_err = |reason: String| Error::Data {
        path: path.to_path_buf(),
        reason,
    };
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(data_err(
            "frequency column must be strictly increasing".into(),
        ));
    }
    let (x, mut y) = if is_uniform(&x) {
        (x, y)
    } else {
        log::info!(
            "{}: non-uniform grid resampled to {} uniform points",
            path.display(),
            x.len()
        );
        resample_uniform(&x, &y)
    };
    if let Some(reference) = opts.normalize_to {
        let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max.is_nan() || max <= 0.0 {
            return Err(data_err(
                "cannot normalize: maximum intensity is not positive".into(),
            ));
        }
        let k = reference / max;
        for v in &mut y {
            *v *= k;
        }
    }
    Spectrum::new(x, y).map_err(|e| data_err(e.to_string()))
}

fn resample_uniform(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let (lo, hi) = (x[0], x[n - 1]);
    let step = (hi - lo) / (n - 1) as f64;
    let mut j = 0;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let xi = if i == n - 1 { hi } else { lo + i as f64 * step };
        while j + 2 < n && x[j + 1] < xi {
            j += 1;
        }
        let t = ((xi - x[j]) / (x[j + 1] - x[j])).clamp(0.0, 1.0);
        xs.push(xi);
        ys.push(y[j] + t * (y[j + 1] - y[j]));
    }
    (xs, ys)
}
