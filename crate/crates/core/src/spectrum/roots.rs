use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::cavity::Model;
use crate::constants::hz_to_rad;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// A solution of `φ(Δ) = 2π(m₀ + m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRoot {
    pub m: i64,
    pub position_hz: f64,
    pub transmission: f64,
    /// Round-trip field amplitude at the root.
    pub amplitude: f64,
    /// Transmission at the root reaches the visibility threshold; roots
    /// buried under the absorption line are kept but flagged.
    pub visible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub lo_hz: f64,
    pub hi_hz: f64,
    /// Bracketing grid step, Hz.
    pub step_hz: f64,
    pub visibility: f64,
}

/// Phase residual tolerance after bisection, rad.
const PHASE_TOL: f64 = 1e-10;

/// All roots of the resonance condition for `m` in `modes` inside the window.
///
/// Sign changes of `φ − 2πm` are bracketed on a uniform grid and refined by
/// bisection. Roots closer together than one grid step can be missed.
pub fn solve_phase_resonances(
    model: &Model,
    modes: RangeInclusive<i64>,
    opts: &RootOptions,
    exec: Execution,
) -> Result<Vec<ResonanceRoot>> {
    model.validate()?;
    let grid = super::detuning_grid(opts.lo_hz, opts.hi_hz, opts.step_hz)
        .map_err(|e| Error::invalid("root window", e.to_string()))?;
    let phase = |f_hz: f64| model.round_trip(hz_to_rad(f_hz)).phase;
    let phases = exec.map(&grid, |&f| phase(f));

    let (m_lo, m_hi) = (*modes.start(), *modes.end());
    let intervals: Vec<usize> = (0..grid.len() - 1).collect();
    let found = exec.map(&intervals, |&i| {
        let (p0, p1) = (phases[i], phases[i + 1]);
        let lo_m = ((p0.min(p1) / (2.0 * PI)).ceil() as i64).max(m_lo);
        let hi_m = ((p0.max(p1) / (2.0 * PI)).floor() as i64).min(m_hi);
        let mut out = Vec::new();
        for m in lo_m..=hi_m {
            let target = 2.0 * PI * m as f64;
            let (g0, g1) = (p0 - target, p1 - target);
            let x = if g0 == 0.0 {
                grid[i]
            } else if g0 * g1 < 0.0 {
                bisect(|f| phase(f) - target, grid[i], grid[i + 1], g0)
            } else {
                // g1 == 0 belongs to the next interval, except at the window edge
                if g1 == 0.0 && i + 2 == grid.len() {
                    grid[i + 1]
                } else {
                    continue;
                }
            };
            out.push((m, x));
        }
        out
    });

    let mut roots: Vec<ResonanceRoot> = found
        .into_iter()
        .flatten()
        .map(|(m, x)| {
            let rt = model.round_trip(hz_to_rad(x));
            let t = model.transmission_hz(x);
            ResonanceRoot {
                m,
                position_hz: x,
                transmission: t,
                amplitude: rt.amplitude,
                visible: t >= opts.visibility,
            }
        })
        .collect();
    roots.sort_by(|a, b| a.m.cmp(&b.m).then(a.position_hz.total_cmp(&b.position_hz)));
    Ok(roots)
}

fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return mid;
        }
        let gm = g(mid);
        if gm.abs() <= PHASE_TOL {
            return mid;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Phase residual `φ(x) − 2πm` at a root, rad.
pub fn phase_residual(model: &Model, root: &ResonanceRoot) -> f64 {
    model.round_trip(hz_to_rad(root.position_hz)).phase - 2.0 * PI * root.m as f64
}
