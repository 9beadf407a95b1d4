//! Mode-index bookkeeping: which longitudinal mode each peak belongs to and
//! whether that mode shows a normal-mode pair on both sides of the line.

use serde::{Deserialize, Serialize};

use super::{Peak, ResonanceRoot, Splitting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Lower,
    Upper,
    Unsplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitState {
    /// Visible branches on both sides of the atomic line.
    Split,
    /// A single visible branch.
    Unsplit,
    /// Every root is buried under the absorption line.
    Hidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    /// Root position, Hz.
    pub position_hz: f64,
    /// Height of the assigned peak, or the transmission at the root if the
    /// peak lies outside the sweep.
    pub height: f64,
    pub peak_position_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeBranches {
    pub m: i64,
    pub state: SplitState,
    pub lower: Option<BranchPoint>,
    pub upper: Option<BranchPoint>,
    pub unsplit: Option<BranchPoint>,
    /// Roots below the visibility threshold.
    pub buried_roots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingMap {
    pub kappa_hz: f64,
    pub split_threshold: f64,
    pub modes: Vec<ModeBranches>,
    /// Input peaks with `mode_index`/`branch` filled where assignable.
    pub peaks: Vec<Peak>,
    /// Indices into `peaks` with roots of two different modes within κ.
    pub ambiguous: Vec<usize>,
}

impl CrossingMap {
    pub fn mode(&self, m: i64) -> Option<&ModeBranches> {
        self.modes.iter().find(|b| b.m == m)
    }

    pub fn split_modes(&self) -> Vec<i64> {
        self.modes
            .iter()
            .filter(|b| b.state == SplitState::Split)
            .map(|b| b.m)
            .collect()
    }

    /// Number of distinct `|m|` with two branches.
    pub fn split_order_count(&self) -> usize {
        let mut orders: Vec<u64> = self
            .split_modes()
            .iter()
            .map(|m| m.unsigned_abs())
            .collect();
        orders.sort_unstable();
        orders.dedup();
        orders.len()
    }

    /// Splitting of the m = 0 pair from root positions.
    pub fn central_splitting(&self, fsr_hz: f64) -> Splitting {
        match self.mode(0) {
            Some(ModeBranches {
                state: SplitState::Split,
                lower: Some(l),
                upper: Some(u),
                ..
            }) => Splitting::from_pair(l.position_hz, u.position_hz, fsr_hz),
            _ => Splitting::not_split(),
        }
    }
}

/// Assigns each peak the mode of its nearest phase root (within `kappa_hz`)
/// and classifies each mode's branches.
///
/// A mode is split when it has roots with transmission of at least
/// `split_threshold` on both sides of zero detuning. Ties between roots
/// within 1 kHz go to the lower `|m|`.
pub fn avoided_crossing_map(
    peaks: &[Peak],
    roots: &[ResonanceRoot],
    kappa_hz: f64,
    split_threshold: f64,
) -> CrossingMap {
    const TIE_HZ: f64 = 1e3;

    let mut peaks = peaks.to_vec();
    let mut peak_root: Vec<Option<usize>> = vec![None; peaks.len()];
    let mut ambiguous = Vec::new();

    for (pi, p) in peaks.iter().enumerate() {
        let mut near: Vec<(usize, f64)> = roots
            .iter()
            .enumerate()
            .map(|(ri, r)| (ri, (r.position_hz - p.position_hz).abs()))
            .filter(|&(_, d)| d < kappa_hz)
            .collect();
        if near.is_empty() {
            continue;
        }
        near.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best_d = near[0].1;
        let best = near
            .iter()
            .filter(|&&(_, d)| d - best_d <= TIE_HZ)
            .min_by_key(|&&(ri, _)| roots[ri].m.unsigned_abs())
            .map(|&(ri, _)| ri)
            .unwrap_or(near[0].0);
        if near.iter().any(|&(ri, _)| roots[ri].m != roots[best].m) {
            ambiguous.push(pi);
        }
        peak_root[pi] = Some(best);
    }

    let mut ms: Vec<i64> = roots.iter().map(|r| r.m).collect();
    ms.sort_unstable();
    ms.dedup();

    let point = |ri: usize| -> BranchPoint {
        let r = &roots[ri];
        let peak = peak_root
            .iter()
            .position(|&x| x == Some(ri))
            .map(|pi| &peaks[pi]);
        BranchPoint {
            position_hz: r.position_hz,
            height: peak.map_or(r.transmission, |p| p.height),
            peak_position_hz: peak.map(|p| p.position_hz),
        }
    };
    let brightest = |it: &mut dyn Iterator<Item = usize>| -> Option<usize> {
        it.max_by(|&a, &b| roots[a].transmission.total_cmp(&roots[b].transmission))
    };

    let modes: Vec<ModeBranches> = ms
        .iter()
        .map(|&m| {
            let idx: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].m == m).collect();
            let shown: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| roots[i].transmission >= split_threshold)
                .collect();
            let lower = brightest(
                &mut shown
                    .iter()
                    .copied()
                    .filter(|&i| roots[i].position_hz < 0.0),
            );
            let upper = brightest(
                &mut shown
                    .iter()
                    .copied()
                    .filter(|&i| roots[i].position_hz > 0.0),
            );
            let buried_roots = idx.iter().filter(|&&i| !roots[i].visible).count();
            match (lower, upper) {
                (Some(l), Some(u)) => ModeBranches {
                    m,
                    state: SplitState::Split,
                    lower: Some(point(l)),
                    upper: Some(point(u)),
                    unsplit: None,
                    buried_roots,
                },
                _ => {
                    let single = brightest(&mut shown.iter().copied());
                    ModeBranches {
                        m,
                        state: if single.is_some() {
                            SplitState::Unsplit
                        } else {
                            SplitState::Hidden
                        },
                        lower: None,
                        upper: None,
                        unsplit: single.map(point),
                        buried_roots,
                    }
                }
            }
        })
        .collect();

    for (p, ri) in peaks.iter_mut().zip(&peak_root) {
        let Some(ri) = *ri else { continue };
        let m = roots[ri].m;
        p.mode_index = Some(m);
        let split = modes
            .iter()
            .any(|b| b.m == m && b.state == SplitState::Split);
        p.branch = Some(if !split {
            Branch::Unsplit
        } else if p.position_hz < 0.0 {
            Branch::Lower
        } else {
            Branch::Upper
        });
    }

    CrossingMap {
        kappa_hz,
        split_threshold,
        modes,
        peaks,
        ambiguous,
    }
}
