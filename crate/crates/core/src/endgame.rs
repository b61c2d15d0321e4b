//! Cauchy endgame: the limit of a path as `s -> 0` is the mean of the path
//! over a loop `s = r e^{i theta}`, `theta` running over `c` full turns where
//! `c` (the winding number) is the first number of turns that closes the loop.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg;
use crate::tracker::path::{track_segment_with, Scratch};
use crate::tracker::{FailureReason, Homotopy, PathState, Segment, TrackFailure, TrackerConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndgameConfig {
    pub initial_radius: f64,
    pub ratio: f64,
    pub max_rings: usize,
    /// Rings to run before a finite limit may be accepted.
    pub min_rings: usize,
    pub loop_samples: usize,
    pub divergence_bound: f64,
    pub agreement_tol: f64,
    /// Componentwise relative distance at which a loop counts as closed.
    pub closure_tol: f64,
    pub max_revolutions: u32,
}

impl Default for EndgameConfig {
    fn default() -> Self {
        Self {
            initial_radius: 0.1,
            ratio: 0.5,
            max_rings: 24,
            min_rings: 4,
            loop_samples: 16,
            divergence_bound: 1e8,
            agreement_tol: 1e-6,
            closure_tol: 1e-7,
            max_revolutions: 32,
        }
    }
}

impl EndgameConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.initial_radius > 0.0 && self.initial_radius.is_finite()) {
            return Err("endgame radius must be positive".into());
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err("ring ratio must lie in (0, 1)".into());
        }
        if self.max_rings < 6 {
            return Err("the endgame needs at least 6 rings".into());
        }
        if self.min_rings < 2 || self.min_rings > self.max_rings {
            return Err("min_rings must lie in [2, max_rings]".into());
        }
        if self.loop_samples < 8 {
            return Err("at least 8 samples per loop are required".into());
        }
        if !(self.divergence_bound > 1.0) {
            return Err("divergence bound must exceed 1".into());
        }
        if self.max_revolutions == 0 {
            return Err("max_revolutions must be positive".into());
        }
        Ok(())
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.max_rings).map(|k| self.initial_radius * self.ratio.powi(k as i32))
    }
}

/// One circle of the endgame.
#[derive(Clone, Debug, PartialEq)]
pub struct RingRecord {
    pub radius: f64,
    /// `None` when the loop did not close within the revolution cap.
    pub winding: Option<u32>,
    /// Cauchy mean in affine coordinates.
    pub estimate: Option<Vec<Complex64>>,
    /// Largest modulus of a primary coordinate along the ring.
    pub primary_max: f64,
    /// Largest modulus of a multiplier coordinate along the ring.
    pub auxiliary_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EndgameLimit {
    Finite(Vec<Complex64>),
    Infinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndgameResult {
    pub limit: EndgameLimit,
    pub winding_number: Option<u32>,
    pub history: Vec<RingRecord>,
    /// Multipliers grow without bound while the primary coordinates converge.
    pub multiplier_divergent: bool,
    /// Path state at the start of the last ring.
    pub state: PathState,
}

impl EndgameResult {
    /// Differences between consecutive Cauchy estimates (max modulus over
    /// the first `primary` coordinates).
    pub fn estimate_differences(&self, primary: usize) -> Vec<f64> {
        let ests: Vec<&Vec<Complex64>> = self.history.iter().filter_map(|r| r.estimate.as_ref()).collect();
        ests.windows(2)
            .map(|w| {
                w[0][..primary]
                    .iter()
                    .zip(&w[1][..primary])
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndgameFailure {
    pub reason: FailureReason,
    pub history: Vec<RingRecord>,
    pub state: PathState,
}

impl fmt::Display for EndgameFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} after {} rings", self.reason, self.history.len())
    }
}

impl From<TrackFailure> for EndgameFailure {
    fn from(t: TrackFailure) -> Self {
        Self {
            reason: t.reason,
            history: Vec::new(),
            state: t.state,
        }
    }
}

/// True iff the norms grow strictly and the last exceeds `bound`. Needs at
/// least three samples.
pub fn classify_divergence(norms: &[f64], bound: f64) -> bool {
    norms.len() >= 3 && norms.windows(2).all(|w| w[1] > w[0]) && norms[norms.len() - 1] > bound
}

/// Strict growth by a factor above `1 + 1e-3` over each of the last three
/// ring transitions.
fn steadily_growing(values: &[f64]) -> bool {
    values.len() >= 4
        && values[values.len() - 4..]
            .windows(2)
            .all(|w| w[1] > w[0] * (1.0 + 1e-3) && w[1] > 1e-8)
}

fn run_ring(
    h: &dyn Homotopy,
    start: &[Complex64],
    radius: f64,
    phase: Complex64,
    step: &mut f64,
    tcfg: &TrackerConfig,
    cfg: &EndgameConfig,
    scratch: &mut Scratch,
) -> Result<RingRecord, TrackFailure> {
    let n = start.len();
    let primary = h.primary();
    let samples = cfg.loop_samples;
    let mut sum = vec![Complex64::default(); n];
    let mut z = start.to_vec();
    let mut primary_max: f64 = 0.0;
    let mut auxiliary_max: f64 = 0.0;
    let record_sample = |z: &[Complex64], sum: &mut [Complex64], pmax: &mut f64, amax: &mut f64| {
        for (acc, v) in sum.iter_mut().zip(z) {
            *acc += v;
        }
        let a = h.to_affine(z);
        *pmax = pmax.max(linalg::max_norm(&a[..primary]));
        *amax = amax.max(linalg::max_norm(&a[primary..]));
    };
    record_sample(&z, &mut sum, &mut primary_max, &mut auxiliary_max);
    let mut count = 1usize;
    let ring_cfg = TrackerConfig {
        max_step: tcfg.max_step.min(1.0 / samples as f64),
        ..tcfg.clone()
    };
    for rev in 1..=cfg.max_revolutions {
        for j in 0..samples {
            let from = (rev - 1) as f64 + j as f64 / samples as f64;
            let seg = Segment::Arc {
                radius,
                phase,
                from,
                to: from + 1.0 / samples as f64,
            };
            let state = track_segment_with(h, &seg, &z, *step, &ring_cfg, scratch)?;
            *step = state.step_size;
            z = state.point;
            if j + 1 < samples {
                record_sample(&z, &mut sum, &mut primary_max, &mut auxiliary_max);
                count += 1;
            }
            if primary_max > cfg.divergence_bound {
                return Ok(RingRecord {
                    radius,
                    winding: None,
                    estimate: None,
                    primary_max,
                    auxiliary_max,
                });
            }
        }
        let closed = z
            .iter()
            .zip(start)
            .all(|(a, b)| (a - b).norm() <= cfg.closure_tol * (1.0 + b.norm()));
        if closed {
            let mean: Vec<Complex64> = sum.iter().map(|v| v / count as f64).collect();
            return Ok(RingRecord {
                radius,
                winding: Some(rev),
                estimate: Some(h.to_affine(&mean)),
                primary_max,
                auxiliary_max,
            });
        }
        record_sample(&z, &mut sum, &mut primary_max, &mut auxiliary_max);
        count += 1;
    }
    Ok(RingRecord {
        radius,
        winding: None,
        estimate: None,
        primary_max,
        auxiliary_max,
    })
}

fn primary_agreement(a: &[Complex64], b: &[Complex64], primary: usize, tol: f64) -> bool {
    a[..primary]
        .iter()
        .zip(&b[..primary])
        .all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
}

/// Runs the endgame from `state`, which must sit on the path at
/// `s = cfg.initial_radius` (any phase).
pub fn cauchy_endgame(
    h: &dyn Homotopy,
    state: &PathState,
    tcfg: &TrackerConfig,
    cfg: &EndgameConfig,
) -> Result<EndgameResult, EndgameFailure> {
    let primary = h.primary();
    let phase = if state.s.norm() > 0.0 {
        state.s / state.s.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut scratch = Scratch::new(h.dim());
    let mut history: Vec<RingRecord> = Vec::new();
    let mut z = state.point.clone();
    let mut step = (state.step_size).min(1.0 / cfg.loop_samples as f64);
    let mut radius = state.s.norm();
    let mut unclosed = 0;
    let mut current = state.clone();
    let fail = |reason, history: Vec<RingRecord>, state: PathState| EndgameFailure {
        reason,
        history,
        state,
    };
    for k in 0..cfg.max_rings {
        if k > 0 {
            let next = radius * cfg.ratio;
            let seg = Segment::Radial {
                from: radius,
                to: next,
                phase,
            };
            let moved = track_segment_with(h, &seg, &z, step.max(0.02), tcfg, &mut scratch).map_err(|e| {
                let mut f = EndgameFailure::from(e);
                f.history = history.clone();
                f
            })?;
            z = moved.point.clone();
            step = moved.step_size.min(1.0 / cfg.loop_samples as f64);
            current = moved;
            radius = next;
        }
        let ring = run_ring(h, &z, radius, phase, &mut step, tcfg, cfg, &mut scratch).map_err(|e| {
            let mut f = EndgameFailure::from(e);
            f.history = history.clone();
            f
        })?;
        let escaped = ring.primary_max > cfg.divergence_bound;
        let estimate_escaped = ring
            .estimate
            .as_ref()
            .is_some_and(|e| linalg::max_norm(&e[..primary]) > cfg.divergence_bound);
        let winding = ring.winding;
        history.push(ring);
        if escaped {
            return Ok(EndgameResult {
                limit: EndgameLimit::Infinite,
                winding_number: winding,
                history,
                multiplier_divergent: false,
                state: current,
            });
        }
        if winding.is_none() {
            unclosed += 1;
            if unclosed >= 2 {
                return Err(fail(FailureReason::WindingCap, history, current));
            }
            continue;
        }
        unclosed = 0;
        let len = history.len();
        if len < 2 {
            continue;
        }
        let (prev, last) = (&history[len - 2], &history[len - 1]);
        let (Some(pe), Some(le)) = (&prev.estimate, &last.estimate) else {
            continue;
        };
        if prev.winding != last.winding {
            continue;
        }
        let prev_escaped = linalg::max_norm(&pe[..primary]) > cfg.divergence_bound;
        if estimate_escaped && prev_escaped {
            return Ok(EndgameResult {
                limit: EndgameLimit::Infinite,
                winding_number: winding,
                history,
                multiplier_divergent: false,
                state: current,
            });
        }
        let primary_growth: Vec<f64> = history.iter().map(|r| r.primary_max).collect();
        let bounded = last.primary_max <= prev.primary_max * (1.0 + 1e-6) + 1e-12 && !steadily_growing(&primary_growth);
        if len >= cfg.min_rings && bounded && primary_agreement(le, pe, primary, cfg.agreement_tol) {
            let aux: Vec<f64> = history.iter().map(|r| r.auxiliary_max).collect();
            let multiplier_divergent = primary < le.len() && steadily_growing(&aux);
            return Ok(EndgameResult {
                limit: EndgameLimit::Finite(le.clone()),
                winding_number: winding,
                history,
                multiplier_divergent,
                state: current,
            });
        }
    }
    Err(fail(FailureReason::NoConvergence, history, current))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_classification() {
        assert!(classify_divergence(&[1e3, 1e6, 1e9], 1e8));
        assert!(!classify_divergence(&[3.0, 7.0, 2.0, 9.0, 4.0], 1e8));
        assert!(!classify_divergence(&[1e3, 1e6, 1e7], 1e8));
        assert!(!classify_divergence(&[1e9, 1e10], 1e8));
        assert!(!classify_divergence(&[1e9, 1e12, 1e10], 1e8));
    }

    #[test]
    fn config_validation() {
        assert!(EndgameConfig::default().validate().is_ok());
        let few = EndgameConfig {
            max_rings: 5,
            ..Default::default()
        };
        assert!(few.validate().is_err());
        let sparse = EndgameConfig {
            loop_samples: 4,
            ..Default::default()
        };
        assert!(sparse.validate().is_err());
        let radii: Vec<f64> = EndgameConfig::default().radii().take(3).collect();
        assert_eq!(radii, vec![0.1, 0.05, 0.025]);
    }
}
