//! Endgame for start-system paths. Only nonsingular finite endpoints matter
//! there, and a path ending at one is analytic at `s = 0`, so instead of
//! looping around the origin we walk radially toward it and try Newton on
//! the target at every radius.

use num_complex::Complex64;
use serde::Serialize;

use super::homotopy::Homotopy;
use super::path::{FailureReason, PathState, Scratch, Segment, TrackerConfig};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentConfig {
    pub initial_radius: f64,
    pub ratio: f64,
    /// Smallest radius visited.
    pub floor: f64,
    pub divergence_bound: f64,
    /// Radii in a row of strictly growing norm that classify a path as
    /// escaping when the floor is reached.
    pub growth_window: usize,
    /// A path whose tracking breaks down beyond this affine norm is counted
    /// as escaping. Near infinity the solution sets are often positive
    /// dimensional and the tracker loses conditioning there first.
    pub failure_escape: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            initial_radius: 0.1,
            ratio: 0.5,
            floor: 1e-13,
            divergence_bound: 1e8,
            growth_window: 8,
            failure_escape: 1e4,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.initial_radius > 0.0 && self.initial_radius < 1.0) {
            return Err(format!("initial radius {} must lie in (0, 1)", self.initial_radius));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(format!("radius ratio {} must lie in (0, 1)", self.ratio));
        }
        if !(self.floor > 0.0 && self.floor < self.initial_radius) {
            return Err(format!("descent floor {} must lie in (0, initial radius)", self.floor));
        }
        if !(self.divergence_bound > 1.0) {
            return Err(format!("divergence bound {} must exceed 1", self.divergence_bound));
        }
        if !(self.failure_escape > 1.0 && self.failure_escape <= self.divergence_bound) {
            return Err(format!("failure escape norm {} must lie in (1, divergence bound]", self.failure_escape));
        }
        if self.growth_window < 3 {
            return Err("growth window must be at least 3".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DescentEnd {
    /// Newton at `s = 0` converged quadratically from two consecutive radii.
    Nonsingular(Vec<Complex64>),
    /// The path stayed bounded without a nonsingular limit; the last affine
    /// point is kept for the caller to inspect.
    Singular(Vec<Complex64>),
    Infinite,
    Failed(FailureReason),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Descent {
    pub end: DescentEnd,
    /// Affine max-norm at every radius reached.
    pub norms: Vec<f64>,
    pub state: PathState,
}

/// Newton on `H(., 0)` from `z`. Succeeds only on quadratic convergence from
/// a small first update, which singular endpoints never show.
fn newton_at_zero(h: &dyn Homotopy, z: &[Complex64], scratch: &mut Scratch) -> Option<Vec<Complex64>> {
    let zero = Complex64::default();
    let mut w = z.to_vec();
    let mut prev = f64::INFINITY;
    for it in 0..8 {
        let rel = scratch.newton_step(h, &mut w, zero)?;
        if it == 0 && rel > 1e-4 {
            return None;
        }
        if rel < 1e-13 {
            return Some(w);
        }
        if it > 0 && rel > 0.1 * prev {
            return None;
        }
        prev = rel;
    }
    None
}

fn steadily_growing(norms: &[f64], window: usize) -> bool {
    growing_by(norms, window, 1.0)
}

/// Every ratio of consecutive norms over the window is above `factor`.
fn growing_by(norms: &[f64], window: usize, factor: f64) -> bool {
    norms.len() > window && norms[norms.len() - window - 1..].windows(2).all(|w| w[1] > factor * w[0])
}

/// Smallest per-radius growth of an escaping path. A pole of order `1/c` in
/// `s` grows by `2^(1/c)` per halving, above this for `c <= 16`; a path
/// converging to a finite point has ratios tending to one.
const ESCAPE_RATIO: f64 = 1.04;

pub(crate) fn descend(
    h: &dyn Homotopy,
    state: &PathState,
    tcfg: &TrackerConfig,
    cfg: &DescentConfig,
    scratch: &mut Scratch,
) -> Descent {
    let mut z = state.point.clone();
    let mut r = state.s.norm();
    let phase = state.s / r;
    let mut step = state.step_size;
    let mut norms = Vec::new();
    let mut last_newton: Option<Vec<Complex64>> = None;
    let finish = |end, norms, z: Vec<Complex64>, s, step, scratch: &mut Scratch| {
        let newton_residual = scratch.residual(h, &z, s);
        Descent {
            end,
            norms,
            state: PathState {
                s,
                point: z,
                step_size: step,
                newton_residual,
                consecutive_failures: 0,
            },
        }
    };
    loop {
        let affine = h.to_affine(&z);
        let norm = linalg::max_norm(&affine);
        if !norm.is_finite() || norm > cfg.divergence_bound {
            norms.push(norm);
            return finish(DescentEnd::Infinite, norms, z, phase * r, step, scratch);
        }
        norms.push(norm);
        if norm > cfg.failure_escape && growing_by(&norms, cfg.growth_window, ESCAPE_RATIO) {
            return finish(DescentEnd::Infinite, norms, z, phase * r, step, scratch);
        }
        match newton_at_zero(h, &z, scratch) {
            Some(w) => {
                if let Some(prev) = &last_newton {
                    if linalg::relative_step(&diff(&w, prev), &w) < 1e-8 {
                        let x = h.to_affine(&w);
                        return finish(DescentEnd::Nonsingular(x), norms, z, phase * r, step, scratch);
                    }
                }
                last_newton = Some(w);
            }
            None => last_newton = None,
        }
        if r * cfg.ratio < cfg.floor {
            let end = if steadily_growing(&norms, cfg.growth_window) {
                DescentEnd::Infinite
            } else {
                DescentEnd::Singular(affine)
            };
            return finish(end, norms, z, phase * r, step, scratch);
        }
        let seg = Segment::Radial {
            from: r,
            to: r * cfg.ratio,
            phase,
        };
        step = step.min(seg.length());
        match super::path::track_segment_with(h, &seg, &z, step, tcfg, scratch) {
            Ok(next) => {
                z = next.point;
                step = next.step_size;
                r *= cfg.ratio;
            }
            Err(f) => {
                let escaped = escaped(h, &f.state.point, cfg);
                let end = if escaped || steadily_growing(&norms, cfg.growth_window) {
                    DescentEnd::Infinite
                } else {
                    DescentEnd::Failed(f.reason)
                };
                return finish(end, norms, f.state.point, f.state.s, f.state.step_size, scratch);
            }
        }
    }
}

/// Tracking failed far from the origin.
pub(crate) fn escaped(h: &dyn Homotopy, z: &[Complex64], cfg: &DescentConfig) -> bool {
    let norm = linalg::max_norm(&h.to_affine(z));
    !norm.is_finite() || norm > cfg.failure_escape
}

fn diff(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
