use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use super::homotopy::Homotopy;
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackerConfig {
    pub min_step: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub max_rejections: u32,
    pub corrector_iters: usize,
    /// Componentwise relative size of the last Newton update at acceptance.
    pub corrector_tol: f64,
    /// Largest relative first Newton update accepted after a prediction.
    pub max_correction: f64,
    /// Accepted steps in a row before the step grows by `growth`.
    pub growth_streak: u32,
    pub growth: f64,
    /// Where the main leg stops and the endgame takes over.
    pub s_endgame: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            min_step: 1e-14,
            max_step: 0.1,
            initial_step: 0.02,
            max_rejections: 50,
            corrector_iters: 3,
            corrector_tol: 1e-9,
            max_correction: 1e-2,
            growth_streak: 5,
            growth: 1.5,
            s_endgame: 0.1,
        }
    }
}

impl TrackerConfig {
    /// A more cautious copy, used when re-tracking suspected path jumps.
    pub fn tightened(&self) -> Self {
        Self {
            max_step: self.max_step / 8.0,
            initial_step: self.initial_step / 8.0,
            max_correction: self.max_correction / 10.0,
            ..self.clone()
        }
    }
}

/// Position along a path. `s` is complex because the endgame loops around
/// `s = 0`; on the main leg it is real.
#[derive(Clone, Debug, PartialEq)]
pub struct PathState {
    pub s: Complex64,
    pub point: Vec<Complex64>,
    pub step_size: f64,
    pub newton_residual: f64,
    pub consecutive_failures: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    StartResidual,
    StepUnderflow,
    TooManyRejections,
    NoConvergence,
    WindingCap,
    Residual,
    PathJumping,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureReason::StartResidual => "start point does not solve the start system",
            FailureReason::StepUnderflow => "step size fell below the minimum",
            FailureReason::TooManyRejections => "too many consecutive step rejections",
            FailureReason::NoConvergence => "endgame estimates did not converge",
            FailureReason::WindingCap => "loop did not close within the revolution cap",
            FailureReason::Residual => "endpoint residual above tolerance",
            FailureReason::PathJumping => "path converged onto another path's endpoint",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackFailure {
    pub reason: FailureReason,
    pub state: PathState,
}

/// A leg of the path in the complex `s`-plane, parametrized by `tau` in
/// `[0, length]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    /// Straight line; `tau` is arc length.
    Line { from: Complex64, to: Complex64 },
    /// `s = from * phase * exp(-2 pi tau)` down to radius `to`.
    Radial { from: f64, to: f64, phase: Complex64 },
    /// `s = radius * phase * exp(2 pi i tau)`, `tau` in revolutions.
    Arc { radius: f64, phase: Complex64, from: f64, to: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Radial { from, to, .. } => (from / to).ln() / TAU,
            Segment::Arc { from, to, .. } => to - from,
        }
    }

    pub fn s_at(&self, tau: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => {
                let len = (to - from).norm();
                if len == 0.0 {
                    from
                } else {
                    from + (to - from) * (tau / len)
                }
            }
            Segment::Radial { from, phase, .. } => phase * (from * (-TAU * tau).exp()),
            Segment::Arc { radius, phase, from, .. } => {
                phase * Complex64::from_polar(radius, TAU * (from + tau))
            }
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Segment::Line { to, .. } => to,
            Segment::Radial { to, phase, .. } => phase * to,
            Segment::Arc { radius, phase, to, .. } => phase * Complex64::from_polar(radius, TAU * to),
        }
    }

    pub fn ds_at(&self, tau: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => {
                let len = (to - from).norm();
                if len == 0.0 {
                    Complex64::default()
                } else {
                    (to - from) / len
                }
            }
            Segment::Radial { .. } => self.s_at(tau) * (-TAU),
            Segment::Arc { .. } => self.s_at(tau) * Complex64::new(0.0, TAU),
        }
    }
}

/// Reusable buffers for one path.
pub(crate) struct Scratch {
    n: usize,
    values: Vec<Complex64>,
    jac: Vec<Complex64>,
    ds: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            n,
            values: vec![Complex64::default(); n],
            jac: vec![Complex64::default(); n * n],
            ds: vec![Complex64::default(); n],
            tmp: vec![Complex64::default(); n],
        }
    }

    /// Tangent `dz/dtau = -J^{-1} (dH/ds) (ds/dtau)` into `out`.
    fn tangent(&mut self, h: &dyn Homotopy, z: &[Complex64], s: Complex64, dsdt: Complex64, out: &mut [Complex64]) -> bool {
        h.evaluate(z, s, &mut self.values, &mut self.jac, &mut self.ds);
        for i in 0..self.n {
            out[i] = -self.ds[i] * dsdt;
        }
        linalg::lu_solve_in_place(&mut self.jac, self.n, out)
    }

    /// One Newton update in place; returns the relative step size.
    pub(crate) fn newton_step(&mut self, h: &dyn Homotopy, z: &mut [Complex64], s: Complex64) -> Option<f64> {
        h.evaluate(z, s, &mut self.values, &mut self.jac, &mut self.ds);
        for i in 0..self.n {
            self.tmp[i] = -self.values[i];
        }
        if !linalg::lu_solve_in_place(&mut self.jac, self.n, &mut self.tmp) {
            return None;
        }
        let rel = linalg::relative_step(&self.tmp, z);
        for i in 0..self.n {
            z[i] += self.tmp[i];
        }
        rel.is_finite().then_some(rel)
    }

    pub(crate) fn residual(&mut self, h: &dyn Homotopy, z: &[Complex64], s: Complex64) -> f64 {
        h.evaluate(z, s, &mut self.values, &mut self.jac, &mut self.ds);
        linalg::max_norm(&self.values)
    }
}

/// Newton corrector at fixed `s`. Rejects large first updates and updates
/// that fail to contract, which guards against jumping between paths.
fn correct(h: &dyn Homotopy, z: &mut [Complex64], s: Complex64, cfg: &TrackerConfig, scratch: &mut Scratch) -> bool {
    let mut prev = f64::INFINITY;
    for it in 0..cfg.corrector_iters {
        let Some(rel) = scratch.newton_step(h, z, s) else {
            return false;
        };
        if it == 0 && rel > cfg.max_correction {
            return false;
        }
        if rel <= cfg.corrector_tol {
            return true;
        }
        if it > 0 && rel > 0.25 * prev {
            return false;
        }
        prev = rel;
    }
    false
}

/// Runge-Kutta 4 predictor from `z` at `tau` over `dt`, into `out`.
fn predict(
    h: &dyn Homotopy,
    seg: &Segment,
    z: &[Complex64],
    tau: f64,
    dt: f64,
    out: &mut [Complex64],
    scratch: &mut Scratch,
) -> bool {
    let n = z.len();
    let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(4);
    let mut y = z.to_vec();
    let nodes = [0.0, 0.5, 0.5, 1.0];
    for stage in 0..4 {
        let t = tau + nodes[stage] * dt;
        if stage > 0 {
            for i in 0..n {
                y[i] = z[i] + k[stage - 1][i] * (nodes[stage] * dt);
            }
        }
        let mut slope = vec![Complex64::default(); n];
        if !scratch.tangent(h, &y, seg.s_at(t), seg.ds_at(t), &mut slope) {
            return false;
        }
        k.push(slope);
    }
    for i in 0..n {
        out[i] = z[i] + (k[0][i] + k[1][i] * 2.0 + k[2][i] * 2.0 + k[3][i]) * (dt / 6.0);
    }
    out.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Follows a solution of `H(., seg.s_at(0))` to the end of the segment.
pub fn track_segment(
    h: &dyn Homotopy,
    seg: &Segment,
    start: &[Complex64],
    step: f64,
    cfg: &TrackerConfig,
) -> Result<PathState, TrackFailure> {
    let mut scratch = Scratch::new(h.dim());
    track_segment_with(h, seg, start, step, cfg, &mut scratch)
}

pub(crate) fn track_segment_with(
    h: &dyn Homotopy,
    seg: &Segment,
    start: &[Complex64],
    step: f64,
    cfg: &TrackerConfig,
    scratch: &mut Scratch,
) -> Result<PathState, TrackFailure> {
    let len = seg.length();
    let mut z = start.to_vec();
    let mut trial = vec![Complex64::default(); z.len()];
    let mut tau = 0.0;
    let mut dt = step.clamp(cfg.min_step, cfg.max_step);
    let mut streak = 0;
    let mut rejections = 0;
    while len - tau > 1e-15 * len.max(1.0) {
        let last = tau + dt >= len;
        let this_dt = if last { len - tau } else { dt };
        let s_next = if last { seg.end() } else { seg.s_at(tau + this_dt) };
        let ok = predict(h, seg, &z, tau, this_dt, &mut trial, scratch)
            && correct(h, &mut trial, s_next, cfg, scratch);
        if ok {
            z.copy_from_slice(&trial);
            tau = if last { len } else { tau + this_dt };
            rejections = 0;
            streak += 1;
            if streak >= cfg.growth_streak {
                dt = (dt * cfg.growth).min(cfg.max_step);
                streak = 0;
            }
        } else {
            dt = this_dt / 2.0;
            streak = 0;
            rejections += 1;
            if rejections >= cfg.max_rejections || dt < cfg.min_step {
                let s = seg.s_at(tau);
                let newton_residual = scratch.residual(h, &z, s);
                let reason = if dt < cfg.min_step {
                    FailureReason::StepUnderflow
                } else {
                    FailureReason::TooManyRejections
                };
                return Err(TrackFailure {
                    reason,
                    state: PathState {
                        s,
                        point: z,
                        step_size: dt.max(cfg.min_step),
                        newton_residual,
                        consecutive_failures: rejections,
                    },
                });
            }
        }
    }
    let s = seg.end();
    let newton_residual = scratch.residual(h, &z, s);
    Ok(PathState {
        s,
        point: z,
        step_size: dt,
        newton_residual,
        consecutive_failures: 0,
    })
}

/// Main leg: from `s = 1` down the real axis to `s = cfg.s_endgame`.
pub fn track_path(h: &dyn Homotopy, start: &[Complex64], cfg: &TrackerConfig) -> Result<PathState, TrackFailure> {
    let seg = Segment::Line {
        from: Complex64::new(1.0, 0.0),
        to: Complex64::new(cfg.s_endgame, 0.0),
    };
    track_segment(h, &seg, start, cfg.initial_step, cfg)
}
