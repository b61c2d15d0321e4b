use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::homotopy::{Homotopy, ProjectiveHomotopy};
use super::descent::{descend, escaped, DescentConfig, DescentEnd};
use super::path::{track_path, track_segment_with, FailureReason, Scratch, Segment, TrackerConfig};
use super::start::StartSystem;
use crate::critsys::{specialize_t, CriticalFamily, FamilyChart};
use crate::endgame::{cauchy_endgame, EndgameConfig, EndgameLimit};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::poly::{CompiledSystem, PolySystem};
use crate::random;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PathStatus {
    Finite,
    AtInfinity,
    TrackFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathOutcome {
    pub path_id: usize,
    pub status: PathStatus,
    /// Affine limit of the tracked coordinates (finite paths only).
    pub endpoint: Option<Vec<Complex64>>,
    pub winding_number: Option<u32>,
    /// Newton residual of the last tracked point.
    pub residual: f64,
    pub multiplier_divergent: bool,
    pub failure: Option<FailureReason>,
    pub rings: usize,
}

impl PathOutcome {
    fn failed(path_id: usize, reason: FailureReason, residual: f64, rings: usize) -> Self {
        Self {
            path_id,
            status: PathStatus::TrackFailure,
            endpoint: None,
            winding_number: None,
            residual,
            multiplier_divergent: false,
            failure: Some(reason),
            rings,
        }
    }
}

/// Start points from linear solves can carry a little roundoff; a few Newton
/// steps at `s = 1` clean them up. Fails with the residual when they do not.
fn polish_start(h: &dyn Homotopy, start: &[Complex64], scratch: &mut Scratch) -> std::result::Result<Vec<Complex64>, f64> {
    let one = Complex64::new(1.0, 0.0);
    let mut z = start.to_vec();
    let mut converged = false;
    for _ in 0..3 {
        let r = scratch.residual(h, &z, one);
        if r < 1e-12 {
            return Ok(z);
        }
        match scratch.newton_step(h, &mut z, one) {
            Some(rel) => converged = rel <= 1e-10,
            None => break,
        }
    }
    // large starts cannot reach an absolute residual near roundoff
    let r = scratch.residual(h, &z, one);
    if r < 1e-10 || (converged && r < 1e-6) {
        Ok(z)
    } else {
        Err(r)
    }
}

/// Tracks one path from `s = 1` through the endgame at `s = 0`. `start` is in
/// the homotopy's tracked coordinates.
pub fn follow_path(
    h: &dyn Homotopy,
    start: &[Complex64],
    path_id: usize,
    tcfg: &TrackerConfig,
    ecfg: &EndgameConfig,
) -> PathOutcome {
    let start = match polish_start(h, start, &mut Scratch::new(h.dim())) {
        Ok(z) => z,
        Err(r) => return PathOutcome::failed(path_id, FailureReason::StartResidual, r, 0),
    };
    let tcfg = TrackerConfig {
        s_endgame: ecfg.initial_radius,
        ..tcfg.clone()
    };
    let state = match track_path(h, &start, &tcfg) {
        Ok(s) => s,
        Err(f) => return PathOutcome::failed(path_id, f.reason, f.state.newton_residual, 0),
    };
    match cauchy_endgame(h, &state, &tcfg, ecfg) {
        Ok(res) => {
            let (status, endpoint) = match res.limit {
                EndgameLimit::Finite(x) => (PathStatus::Finite, Some(x)),
                EndgameLimit::Infinite => (PathStatus::AtInfinity, None),
            };
            PathOutcome {
                path_id,
                status,
                endpoint,
                winding_number: res.winding_number,
                residual: res.state.newton_residual,
                multiplier_divergent: res.multiplier_divergent,
                failure: None,
                rings: res.history.len(),
            }
        }
        Err(f) => PathOutcome::failed(path_id, f.reason, f.state.newton_residual, f.history.len()),
    }
}

/// Tracks one start-system path: main leg, then a radial descent that only
/// resolves nonsingular finite endpoints. Bounded paths without one are
/// reported `Finite` with their last point so the classifier can reject them.
pub fn follow_start_path(
    h: &dyn Homotopy,
    start: &[Complex64],
    path_id: usize,
    tcfg: &TrackerConfig,
    dcfg: &DescentConfig,
) -> PathOutcome {
    let mut scratch = Scratch::new(h.dim());
    let one = Complex64::new(1.0, 0.0);
    let start = match polish_start(h, start, &mut scratch) {
        Ok(z) => z,
        Err(r) => return PathOutcome::failed(path_id, FailureReason::StartResidual, r, 0),
    };
    let tcfg = TrackerConfig {
        s_endgame: dcfg.initial_radius,
        ..tcfg.clone()
    };
    let seg = Segment::Line {
        from: one,
        to: Complex64::new(dcfg.initial_radius, 0.0),
    };
    let state = match track_segment_with(h, &seg, &start, tcfg.initial_step, &tcfg, &mut scratch) {
        Ok(s) => s,
        Err(f) if escaped(h, &f.state.point, dcfg) => {
            return PathOutcome {
                status: PathStatus::AtInfinity,
                failure: None,
                ..PathOutcome::failed(path_id, f.reason, f.state.newton_residual, 0)
            }
        }
        Err(f) => return PathOutcome::failed(path_id, f.reason, f.state.newton_residual, 0),
    };
    let d = descend(h, &state, &tcfg, dcfg, &mut scratch);
    let rings = d.norms.len();
    let residual = d.state.newton_residual;
    let (status, endpoint, winding) = match d.end {
        DescentEnd::Nonsingular(x) => (PathStatus::Finite, Some(x), Some(1)),
        DescentEnd::Singular(x) => (PathStatus::Finite, Some(x), None),
        DescentEnd::Infinite => (PathStatus::AtInfinity, None, None),
        DescentEnd::Failed(reason) => return PathOutcome::failed(path_id, reason, residual, rings),
    };
    PathOutcome {
        path_id,
        status,
        endpoint,
        winding_number: winding,
        residual,
        multiplier_divergent: false,
        failure: None,
        rings,
    }
}

/// Runs every path, in parallel when `threads` allows. The output is in
/// start order whatever the scheduling.
pub fn run_paths(
    h: &dyn Homotopy,
    starts: &[Vec<Complex64>],
    tcfg: &TrackerConfig,
    ecfg: &EndgameConfig,
    threads: Option<usize>,
) -> Result<Vec<PathOutcome>> {
    in_pool(threads, || {
        starts
            .par_iter()
            .enumerate()
            .map(|(id, z)| follow_path(h, z, id, tcfg, ecfg))
            .collect()
    })
}

/// Runs `work` on a dedicated pool of `threads` workers, or on the global
/// pool.
pub(crate) fn in_pool<T: Send>(threads: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

fn square_compiled(sys: &PolySystem) -> Result<CompiledSystem> {
    if sys.num_params() != 0 || !sys.is_square() {
        return Err(Error::NotSquare {
            equations: sys.len(),
            unknowns: sys.unknowns(),
        });
    }
    Ok(CompiledSystem::new(sys.unknowns(), sys.equations()))
}

fn refine_compiled(sys: &CompiledSystem, approx: &[Complex64], iters: usize) -> Result<(Vec<Complex64>, f64)> {
    let n = sys.nvars();
    let mut vals = vec![Complex64::default(); n];
    let mut jac = vec![Complex64::default(); n * n];
    sys.eval_jacobian(approx, &mut vals, &mut jac);
    let mut residual = linalg::max_norm(&vals);
    if n == 0 {
        return Ok((approx.to_vec(), residual));
    }
    let ratio = linalg::singular_ratio(&linalg::from_row_major(n, n, &jac));
    if ratio < 1e-12 {
        return Err(Error::SingularJacobian { ratio });
    }
    if residual == 0.0 {
        return Ok((approx.to_vec(), residual));
    }
    let mut best = approx.to_vec();
    let mut x = approx.to_vec();
    for _ in 0..iters {
        let mut dx: Vec<Complex64> = vals.iter().map(|v| -v).collect();
        if !linalg::lu_solve_in_place(&mut jac, n, &mut dx) {
            break;
        }
        let rel = linalg::relative_step(&dx, &x);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        sys.eval_jacobian(&x, &mut vals, &mut jac);
        let r = linalg::max_norm(&vals);
        if !r.is_finite() || r > 1e3 * residual.max(1e-300) {
            break;
        }
        if r <= residual {
            residual = r;
            best.copy_from_slice(&x);
        }
        if rel < 1e-15 || residual == 0.0 {
            break;
        }
    }
    Ok((best, residual))
}

/// Newton's method on a square system without parameters. Refuses when the
/// Jacobian at `approx` is numerically singular (relative smallest singular
/// value below `1e-12`). Returns the best point seen and its max-norm
/// residual.
pub fn newton_refine(sys: &PolySystem, approx: &[Complex64], iters: usize) -> Result<(Vec<Complex64>, f64)> {
    if approx.len() != sys.unknowns() {
        return Err(Error::Dimension {
            expected: sys.unknowns(),
            found: approx.len(),
        });
    }
    refine_compiled(&square_compiled(sys)?, approx, iters)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveConfig {
    pub tracker: TrackerConfig,
    pub descent: DescentConfig,
    pub seed: u64,
    /// Linear-product start system over the groups `{x}`, `{lambda}`.
    pub multihomogeneous: bool,
    /// Largest tolerated fraction of failed paths.
    pub failure_budget: f64,
    /// Relative smallest singular value below which an endpoint is singular.
    pub nonsingular_tol: f64,
    /// Relative rank threshold for the constraint Jacobian.
    pub regular_tol: f64,
    pub final_tol: f64,
    pub threads: Option<usize>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tracker: TrackerConfig::default(),
            descent: DescentConfig::default(),
            seed: 0,
            multihomogeneous: false,
            failure_budget: 0.05,
            nonsingular_tol: 1e-8,
            regular_tol: 1e-8,
            final_tol: 1e-10,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub path_id: Option<usize>,
    /// Values of the unknowns.
    pub point: Vec<Complex64>,
    pub ambient: Vec<Complex64>,
    pub residual: f64,
    /// Smallest over largest singular value of the Jacobian.
    pub condition: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    Singular,
    Residual,
    OffRegularLocus,
    NotImmersive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rejection {
    pub path_id: usize,
    pub point: Vec<Complex64>,
    pub reason: RejectReason,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub path_count: usize,
    /// In path order.
    pub outcomes: Vec<PathOutcome>,
    /// Sorted lexicographically by ambient coordinates.
    pub solutions: Vec<Solution>,
    pub rejected: Vec<Rejection>,
    /// Some equation is a nonzero constant.
    pub inconsistent: bool,
}

impl SolveReport {
    pub fn count(&self, status: PathStatus) -> usize {
        self.outcomes.iter().filter(|o| o.status == status).count()
    }

    pub fn is_conserved(&self) -> bool {
        self.count(PathStatus::Finite) + self.count(PathStatus::AtInfinity) + self.count(PathStatus::TrackFailure)
            == self.path_count
    }
}

fn groups_for(chart: &FamilyChart, n: usize, multihomogeneous: bool) -> Vec<Vec<usize>> {
    match chart {
        FamilyChart::Lagrange { ambient, multipliers } if multihomogeneous && *multipliers > 0 && *ambient > 0 => {
            vec![(0..*ambient).collect(), (*ambient..n).collect()]
        }
        _ => vec![(0..n).collect()],
    }
}

fn build_start(target: &PolySystem, chart: &FamilyChart, cfg: &SolveConfig) -> Result<StartSystem> {
    let n = target.unknowns();
    let groups = groups_for(chart, n, cfg.multihomogeneous);
    if groups.len() == 1 {
        StartSystem::total_degree(target)
    } else {
        let mut rng = random::rng_for(cfg.seed, "start-factors");
        StartSystem::multihomogeneous(target, &groups, &mut rng)
    }
}

/// The gamma constant used under `seed`.
pub fn gamma_for(seed: u64) -> Complex64 {
    random::unit_complex(&mut random::rng_for(seed, "gamma"))
}

fn projective_homotopy(target: &PolySystem, start: &StartSystem, seed: u64) -> ProjectiveHomotopy {
    let gamma = gamma_for(seed);
    let mut rng = random::rng_for(seed, "patches");
    let patches: Vec<Vec<Complex64>> = start
        .groups()
        .iter()
        .map(|g| random::generic_vector(&mut rng, g.len() + 1))
        .collect();
    ProjectiveHomotopy::new(target, start, gamma, &patches)
}

enum Verdict {
    Accept(Solution),
    Reject(Rejection),
}

struct Classifier<'a> {
    compiled: CompiledSystem,
    chart: &'a FamilyChart,
    constraints: Vec<CompiledSystem>,
    ambient: usize,
    cfg: &'a SolveConfig,
}

impl<'a> Classifier<'a> {
    fn new(target: &PolySystem, chart: &'a FamilyChart, constraint_rows: &[usize], cfg: &'a SolveConfig) -> Result<Self> {
        let n = target.unknowns();
        let constraints = match chart {
            FamilyChart::Lagrange { .. } => constraint_rows
                .iter()
                .map(|&r| CompiledSystem::new(n, std::slice::from_ref(&target.equations()[r])))
                .collect(),
            FamilyChart::Parametrized(_) => Vec::new(),
        };
        let ambient = match chart {
            FamilyChart::Lagrange { ambient, .. } => *ambient,
            FamilyChart::Parametrized(p) => p.map.len(),
        };
        Ok(Self {
            compiled: square_compiled(target)?,
            chart,
            constraints,
            ambient,
            cfg,
        })
    }

    fn jacobian(&self, x: &[Complex64]) -> CMatrix {
        let n = self.compiled.nvars();
        let mut vals = vec![Complex64::default(); n];
        let mut jac = vec![Complex64::default(); n * n];
        self.compiled.eval_jacobian(x, &mut vals, &mut jac);
        linalg::from_row_major(n, n, &jac)
    }

    fn classify(&self, path_id: usize, approx: &[Complex64]) -> Verdict {
        let reject = |point: Vec<Complex64>, reason| {
            Verdict::Reject(Rejection {
                path_id,
                point,
                reason,
            })
        };
        let (x, residual) = match refine_compiled(&self.compiled, approx, 8) {
            Ok(r) => r,
            Err(_) => return reject(approx.to_vec(), RejectReason::Singular),
        };
        let condition = linalg::singular_ratio(&self.jacobian(&x));
        if condition < self.cfg.nonsingular_tol {
            return reject(x, RejectReason::Singular);
        }
        if !(residual < self.cfg.final_tol) {
            return reject(x, RejectReason::Residual);
        }
        match self.chart {
            FamilyChart::Lagrange { .. } if !self.constraints.is_empty() => {
                let n = self.compiled.nvars();
                let k = self.constraints.len();
                let mut rows = CMatrix::zeros(k, self.ambient);
                for (i, c) in self.constraints.iter().enumerate() {
                    let mut v = [Complex64::default()];
                    let mut jac = vec![Complex64::default(); n];
                    c.eval_jacobian(&x, &mut v, &mut jac);
                    for j in 0..self.ambient {
                        rows[(i, j)] = jac[j];
                    }
                }
                if linalg::rank(&rows, self.cfg.regular_tol) < k {
                    return reject(x, RejectReason::OffRegularLocus);
                }
            }
            FamilyChart::Parametrized(p) => {
                if linalg::rank(&p.differential(&x), self.cfg.regular_tol) < p.params.len() {
                    return reject(x, RejectReason::NotImmersive);
                }
            }
            _ => {}
        }
        Verdict::Accept(Solution {
            path_id: Some(path_id),
            ambient: self.chart.ambient_point(&x),
            point: x,
            residual,
            condition,
        })
    }
}

fn near(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
}

/// All isolated nonsingular solutions of a square system (without
/// parameters), with their images in the ambient space. Solutions must lie on
/// the smooth locus (constraint Jacobian of full rank) or, for parametrized
/// charts, where the parametrization is immersive.
pub fn solve_system(
    target: &PolySystem,
    chart: &FamilyChart,
    constraint_rows: &[usize],
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    cfg.descent.validate().map_err(Error::Input)?;
    if target.num_params() != 0 || !target.is_square() {
        return Err(Error::NotSquare {
            equations: target.len(),
            unknowns: target.unknowns(),
        });
    }
    let empty = |inconsistent| SolveReport {
        path_count: 0,
        outcomes: Vec::new(),
        solutions: Vec::new(),
        rejected: Vec::new(),
        inconsistent,
    };
    if target.equations().iter().any(|e| e.is_constant() && !e.is_zero()) {
        return Ok(empty(true));
    }
    if let Some(i) = target.equations().iter().position(|e| e.is_zero()) {
        return Err(Error::ZeroEquation { index: i });
    }
    if target.unknowns() == 0 {
        let mut report = empty(false);
        report.solutions.push(Solution {
            path_id: None,
            point: Vec::new(),
            ambient: chart.ambient_point(&[]),
            residual: 0.0,
            condition: 1.0,
        });
        return Ok(report);
    }

    let start = build_start(target, chart, cfg)?;
    let h = projective_homotopy(target, &start, cfg.seed);
    let starts: Vec<Vec<Complex64>> = start.solutions().iter().map(|x| h.lift(x)).collect();
    let mut outcomes = in_pool(cfg.threads, || {
        starts
            .par_iter()
            .enumerate()
            .map(|(id, z)| follow_start_path(&h, z, id, &cfg.tracker, &cfg.descent))
            .collect::<Vec<_>>()
    })?;
    let classifier = Classifier::new(target, chart, constraint_rows, cfg)?;

    let classify_all = |outcomes: &[PathOutcome]| -> Vec<Option<Verdict>> {
        outcomes
            .par_iter()
            .map(|o| o.endpoint.as_ref().map(|x| classifier.classify(o.path_id, x)))
            .collect()
    };
    let mut verdicts = classify_all(&outcomes);

    // Two paths ending at the same nonsingular solution means one of them
    // jumped. Re-track the pair cautiously; persistent duplicates fail.
    let duplicates = duplicate_paths(&verdicts);
    if !duplicates.is_empty() {
        let tight = cfg.tracker.tightened();
        let retracked: Vec<PathOutcome> = duplicates
            .par_iter()
            .map(|&id| follow_start_path(&h, &starts[id], id, &tight, &cfg.descent))
            .collect();
        for o in retracked {
            let id = o.path_id;
            verdicts[id] = o.endpoint.as_ref().map(|x| classifier.classify(id, x));
            outcomes[id] = o;
        }
        for id in duplicate_paths(&verdicts) {
            let keep = first_with_same_solution(&verdicts, id);
            if keep != id {
                outcomes[id] = PathOutcome::failed(id, FailureReason::PathJumping, outcomes[id].residual, outcomes[id].rings);
                verdicts[id] = None;
            }
        }
    }

    let failed = outcomes.iter().filter(|o| o.status == PathStatus::TrackFailure).count();
    if failed as f64 > cfg.failure_budget * outcomes.len() as f64 {
        return Err(Error::PathFailureBudget {
            failed,
            total: outcomes.len(),
        });
    }

    let mut solutions = Vec::new();
    let mut rejected = Vec::new();
    for v in verdicts.into_iter().flatten() {
        match v {
            Verdict::Accept(s) => solutions.push(s),
            Verdict::Reject(r) => rejected.push(r),
        }
    }
    solutions.sort_by(|a, b| linalg::lex_cmp(&a.ambient, &b.ambient).then(linalg::lex_cmp(&a.point, &b.point)));
    Ok(SolveReport {
        path_count: starts.len(),
        outcomes,
        solutions,
        rejected,
        inconsistent: false,
    })
}

fn accepted(v: &Option<Verdict>) -> Option<&Solution> {
    match v {
        Some(Verdict::Accept(s)) => Some(s),
        _ => None,
    }
}

fn first_with_same_solution(verdicts: &[Option<Verdict>], id: usize) -> usize {
    let me = accepted(&verdicts[id]).expect("duplicate is accepted");
    verdicts
        .iter()
        .position(|v| accepted(v).is_some_and(|s| near(&s.point, &me.point, 1e-6)))
        .unwrap_or(id)
}

/// Paths whose accepted solution coincides with another path's.
fn duplicate_paths(verdicts: &[Option<Verdict>]) -> Vec<usize> {
    let mut sols: Vec<(usize, &Solution)> = verdicts
        .iter()
        .enumerate()
        .filter_map(|(i, v)| accepted(v).map(|s| (i, s)))
        .collect();
    sols.sort_by(|a, b| linalg::lex_cmp(&a.1.point, &b.1.point));
    let mut out = Vec::new();
    for i in 0..sols.len() {
        let dup = sols.iter().enumerate().any(|(j, (_, s))| j != i && near(&s.point, &sols[i].1.point, 1e-6));
        if dup {
            out.push(sols[i].0);
        }
    }
    out.sort_unstable();
    out
}

/// Critical points of `f - t0*g` on the regular locus.
pub fn solve_generic(fam: &CriticalFamily, t0: Complex64, cfg: &SolveConfig) -> Result<SolveReport> {
    let target = specialize_t(fam, t0);
    solve_system(&target, &fam.chart, &fam.constraint_rows, cfg)
}
