//! Both sides of the limit identity `lim Crit(f_t) = sum n_i Crit(g|X_i)`,
//! the count of critical points escaping to infinity, Euclidean distance
//! degrees and the Milnor-number oracle.

mod milnor;
mod strata;

pub use milnor::{local_multiplicity, milnor_multiplicity, DEFAULT_DEGREE_CAP};
pub use strata::{infer_multiplicities, strata_crit, weighted_sum, Issue, StratumReport, StratumSpec};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::critsys::{
    build_ed_objective, build_family, build_lagrange_system, ed_perturbation, pullback_objective, specialize_t,
    FamilyChart, ObjectiveSpec, VarietySpec,
};
use crate::endgame::EndgameConfig;
use crate::error::{Error, Result};
use crate::linalg;
use crate::pointset::{cluster_weighted, multiset_equal, PointSet, DEFAULT_CLUSTER_RADIUS};
use crate::poly::{PolySystem, Polynomial};
use crate::random;
use crate::tracker::{
    gamma_for, newton_refine, run_paths, solve_generic, solve_system, FamilyHomotopy, PathOutcome, PathStatus,
    SolveConfig, SolveReport, TrackerConfig,
};
use strata::{divide, pairs};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitConfig {
    /// Start-system solves; its seed drives every random choice here too.
    pub solve: SolveConfig,
    /// Tracking of `t` from `t0` to 0.
    pub tracker: TrackerConfig,
    pub endgame: EndgameConfig,
    pub cluster_radius: f64,
    /// Report tolerance: multiset comparison and stratum membership.
    pub tol: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            solve: SolveConfig::default(),
            tracker: TrackerConfig::default(),
            endgame: EndgameConfig::default(),
            cluster_radius: DEFAULT_CLUSTER_RADIUS,
            tol: 1e-6,
        }
    }
}

impl LimitConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut cfg = Self::default();
        cfg.solve.seed = seed;
        cfg
    }

    pub fn seed(&self) -> u64 {
        self.solve.seed
    }

    /// Start of the `t`-segment: a random point on the unit circle.
    pub fn t0(&self) -> Complex64 {
        random::unit_complex(&mut random::rng_for(self.seed(), "t0"))
    }

    pub fn validate(&self) -> Result<()> {
        self.endgame.validate().map_err(Error::Input)?;
        self.solve.descent.validate().map_err(Error::Input)?;
        if !(self.tol > 0.0 && self.cluster_radius > 0.0) {
            return Err(Error::Input("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Critical equations of `h` on `x`: Lagrange rows for a complete
/// intersection, partials of the pullback for a parametrized variety.
pub fn crit_system(x: &VarietySpec, h: &Polynomial) -> Result<(PolySystem, FamilyChart, Vec<usize>)> {
    if x.uses_parametrization() {
        let p = x.parametrization.clone().expect("parametrized");
        return Ok((pullback_objective(x, h)?, FamilyChart::Parametrized(p), Vec::new()));
    }
    let k = x.ideal.len();
    let chart = FamilyChart::Lagrange {
        ambient: x.ambient_dim(),
        multipliers: k,
    };
    Ok((build_lagrange_system(x, h)?, chart, (0..k).collect()))
}

fn variety_dim(x: &VarietySpec) -> usize {
    match &x.parametrization {
        Some(p) if x.uses_parametrization() => p.params.len(),
        _ => x.ambient_dim() - x.codim,
    }
}

/// Everything computed on the way to `lim Crit(f_t)`.
#[derive(Clone, Debug)]
pub struct LimitRun {
    pub t0: Complex64,
    pub generic: SolveReport,
    /// `|Crit(f_t0|X_reg)|`, in ambient points.
    pub generic_count: usize,
    pub paths: Vec<PathOutcome>,
    /// Maps path coordinates to ambient points.
    pub chart: FamilyChart,
    pub limit: PointSet,
    pub infinity_count: usize,
    pub failure_count: usize,
    /// Shrinking the cluster radius tenfold changes the limit.
    pub ambiguous: bool,
}

impl LimitRun {
    /// `generic_count == |limit| + infinity_count + failure_count`.
    pub fn is_conserved(&self) -> bool {
        self.generic_count == self.limit.cardinality() + self.infinity_count + self.failure_count
    }
}

/// `lim_{t -> 0} Crit(f_t|X_reg)`: solve at a random `t0`, follow every
/// critical point along the segment to 0, cluster the endpoints.
pub fn limit_crit(x: &VarietySpec, obj: &ObjectiveSpec, cfg: &LimitConfig) -> Result<LimitRun> {
    cfg.validate()?;
    let fam = build_family(x, obj)?;
    let t0 = cfg.t0();
    let generic = solve_generic(&fam, t0, &cfg.solve)?;
    let fiber = fam.chart.fiber() as usize;
    let h = FamilyHomotopy::new(&fam.system, t0, fam.chart.primary());
    let starts: Vec<Vec<Complex64>> = generic.solutions.iter().map(|s| s.point.clone()).collect();
    let paths = run_paths(&h, &starts, &cfg.tracker, &cfg.endgame, cfg.solve.threads)?;

    let failed = paths.iter().filter(|o| o.status == PathStatus::TrackFailure).count();
    if failed as f64 > cfg.solve.failure_budget * paths.len() as f64 {
        return Err(Error::PathFailureBudget {
            failed,
            total: paths.len(),
        });
    }
    let at_zero = specialize_t(&fam, Complex64::default());
    let endpoints: Vec<(Vec<Complex64>, usize)> = paths
        .iter()
        .filter(|o| o.status == PathStatus::Finite)
        .filter_map(|o| o.endpoint.as_ref().map(|e| (o, e)))
        .map(|(o, e)| {
            let z = if o.winding_number == Some(1) && !o.multiplier_divergent {
                polish(&at_zero, e).unwrap_or_else(|| e.clone())
            } else {
                e.clone()
            };
            (fam.chart.ambient_point(&z), 1)
        })
        .collect();
    let clustering = cluster_weighted(&endpoints, cfg.cluster_radius, |_| None)?;
    let limit = if fiber > 1 {
        divide(&clustering.set, fiber)
            .ok_or_else(|| Error::Genericity(format!("limit multiplicities are not multiples of the fiber {fiber}")))?
    } else {
        clustering.set
    };
    let infinity = paths.iter().filter(|o| o.status == PathStatus::AtInfinity).count();
    Ok(LimitRun {
        t0,
        generic_count: generic.solutions.len() / fiber,
        generic,
        infinity_count: infinity / fiber,
        failure_count: failed.div_ceil(fiber),
        paths,
        chart: fam.chart,
        limit,
        ambiguous: clustering.ambiguity.is_some(),
    })
}

/// Newton at `t = 0` from a nonsingular endgame estimate, kept only if it
/// stays close.
fn polish(at_zero: &PolySystem, e: &[Complex64]) -> Option<Vec<Complex64>> {
    let (z, res) = newton_refine(at_zero, e, 8).ok()?;
    (res < 1e-10 && linalg::distance(&z, e) < 1e-6 * (1.0 + linalg::max_norm(e))).then_some(z)
}

/// Corollary-style count of critical points lost to infinity as `t -> 0`.
pub fn count_points_at_infinity(x: &VarietySpec, obj: &ObjectiveSpec, cfg: &LimitConfig) -> Result<usize> {
    Ok(limit_crit(x, obj, cfg)?.infinity_count)
}

/// Random choices and tolerances behind a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub t0: [f64; 2],
    pub gamma: [f64; 2],
    pub g: String,
    pub tol: f64,
    pub cluster_radius: f64,
    /// Smallest distance between two limit atoms.
    pub nearest_separation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub lhs_limit: PointSet,
    pub generic_count: usize,
    pub strata_reports: Vec<StratumReport>,
    /// `sum n_i Crit(g|X_i)`.
    pub rhs: PointSet,
    pub infinity_count: usize,
    pub failure_count: usize,
    pub theorem_verified: bool,
    pub issues: Vec<Issue>,
    pub provenance: Provenance,
}

fn provenance(x: &VarietySpec, obj: &ObjectiveSpec, run: &LimitRun, cfg: &LimitConfig) -> Provenance {
    let gamma = gamma_for(cfg.seed());
    Provenance {
        seed: cfg.seed(),
        t0: [run.t0.re, run.t0.im],
        gamma: [gamma.re, gamma.im],
        g: obj.g.to_expr_string(&x.vars),
        tol: cfg.tol,
        cluster_radius: cfg.cluster_radius,
        nearest_separation: run.limit.min_separation(),
    }
}

/// Both sides of the identity and the verdict. A failed identity is a report
/// outcome; only solver faults are errors.
pub fn verify_main_theorem(
    x: &VarietySpec,
    obj: &ObjectiveSpec,
    strata: &[StratumSpec],
    cfg: &LimitConfig,
) -> Result<LimitReport> {
    verify_run(&limit_crit(x, obj, cfg)?, x, obj, strata, cfg)
}

/// The verdict for an existing limit computation.
pub fn verify_run(
    run: &LimitRun,
    x: &VarietySpec,
    obj: &ObjectiveSpec,
    strata: &[StratumSpec],
    cfg: &LimitConfig,
) -> Result<LimitReport> {
    let prov = provenance(x, obj, run, cfg);
    let mut issues = Vec::new();
    if run.ambiguous {
        issues.push(Issue::ClusterAmbiguity);
    }
    if strata.is_empty() {
        issues.push(Issue::NoStrata);
    }
    let crit = strata_crit(strata, &obj.g, cfg)?;
    let (reports, more) = infer_multiplicities(&run.limit, strata, &crit, cfg.tol);
    issues.extend(more);
    let rhs = weighted_sum(&reports, cfg.cluster_radius)?;
    let equal = multiset_equal(&run.limit, &rhs, cfg.tol)?;
    Ok(LimitReport {
        theorem_verified: issues.is_empty() && equal && reports.iter().all(|r| r.n.is_some()),
        lhs_limit: run.limit.clone(),
        generic_count: run.generic_count,
        strata_reports: reports,
        rhs,
        infinity_count: run.infinity_count,
        failure_count: run.failure_count,
        issues,
        provenance: prov,
    })
}

/// User-supplied Euler characteristic data for the generic count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EulerInput {
    /// `chi(Eu_X|U)` itself.
    Restricted { chi: i64 },
    /// `chi(X)` of a smooth curve; the points of `X` on the level set
    /// `{f - g = c}` are counted here and removed.
    SmoothCurve { chi: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericCount {
    pub count: usize,
    /// `(-1)^dim X * chi(Eu_X|U)` when Euler data was given.
    pub expected: Option<i64>,
    /// Points of `X` on the level set, when counted.
    pub level_points: Option<usize>,
    pub agrees: Option<bool>,
}

/// `|Crit((f - g)|X_reg)|` for the pencil's `g`, optionally compared with the
/// topological count from Euler data.
pub fn generic_crit_count(
    x: &VarietySpec,
    obj: &ObjectiveSpec,
    euler: Option<EulerInput>,
    cfg: &LimitConfig,
) -> Result<GenericCount> {
    let fam = build_family(x, obj)?;
    let report = solve_generic(&fam, Complex64::new(1.0, 0.0), &cfg.solve)?;
    let count = report.solutions.len() / fam.chart.fiber() as usize;
    let sign = if variety_dim(x).is_multiple_of(2) { 1 } else { -1 };
    let (expected, level_points) = match euler {
        None => (None, None),
        Some(EulerInput::Restricted { chi }) => (Some(sign * chi), None),
        Some(EulerInput::SmoothCurve { chi }) => {
            let k = level_points(x, obj, cfg)?;
            (Some(sign * (chi - k as i64)), Some(k))
        }
    };
    Ok(GenericCount {
        count,
        expected,
        level_points,
        agrees: expected.map(|e| e == count as i64),
    })
}

/// `|X ∩ {f - g = c}|` for a generic `c` on a curve.
fn level_points(x: &VarietySpec, obj: &ObjectiveSpec, cfg: &LimitConfig) -> Result<usize> {
    if variety_dim(x) != 1 {
        return Err(Error::Input("the level-set count needs a curve".into()));
    }
    let c = random::generic_complex(&mut random::rng_for(cfg.seed(), "level"));
    let n = x.ambient_dim();
    let level = &(&obj.f - &obj.g) - &Polynomial::constant(n, c);
    let report = if x.uses_parametrization() {
        let p = x.parametrization.clone().expect("parametrized");
        let sys = PolySystem::new(p.params.clone(), 1, vec![level.compose(&p.map)])?;
        let fiber = p.fiber as usize;
        let r = solve_system(&sys, &FamilyChart::Parametrized(p), &[], &cfg.solve)?;
        return Ok(r.solutions.len() / fiber);
    } else {
        let mut eqs = x.ideal.clone();
        eqs.push(level);
        let sys = PolySystem::new(x.vars.clone(), n, eqs)?;
        let chart = FamilyChart::Lagrange {
            ambient: n,
            multipliers: 0,
        };
        solve_system(&sys, &chart, &(0..x.ideal.len()).collect::<Vec<_>>(), &cfg.solve)?
    };
    Ok(report.solutions.len())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdDegree {
    pub degree: usize,
    /// Count for each independent data draw.
    pub draws: Vec<usize>,
}

/// Number of critical points of the squared distance to random complex data
/// on `X_reg`. Two independent draws must agree.
pub fn ed_degree(x: &VarietySpec, cfg: &LimitConfig) -> Result<EdDegree> {
    let n = x.ambient_dim();
    let mut draws = Vec::new();
    for k in 0..2 {
        let u = random::generic_vector(&mut random::rng_for(cfg.seed(), &format!("ed-data-{k}")), n);
        let d = build_ed_objective(&x.vars, &u)?;
        let (sys, chart, rows) = crit_system(x, &d)?;
        let solve = SolveConfig {
            seed: cfg.seed().wrapping_add(k),
            ..cfg.solve.clone()
        };
        let r = solve_system(&sys, &chart, &rows, &solve)?;
        draws.push(r.solutions.len() / chart.fiber() as usize);
    }
    if draws[0] != draws[1] {
        return Err(Error::Genericity(format!(
            "distance-function critical counts differ across data draws: {} vs {}",
            draws[0], draws[1]
        )));
    }
    Ok(EdDegree { degree: draws[0], draws })
}

/// The pencil for nearest points to `u`: `f = d_u`, `g = 2 sum eps_i x_i`
/// with random `eps`, so that `f - t g` is the distance to `u + t eps` up to a
/// constant.
pub fn ed_objective(x: &VarietySpec, u: &[Complex64], cfg: &LimitConfig) -> Result<ObjectiveSpec> {
    let eps = random::generic_vector(&mut random::rng_for(cfg.seed(), "ed-eps"), x.ambient_dim());
    let mut obj = ObjectiveSpec::new(build_ed_objective(&x.vars, u)?, ed_perturbation(&eps))?;
    obj.seed = Some(cfg.seed());
    Ok(obj)
}

/// Limit of the critical points of the distance to `u + t eps`, checked
/// against the strata.
pub fn ed_limit(x: &VarietySpec, u: &[Complex64], strata: &[StratumSpec], cfg: &LimitConfig) -> Result<LimitReport> {
    let obj = ed_objective(x, u, cfg)?;
    verify_main_theorem(x, &obj, strata, cfg)
}

/// Serializable view of a point.
pub fn point_pairs(x: &[Complex64]) -> Vec<[f64; 2]> {
    pairs(x)
}
