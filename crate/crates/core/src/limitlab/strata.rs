//! Strata, critical points of `g` on them, and the multiplicities that make
//! the limit a combination of those critical sets.

use num_complex::Complex64;
use serde::Serialize;

use super::{crit_system, LimitConfig};
use crate::critsys::VarietySpec;
use crate::error::{Error, Result};
use crate::pointset::{cluster_weighted, PointSet};
use crate::poly::Polynomial;
use crate::tracker::solve_system;

/// A stratum given by the ideal of its closure minus the closures of smaller
/// strata. `variety` is what gets solved; it usually has `membership` as its
/// ideal but may use a parametrization instead.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumSpec {
    pub name: String,
    pub membership: Vec<Polynomial>,
    pub exclusions: Vec<Vec<Polynomial>>,
    pub variety: VarietySpec,
}

fn max_abs(ideal: &[Polynomial], x: &[Complex64]) -> f64 {
    ideal
        .iter()
        .map(|q| q.evaluate(x).map_or(f64::INFINITY, |v| v.norm()))
        .fold(0.0, f64::max)
}

impl StratumSpec {
    /// Closure of the stratum itself, as a complete intersection.
    pub fn new(name: &str, variety: VarietySpec, exclusions: Vec<Vec<Polynomial>>) -> Self {
        Self {
            name: name.to_string(),
            membership: variety.ideal.clone(),
            exclusions,
            variety,
        }
    }

    /// Every membership generator vanishes to `tol`, and each excluded ideal
    /// has a generator exceeding `tol`.
    pub fn contains(&self, x: &[Complex64], tol: f64) -> bool {
        max_abs(&self.membership, x) < tol && self.exclusions.iter().all(|ideal| max_abs(ideal, x) > tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StratumReport {
    pub stratum: String,
    pub crit_g: PointSet,
    /// `None` when undetermined.
    pub n: Option<usize>,
    /// No critical points of `g`, so `n` does not enter the identity and is
    /// reported as 0.
    pub vacuous: bool,
}

/// Critical points of `g` on each stratum, in ambient coordinates. Points
/// that fall into an excluded smaller stratum are dropped.
pub fn strata_crit(strata: &[StratumSpec], g: &Polynomial, cfg: &LimitConfig) -> Result<Vec<StratumReport>> {
    strata.iter().map(|s| stratum_crit(s, g, cfg)).collect()
}

fn stratum_crit(s: &StratumSpec, g: &Polynomial, cfg: &LimitConfig) -> Result<StratumReport> {
    let unsolvable = |e: Error| Error::UnsolvableStratum {
        name: s.name.clone(),
        reason: e.to_string(),
    };
    let (system, chart, rows) = crit_system(&s.variety, g).map_err(unsolvable)?;
    let report = solve_system(&system, &chart, &rows, &cfg.solve).map_err(unsolvable)?;
    let fiber = chart.fiber() as usize;
    let points: Vec<(Vec<Complex64>, usize)> = report
        .solutions
        .iter()
        .filter(|sol| s.contains(&sol.ambient, cfg.tol))
        .map(|sol| (sol.ambient.clone(), 1))
        .collect();
    let mut crit_g = cluster_weighted(&points, cfg.cluster_radius, |_| None)?.set;
    if fiber > 1 {
        crit_g = divide(&crit_g, fiber).ok_or_else(|| Error::UnsolvableStratum {
            name: s.name.clone(),
            reason: format!("solution count is not a multiple of the fiber {fiber}"),
        })?;
    }
    Ok(StratumReport {
        stratum: s.name.clone(),
        vacuous: crit_g.is_empty(),
        crit_g,
        n: None,
    })
}

/// Every multiplicity divided by `k`, when all are divisible.
pub(crate) fn divide(set: &PointSet, k: usize) -> Option<PointSet> {
    let atoms = set
        .atoms()
        .iter()
        .map(|a| {
            (a.multiplicity % k == 0).then(|| crate::pointset::Atom {
                point: a.point.clone(),
                multiplicity: a.multiplicity / k,
            })
        })
        .collect::<Option<Vec<_>>>()?;
    PointSet::from_atoms(atoms, set.cluster_radius()).ok()
}

/// Something about the limit that keeps the identity from being checked.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    /// A limit point in no stratum, or in several.
    Membership { point: Vec<[f64; 2]>, strata: Vec<String> },
    /// A limit point on its stratum that is not critical for `g` there.
    Unmatched { point: Vec<[f64; 2]>, stratum: String },
    /// Critical points of `g` on one stratum carry different limit
    /// multiplicities.
    NonConstant { stratum: String, multiplicities: Vec<usize> },
    /// The clustering changes when the radius shrinks tenfold.
    ClusterAmbiguity,
    /// Counts disagree with a supplied Euler characteristic.
    EulerMismatch { expected: i64, found: i64 },
    NoStrata,
}

pub(crate) fn pairs(x: &[Complex64]) -> Vec<[f64; 2]> {
    x.iter().map(|z| [z.re, z.im]).collect()
}

/// Reads off `n_i` as the limit multiplicity sitting on the critical points
/// of `g` on each stratum, and checks that every limit point is accounted
/// for.
pub fn infer_multiplicities(
    lhs: &PointSet,
    strata: &[StratumSpec],
    reports: &[StratumReport],
    tol: f64,
) -> (Vec<StratumReport>, Vec<Issue>) {
    let mut issues = Vec::new();
    for atom in lhs.atoms() {
        let homes: Vec<usize> = (0..strata.len()).filter(|&i| strata[i].contains(&atom.point, tol)).collect();
        if homes.len() != 1 {
            issues.push(Issue::Membership {
                point: pairs(&atom.point),
                strata: homes.iter().map(|&i| strata[i].name.clone()).collect(),
            });
            continue;
        }
        let r = &reports[homes[0]];
        if r.crit_g.multiplicity_at(&atom.point, tol) == 0 {
            issues.push(Issue::Unmatched {
                point: pairs(&atom.point),
                stratum: r.stratum.clone(),
            });
        }
    }
    let mut out = Vec::with_capacity(reports.len());
    for r in reports {
        let mults: Vec<usize> = r.crit_g.atoms().iter().map(|a| lhs.multiplicity_at(&a.point, tol)).collect();
        let n = match mults.first() {
            None => Some(0),
            Some(&m) if mults.iter().all(|&x| x == m) => Some(m),
            Some(_) => {
                issues.push(Issue::NonConstant {
                    stratum: r.stratum.clone(),
                    multiplicities: mults.clone(),
                });
                None
            }
        };
        out.push(StratumReport { n, ..r.clone() });
    }
    (out, issues)
}

/// `sum n_i * Crit(g|X_i)` over strata with determined `n_i`.
pub fn weighted_sum(reports: &[StratumReport], radius: f64) -> Result<PointSet> {
    let mut points = Vec::new();
    for r in reports {
        let n = r.n.unwrap_or(0);
        for a in r.crit_g.atoms() {
            points.push((a.point.clone(), n * a.multiplicity));
        }
    }
    Ok(cluster_weighted(&points, radius, |_| None)?.set)
}
