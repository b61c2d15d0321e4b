//! Problem files: JSON documents naming a variety, a pencil and strata.

use anyhow::{bail, Context, Result};
use critlimit::critsys::{ObjectiveSpec, Parametrization, VarietySpec};
use critlimit::limitlab::{ed_objective, EulerInput, LimitConfig, StratumSpec};
use critlimit::poly::{parse_polynomial, Polynomial, VariableTable};
use critlimit::Complex64;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub variables: Vec<String>,
    #[serde(default)]
    pub ideal: Vec<String>,
    #[serde(default)]
    pub parametrization: Option<ParamFile>,
    /// `f`. Absent in distance mode, where `data` defines it.
    #[serde(default)]
    pub objective: Option<String>,
    /// "random" or an affine-linear expression. Defaults to "random".
    #[serde(default)]
    pub g: Option<String>,
    #[serde(default)]
    pub strata: Vec<StratumFile>,
    /// Data point `u`, one entry per variable: a number or `[re, im]`.
    #[serde(default)]
    pub data: Option<Vec<Scalar>>,
    /// Fixed pencil parameter for `solve`.
    #[serde(default)]
    pub t: Option<Scalar>,
    #[serde(default)]
    pub euler: Option<EulerInput>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub parameters: Vec<String>,
    pub map: Vec<String>,
    #[serde(default = "one")]
    pub fiber: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumFile {
    pub name: String,
    /// Ideal of the stratum closure.
    #[serde(default)]
    pub ideal: Vec<String>,
    /// Ideals of the smaller strata removed from the closure.
    #[serde(default)]
    pub exclude: Vec<Vec<String>>,
    /// Solve through this chart instead of the ideal.
    #[serde(default)]
    pub parametrization: Option<ParamFile>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> Complex64 {
        match self {
            Scalar::Real(x) => Complex64::new(x, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub tol: Option<f64>,
    pub cluster_radius: Option<f64>,
    pub endgame_radius: Option<f64>,
    pub divergence_bound: Option<f64>,
    pub failure_budget: Option<f64>,
}

/// Command-line settings that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub endgame_radius: Option<f64>,
    pub divergence_bound: Option<f64>,
    pub threads: Option<usize>,
    pub multihom: bool,
}

/// A parsed problem ready for the library.
pub struct Problem {
    pub name: String,
    pub description: String,
    pub variety: VarietySpec,
    /// Absent for a bare distance-degree problem.
    pub objective: Option<ObjectiveSpec>,
    pub strata: Vec<StratumSpec>,
    pub data: Option<Vec<Complex64>>,
    pub t: Option<Complex64>,
    pub euler: Option<EulerInput>,
    pub config: LimitConfig,
}

fn parse_all(src: &[String], vars: &VariableTable, what: &str) -> Result<Vec<Polynomial>> {
    src.iter()
        .map(|s| parse_polynomial(s, vars).with_context(|| format!("{what}: `{s}`")))
        .collect()
}

fn parametrization(p: &ParamFile, vars: &VariableTable, what: &str) -> Result<Parametrization> {
    let params = VariableTable::new(&p.parameters).with_context(|| format!("{what}: parameters"))?;
    let map = parse_all(&p.map, &params, what)?;
    if map.len() != vars.len() {
        bail!("{what}: the map has {} coordinates for {} variables", map.len(), vars.len());
    }
    Ok(Parametrization::new(params, map, p.fiber)?)
}

fn variety(ideal: &[Polynomial], param: Option<&ParamFile>, vars: &VariableTable, what: &str) -> Result<VarietySpec> {
    Ok(match param {
        Some(p) => VarietySpec::parametrized(vars.clone(), parametrization(p, vars, what)?)?,
        None if ideal.is_empty() => VarietySpec::ambient(vars.clone()),
        None => VarietySpec::complete_intersection(vars.clone(), ideal.to_vec())?,
    })
}

fn config(file: &ProblemFile, over: &Overrides, seed: u64) -> Result<LimitConfig> {
    let mut cfg = LimitConfig::with_seed(seed);
    let tol = &file.tolerances;
    if let Some(t) = over.tol.or(tol.tol) {
        cfg.tol = t;
    }
    if let Some(r) = tol.cluster_radius {
        cfg.cluster_radius = r;
    }
    if let Some(r) = over.endgame_radius.or(tol.endgame_radius) {
        cfg.endgame.initial_radius = r;
        cfg.solve.descent.initial_radius = r;
        cfg.tracker.s_endgame = r;
        cfg.solve.tracker.s_endgame = r;
    }
    if let Some(b) = over.divergence_bound.or(tol.divergence_bound) {
        cfg.endgame.divergence_bound = b;
        cfg.solve.descent.divergence_bound = b;
        cfg.solve.descent.failure_escape = cfg.solve.descent.failure_escape.min(b);
    }
    if let Some(b) = tol.failure_budget {
        cfg.solve.failure_budget = b;
    }
    cfg.solve.threads = over.threads;
    cfg.solve.multihomogeneous = over.multihom;
    cfg.validate()?;
    Ok(cfg)
}

impl ProblemFile {
    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn resolve(&self, over: &Overrides) -> Result<Problem> {
        let vars = VariableTable::new(&self.variables).context("variables")?;
        let ideal = parse_all(&self.ideal, &vars, "ideal")?;
        let x = variety(&ideal, self.parametrization.as_ref(), &vars, "parametrization")?;
        let Some(seed) = over.seed.or(self.seed) else {
            bail!("a seed is required: give `seed` in the file or --seed");
        };
        let cfg = config(self, over, seed)?;

        let data = match &self.data {
            Some(u) if u.len() != vars.len() => bail!("data has {} entries for {} variables", u.len(), vars.len()),
            Some(u) => Some(u.iter().map(|s| s.value()).collect::<Vec<_>>()),
            None => None,
        };
        let g_src = self.g.as_deref().unwrap_or("random");
        let objective = match (&self.objective, &data) {
            (Some(_), Some(_)) => bail!("give either `objective` or `data`, not both"),
            (None, None) => None,
            (None, Some(u)) => {
                if g_src != "random" {
                    bail!("in distance mode `g` is drawn from the seed; remove the `g` field");
                }
                Some(ed_objective(&x, u, &cfg)?)
            }
            (Some(f), None) => {
                let f = parse_polynomial(f, &vars).with_context(|| format!("objective: `{f}`"))?;
                Some(if g_src == "random" {
                    ObjectiveSpec::with_random_g(f, seed)
                } else {
                    let g = parse_polynomial(g_src, &vars).with_context(|| format!("g: `{g_src}`"))?;
                    ObjectiveSpec::new(f, g)?
                })
            }
        };

        let mut strata = Vec::with_capacity(self.strata.len());
        for s in &self.strata {
            let what = format!("stratum `{}`", s.name);
            let membership = parse_all(&s.ideal, &vars, &what)?;
            let exclusions = s
                .exclude
                .iter()
                .map(|e| parse_all(e, &vars, &what))
                .collect::<Result<Vec<_>>>()?;
            let v = variety(&membership, s.parametrization.as_ref(), &vars, &what)?;
            strata.push(StratumSpec {
                name: s.name.clone(),
                membership,
                exclusions,
                variety: v,
            });
        }
        Ok(Problem {
            name: self.name.clone().unwrap_or_default(),
            description: self.description.clone().unwrap_or_default(),
            variety: x,
            objective,
            strata,
            data,
            t: self.t.map(Scalar::value),
            euler: self.euler,
            config: cfg,
        })
    }

}

impl Problem {
    pub fn objective(&self) -> Result<&ObjectiveSpec> {
        self.objective
            .as_ref()
            .context("this command needs `objective` or `data` in the problem file")
    }
}
