//! Square polynomial systems whose solutions are critical points.
//!
//! For a complete intersection `X = {q_1 = ... = q_k = 0}` the critical points
//! of `h` on the smooth locus are the `x`-parts of solutions of
//!
//! ```text
//! q_j(x) = 0,    dh/dx_i - sum_j lambda_j * dq_j/dx_i = 0
//! ```
//!
//! with the constraint Jacobian of full rank `k`. Varieties that are not
//! complete intersections are handled through a parametrization `phi`, where
//! the critical equations are the partials of `h o phi`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::poly::{PolySystem, Polynomial, VariableTable};
use crate::random;

/// Polynomial map from a parameter space onto (a dense subset of) a variety.
#[derive(Clone, Debug, PartialEq)]
pub struct Parametrization {
    pub params: VariableTable,
    /// One polynomial per ambient coordinate, over `params`.
    pub map: Vec<Polynomial>,
    /// Generic number of parameter points over an image point.
    pub fiber: u32,
}

impl Parametrization {
    pub fn new(params: VariableTable, map: Vec<Polynomial>, fiber: u32) -> Result<Self> {
        if fiber == 0 {
            return Err(Error::Input("fiber cardinality must be positive".into()));
        }
        if let Some(p) = map.iter().find(|p| p.nvars() != params.len()) {
            return Err(Error::Dimension {
                expected: params.len(),
                found: p.nvars(),
            });
        }
        Ok(Self { params, map, fiber })
    }

    pub fn apply(&self, s: &[Complex64]) -> Vec<Complex64> {
        self.map.iter().map(|p| p.eval_unchecked(s)).collect()
    }

    /// Jacobian of the map at `s`, ambient rows by parameter columns.
    pub fn differential(&self, s: &[Complex64]) -> CMatrix {
        let m = self.params.len();
        CMatrix::from_fn(self.map.len(), m, |i, j| {
            self.map[i].differentiate(j).eval_unchecked(s)
        })
    }
}

/// An affine variety `X` in `C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarietySpec {
    pub vars: VariableTable,
    pub ideal: Vec<Polynomial>,
    pub codim: usize,
    pub parametrization: Option<Parametrization>,
}

impl VarietySpec {
    /// The whole ambient space.
    pub fn ambient(vars: VariableTable) -> Self {
        Self {
            vars,
            ideal: Vec::new(),
            codim: 0,
            parametrization: None,
        }
    }

    pub fn complete_intersection(vars: VariableTable, ideal: Vec<Polynomial>) -> Result<Self> {
        let codim = ideal.len();
        let spec = Self {
            vars,
            ideal,
            codim,
            parametrization: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn parametrized(vars: VariableTable, param: Parametrization) -> Result<Self> {
        let spec = Self {
            vars,
            ideal: Vec::new(),
            codim: 0,
            parametrization: Some(param),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ambient_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ambient_dim();
        if let Some(p) = self.ideal.iter().find(|p| p.nvars() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: p.nvars(),
            });
        }
        match &self.parametrization {
            Some(param) if param.map.len() != n => Err(Error::Dimension {
                expected: n,
                found: param.map.len(),
            }),
            None if self.ideal.len() != self.codim => Err(Error::CodimMismatch {
                equations: self.ideal.len(),
                codim: self.codim,
            }),
            _ => Ok(()),
        }
    }

    /// True when critical points are computed through the parametrization.
    pub fn uses_parametrization(&self) -> bool {
        self.ideal.is_empty() && self.parametrization.is_some()
    }

    /// Ideal generators evaluated at `x`.
    pub fn ideal_residual(&self, x: &[Complex64]) -> f64 {
        self.ideal
            .iter()
            .map(|q| q.eval_unchecked(x).norm())
            .fold(0.0, f64::max)
    }

    /// Constraint Jacobian at `x` (one row per ideal generator).
    pub fn constraint_jacobian(&self, x: &[Complex64]) -> CMatrix {
        let n = self.ambient_dim();
        CMatrix::from_fn(self.ideal.len(), n, |i, j| {
            self.ideal[i].differentiate(j).eval_unchecked(x)
        })
    }

    /// Whether `x` lies in the smooth locus as seen by the defining
    /// equations: the constraint Jacobian has full rank `codim`.
    pub fn is_regular_point(&self, x: &[Complex64], rel_tol: f64) -> bool {
        if self.ideal.is_empty() {
            return true;
        }
        linalg::rank(&self.constraint_jacobian(x), rel_tol) == self.ideal.len()
    }
}

/// The pencil `f - t*g`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveSpec {
    pub f: Polynomial,
    pub g: Polynomial,
    /// Seed used to draw `g`, when it was drawn.
    pub seed: Option<u64>,
}

impl ObjectiveSpec {
    pub fn new(f: Polynomial, g: Polynomial) -> Result<Self> {
        if f.nvars() != g.nvars() {
            return Err(Error::Dimension {
                expected: f.nvars(),
                found: g.nvars(),
            });
        }
        match g.total_degree() {
            Some(1) => {}
            Some(d) if d > 1 => {
                return Err(Error::Input(format!("g must be affine-linear, found degree {d}")))
            }
            _ => return Err(Error::Input("g must have a nonzero linear part".into())),
        }
        Ok(Self { f, g, seed: None })
    }

    /// `g` drawn as a generic linear form from `seed`.
    pub fn with_random_g(f: Polynomial, seed: u64) -> Self {
        let n = f.nvars();
        let mut rng = random::rng_for(seed, "objective-g");
        let g = random_linear_form(&mut rng, n);
        Self {
            f,
            g,
            seed: Some(seed),
        }
    }
}

/// Linear form with generic complex coefficients and no constant term.
pub fn random_linear_form<R: Rng>(rng: &mut R, nvars: usize) -> Polynomial {
    let mut g = Polynomial::zero(nvars);
    for v in 0..nvars {
        let c = random::generic_complex(rng);
        g = &g + &Polynomial::var(nvars, v).scale(c);
    }
    g
}

/// How solutions of a critical family map to ambient points.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyChart {
    /// Unknowns are `(x, lambda)`; the ambient point is the leading block.
    Lagrange { ambient: usize, multipliers: usize },
    /// Unknowns are parameters of `phi`.
    Parametrized(Parametrization),
}

impl FamilyChart {
    /// Ambient point of a solution.
    pub fn ambient_point(&self, z: &[Complex64]) -> Vec<Complex64> {
        match self {
            FamilyChart::Lagrange { ambient, .. } => z[..*ambient].to_vec(),
            FamilyChart::Parametrized(p) => p.apply(z),
        }
    }

    /// Number of leading unknowns that must stay bounded along a path; the
    /// remaining ones are Lagrange multipliers.
    pub fn primary(&self) -> usize {
        match self {
            FamilyChart::Lagrange { ambient, .. } => *ambient,
            FamilyChart::Parametrized(p) => p.params.len(),
        }
    }

    pub fn fiber(&self) -> u32 {
        match self {
            FamilyChart::Lagrange { .. } => 1,
            FamilyChart::Parametrized(p) => p.fiber,
        }
    }
}

/// Square system in the unknowns with the pencil parameter `t` as the last
/// variable of the table.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalFamily {
    pub system: PolySystem,
    pub chart: FamilyChart,
    /// Indices of the ideal generators inside `system`.
    pub constraint_rows: Vec<usize>,
}

impl CriticalFamily {
    pub fn unknown_count(&self) -> usize {
        self.system.unknowns()
    }

    /// Index of `t` in the family's table.
    pub fn t_index(&self) -> usize {
        self.system.unknowns()
    }
}

fn multiplier_table(vars: &VariableTable, k: usize) -> VariableTable {
    let mut table = vars.clone();
    for j in 1..=k {
        table.push_fresh(&format!("lambda{j}"));
    }
    table
}

/// Lagrange rows for `h` and `ideal`, all already embedded in a table whose
/// first `n` variables are `x` and next `k` are the multipliers.
fn lagrange_rows(h: &Polynomial, ideal: &[Polynomial], n: usize, k: usize) -> Vec<Polynomial> {
    let nvars = h.nvars();
    let mut rows: Vec<Polynomial> = ideal.to_vec();
    for i in 0..n {
        let mut row = h.differentiate(i);
        for (j, q) in ideal.iter().enumerate() {
            let lambda = Polynomial::var(nvars, n + j);
            row = &row - &(&lambda * &q.differentiate(i));
        }
        rows.push(row);
    }
    debug_assert_eq!(rows.len(), n + k);
    rows
}

/// Lagrange system for `h` on the complete intersection `x`, in the unknowns
/// `(x, lambda)`.
pub fn build_lagrange_system(x: &VarietySpec, h: &Polynomial) -> Result<PolySystem> {
    if x.ideal.len() != x.codim {
        return Err(Error::CodimMismatch {
            equations: x.ideal.len(),
            codim: x.codim,
        });
    }
    x.validate()?;
    let n = x.ambient_dim();
    if h.nvars() != n {
        return Err(Error::Dimension {
            expected: n,
            found: h.nvars(),
        });
    }
    let k = x.ideal.len();
    let vars = multiplier_table(&x.vars, k);
    let total = n + k;
    let ideal: Vec<Polynomial> = x.ideal.iter().map(|q| q.extend_vars(total)).collect();
    let rows = lagrange_rows(&h.extend_vars(total), &ideal, n, k);
    PolySystem::new(vars, total, rows)
}

/// Critical equations of `h o phi` in the parameters of `phi`.
pub fn pullback_objective(x: &VarietySpec, h: &Polynomial) -> Result<PolySystem> {
    let param = x.parametrization.as_ref().ok_or(Error::MissingParametrization)?;
    if h.nvars() != x.ambient_dim() {
        return Err(Error::Dimension {
            expected: x.ambient_dim(),
            found: h.nvars(),
        });
    }
    let pulled = h.compose(&param.map);
    let m = param.params.len();
    let rows = (0..m).map(|j| pulled.differentiate(j)).collect();
    PolySystem::new(param.params.clone(), m, rows)
}

/// The family `Crit((f - t g)|X_reg)` with `t` as a parameter.
pub fn build_family(x: &VarietySpec, obj: &ObjectiveSpec) -> Result<CriticalFamily> {
    x.validate()?;
    let n = x.ambient_dim();
    if obj.f.nvars() != n {
        return Err(Error::Dimension {
            expected: n,
            found: obj.f.nvars(),
        });
    }
    if x.uses_parametrization() {
        let param = x.parametrization.clone().expect("checked above");
        let m = param.params.len();
        let mut vars = param.params.clone();
        vars.push_fresh("t");
        let t = Polynomial::var(m + 1, m);
        let f = obj.f.compose(&param.map).extend_vars(m + 1);
        let g = obj.g.compose(&param.map).extend_vars(m + 1);
        let h = &f - &(&t * &g);
        let rows = (0..m).map(|j| h.differentiate(j)).collect();
        return Ok(CriticalFamily {
            system: PolySystem::new(vars, m, rows)?,
            chart: FamilyChart::Parametrized(param),
            constraint_rows: Vec::new(),
        });
    }
    if x.ideal.len() != x.codim {
        return Err(Error::CodimMismatch {
            equations: x.ideal.len(),
            codim: x.codim,
        });
    }
    let k = x.ideal.len();
    let mut vars = multiplier_table(&x.vars, k);
    vars.push_fresh("t");
    let total = n + k + 1;
    let t = Polynomial::var(total, n + k);
    let h = &obj.f.extend_vars(total) - &(&t * &obj.g.extend_vars(total));
    let ideal: Vec<Polynomial> = x.ideal.iter().map(|q| q.extend_vars(total)).collect();
    let rows = lagrange_rows(&h, &ideal, n, k);
    Ok(CriticalFamily {
        system: PolySystem::new(vars, n + k, rows)?,
        chart: FamilyChart::Lagrange {
            ambient: n,
            multipliers: k,
        },
        constraint_rows: (0..k).collect(),
    })
}

/// `t := tau`, removing `t` from the table.
pub fn specialize_t(fam: &CriticalFamily, tau: Complex64) -> PolySystem {
    fam.system.specialize(fam.t_index(), tau)
}

/// Squared distance `sum (x_i - u_i)^2` to the data point `u`.
pub fn build_ed_objective(vars: &VariableTable, u: &[Complex64]) -> Result<Polynomial> {
    let n = vars.len();
    if u.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: u.len(),
        });
    }
    let mut d = Polynomial::zero(n);
    for (i, &ui) in u.iter().enumerate() {
        let diff = &Polynomial::var(n, i) - &Polynomial::constant(n, ui);
        d = &d + &(&diff * &diff);
    }
    Ok(d)
}

/// The linear function `2 * sum eps_i x_i` by which moving the data to
/// `u + t*eps` perturbs the squared distance.
pub fn ed_perturbation(eps: &[Complex64]) -> Polynomial {
    let n = eps.len();
    let mut g = Polynomial::zero(n);
    for (i, &e) in eps.iter().enumerate() {
        g = &g + &Polynomial::var(n, i).scale(e * 2.0);
    }
    g
}
