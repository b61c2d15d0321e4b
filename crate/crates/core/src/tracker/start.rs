use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{PolySystem, Polynomial};
use crate::random;

/// Refuse start systems with more paths than this.
pub const MAX_PATHS: usize = 20_000_000;

type LinearForm = Vec<(usize, Complex64)>;

/// Equations that are products of sparse linear forms.
#[derive(Clone, Debug)]
pub struct LinearProductSystem {
    nvars: usize,
    equations: Vec<Vec<LinearForm>>,
}

impl LinearProductSystem {
    pub fn eval_jacobian(&self, z: &[Complex64], values: &mut [Complex64], jac: &mut [Complex64]) {
        let n = self.nvars;
        jac[..self.equations.len() * n].fill(Complex64::default());
        let mut vals: Vec<Complex64> = Vec::new();
        let mut prefix: Vec<Complex64> = Vec::new();
        for (i, factors) in self.equations.iter().enumerate() {
            vals.clear();
            vals.extend(
                factors
                    .iter()
                    .map(|f| f.iter().map(|&(v, c)| c * z[v]).sum::<Complex64>()),
            );
            prefix.clear();
            let mut acc = Complex64::new(1.0, 0.0);
            for v in &vals {
                prefix.push(acc);
                acc *= v;
            }
            values[i] = acc;
            let mut suffix = Complex64::new(1.0, 0.0);
            for l in (0..factors.len()).rev() {
                let others = prefix[l] * suffix;
                for &(v, c) in &factors[l] {
                    jac[i * n + v] += others * c;
                }
                suffix *= vals[l];
            }
        }
    }
}

/// A start system `G` whose equations are products of linear forms in the
/// homogeneous coordinates of each variable group, with all its solutions.
#[derive(Clone, Debug)]
pub struct StartSystem {
    groups: Vec<Vec<usize>>,
    multidegrees: Vec<Vec<u32>>,
    products: LinearProductSystem,
    solutions: Vec<Vec<Complex64>>,
    /// Factors are roots of unity, so the expanded form is `z_i^d - 1`.
    total_degree: bool,
}

fn check_square(target: &PolySystem) -> Result<()> {
    if !target.is_square() || target.num_params() != 0 {
        return Err(Error::NotSquare {
            equations: target.len(),
            unknowns: target.unknowns(),
        });
    }
    Ok(())
}

fn check_degrees(target: &PolySystem) -> Result<()> {
    for (i, eq) in target.equations().iter().enumerate() {
        if eq.is_zero() {
            return Err(Error::ZeroEquation { index: i });
        }
        if eq.is_constant() {
            return Err(Error::Input(format!(
                "equation {i} is a nonzero constant, so the system is inconsistent"
            )));
        }
    }
    Ok(())
}

impl StartSystem {
    /// `{z_i^{d_i} - 1}`: each equation factors as `prod_k (z_i - w^k)` over
    /// the `d_i`-th roots of unity `w^k`.
    pub fn total_degree(target: &PolySystem) -> Result<Self> {
        check_square(target)?;
        check_degrees(target)?;
        let n = target.unknowns();
        let degrees = target.degrees();
        let count = path_count(degrees.iter().map(|&d| d as usize))?;
        let roots: Vec<Vec<Complex64>> = degrees
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / d as f64))
                    .collect()
            })
            .collect();
        let equations = (0..n)
            .map(|i| {
                roots[i]
                    .iter()
                    .map(|&w| vec![(i, Complex64::new(1.0, 0.0)), (n, -w)])
                    .collect()
            })
            .collect();
        let mut solutions = Vec::with_capacity(count);
        let mut idx = vec![0usize; n];
        loop {
            solutions.push((0..n).map(|i| roots[i][idx[i]]).collect());
            // odometer over root indices, last equation fastest
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(Self {
                        groups: vec![(0..n).collect()],
                        multidegrees: degrees.iter().map(|&d| vec![d]).collect(),
                        products: LinearProductSystem {
                            nvars: n + 1,
                            equations,
                        },
                        solutions,
                        total_degree: true,
                    });
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < degrees[i] as usize {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    /// Linear-product start system respecting the multidegrees of `target`
    /// with respect to a partition of the unknowns into `groups`.
    pub fn multihomogeneous<R: Rng>(target: &PolySystem, groups: &[Vec<usize>], rng: &mut R) -> Result<Self> {
        check_square(target)?;
        check_degrees(target)?;
        let n = target.unknowns();
        let m = groups.len();
        let mut seen = vec![false; n];
        for &v in groups.iter().flatten() {
            if v >= n || seen[v] {
                return Err(Error::Input("variable groups must partition the unknowns".into()));
            }
            seen[v] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Input("variable groups must partition the unknowns".into()));
        }
        let multidegrees: Vec<Vec<u32>> = target
            .equations()
            .iter()
            .map(|eq| groups.iter().map(|g| eq.degree_in_group(g)).collect())
            .collect();
        // factors[i][g][l] over the group's variables and its homogenizing coordinate
        let factors: Vec<Vec<Vec<LinearForm>>> = multidegrees
            .iter()
            .map(|degs| {
                degs.iter()
                    .enumerate()
                    .map(|(g, &d)| {
                        (0..d)
                            .map(|_| {
                                groups[g]
                                    .iter()
                                    .copied()
                                    .chain(std::iter::once(n + g))
                                    .map(|v| (v, random::generic_complex(rng)))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let assignments = enumerate_assignments(&multidegrees, groups)?;
        let mut solutions = Vec::with_capacity(assignments.len());
        for choice in &assignments {
            let mut x = vec![Complex64::default(); n];
            for (g, vars) in groups.iter().enumerate() {
                let k = vars.len();
                let mut a = vec![Complex64::default(); k * k];
                let mut b = vec![Complex64::default(); k];
                let rows = choice.iter().enumerate().filter(|(_, &(cg, _))| cg == g);
                for (r, (i, &(_, l))) in rows.enumerate() {
                    let form = &factors[i][g][l];
                    for (col, &(_, c)) in form[..k].iter().enumerate() {
                        a[r * k + col] = c;
                    }
                    b[r] = -form[k].1;
                }
                if !linalg::lu_solve_in_place(&mut a, k, &mut b) {
                    return Err(Error::Genericity("singular linear-product start system".into()));
                }
                for (col, &v) in vars.iter().enumerate() {
                    x[v] = b[col];
                }
            }
            solutions.push(x);
        }
        let equations = factors
            .into_iter()
            .map(|per_group| per_group.into_iter().flatten().collect())
            .collect();
        Ok(Self {
            groups: groups.to_vec(),
            multidegrees,
            products: LinearProductSystem {
                nvars: n + m,
                equations,
            },
            solutions,
            total_degree: false,
        })
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn multidegrees(&self) -> &[Vec<u32>] {
        &self.multidegrees
    }

    pub fn products(&self) -> &LinearProductSystem {
        &self.products
    }

    /// Affine start solutions.
    pub fn solutions(&self) -> &[Vec<Complex64>] {
        &self.solutions
    }

    pub fn path_count(&self) -> usize {
        self.solutions.len()
    }

    /// Expanded affine form, over the same table as `target`.
    pub fn to_poly_system(&self, target: &PolySystem) -> PolySystem {
        let n = target.unknowns();
        let m = self.groups.len();
        let nv = target.vars().len();
        let linear = |form: &LinearForm| {
            let mut p = Polynomial::zero(nv);
            for &(v, c) in form {
                let term = if v < n {
                    Polynomial::var(nv, v)
                } else {
                    debug_assert!(v < n + m);
                    Polynomial::one(nv)
                };
                p = &p + &term.scale(c);
            }
            p
        };
        if self.total_degree {
            let eqs = (0..n)
                .map(|i| {
                    let d = self.multidegrees[i][0];
                    &Polynomial::var(nv, i).pow(d) - &Polynomial::one(nv)
                })
                .collect();
            return PolySystem::new(target.vars().clone(), n, eqs).expect("same table as target");
        }
        let eqs = self
            .products
            .equations
            .iter()
            .map(|factors| factors.iter().fold(Polynomial::one(nv), |acc, f| &acc * &linear(f)))
            .collect();
        PolySystem::new(target.vars().clone(), n, eqs).expect("same table as target")
    }
}

fn path_count(factors: impl Iterator<Item = usize>) -> Result<usize> {
    let mut total: usize = 1;
    for d in factors {
        total = total.saturating_mul(d);
    }
    if total > MAX_PATHS {
        return Err(Error::Input(format!(
            "start system would need {total} paths (limit {MAX_PATHS})"
        )));
    }
    Ok(total)
}

/// All ways to pick, for each equation, a group `g` with positive degree and
/// one of its linear factors, such that each group receives exactly as many
/// equations as it has variables.
fn enumerate_assignments(multidegrees: &[Vec<u32>], groups: &[Vec<usize>]) -> Result<Vec<Vec<(usize, usize)>>> {
    // cheap upper bound on the count, checked before enumerating
    path_count(multidegrees.iter().map(|d| d.iter().sum::<u32>() as usize))?;
    let mut out = Vec::new();
    let mut remaining: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let mut current = Vec::with_capacity(multidegrees.len());
    fn rec(
        i: usize,
        degs: &[Vec<u32>],
        remaining: &mut [usize],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == degs.len() {
            out.push(current.clone());
            return;
        }
        for g in 0..remaining.len() {
            if remaining[g] == 0 {
                continue;
            }
            remaining[g] -= 1;
            for l in 0..degs[i][g] as usize {
                current.push((g, l));
                rec(i + 1, degs, remaining, current, out);
                current.pop();
            }
            remaining[g] += 1;
        }
    }
    rec(0, multidegrees, &mut remaining, &mut current, &mut out);
    Ok(out)
}

/// The total-degree start system `{z_i^{d_i} - 1}` and its solutions.
pub fn total_degree_start(target: &PolySystem) -> Result<(PolySystem, Vec<Vec<Complex64>>)> {
    let start = StartSystem::total_degree(target)?;
    Ok((start.to_poly_system(target), start.solutions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, VariableTable};
    use rand::SeedableRng;

    fn system(names: &[&str], eqs: &[&str]) -> PolySystem {
        let v = VariableTable::new(names).unwrap();
        let e = eqs.iter().map(|s| parse_polynomial(s, &v).unwrap()).collect();
        PolySystem::new(v, names.len(), e).unwrap()
    }

    #[test]
    fn cubic_start() {
        let target = system(&["x"], &["4*x^3-12*x^2-1"]);
        let (start, sols) = total_degree_start(&target).unwrap();
        assert_eq!(start.to_strings(), vec!["x^3 - 1"]);
        assert_eq!(sols.len(), 3);
        for s in &sols {
            let v = start.evaluate(s).unwrap()[0];
            assert!(v.norm() < 1e-14);
            // nonsingular: derivative 3x^2 has modulus 3
            assert!((3.0 * s[0] * s[0]).norm() > 2.9);
        }
    }

    #[test]
    fn circle_ed_start_has_eight_paths() {
        let target = system(
            &["x", "y", "l"],
            &["x^2+y^2-1", "2*(x-0.3)-2*l*x", "2*(y-0.7)-2*l*y"],
        );
        let s = StartSystem::total_degree(&target).unwrap();
        assert_eq!(s.path_count(), 8);
        let distinct: std::collections::BTreeSet<String> =
            s.solutions().iter().map(|p| format!("{p:?}")).collect();
        assert_eq!(distinct.len(), 8);
    }

    #[test]
    fn degree_zero_equations_are_errors() {
        let zero = system(&["x", "y"], &["x^2-1", "0"]);
        assert_eq!(StartSystem::total_degree(&zero).unwrap_err(), Error::ZeroEquation { index: 1 });
        let constant = system(&["x"], &["3"]);
        assert!(StartSystem::total_degree(&constant).is_err());
        let v = VariableTable::new(&["x", "y"]).unwrap();
        let e = vec![parse_polynomial("x", &v).unwrap()];
        let rect = PolySystem::new(v, 2, e).unwrap();
        assert!(matches!(StartSystem::total_degree(&rect), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn product_evaluation_matches_expansion() {
        let target = system(&["x", "y", "l"], &["x^2+y^2-1", "x-l*x", "y-l*y^2"]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let start = StartSystem::multihomogeneous(&target, &[vec![0, 1], vec![2]], &mut rng).unwrap();
        let expanded = start.to_poly_system(&target);
        let z = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5), Complex64::new(1.1, -0.4)];
        let mut zh = z.to_vec();
        zh.extend([Complex64::new(1.0, 0.0); 2]);
        let mut vals = vec![Complex64::default(); 3];
        let mut jac = vec![Complex64::default(); 3 * 5];
        start.products().eval_jacobian(&zh, &mut vals, &mut jac);
        for i in 0..3 {
            let exact = expanded.equations()[i].evaluate(&z).unwrap();
            assert!((vals[i] - exact).norm() < 1e-12);
            for j in 0..3 {
                let d = expanded.equations()[i].differentiate(j).evaluate(&z).unwrap();
                assert!((jac[i * 5 + j] - d).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn multihomogeneous_bezout_number() {
        // bidegrees (2,0), (1,1), (2,1) in groups {x,y}, {l}
        let target = system(&["x", "y", "l"], &["x^2+y^2-1", "x-l*x", "y-l*y^2"]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let start = StartSystem::multihomogeneous(&target, &[vec![0, 1], vec![2]], &mut rng).unwrap();
        // l comes from equation 1 or from equation 2: 2*2 + 2*1 = 6
        assert_eq!(start.path_count(), 6);
        let expanded = start.to_poly_system(&target);
        for s in start.solutions() {
            for v in expanded.evaluate(s).unwrap() {
                assert!(v.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn det3_multihomogeneous_count() {
        let mut degs = vec![vec![3u32, 0]];
        degs.extend(std::iter::repeat_n(vec![2, 1], 9));
        let groups = vec![(0..9).collect::<Vec<_>>(), vec![9]];
        assert_eq!(enumerate_assignments(&degs, &groups).unwrap().len(), 6912);
    }
}
