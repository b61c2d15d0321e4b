use num_complex::Complex64;

use super::start::{LinearProductSystem, StartSystem};
use crate::poly::{CompiledSystem, PolySystem, Polynomial};

/// A square system `H(z, s)` in the tracked coordinates `z`, analytic in the
/// complex path parameter `s`.
pub trait Homotopy: Sync {
    /// Number of tracked coordinates (and equations).
    fn dim(&self) -> usize;

    /// Writes `H`, the row-major Jacobian in `z`, and `dH/ds`.
    fn evaluate(
        &self,
        z: &[Complex64],
        s: Complex64,
        values: &mut [Complex64],
        jac: &mut [Complex64],
        ds: &mut [Complex64],
    );

    /// Coordinates of `z` in the unknowns of the target system.
    fn to_affine(&self, z: &[Complex64]) -> Vec<Complex64>;

    /// Leading affine coordinates that locate the point. Later coordinates
    /// (Lagrange multipliers) may diverge without the point escaping.
    fn primary(&self) -> usize;
}

/// `gamma * s * G + (1 - s) * F`, tracked on random affine patches of a
/// product of projective spaces, one per variable group.
#[derive(Clone, Debug)]
pub struct ProjectiveHomotopy {
    n: usize,
    group_of: Vec<usize>,
    target: CompiledSystem,
    start: LinearProductSystem,
    /// Per group: coefficients on the group's variables followed by its
    /// homogenizing variable.
    patches: Vec<Vec<(usize, Complex64)>>,
    gamma: Complex64,
}

impl ProjectiveHomotopy {
    /// `patch_coefs[g]` must hold one coefficient per variable of group `g`
    /// plus one for its homogenizing coordinate.
    pub fn new(
        target: &PolySystem,
        start: &StartSystem,
        gamma: Complex64,
        patch_coefs: &[Vec<Complex64>],
    ) -> Self {
        let n = target.unknowns();
        let groups = start.groups();
        let m = groups.len();
        let mut group_of = vec![0; n];
        for (g, vars) in groups.iter().enumerate() {
            for &v in vars {
                group_of[v] = g;
            }
        }
        let hom_vars: Vec<usize> = (n..n + m).collect();
        let equations: Vec<Polynomial> = target
            .equations()
            .iter()
            .zip(start.multidegrees())
            .map(|(eq, degs)| homogenize_to(&eq.extend_vars(n + m), groups, &hom_vars, degs))
            .collect();
        let patches = groups
            .iter()
            .enumerate()
            .map(|(g, vars)| {
                assert_eq!(patch_coefs[g].len(), vars.len() + 1);
                vars.iter()
                    .copied()
                    .chain(std::iter::once(n + g))
                    .zip(patch_coefs[g].iter().copied())
                    .collect()
            })
            .collect();
        Self {
            n,
            group_of,
            target: CompiledSystem::new(n + m, &equations),
            start: start.products().clone(),
            patches,
            gamma,
        }
    }

    fn groups(&self) -> usize {
        self.patches.len()
    }

    /// Lifts an affine point onto the patches.
    pub fn lift(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.groups();
        let mut z: Vec<Complex64> = x.to_vec();
        z.extend(std::iter::repeat_n(Complex64::new(1.0, 0.0), m));
        for patch in &self.patches {
            let dot: Complex64 = patch.iter().map(|&(v, c)| c * z[v]).sum();
            for &(v, _) in patch {
                z[v] /= dot;
            }
        }
        z
    }
}

/// Homogenizes `p` to the prescribed multidegree, which must dominate the
/// polynomial's own degrees in each group.
fn homogenize_to(p: &Polynomial, groups: &[Vec<usize>], hom_vars: &[usize], degs: &[u32]) -> Polynomial {
    let terms = p.terms().map(|(m, c)| {
        let mut nm = m.clone();
        for (g, vars) in groups.iter().enumerate() {
            let d: u32 = vars.iter().map(|&v| m[v] as u32).sum();
            assert!(d <= degs[g], "start multidegree below target degree");
            nm[hom_vars[g]] += (degs[g] - d) as u16;
        }
        (nm, *c)
    });
    Polynomial::from_terms(p.nvars(), terms)
}

impl Homotopy for ProjectiveHomotopy {
    fn dim(&self) -> usize {
        self.n + self.groups()
    }

    fn evaluate(
        &self,
        z: &[Complex64],
        s: Complex64,
        values: &mut [Complex64],
        jac: &mut [Complex64],
        ds: &mut [Complex64],
    ) {
        let n = self.n;
        let dim = self.dim();
        let mut fv = vec![Complex64::default(); n];
        let mut fj = vec![Complex64::default(); n * dim];
        let mut gv = vec![Complex64::default(); n];
        let mut gj = vec![Complex64::default(); n * dim];
        self.target.eval_jacobian(z, &mut fv, &mut fj);
        self.start.eval_jacobian(z, &mut gv, &mut gj);
        let a = self.gamma * s;
        let b = Complex64::new(1.0, 0.0) - s;
        for i in 0..n {
            values[i] = a * gv[i] + b * fv[i];
            ds[i] = self.gamma * gv[i] - fv[i];
            for j in 0..dim {
                jac[i * dim + j] = a * gj[i * dim + j] + b * fj[i * dim + j];
            }
        }
        for (g, patch) in self.patches.iter().enumerate() {
            let row = n + g;
            jac[row * dim..(row + 1) * dim].fill(Complex64::default());
            let mut v = Complex64::new(-1.0, 0.0);
            for &(var, c) in patch {
                v += c * z[var];
                jac[row * dim + var] = c;
            }
            values[row] = v;
            ds[row] = Complex64::default();
        }
    }

    fn to_affine(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|i| z[i] / z[self.n + self.group_of[i]]).collect()
    }

    fn primary(&self) -> usize {
        self.n
    }
}

/// A parametric system `F(z; t)` followed along `t = s * t0`, in affine
/// coordinates.
#[derive(Clone, Debug)]
pub struct FamilyHomotopy {
    n: usize,
    system: CompiledSystem,
    t0: Complex64,
    primary: usize,
}

impl FamilyHomotopy {
    /// `family` must have exactly one parameter, the last variable.
    pub fn new(family: &PolySystem, t0: Complex64, primary: usize) -> Self {
        assert_eq!(family.num_params(), 1, "family must have a single parameter");
        assert!(family.is_square());
        let n = family.unknowns();
        Self {
            n,
            system: CompiledSystem::new(n + 1, family.equations()),
            t0,
            primary: primary.min(n),
        }
    }
}

impl Homotopy for FamilyHomotopy {
    fn dim(&self) -> usize {
        self.n
    }

    fn evaluate(
        &self,
        z: &[Complex64],
        s: Complex64,
        values: &mut [Complex64],
        jac: &mut [Complex64],
        ds: &mut [Complex64],
    ) {
        let n = self.n;
        let mut x = Vec::with_capacity(n + 1);
        x.extend_from_slice(z);
        x.push(s * self.t0);
        let mut full = vec![Complex64::default(); n * (n + 1)];
        self.system.eval_jacobian(&x, values, &mut full);
        for i in 0..n {
            jac[i * n..(i + 1) * n].copy_from_slice(&full[i * (n + 1)..i * (n + 1) + n]);
            ds[i] = full[i * (n + 1) + n] * self.t0;
        }
    }

    fn to_affine(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.to_vec()
    }

    fn primary(&self) -> usize {
        self.primary
    }
}
