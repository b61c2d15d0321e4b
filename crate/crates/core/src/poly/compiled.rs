//! Flattened straight-line form of a polynomial system for the tracker's
//! inner loop: values and the full Jacobian in one pass over the terms.

use num_complex::Complex64;

use super::Polynomial;

#[derive(Clone, Debug)]
pub struct CompiledSystem {
    nvars: usize,
    max_exp: Vec<u16>,
    pow_offset: Vec<usize>,
    pow_len: usize,
    eq_terms: Vec<(u32, u32)>,
    coefs: Vec<Complex64>,
    term_factors: Vec<(u32, u32)>,
    factors: Vec<(u16, u16)>,
}

impl CompiledSystem {
    pub fn new(nvars: usize, equations: &[Polynomial]) -> Self {
        let mut max_exp = vec![0u16; nvars];
        let mut eq_terms = Vec::with_capacity(equations.len());
        let mut coefs = Vec::new();
        let mut term_factors = Vec::new();
        let mut factors = Vec::new();
        for eq in equations {
            assert_eq!(eq.nvars(), nvars, "equation over a different table");
            let start = coefs.len() as u32;
            for (m, c) in eq.terms() {
                let fstart = factors.len() as u32;
                for (v, &e) in m.iter().enumerate() {
                    if e > 0 {
                        factors.push((v as u16, e));
                        max_exp[v] = max_exp[v].max(e);
                    }
                }
                term_factors.push((fstart, factors.len() as u32));
                coefs.push(*c);
            }
            eq_terms.push((start, coefs.len() as u32));
        }
        let mut pow_offset = Vec::with_capacity(nvars);
        let mut pow_len = 0;
        for &e in &max_exp {
            pow_offset.push(pow_len);
            pow_len += e as usize + 1;
        }
        Self {
            nvars,
            max_exp,
            pow_offset,
            pow_len,
            eq_terms,
            coefs,
            term_factors,
            factors,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.eq_terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eq_terms.is_empty()
    }

    fn powers(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut pows = vec![Complex64::new(1.0, 0.0); self.pow_len];
        for v in 0..self.nvars {
            let off = self.pow_offset[v];
            for e in 1..=self.max_exp[v] as usize {
                pows[off + e] = pows[off + e - 1] * x[v];
            }
        }
        pows
    }

    /// Writes equation values into `out`.
    pub fn eval(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.nvars);
        let pows = self.powers(x);
        for (i, &(a, b)) in self.eq_terms.iter().enumerate() {
            let mut sum = Complex64::new(0.0, 0.0);
            for t in a as usize..b as usize {
                let (fa, fb) = self.term_factors[t];
                let mut term = self.coefs[t];
                for &(v, e) in &self.factors[fa as usize..fb as usize] {
                    term *= pows[self.pow_offset[v as usize] + e as usize];
                }
                sum += term;
            }
            out[i] = sum;
        }
    }

    /// Writes values into `values` and the row-major Jacobian with respect to
    /// every variable into `jac` (`len() * nvars()` entries).
    pub fn eval_jacobian(&self, x: &[Complex64], values: &mut [Complex64], jac: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.nvars);
        debug_assert_eq!(jac.len(), self.len() * self.nvars);
        let pows = self.powers(x);
        jac.fill(Complex64::new(0.0, 0.0));
        let mut prefix: Vec<Complex64> = Vec::with_capacity(8);
        for (i, &(a, b)) in self.eq_terms.iter().enumerate() {
            let row = &mut jac[i * self.nvars..(i + 1) * self.nvars];
            let mut sum = Complex64::new(0.0, 0.0);
            for t in a as usize..b as usize {
                let (fa, fb) = self.term_factors[t];
                let fs = &self.factors[fa as usize..fb as usize];
                let c = self.coefs[t];
                prefix.clear();
                let mut acc = Complex64::new(1.0, 0.0);
                for &(v, e) in fs {
                    prefix.push(acc);
                    acc *= pows[self.pow_offset[v as usize] + e as usize];
                }
                sum += c * acc;
                let mut suffix = Complex64::new(1.0, 0.0);
                for (k, &(v, e)) in fs.iter().enumerate().rev() {
                    let off = self.pow_offset[v as usize];
                    let d = pows[off + e as usize - 1] * (e as f64);
                    row[v as usize] += c * prefix[k] * suffix * d;
                    suffix *= pows[off + e as usize];
                }
            }
            values[i] = sum;
        }
    }
}
