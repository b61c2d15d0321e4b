//! Local multiplicity through the Macaulay dual space.
//!
//! A functional `c` on polynomials of degree `<= k` in the shifted variables
//! `y = x - P` lies in the truncated dual space when it kills every
//! `y^beta * h_j` with `|beta| <= k`. The dimension grows with `k` until the
//! dual space is complete, and its final value is the length of the local
//! algebra.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::poly::{Monomial, Polynomial};

pub const DEFAULT_DEGREE_CAP: usize = 20;

/// Threshold on singular values, relative to the largest, below which a
/// Macaulay row combination counts as zero.
const RANK_TOL: f64 = 1e-6;

/// Exponent vectors in `n` variables of total degree `<= k`, graded.
fn monomials_up_to(n: usize, k: usize) -> Vec<Monomial> {
    fn rec(n: usize, left: usize, prefix: &mut Monomial, out: &mut Vec<Monomial>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e as u16);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::with_capacity(n), &mut out);
    out.sort_by_key(|m| (m.iter().map(|&e| e as usize).sum::<usize>(), m.clone()));
    out
}

fn degree(m: &[u16]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// Dimension of the local dual space of `ideal` at `p`, or `NotIsolated` when
/// it keeps growing through degree `cap`.
pub fn local_multiplicity(ideal: &[Polynomial], p: &[Complex64], cap: usize) -> Result<usize> {
    let n = p.len();
    if let Some(q) = ideal.iter().find(|q| q.nvars() != n) {
        return Err(Error::Dimension {
            expected: n,
            found: q.nvars(),
        });
    }
    let shift: Vec<Polynomial> = (0..n)
        .map(|i| &Polynomial::var(n, i) + &Polynomial::constant(n, p[i]))
        .collect();
    let shifted: Vec<Polynomial> = ideal.iter().map(|q| q.compose(&shift)).filter(|q| !q.is_zero()).collect();

    let mut prev: Option<usize> = None;
    for k in 0..=cap {
        let cols = monomials_up_to(n, k);
        let index: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        for beta in &cols {
            for h in &shifted {
                let mut row = vec![Complex64::default(); cols.len()];
                let mut any = false;
                for (m, c) in h.terms() {
                    let prod: Monomial = m.iter().zip(beta).map(|(a, b)| a + b).collect();
                    if degree(&prod) <= k {
                        row[index[&prod]] += c;
                        any = true;
                    }
                }
                if any {
                    let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        row.iter_mut().for_each(|z| *z /= norm);
                        rows.push(row);
                    }
                }
            }
        }
        let rank = if rows.is_empty() {
            0
        } else {
            let flat: Vec<Complex64> = rows.concat();
            linalg::rank(&linalg::from_row_major(rows.len(), cols.len(), &flat) as &CMatrix, RANK_TOL)
        };
        let dim = cols.len() - rank;
        if dim == 0 {
            return Err(Error::Input(format!("point {p:?} is not a zero of the ideal")));
        }
        if prev == Some(dim) {
            return Ok(dim);
        }
        prev = Some(dim);
    }
    Err(Error::NotIsolated { cap })
}

/// Milnor number of `f` at the critical point `p` of the ambient space: the
/// local multiplicity of the Jacobian ideal.
pub fn milnor_multiplicity(f: &Polynomial, p: &[Complex64], cap: usize) -> Result<usize> {
    if f.nvars() != p.len() {
        return Err(Error::Dimension {
            expected: f.nvars(),
            found: p.len(),
        });
    }
    let grad: Vec<Polynomial> = (0..f.nvars()).map(|i| f.differentiate(i)).collect();
    if grad.iter().all(Polynomial::is_zero) {
        return Err(Error::NotIsolated { cap });
    }
    local_multiplicity(&grad, p, cap)
}
