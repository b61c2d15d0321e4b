//! Sparse multivariate polynomials with complex coefficients.
//!
//! A [`Polynomial`] is a map from dense exponent vectors to coefficients.
//! Every polynomial is tied to the length of a [`VariableTable`]; the table
//! itself is only needed for parsing and printing.

mod compiled;
mod parse;
mod system;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub use compiled::CompiledSystem;
pub use parse::parse_polynomial;
pub use system::{jacobian, PolySystem};

use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped after every operation.
pub const ZERO_DROP: f64 = 1e-14;

/// Largest accepted exponent (exclusive).
pub const MAX_EXPONENT: u32 = 1 << 16;

/// Dense exponent vector, one entry per variable of the owning table.
pub type Monomial = Vec<u16>;

/// Ordered list of distinct variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VariableTable {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut table = Self::default();
        for name in names {
            table.push(name.as_ref())?;
        }
        Ok(table)
    }

    /// Appends a variable and returns its index.
    pub fn push(&mut self, name: &str) -> Result<usize> {
        if !is_identifier(name) {
            return Err(Error::Input(format!("`{name}` is not a valid identifier")));
        }
        if self.index.contains_key(name) {
            return Err(Error::Input(format!("variable `{name}` declared twice")));
        }
        let idx = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), idx);
        Ok(idx)
    }

    /// Appends a variable named `base`, or `base_`, `base__`, ... if taken.
    pub fn push_fresh(&mut self, base: &str) -> usize {
        let mut name = base.to_string();
        while self.index.contains_key(&name) {
            name.push('_');
        }
        self.push(&name).expect("fresh name is a valid identifier")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Concatenation of two tables; fails on a shared name.
    pub fn concat(&self, other: &VariableTable) -> Result<Self> {
        let mut out = self.clone();
        for name in other.names() {
            out.push(name)?;
        }
        Ok(out)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Sparse polynomial in a fixed number of variables.
///
/// Terms are kept in a `BTreeMap`, so iteration order (and therefore
/// printing) is canonical.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p.prune();
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function of variable `var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index {var} out of range {nvars}");
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exps, Complex64::new(1.0, 0.0));
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// monomials are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "exponent vector length mismatch");
            *p.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        p.prune();
        p
    }

    fn add_term(&mut self, m: Monomial, c: Complex64) {
        let slot = self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= ZERO_DROP);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u16]) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var] as u32).max().unwrap_or(0)
    }

    /// Degree in the given subset of variables.
    pub fn degree_in_group(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|&v| m[v] as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// True when every term has degree zero (including the zero polynomial).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// Constant term.
    pub fn constant_term(&self) -> Complex64 {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: point.len(),
            });
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[Complex64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut term = *c;
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    term *= x.powu(e as u32);
                }
            }
            sum += term;
        }
        sum
    }

    /// Formal partial derivative.
    pub fn differentiate(&self, var: usize) -> Self {
        assert!(var < self.nvars, "variable index {var} out of range");
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[var];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm[var] -= 1;
            out.add_term(dm, c * e as f64);
        }
        out.prune();
        out
    }

    /// Replaces every variable `v` by `images[v]`. All images live in one
    /// common table, which may differ from this polynomial's table.
    pub fn compose(&self, images: &[Polynomial]) -> Self {
        assert_eq!(images.len(), self.nvars, "one image per variable required");
        let target = images.first().map_or(0, |p| p.nvars);
        assert!(
            images.iter().all(|p| p.nvars == target),
            "images must share a variable table"
        );
        let mut cache: HashMap<(usize, u16), Polynomial> = HashMap::new();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut term = Self::constant(target, *c);
            for (v, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let power = cache
                    .entry((v, e))
                    .or_insert_with(|| images[v].pow(e as u32));
                term = &term * power;
            }
            out = &out + &term;
        }
        out
    }

    /// Substitutes the bound variables, leaving the others untouched.
    /// Bindings are polynomials in this polynomial's own table.
    pub fn substitute(&self, bindings: &[(usize, Polynomial)]) -> Self {
        let mut images: Vec<Polynomial> =
            (0..self.nvars).map(|v| Self::var(self.nvars, v)).collect();
        for (v, image) in bindings {
            assert_eq!(image.nvars, self.nvars, "binding in a foreign table");
            images[*v] = image.clone();
        }
        self.compose(&images)
    }

    /// Re-indexes variables into a table of `nvars` variables, sending old
    /// variable `i` to `mapping[i]`.
    pub fn embed(&self, nvars: usize, mapping: &[usize]) -> Self {
        assert_eq!(mapping.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut nm = vec![0u16; nvars];
            for (i, &e) in m.iter().enumerate() {
                nm[mapping[i]] += e;
            }
            out.add_term(nm, *c);
        }
        out.prune();
        out
    }

    /// Embeds into a larger table that keeps the existing variables first.
    pub fn extend_vars(&self, nvars: usize) -> Self {
        let mapping: Vec<usize> = (0..self.nvars).collect();
        self.embed(nvars, &mapping)
    }

    /// Sets `var := value` and removes the variable from the table.
    pub fn specialize(&self, var: usize, value: Complex64) -> Self {
        assert!(var < self.nvars);
        let mut out = Self::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let e = m[var];
            let mut nm = m.clone();
            nm.remove(var);
            let factor = if e == 0 { Complex64::new(1.0, 0.0) } else { value.powu(e as u32) };
            out.add_term(nm, c * factor);
        }
        out.prune();
        out
    }

    /// Homogenizes with respect to the variable groups `groups`, using
    /// `hom_vars[j]` (fresh variables already present in the table) as the
    /// homogenizing coordinate of group `j`. Returns the multidegree.
    pub fn homogenize(&self, groups: &[Vec<usize>], hom_vars: &[usize]) -> (Self, Vec<u32>) {
        let degrees: Vec<u32> = groups.iter().map(|g| self.degree_in_group(g)).collect();
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut nm = m.clone();
            for (j, group) in groups.iter().enumerate() {
                let d: u32 = group.iter().map(|&v| m[v] as u32).sum();
                nm[hom_vars[j]] += (degrees[j] - d) as u16;
            }
            out.add_term(nm, *c);
        }
        out.prune();
        (out, degrees)
    }

    /// Human-readable and re-parseable form.
    ///
    /// Coefficients print with round-trip precision, so parsing the output
    /// against the same table reproduces the polynomial exactly. Complex
    /// coefficients use `i`, which therefore must not be a declared variable.
    pub fn to_expr_string(&self, vars: &VariableTable) -> String {
        assert_eq!(vars.len(), self.nvars, "table does not match polynomial");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // Highest total degree first reads naturally.
        let mut terms: Vec<(&Monomial, &Complex64)> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|&e| e as u32).sum();
            let db: u32 = b.0.iter().map(|&e| e as u32).sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let monomial = format_monomial(m, vars);
            let (negative, coef) = format_coefficient(*c);
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            match (monomial.is_empty(), coef.as_deref()) {
                (true, None) => out.push('1'),
                (true, Some(c)) => out.push_str(c),
                (false, None) => out.push_str(&monomial),
                (false, Some(c)) => {
                    let _ = write!(out, "{c}*{monomial}");
                }
            }
        }
        out
    }
}

fn format_monomial(m: &[u16], vars: &VariableTable) -> String {
    let mut parts = Vec::new();
    for (v, &e) in m.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars.name(v).to_string()),
            _ => parts.push(format!("{}^{}", vars.name(v), e)),
        }
    }
    parts.join("*")
}

fn format_real(x: f64) -> String {
    // Debug formatting is the shortest representation that round-trips and
    // switches to exponent notation for very large or small values.
    let s = format!("{x:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

/// Returns (is_negative, text) where `None` text means a unit coefficient.
fn format_coefficient(c: Complex64) -> (bool, Option<String>) {
    if c.im == 0.0 {
        let negative = c.re < 0.0;
        let abs = c.re.abs();
        if abs == 1.0 {
            return (negative, None);
        }
        return (negative, Some(format_real(abs)));
    }
    if c.re == 0.0 {
        let negative = c.im < 0.0;
        let abs = c.im.abs();
        if abs == 1.0 {
            return (negative, Some("i".to_string()));
        }
        return (negative, Some(format!("{}*i", format_real(abs))));
    }
    let sign = if c.im < 0.0 { '-' } else { '+' };
    let im = c.im.abs();
    let im_text = if im == 1.0 {
        "i".to_string()
    } else {
        format!("{}*i", format_real(im))
    };
    let re_text = if c.re < 0.0 {
        format!("-{}", format_real(-c.re))
    } else {
        format_real(c.re)
    };
    (false, Some(format!("({re_text} {sign} {im_text})")))
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials over different tables");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out.prune();
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials over different tables");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -*c);
        }
        out.prune();
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomials over different tables");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out.prune();
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn table(names: &[&str]) -> VariableTable {
        VariableTable::new(names).unwrap()
    }

    #[test]
    fn variable_table_rejects_duplicates() {
        let mut t = table(&["x", "y"]);
        assert!(t.push("x").is_err());
        assert!(t.push("2x").is_err());
        assert_eq!(t.push_fresh("y"), 2);
        assert_eq!(t.name(2), "y_");
        assert_eq!(t.index_of("y_"), Some(2));
    }

    #[test]
    fn derivative_of_quartic() {
        let t = table(&["x"]);
        let p = parse_polynomial("x^4-4*x^3", &t).unwrap();
        let dp = p.differentiate(0);
        let expected = parse_polynomial("4*x^3-12*x^2", &t).unwrap();
        assert_eq!(dp, expected);
    }

    #[test]
    fn derivative_of_circle_and_constant() {
        let t = table(&["x", "y", "z"]);
        let p = parse_polynomial("x^2+y^2-1", &t).unwrap();
        assert_eq!(p.differentiate(1), parse_polynomial("2*y", &t).unwrap());
        let k = parse_polynomial("7", &t).unwrap();
        assert!(k.differentiate(2).is_zero());
    }

    #[test]
    fn derivative_drops_degree_by_one() {
        let t = table(&["x", "y"]);
        let p = parse_polynomial("x^3*y + x*y^2 - 5", &t).unwrap();
        assert_eq!(p.differentiate(0).degree_in(0), 2);
        assert_eq!(p.differentiate(1).degree_in(1), 1);
    }

    #[test]
    fn evaluation_examples() {
        let t = table(&["x", "y"]);
        let circle = parse_polynomial("x^2+y^2-1", &t).unwrap();
        assert_eq!(circle.evaluate(&[c(1.0), c(0.0)]).unwrap(), c(0.0));
        let cubic = parse_polynomial("-x^3-3*x^2-2*y^2+x+3", &t).unwrap();
        assert_eq!(cubic.evaluate(&[c(1.0), c(0.0)]).unwrap(), c(0.0));
        let t1 = table(&["x"]);
        let q = parse_polynomial("4*x^3-12*x^2", &t1).unwrap();
        assert_eq!(q.evaluate(&[c(3.0)]).unwrap(), c(0.0));
        assert!(matches!(
            q.evaluate(&[c(3.0), c(1.0)]),
            Err(Error::Dimension { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn specialize_t_in_cubic() {
        let t = table(&["x", "t"]);
        let p = parse_polynomial("4*x^3-12*x^2-t", &t).unwrap();
        let t1 = table(&["x"]);
        assert_eq!(
            p.specialize(1, c(1.0)),
            parse_polynomial("4*x^3-12*x^2-1", &t1).unwrap()
        );
    }

    #[test]
    fn substitute_pullback_is_bivariate() {
        let t = table(&["x", "a", "b"]);
        let p = parse_polynomial("x^2 + 3*x", &t).unwrap();
        let ab = parse_polynomial("a*b", &t).unwrap();
        let q = p.substitute(&[(0, ab)]);
        assert_eq!(q, parse_polynomial("a^2*b^2 + 3*a*b", &t).unwrap());
    }

    #[test]
    fn perturbed_distance_differs_by_constant() {
        // d_u with u := u + t*eps equals d_u - t*g + (constant in x),
        // with g = 2 * sum eps_i x_i.
        let t = table(&["x", "y", "t"]);
        let du = parse_polynomial("(x-2)^2 + (y+1)^2", &t).unwrap();
        let shifted = parse_polynomial("(x-(2+t*3))^2 + (y-(-1+t*5))^2", &t).unwrap();
        let g = parse_polynomial("2*(3*x + 5*y)", &t).unwrap();
        let tv = Polynomial::var(3, 2);
        let diff = &(&shifted - &du) + &(&tv * &g);
        for (m, _) in diff.terms() {
            assert_eq!(m[0], 0);
            assert_eq!(m[1], 0);
        }
    }

    #[test]
    fn homogenize_total_degree() {
        let t = table(&["x", "y", "h"]);
        let p = parse_polynomial("x^2*y - y + 2", &t).unwrap();
        let (hp, deg) = p.homogenize(&[vec![0, 1]], &[2]);
        assert_eq!(deg, vec![3]);
        assert_eq!(hp, parse_polynomial("x^2*y - y*h^2 + 2*h^3", &t).unwrap());
    }

    #[test]
    fn printing_round_trip_with_complex_coefficients() {
        let t = table(&["x", "y"]);
        let p = Polynomial::from_terms(
            2,
            vec![
                (vec![2, 0], Complex64::new(1.5, -0.25)),
                (vec![0, 1], Complex64::new(0.0, -1.0)),
                (vec![1, 1], Complex64::new(-3.0, 0.0)),
                (vec![0, 0], Complex64::new(1e-9, 7.0)),
            ],
        );
        let text = p.to_expr_string(&t);
        assert_eq!(parse_polynomial(&text, &t).unwrap(), p);
    }
}
