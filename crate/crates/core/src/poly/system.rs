use num_complex::Complex64;

use super::{Polynomial, VariableTable};
use crate::error::{Error, Result};

/// Ordered list of equations over a shared table.
///
/// The first `unknowns` variables of the table are the unknowns; any further
/// variables are parameters (such as the pencil parameter `t`).
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    vars: VariableTable,
    unknowns: usize,
    equations: Vec<Polynomial>,
}

impl PolySystem {
    pub fn new(vars: VariableTable, unknowns: usize, equations: Vec<Polynomial>) -> Result<Self> {
        if unknowns > vars.len() {
            return Err(Error::Input(format!(
                "{unknowns} unknowns declared but the table has {} variables",
                vars.len()
            )));
        }
        for eq in &equations {
            if eq.nvars() != vars.len() {
                return Err(Error::Dimension {
                    expected: vars.len(),
                    found: eq.nvars(),
                });
            }
        }
        Ok(Self {
            vars,
            unknowns,
            equations,
        })
    }

    pub fn vars(&self) -> &VariableTable {
        &self.vars
    }

    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn num_params(&self) -> usize {
        self.vars.len() - self.unknowns
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.equations.len() == self.unknowns
    }

    /// Total degrees; the zero polynomial reports degree 0.
    pub fn degrees(&self) -> Vec<u32> {
        self.equations
            .iter()
            .map(|e| e.total_degree().unwrap_or(0))
            .collect()
    }

    /// Substitutes a value for parameter `param` (an index into the table,
    /// which must be at or past `unknowns`) and drops it from the table.
    pub fn specialize(&self, param: usize, value: Complex64) -> Self {
        assert!(param >= self.unknowns && param < self.vars.len());
        let names: Vec<&str> = self
            .vars
            .names()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != param)
            .map(|(_, n)| n.as_str())
            .collect();
        let vars = VariableTable::new(&names).expect("subset of a valid table");
        let equations = self
            .equations
            .iter()
            .map(|e| e.specialize(param, value))
            .collect();
        Self {
            vars,
            unknowns: self.unknowns,
            equations,
        }
    }

    /// Evaluates all equations at a full point (unknowns then parameters).
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Vec<Complex64>> {
        self.equations.iter().map(|e| e.evaluate(point)).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.equations
            .iter()
            .map(|e| e.to_expr_string(&self.vars))
            .collect()
    }
}

/// Matrix of partial derivatives, row `i` = equation `i`, column `j` =
/// variable `wrt[j]`.
pub fn jacobian(sys: &PolySystem, wrt: &[usize]) -> Result<Vec<Vec<Polynomial>>> {
    if let Some(&bad) = wrt.iter().find(|&&v| v >= sys.vars.len()) {
        return Err(Error::Input(format!("variable index {bad} is not declared")));
    }
    Ok(sys
        .equations
        .iter()
        .map(|eq| wrt.iter().map(|&v| eq.differentiate(v)).collect())
        .collect())
}
