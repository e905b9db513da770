use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::MipError;

/// Index of a variable inside its [`MipModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for ConstraintSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintSense::Le => "<=",
            ConstraintSense::Eq => "=",
            ConstraintSense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }
}

/// A minimisation problem over continuous and integer variables with linear
/// constraints. Names are unique across variables and across constraints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MipModel {
    pub name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<f64>,
    var_names: HashMap<String, VarId>,
    row_names: HashMap<String, usize>,
}

impl MipModel {
    pub fn new(name: impl Into<String>) -> Self {
        MipModel {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, MipError> {
        let name = name.into();
        if self.var_names.contains_key(&name) {
            return Err(MipError::DuplicateName(name));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(MipError::InvalidBounds { name, lower, upper });
        }
        if kind == VarKind::Integer && !(lower.is_finite() && upper.is_finite()) {
            return Err(MipError::UnboundedInteger(name));
        }
        let id = VarId(self.variables.len());
        self.var_names.insert(name.clone(), id);
        self.objective.push(0.0);
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        Ok(id)
    }

    pub fn continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, MipError> {
        self.add_var(name, VarKind::Continuous, lower, upper)
    }

    pub fn integer(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, MipError> {
        self.add_var(name, VarKind::Integer, lower, upper)
    }

    /// Adds `Σ terms (sense) rhs`. Repeated variables are merged and zero
    /// coefficients dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<usize, MipError> {
        let name = name.into();
        if self.row_names.contains_key(&name) {
            return Err(MipError::DuplicateName(name));
        }
        let terms = self.normalise(terms)?;
        if !rhs.is_finite() {
            return Err(MipError::NonFinite(name));
        }
        let row = self.constraints.len();
        self.row_names.insert(name.clone(), row);
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
        Ok(row)
    }

    /// Adds `coef · var` to the objective.
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) -> Result<(), MipError> {
        if var.0 >= self.variables.len() {
            return Err(MipError::UnknownVariable(var.0));
        }
        if !coef.is_finite() {
            return Err(MipError::NonFinite(self.variables[var.0].name.clone()));
        }
        self.objective[var.0] += coef;
        Ok(())
    }

    /// Replaces the objective.
    pub fn set_objective(
        &mut self,
        terms: impl IntoIterator<Item = (VarId, f64)>,
    ) -> Result<(), MipError> {
        let terms = self.normalise(terms)?;
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        for (v, c) in terms {
            self.objective[v.0] = c;
        }
        Ok(())
    }

    fn normalise(
        &self,
        terms: impl IntoIterator<Item = (VarId, f64)>,
    ) -> Result<Vec<(VarId, f64)>, MipError> {
        let mut out: Vec<(VarId, f64)> = Vec::new();
        for (v, c) in terms {
            if v.0 >= self.variables.len() {
                return Err(MipError::UnknownVariable(v.0));
            }
            if !c.is_finite() {
                return Err(MipError::NonFinite(self.variables[v.0].name.clone()));
            }
            match out.iter_mut().find(|(w, _)| *w == v) {
                Some(entry) => entry.1 += c,
                None => out.push((v, c)),
            }
        }
        out.retain(|&(_, c)| c != 0.0);
        Ok(out)
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) -> Result<(), MipError> {
        let v = &mut self.variables[var.0];
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(MipError::InvalidBounds {
                name: v.name.clone(),
                lower,
                upper,
            });
        }
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Non-zero objective coefficients in variable order.
    pub fn objective(&self) -> Vec<(VarId, f64)> {
        self.objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, &c)| (VarId(i), c))
            .collect()
    }

    pub fn objective_coef(&self, var: VarId) -> f64 {
        self.objective[var.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    pub fn constraint_by_name(&self, name: &str) -> Option<&Constraint> {
        self.row_names.get(name).map(|&i| &self.constraints[i])
    }

    /// Removes a row; later rows shift down by one.
    pub fn remove_constraint(&mut self, name: &str) -> Option<Constraint> {
        let row = self.row_names.remove(name)?;
        let c = self.constraints.remove(row);
        for r in self.row_names.values_mut() {
            if *r > row {
                *r -= 1;
            }
        }
        Some(c)
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_integer_vars(&self) -> usize {
        self.variables
            .iter()
            .filter(|v| v.kind == VarKind::Integer)
            .count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, x)| c * x).sum()
    }

    /// Re-checks the structural invariants (the builders maintain them, this
    /// guards models assembled by hand or mutated through `set_bounds`).
    pub fn validate(&self) -> Result<(), MipError> {
        for v in &self.variables {
            if v.kind == VarKind::Integer && !(v.lower.is_finite() && v.upper.is_finite()) {
                return Err(MipError::UnboundedInteger(v.name.clone()));
            }
            if v.lower > v.upper {
                return Err(MipError::InvalidBounds {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        for c in &self.constraints {
            if let Some(&(v, _)) = c.terms.iter().find(|(v, _)| v.0 >= self.variables.len()) {
                return Err(MipError::UnknownVariable(v.0));
            }
        }
        Ok(())
    }
}
