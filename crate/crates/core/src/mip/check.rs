use std::fmt;

use super::{ConstraintSense, MipModel, VarKind};

/// A bound, integrality or row that a candidate point breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityViolation {
    pub item: String,
    pub amount: f64,
}

impl fmt::Display for FeasibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated by {:.3e}", self.item, self.amount)
    }
}

/// Evaluates every bound, integrality requirement and constraint at `values`
/// and reports those violated by more than `tol` (absolute).
pub fn check_solution(model: &MipModel, values: &[f64], tol: f64) -> Vec<FeasibilityViolation> {
    let mut out = Vec::new();
    if values.len() != model.num_vars() {
        out.push(FeasibilityViolation {
            item: format!("{} values for {} variables", values.len(), model.num_vars()),
            amount: f64::INFINITY,
        });
        return out;
    }
    for (v, &x) in model.variables().iter().zip(values) {
        let below = v.lower - x;
        let above = x - v.upper;
        if !x.is_finite() {
            out.push(FeasibilityViolation {
                item: format!("value of {}", v.name),
                amount: f64::INFINITY,
            });
        } else if below > tol {
            out.push(FeasibilityViolation {
                item: format!("lower bound of {}", v.name),
                amount: below,
            });
        } else if above > tol {
            out.push(FeasibilityViolation {
                item: format!("upper bound of {}", v.name),
                amount: above,
            });
        }
        if v.kind == VarKind::Integer && (x - x.round()).abs() > tol {
            out.push(FeasibilityViolation {
                item: format!("integrality of {}", v.name),
                amount: (x - x.round()).abs(),
            });
        }
    }
    for c in model.constraints() {
        let lhs = c.activity(values);
        let excess = match c.sense {
            ConstraintSense::Le => lhs - c.rhs,
            ConstraintSense::Ge => c.rhs - lhs,
            ConstraintSense::Eq => (lhs - c.rhs).abs(),
        };
        if excess > tol {
            out.push(FeasibilityViolation {
                item: format!("constraint {}", c.name),
                amount: excess,
            });
        }
    }
    out
}
