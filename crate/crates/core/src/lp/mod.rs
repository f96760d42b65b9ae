//! Exact linear programming.
//!
//! Programs are stated as
//!
//! ```text
//! minimize    c·x
//! subject to  E x  = e
//!             G x <= g
//!             l <= x <= u      (each bound optional)
//! ```
//!
//! and solved by a dense two-phase simplex over [`Rational`] with Bland's
//! rule. Every optimal result carries Lagrange multipliers
//! `(y, λ >= 0, μ >= 0, ν >= 0)` with `Eᵀy - Gᵀλ + μ - ν = c` and
//! `e·y - g·λ + l·μ - u·ν = c·x`, which [`verify_optimality`] re-checks
//! without trusting the solver. Infeasible results carry a Farkas ray of the
//! same shape with `c` replaced by zero and a strictly positive value.

mod certificate;
mod parametric;
mod simplex;

use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

pub use certificate::{check_infeasibility, check_optimality, verify_infeasibility, verify_optimality, CertificateError};
pub use parametric::{Affine, AffineExpr, CertificateKind, CertifiedRange, ParametricProgram, RangeVerdict};
pub use simplex::solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

/// One linear row; the relation (`=` or `<=`) is implied by which list holds it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub terms: Vec<(VarId, Rational)>,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("row references undeclared variable #{0}")]
    UnknownVariable(usize),
    #[error("variable {name} has lower bound {lower} above upper bound {upper}")]
    InvertedBounds { name: String, lower: Rational, upper: Rational },
    #[error("objective has no terms")]
    EmptyObjective,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearProgram {
    vars: Vec<Variable>,
    equalities: Vec<Row>,
    inequalities: Vec<Row>,
    objective: Vec<(VarId, Rational)>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: Option<Rational>,
        upper: Option<Rational>,
    ) -> VarId {
        self.vars.push(Variable { name: name.into(), lower, upper });
        VarId(self.vars.len() - 1)
    }

    /// Variable with lower bound zero and no upper bound.
    pub fn add_nonneg(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, Some(Rational::zero()), None)
    }

    pub fn add_eq(&mut self, terms: Vec<(VarId, Rational)>, rhs: Rational) {
        self.equalities.push(Row { terms, rhs });
    }

    pub fn add_le(&mut self, terms: Vec<(VarId, Rational)>, rhs: Rational) {
        self.inequalities.push(Row { terms, rhs });
    }

    /// Stored as the negated `<=` row.
    pub fn add_ge(&mut self, terms: Vec<(VarId, Rational)>, rhs: Rational) {
        let terms = terms.into_iter().map(|(v, c)| (v, -c)).collect();
        self.inequalities.push(Row { terms, rhs: -rhs });
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, Rational)>) {
        self.objective = terms;
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn equalities(&self) -> &[Row] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[Row] {
        &self.inequalities
    }

    pub fn objective(&self) -> &[(VarId, Rational)] {
        &self.objective
    }

    /// Dense objective vector.
    pub fn cost_vector(&self) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.vars.len()];
        for (v, k) in &self.objective {
            c[v.0] += k;
        }
        c
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.is_empty() {
            return Err(LpError::EmptyObjective);
        }
        let n = self.vars.len();
        let rows = self.equalities.iter().chain(&self.inequalities);
        for (v, _) in rows.flat_map(|r| r.terms.iter()).chain(&self.objective) {
            if v.0 >= n {
                return Err(LpError::UnknownVariable(v.0));
            }
        }
        for var in &self.vars {
            if let (Some(l), Some(u)) = (&var.lower, &var.upper) {
                if l > u {
                    return Err(LpError::InvertedBounds {
                        name: var.name.clone(),
                        lower: l.clone(),
                        upper: u.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Same program with every right-hand side and bound multiplied by `k`.
    pub fn scaled_rhs(&self, k: &Rational) -> LinearProgram {
        let scale_rows = |rows: &[Row]| {
            rows.iter()
                .map(|r| Row { terms: r.terms.clone(), rhs: &r.rhs * k })
                .collect()
        };
        LinearProgram {
            vars: self
                .vars
                .iter()
                .map(|v| Variable {
                    name: v.name.clone(),
                    lower: v.lower.as_ref().map(|l| l * k),
                    upper: v.upper.as_ref().map(|u| u * k),
                })
                .collect(),
            equalities: scale_rows(&self.equalities),
            inequalities: scale_rows(&self.inequalities),
            objective: self.objective.clone(),
        }
    }

    /// Value of `row·x`.
    pub(crate) fn row_value(row: &Row, x: &[Rational]) -> Rational {
        row.terms.iter().map(|(v, c)| c * &x[v.0]).sum()
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, vars: &[Variable], terms: &[(VarId, Rational)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (i, (v, c)) in terms.iter().enumerate() {
        let name = vars.get(v.0).map_or("?", |x| x.name.as_str());
        let neg = c.is_negative();
        let mag = c.abs();
        match (i, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        if mag == Rational::one() {
            write!(f, "{name}")?;
        } else {
            write!(f, "{mag} {name}")?;
        }
    }
    Ok(())
}

/// Human-readable dump; not a stable format.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "minimize ")?;
        write_terms(f, &self.vars, &self.objective)?;
        writeln!(f)?;
        for r in &self.equalities {
            write!(f, "  ")?;
            write_terms(f, &self.vars, &r.terms)?;
            writeln!(f, " = {}", r.rhs)?;
        }
        for r in &self.inequalities {
            write!(f, "  ")?;
            write_terms(f, &self.vars, &r.terms)?;
            writeln!(f, " <= {}", r.rhs)?;
        }
        for v in &self.vars {
            match (&v.lower, &v.upper) {
                (Some(l), Some(u)) => writeln!(f, "  {l} <= {} <= {u}", v.name)?,
                (Some(l), None) => writeln!(f, "  {} >= {l}", v.name)?,
                (None, Some(u)) => writeln!(f, "  {} <= {u}", v.name)?,
                (None, None) => writeln!(f, "  {} free", v.name)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Lagrange multipliers, one per row and per bound.
///
/// `lower[j]` / `upper[j]` are zero for variables without that bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multipliers {
    pub equalities: Vec<Rational>,
    pub inequalities: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub primal: Vec<Rational>,
    pub objective: Rational,
    pub duals: Multipliers,
}

impl Solution {
    pub fn value(&self, v: VarId) -> &Rational {
        &self.primal[v.0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpResult {
    Optimal(Solution),
    /// Carries a Farkas ray proving infeasibility.
    Infeasible(Multipliers),
    Unbounded,
}

impl LpResult {
    pub fn status(&self) -> LpStatus {
        match self {
            LpResult::Optimal(_) => LpStatus::Optimal,
            LpResult::Infeasible(_) => LpStatus::Infeasible,
            LpResult::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<&Solution> {
        match self {
            LpResult::Optimal(s) => Some(s),
            _ => None,
        }
    }
}
