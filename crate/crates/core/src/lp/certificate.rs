//! Independent re-validation of solver output.
//!
//! Nothing here looks at the tableau; the checks only use the program and
//! the claimed primal point and multipliers.

use thiserror::Error;

use super::{LinearProgram, Multipliers, Solution};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("multiplier vectors do not match the program's shape")]
    Shape,
    #[error("equality row {0} violated")]
    Equality(usize),
    #[error("inequality row {0} violated")]
    Inequality(usize),
    #[error("bound of variable {0} violated")]
    Bound(usize),
    #[error("multiplier with the wrong sign or on a missing bound ({0})")]
    DualSign(String),
    #[error("stationarity fails for variable {0}")]
    Stationarity(usize),
    #[error("claimed objective {claimed} differs from c·x = {actual}")]
    Objective { claimed: Rational, actual: Rational },
    #[error("primal value {primal} and dual value {dual} differ")]
    DualityGap { primal: Rational, dual: Rational },
    #[error("Farkas value {0} is not positive")]
    FarkasValue(Rational),
}

fn check_shape(lp: &LinearProgram, m: &Multipliers) -> Result<(), CertificateError> {
    let nv = lp.vars().len();
    if m.equalities.len() != lp.equalities().len()
        || m.inequalities.len() != lp.inequalities().len()
        || m.lower.len() != nv
        || m.upper.len() != nv
    {
        return Err(CertificateError::Shape);
    }
    for (i, l) in m.inequalities.iter().enumerate() {
        if l.is_negative() {
            return Err(CertificateError::DualSign(format!("inequality {i}")));
        }
    }
    for (j, var) in lp.vars().iter().enumerate() {
        if m.lower[j].is_negative() || (var.lower.is_none() && !m.lower[j].is_zero()) {
            return Err(CertificateError::DualSign(format!("lower bound of {}", var.name)));
        }
        if m.upper[j].is_negative() || (var.upper.is_none() && !m.upper[j].is_zero()) {
            return Err(CertificateError::DualSign(format!("upper bound of {}", var.name)));
        }
    }
    Ok(())
}

/// `Eᵀy - Gᵀλ + μ - ν` per variable.
fn stationarity_lhs(lp: &LinearProgram, m: &Multipliers) -> Vec<Rational> {
    let mut s: Vec<Rational> = m.lower.iter().zip(&m.upper).map(|(l, u)| l - u).collect();
    for (row, y) in lp.equalities().iter().zip(&m.equalities) {
        if y.is_zero() {
            continue;
        }
        for (v, c) in &row.terms {
            s[v.0] += &(c * y);
        }
    }
    for (row, l) in lp.inequalities().iter().zip(&m.inequalities) {
        if l.is_zero() {
            continue;
        }
        for (v, c) in &row.terms {
            s[v.0] -= &(c * l);
        }
    }
    s
}

/// `e·y - g·λ + l·μ - u·ν`.
fn dual_value(lp: &LinearProgram, m: &Multipliers) -> Rational {
    let mut d = Rational::zero();
    for (row, y) in lp.equalities().iter().zip(&m.equalities) {
        d += &(&row.rhs * y);
    }
    for (row, l) in lp.inequalities().iter().zip(&m.inequalities) {
        d -= &(&row.rhs * l);
    }
    for (j, var) in lp.vars().iter().enumerate() {
        if let Some(lo) = &var.lower {
            d += &(lo * &m.lower[j]);
        }
        if let Some(up) = &var.upper {
            d -= &(up * &m.upper[j]);
        }
    }
    d
}

pub fn check_optimality(lp: &LinearProgram, sol: &Solution) -> Result<(), CertificateError> {
    let x = &sol.primal;
    if x.len() != lp.vars().len() {
        return Err(CertificateError::Shape);
    }
    for (i, row) in lp.equalities().iter().enumerate() {
        if LinearProgram::row_value(row, x) != row.rhs {
            return Err(CertificateError::Equality(i));
        }
    }
    for (i, row) in lp.inequalities().iter().enumerate() {
        if LinearProgram::row_value(row, x) > row.rhs {
            return Err(CertificateError::Inequality(i));
        }
    }
    for (j, var) in lp.vars().iter().enumerate() {
        if var.lower.as_ref().is_some_and(|l| &x[j] < l) || var.upper.as_ref().is_some_and(|u| &x[j] > u)
        {
            return Err(CertificateError::Bound(j));
        }
    }
    check_shape(lp, &sol.duals)?;
    let c = lp.cost_vector();
    for (j, s) in stationarity_lhs(lp, &sol.duals).iter().enumerate() {
        if *s != c[j] {
            return Err(CertificateError::Stationarity(j));
        }
    }
    let primal: Rational = c.iter().zip(x).map(|(c, x)| c * x).sum();
    if primal != sol.objective {
        return Err(CertificateError::Objective { claimed: sol.objective.clone(), actual: primal });
    }
    let dual = dual_value(lp, &sol.duals);
    if dual != primal {
        return Err(CertificateError::DualityGap { primal, dual });
    }
    Ok(())
}

/// True iff `sol` is primal feasible, its multipliers are dual feasible and
/// the two objective values coincide.
pub fn verify_optimality(lp: &LinearProgram, sol: &Solution) -> bool {
    check_optimality(lp, sol).is_ok()
}

pub fn check_infeasibility(lp: &LinearProgram, ray: &Multipliers) -> Result<(), CertificateError> {
    check_shape(lp, ray)?;
    for (j, s) in stationarity_lhs(lp, ray).iter().enumerate() {
        if !s.is_zero() {
            return Err(CertificateError::Stationarity(j));
        }
    }
    let value = dual_value(lp, ray);
    if !value.is_positive() {
        return Err(CertificateError::FarkasValue(value));
    }
    Ok(())
}

/// True iff `ray` is a valid Farkas certificate of infeasibility.
pub fn verify_infeasibility(lp: &LinearProgram, ray: &Multipliers) -> bool {
    check_infeasibility(lp, ray).is_ok()
}
