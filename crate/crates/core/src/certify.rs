//! Closed-form value curves, interval certificates and crossovers.
//!
//! If `opt` is nonincreasing in `v`, `opt(v) < next_to_opt(v')` for the next
//! grid point `v'`, and the optimum at `v` and `v'` is the same strategy,
//! then that strategy stays optimal on all of `[v, v']`: any other strategy
//! is worth at least `next_to_opt(v') > opt(v)` there, and the optimal one
//! is worth at most `opt(v)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::poly::{Polynomial, RootError};
use crate::rational::Rational;
use crate::signature::Signature;
use crate::sweep::SweepTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormName {
    ExactLt,
    ExactGt,
    MarkerSlow,
    MarkerFast,
}

impl ClosedFormName {
    pub const ALL: [ClosedFormName; 4] =
        [ClosedFormName::ExactLt, ClosedFormName::ExactGt, ClosedFormName::MarkerSlow, ClosedFormName::MarkerFast];

    pub fn as_str(self) -> &'static str {
        match self {
            ClosedFormName::ExactLt => "exact_lt",
            ClosedFormName::ExactGt => "exact_gt",
            ClosedFormName::MarkerSlow => "marker_slow",
            ClosedFormName::MarkerFast => "marker_fast",
        }
    }
}

impl fmt::Display for ClosedFormName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown closed form {0:?} (expected exact_lt, exact_gt, marker_slow or marker_fast)")]
pub struct UnknownForm(pub String);

impl FromStr for ClosedFormName {
    type Err = UnknownForm;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClosedFormName::ALL.into_iter().find(|n| n.as_str() == s).ok_or_else(|| UnknownForm(s.to_string()))
    }
}

/// `num(v) / den(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    fn new(num: &[i64], den: &[&[i64]]) -> Self {
        let den = den.iter().fold(Polynomial::from_integers(&[1]), |acc, f| acc.mul(&Polynomial::from_integers(f)));
        RationalFunction { num: Polynomial::from_integers(num), den }
    }

    pub fn eval(&self, v: &Rational) -> Option<Rational> {
        self.num.eval(v).checked_div(&self.den.eval(v)).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForm {
    pub name: ClosedFormName,
    pub z: Option<RationalFunction>,
    pub times: [RationalFunction; 4],
    pub sum: RationalFunction,
    /// Grid interval on which the curve is reported optimal.
    pub claimed: (Rational, Rational),
}

const P1: &[i64] = &[1, 1];
const V3: &[i64] = &[3, 1];
const T3: &[i64] = &[1, 3];

impl ClosedForm {
    pub fn get(name: ClosedFormName) -> ClosedForm {
        let rf = RationalFunction::new;
        let r = Rational::ratio;
        match name {
            ClosedFormName::ExactLt => ClosedForm {
                name,
                z: None,
                times: [rf(&[1], &[]), rf(&[1], &[]), rf(&[3, 1], &[P1]), rf(&[3, 8, 1], &[P1, P1])],
                sum: rf(&[8, 16, 4], &[P1, P1]),
                claimed: (r(1, 1000), r(618, 1000)),
            },
            ClosedFormName::ExactGt => ClosedForm {
                name,
                z: None,
                times: [rf(&[1], &[P1]), rf(&[1, 3], &[P1, P1]), rf(&[3, 5], &[P1, P1]), rf(&[3, 14, 7], &[P1, P1, P1])],
                sum: rf(&[8, 28, 16], &[P1, P1, P1]),
                claimed: (r(619, 1000), r(990, 1000)),
            },
            ClosedFormName::MarkerSlow => ClosedForm {
                name,
                z: Some(rf(&[1], &[V3])),
                times: [
                    rf(&[3], &[V3]),
                    rf(&[3, 5], &[P1, V3]),
                    rf(&[9, 12, 7], &[P1, P1, V3]),
                    rf(&[9, 35, 27, 9], &[P1, P1, P1, V3]),
                ],
                sum: rf(&[24, 76, 68, 24], &[P1, P1, P1, V3]),
                claimed: (r(17, 1000), r(1, 1)),
            },
            ClosedFormName::MarkerFast => ClosedForm {
                name,
                z: Some(rf(&[1], &[T3])),
                times: [rf(&[3], &[T3]), rf(&[5, 3], &[P1, T3]), rf(&[5, 9], &[P1, T3]), rf(&[7, 3], &[P1, P1])],
                sum: rf(&[20, 52, 24], &[P1, P1, T3]),
                claimed: (r(807, 1000), r(966, 1000)),
            },
        }
    }

    pub fn all() -> Vec<ClosedForm> {
        ClosedFormName::ALL.into_iter().map(ClosedForm::get).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormValue {
    pub name: ClosedFormName,
    pub v: Rational,
    pub z: Option<Rational>,
    pub times: [Rational; 4],
    pub sum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("v = {0} outside [0, 1]")]
    Domain(Rational),
    #[error("{name} has a pole at v = {v}")]
    Pole { name: ClosedFormName, v: Rational },
    #[error("no sign change of {a} - {b} on [{lo}, {hi}]")]
    NoSignChange { a: ClosedFormName, b: ClosedFormName, lo: Rational, hi: Rational },
    #[error(transparent)]
    Root(RootError),
}

pub fn eval_closed_form(name: ClosedFormName, v: &Rational) -> Result<ClosedFormValue, CertifyError> {
    if v.is_negative() || *v > Rational::one() {
        return Err(CertifyError::Domain(v.clone()));
    }
    let form = ClosedForm::get(name);
    let at = |f: &RationalFunction| f.eval(v).ok_or(CertifyError::Pole { name, v: v.clone() });
    let z = form.z.as_ref().map(at).transpose()?;
    let [t1, t2, t3, t4] = &form.times;
    Ok(ClosedFormValue { name, v: v.clone(), z, times: [at(t1)?, at(t2)?, at(t3)?, at(t4)?], sum: at(&form.sum)? })
}

/// Enclosure of a point where the two value curves cross, from the
/// numerator of their difference.
pub fn crossover(
    a: ClosedFormName,
    b: ClosedFormName,
    bracket: (&Rational, &Rational),
    width: &Rational,
) -> Result<(Rational, Rational), CertifyError> {
    let (fa, fb) = (ClosedForm::get(a).sum, ClosedForm::get(b).sum);
    let num = fa.num.mul(&fb.den).sub(&fb.num.mul(&fa.den));
    let (lo, hi) = (bracket.0.clone(), bracket.1.clone());
    num.isolate_root(&lo, &hi, width).map_err(|e| match e {
        RootError::NoSignChange { .. } | RootError::ZeroPolynomial => CertifyError::NoSignChange { a, b, lo, hi },
        other => CertifyError::Root(other),
    })
}

/// Numerator of `a - b` after clearing the (positive on `[0, 1]`)
/// denominators.
pub fn difference_numerator(a: ClosedFormName, b: ClosedFormName) -> Polynomial {
    let (fa, fb) = (ClosedForm::get(a).sum, ClosedForm::get(b).sum);
    fa.num.mul(&fb.den).sub(&fb.num.mul(&fa.den))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifiedInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub signature: Signature,
    pub closed_form: Option<ClosedFormName>,
    /// Optimal assignment at the lower end.
    pub strategy_id: String,
    pub points: usize,
}

/// Maximal runs of at least two grid points where every step satisfies
/// `opt(v) < next_to_opt(v')` with an unchanged optimal signature. A point
/// without any competing strategy counts as `next_to_opt = +inf`.
pub fn certify(table: &SweepTable) -> Vec<CertifiedInterval> {
    let rows = &table.rows;
    let step_ok = |i: usize| {
        let (a, b) = (&rows[i], &rows[i + 1]);
        a.signature() == b.signature() && b.next_to_opt.as_ref().is_none_or(|n| a.opt_sum() < n)
    };
    let forms = ClosedForm::all();
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < rows.len() {
        if !step_ok(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < rows.len() && step_ok(i) {
            i += 1;
        }
        let run = &rows[start..=i];
        let closed_form = forms
            .iter()
            .find(|f| run.iter().all(|r| f.sum.eval(&r.v).as_ref() == Some(r.opt_sum())))
            .map(|f| f.name);
        out.push(CertifiedInterval {
            lo: run[0].v.clone(),
            hi: run[run.len() - 1].v.clone(),
            signature: run[0].signature().clone(),
            closed_form,
            strategy_id: run[0].opt.id.clone(),
            points: run.len(),
        });
    }
    out
}

/// First closed form whose sum equals `value` at `v`.
pub fn match_closed_form(v: &Rational, value: &Rational) -> Option<ClosedFormName> {
    ClosedForm::all().into_iter().find(|f| f.sum.eval(v).as_ref() == Some(value)).map(|f| f.name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn spot_evaluations() {
        let e = eval_closed_form(ClosedFormName::ExactLt, &q("0")).unwrap();
        assert_eq!(e.times, ["1", "1", "3", "3"].map(q));
        assert_eq!(e.sum, q("8"));
        let e = eval_closed_form(ClosedFormName::ExactGt, &q("1")).unwrap();
        assert_eq!(e.times, ["1/2", "1", "2", "3"].map(q));
        assert_eq!(e.sum, q("13/2"));
        let e = eval_closed_form(ClosedFormName::MarkerSlow, &q("1")).unwrap();
        assert_eq!(e.z, Some(q("1/4")));
        assert_eq!(e.times, ["3/4", "1", "7/4", "5/2"].map(q));
        assert_eq!(e.sum, q("6"));
        assert_eq!(eval_closed_form(ClosedFormName::MarkerFast, &q("1")).unwrap().sum, q("6"));
        assert!(matches!(eval_closed_form(ClosedFormName::ExactLt, &q("2")), Err(CertifyError::Domain(_))));
    }

    #[test]
    fn sums_equal_sum_of_times_on_grid() {
        for form in ClosedForm::all() {
            for k in 0..=100 {
                let v = Rational::ratio(k, 100);
                let e = eval_closed_form(form.name, &v).unwrap();
                let total: Rational = e.times.iter().sum();
                assert_eq!(total, e.sum, "{} at {v}", form.name);
            }
        }
    }

    #[test]
    fn golden_crossover() {
        let w = q("1/1000000000000");
        let (lo, hi) = crossover(ClosedFormName::ExactLt, ClosedFormName::ExactGt, (&q("1/2"), &q("7/10")), &w).unwrap();
        assert!(&hi - &lo <= w);
        assert!(lo <= q("0.6180339887499") && hi >= q("0.6180339887498"));
        // 4v (v^2 + v - 1) (1 + v)^2
        let p = difference_numerator(ClosedFormName::ExactLt, ClosedFormName::ExactGt);
        let expect = Polynomial::from_integers(&[0, -4, 4, 4])
            .mul(&Polynomial::from_integers(&[1, 1]))
            .mul(&Polynomial::from_integers(&[1, 1]));
        assert_eq!(p, expect);
    }

    #[test]
    fn marker_crossover_and_identity_error() {
        let w = q("1/1000");
        let (lo, hi) =
            crossover(ClosedFormName::ExactGt, ClosedFormName::MarkerFast, (&q("7/10"), &q("9/10")), &w).unwrap();
        assert!(&hi - &lo <= w);
        assert!(lo <= q("0.805") && q("0.805") <= hi, "[{lo}, {hi}]");
        let p = difference_numerator(ClosedFormName::ExactGt, ClosedFormName::MarkerFast);
        // (v+1)^2 * 4 (6v^3 + 6v^2 - 5v - 3)
        let cubic = Polynomial::from_integers(&[-3, -5, 6, 6]);
        let expect = cubic.mul(&Polynomial::from_integers(&[1, 1])).mul(&Polynomial::from_integers(&[4, 4]));
        assert_eq!(p, expect);
        assert!(matches!(
            crossover(ClosedFormName::MarkerSlow, ClosedFormName::MarkerSlow, (&q("0"), &q("1")), &w),
            Err(CertifyError::NoSignChange { .. })
        ));
    }
}
