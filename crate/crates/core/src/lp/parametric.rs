//! Programs whose data are affine functions of one scalar parameter.
//!
//! A dual vector found at one parameter value stays a valid weak-duality
//! certificate over the whole interval where its reduced costs keep signs
//! compatible with the variable bounds. [`ParametricProgram::certified_range`]
//! computes that interval and the bound it proves at each point in it.

use std::ops::{Add, Mul, Neg, Sub};

use super::{LinearProgram, Multipliers, VarId};
use crate::rational::Rational;

/// `constant + slope·v`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Affine {
    pub constant: Rational,
    pub slope: Rational,
}

impl Affine {
    pub fn new(constant: Rational, slope: Rational) -> Self {
        Affine { constant, slope }
    }

    pub fn constant(c: Rational) -> Self {
        Affine { constant: c, slope: Rational::zero() }
    }

    /// The parameter itself.
    pub fn param() -> Self {
        Affine { constant: Rational::zero(), slope: Rational::one() }
    }

    pub fn int(c: i64) -> Self {
        Affine::constant(Rational::from_integer(c))
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.slope.is_zero()
    }

    pub fn eval(&self, v: &Rational) -> Rational {
        if self.slope.is_zero() {
            self.constant.clone()
        } else {
            &self.constant + &(&self.slope * v)
        }
    }

    pub fn scale(&self, k: &Rational) -> Affine {
        Affine { constant: &self.constant * k, slope: &self.slope * k }
    }
}

impl Add for &Affine {
    type Output = Affine;
    fn add(self, o: &Affine) -> Affine {
        Affine { constant: &self.constant + &o.constant, slope: &self.slope + &o.slope }
    }
}

impl Sub for &Affine {
    type Output = Affine;
    fn sub(self, o: &Affine) -> Affine {
        Affine { constant: &self.constant - &o.constant, slope: &self.slope - &o.slope }
    }
}

impl Neg for &Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        Affine { constant: -&self.constant, slope: -&self.slope }
    }
}

impl Mul<&Rational> for &Affine {
    type Output = Affine;
    fn mul(self, k: &Rational) -> Affine {
        self.scale(k)
    }
}

/// Sparse linear form with affine coefficients, merged on insertion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AffineExpr {
    pub terms: Vec<(VarId, Affine)>,
}

impl AffineExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, var: VarId, coeff: Affine) -> &mut Self {
        if let Some((_, c)) = self.terms.iter_mut().find(|(v, _)| *v == var) {
            *c = &*c + &coeff;
        } else {
            self.terms.push((var, coeff));
        }
        self
    }

    pub fn with(mut self, var: VarId, coeff: Affine) -> Self {
        self.add(var, coeff);
        self
    }

    fn instantiate(&self, v: &Rational) -> Vec<(VarId, Rational)> {
        self.terms
            .iter()
            .filter_map(|(var, c)| {
                let k = c.eval(v);
                (!k.is_zero()).then_some((*var, k))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ParamVar {
    name: String,
    lower: Option<Affine>,
    upper: Option<Affine>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ParamRow {
    expr: AffineExpr,
    rhs: Affine,
}

/// Which kind of dual vector a certificate was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    /// Optimal multipliers: certifies a lower bound on the optimum.
    Optimal,
    /// Farkas ray: certifies infeasibility where its value is positive.
    Farkas,
}

/// What a certificate proves at a particular parameter value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RangeVerdict {
    LowerBound(Rational),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct BoundTerm {
    reduced: Affine,
    lower: Option<Affine>,
    upper: Option<Affine>,
}

/// A fixed dual vector together with the closed parameter interval where it
/// stays dual feasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedRange {
    kind: CertificateKind,
    /// `None` means unbounded on that side.
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
    /// `e·y - g·λ` as a function of the parameter.
    base: Affine,
    bounds: Vec<BoundTerm>,
}

impl CertifiedRange {
    pub fn kind(&self) -> CertificateKind {
        self.kind
    }

    pub fn covers(&self, v: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo <= v) && self.hi.as_ref().is_none_or(|hi| v <= hi)
    }

    /// Dual objective at `v`, or `None` outside the range.
    pub fn value_at(&self, v: &Rational) -> Option<Rational> {
        if !self.covers(v) {
            return None;
        }
        let mut d = self.base.eval(v);
        for b in &self.bounds {
            let r = b.reduced.eval(v);
            // a missing lower entry stands for a zero bound
            if r.is_positive() {
                if let Some(l) = &b.lower {
                    d += &(&l.eval(v) * &r);
                }
            } else if r.is_negative() {
                d += &(&b.upper.as_ref().expect("sign checked by range").eval(v) * &r);
            }
        }
        Some(d)
    }

    pub fn at(&self, v: &Rational) -> Option<RangeVerdict> {
        let d = self.value_at(v)?;
        match self.kind {
            CertificateKind::Optimal => Some(RangeVerdict::LowerBound(d)),
            CertificateKind::Farkas => d.is_positive().then_some(RangeVerdict::Infeasible),
        }
    }
}

/// Linear program with affine data in one parameter; costs are fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParametricProgram {
    vars: Vec<ParamVar>,
    equalities: Vec<ParamRow>,
    inequalities: Vec<ParamRow>,
    objective: Vec<(VarId, Rational)>,
}

impl ParametricProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: Option<Affine>,
        upper: Option<Affine>,
    ) -> VarId {
        self.vars.push(ParamVar { name: name.into(), lower, upper });
        VarId(self.vars.len() - 1)
    }

    pub fn add_nonneg(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, Some(Affine::default()), None)
    }

    pub fn add_eq(&mut self, expr: AffineExpr, rhs: Affine) {
        self.equalities.push(ParamRow { expr, rhs });
    }

    pub fn add_le(&mut self, expr: AffineExpr, rhs: Affine) {
        self.inequalities.push(ParamRow { expr, rhs });
    }

    pub fn add_ge(&mut self, expr: AffineExpr, rhs: Affine) {
        let expr = AffineExpr { terms: expr.terms.iter().map(|(v, c)| (*v, -c)).collect() };
        self.inequalities.push(ParamRow { expr, rhs: -&rhs });
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, Rational)>) {
        self.objective = terms;
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0].name
    }

    /// True when raising the parameter can only enlarge the feasible set.
    ///
    /// Sufficient structural test: equalities and bounds do not depend on
    /// the parameter, every inequality's right-hand side is nondecreasing,
    /// and the parameter part `s·x` of each left-hand side is nonpositive on
    /// the feasible set. The last holds when `s` is entrywise nonpositive on
    /// variables bounded below by a nonnegative constant, or when `s` is a
    /// positive multiple of a parameter-free row `r·x <= h` with `h <= 0`.
    pub fn relaxes_upward(&self) -> bool {
        let fixed = |a: &Affine| a.slope.is_zero();
        if self.equalities.iter().any(|r| !fixed(&r.rhs) || r.expr.terms.iter().any(|(_, c)| !fixed(c))) {
            return false;
        }
        if self.vars.iter().any(|v| !v.lower.as_ref().is_none_or(fixed) || !v.upper.as_ref().is_none_or(fixed)) {
            return false;
        }
        let slopes = |e: &AffineExpr| -> Vec<(usize, Rational)> {
            let mut s: Vec<(usize, Rational)> =
                e.terms.iter().filter(|(_, c)| !c.slope.is_zero()).map(|(v, c)| (v.0, c.slope.clone())).collect();
            s.sort_by_key(|(v, _)| *v);
            s
        };
        let constants = |e: &AffineExpr| -> Vec<(usize, Rational)> {
            let mut s: Vec<(usize, Rational)> = e
                .terms
                .iter()
                .filter(|(_, c)| !c.constant.is_zero())
                .map(|(v, c)| (v.0, c.constant.clone()))
                .collect();
            s.sort_by_key(|(v, _)| *v);
            s
        };
        let nonneg = |j: usize| self.vars[j].lower.as_ref().is_some_and(|l| !l.constant.is_negative());
        let anchors: Vec<Vec<(usize, Rational)>> = self
            .inequalities
            .iter()
            .filter(|r| {
                fixed(&r.rhs) && !r.rhs.constant.is_positive() && r.expr.terms.iter().all(|(_, c)| fixed(c))
            })
            .map(|r| constants(&r.expr))
            .collect();
        self.inequalities.iter().all(|r| {
            if r.rhs.slope.is_negative() {
                return false;
            }
            let s = slopes(&r.expr);
            if s.is_empty() || s.iter().all(|(j, c)| !c.is_positive() && nonneg(*j)) {
                return true;
            }
            anchors.iter().any(|a| {
                a.len() == s.len() && {
                    let k = &s[0].1 / &a[0].1;
                    k.is_positive() && a.iter().zip(&s).all(|((ja, ca), (js, cs))| ja == js && &(ca * &k) == cs)
                }
            })
        })
    }

    /// Concrete program at parameter `v`. Row and variable indices match, so
    /// multipliers of the instance can be fed back to [`Self::certified_range`].
    pub fn instantiate(&self, v: &Rational) -> LinearProgram {
        let mut lp = LinearProgram::new();
        for var in &self.vars {
            lp.add_var(
                var.name.clone(),
                var.lower.as_ref().map(|a| a.eval(v)),
                var.upper.as_ref().map(|a| a.eval(v)),
            );
        }
        for r in &self.equalities {
            lp.add_eq(r.expr.instantiate(v), r.rhs.eval(v));
        }
        for r in &self.inequalities {
            lp.add_le(r.expr.instantiate(v), r.rhs.eval(v));
        }
        lp.set_objective(self.objective.clone());
        lp
    }

    /// Parameter interval over which the row multipliers `y, λ` of `m`,
    /// completed with the best bound multipliers, remain dual feasible.
    ///
    /// Returns `None` when the multipliers have the wrong shape or are
    /// feasible nowhere.
    pub fn certified_range(&self, m: &Multipliers, kind: CertificateKind) -> Option<CertifiedRange> {
        let n = self.vars.len();
        if m.equalities.len() != self.equalities.len()
            || m.inequalities.len() != self.inequalities.len()
            || m.inequalities.iter().any(Rational::is_negative)
        {
            return None;
        }
        // reduced cost r = c - Eᵀy + Gᵀλ, which must equal μ - ν
        let mut reduced = vec![Affine::default(); n];
        if kind == CertificateKind::Optimal {
            for (v, c) in &self.objective {
                reduced[v.0].constant += c;
            }
        }
        let mut base = Affine::default();
        for (row, y) in self.equalities.iter().zip(&m.equalities) {
            if y.is_zero() {
                continue;
            }
            for (v, c) in &row.expr.terms {
                reduced[v.0] = &reduced[v.0] - &(c * y);
            }
            base = &base + &(&row.rhs * y);
        }
        for (row, l) in self.inequalities.iter().zip(&m.inequalities) {
            if l.is_zero() {
                continue;
            }
            for (v, c) in &row.expr.terms {
                reduced[v.0] = &reduced[v.0] + &(c * l);
            }
            base = &base - &(&row.rhs * l);
        }

        let mut range = Interval::all();
        let mut bounds = Vec::new();
        for (r, var) in reduced.into_iter().zip(&self.vars) {
            if r.is_zero() {
                continue;
            }
            match (&var.lower, &var.upper) {
                (Some(_), Some(_)) => {}
                (Some(_), None) => range.require_nonneg(&r),
                (None, Some(_)) => range.require_nonneg(&-&r),
                (None, None) => {
                    range.require_nonneg(&r);
                    range.require_nonneg(&-&r);
                }
            }
            if range.empty {
                return None;
            }
            // zero lower bounds contribute nothing
            let lower = var.lower.clone().filter(|a| !a.is_zero());
            let upper = var.upper.clone();
            if lower.is_some() || upper.is_some() {
                bounds.push(BoundTerm { reduced: r, lower, upper });
            }
        }
        Some(CertifiedRange { kind, lo: range.lo, hi: range.hi, base, bounds })
    }
}

struct Interval {
    lo: Option<Rational>,
    hi: Option<Rational>,
    empty: bool,
}

impl Interval {
    fn all() -> Self {
        Interval { lo: None, hi: None, empty: false }
    }

    /// Intersect with `{v : a(v) >= 0}`.
    fn require_nonneg(&mut self, a: &Affine) {
        let s = a.slope.signum();
        if s == 0 {
            if a.constant.is_negative() {
                self.empty = true;
            }
            return;
        }
        let root = -&(&a.constant / &a.slope);
        if s > 0 {
            if self.lo.as_ref().is_none_or(|lo| *lo < root) {
                self.lo = Some(root);
            }
        } else if self.hi.as_ref().is_none_or(|hi| *hi > root) {
            self.hi = Some(root);
        }
        if let (Some(lo), Some(hi)) = (&self.lo, &self.hi) {
            if lo > hi {
                self.empty = true;
            }
        }
    }
}
