//! Dense two-phase primal simplex with Bland's rule.
//!
//! Every standard-form row owns an identity column (its slack when that is
//! usable as a starting basis, otherwise an artificial). Artificial columns
//! stay in the tableau for the whole solve so that the identity columns keep
//! tracking `B⁻¹`; the row multipliers are read off their reduced costs.

use super::{LinearProgram, LpError, LpResult, Multipliers, Solution};
use crate::rational::Rational;

enum ColMap {
    /// `x = lower + x'`
    Shifted { col: usize, lower: Rational },
    /// `x = x⁺ - x⁻`
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy)]
enum RowKind {
    Eq(usize),
    Le(usize),
    Upper(usize),
}

struct Tableau {
    cols: usize,
    a: Vec<Rational>,
    b: Vec<Rational>,
    /// Phase-one reduced costs and negated objective value.
    z1: Vec<Rational>,
    z1v: Rational,
    /// Phase-two reduced costs and negated objective value.
    z2: Vec<Rational>,
    z2v: Rational,
    basis: Vec<usize>,
    track_phase_one: bool,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> &Rational {
        &self.a[r * self.cols + c]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let piv = self.a[r * cols + q].clone();
        if piv != Rational::one() {
            let inv = piv.recip().expect("pivot on zero entry");
            for j in 0..cols {
                let x = &mut self.a[r * cols + j];
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
            self.b[r] = &self.b[r] * &inv;
        }
        let nz: Vec<usize> = (0..cols).filter(|&j| !self.a[r * cols + j].is_zero()).collect();
        let rows = self.b.len();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = self.a[i * cols + q].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                let delta = &f * &self.a[r * cols + j];
                self.a[i * cols + j] -= &delta;
            }
            let delta = &f * &self.b[r];
            self.b[i] -= &delta;
        }
        let pivot_row: Vec<(usize, Rational)> =
            nz.iter().map(|&j| (j, self.a[r * cols + j].clone())).collect();
        let br = self.b[r].clone();
        let update = |z: &mut Vec<Rational>, zv: &mut Rational| {
            let f = z[q].clone();
            if f.is_zero() {
                return;
            }
            for (j, x) in &pivot_row {
                z[*j] -= &(&f * x);
            }
            *zv -= &(&f * &br);
        };
        update(&mut self.z2, &mut self.z2v);
        if self.track_phase_one {
            update(&mut self.z1, &mut self.z1v);
        }
        self.basis[r] = q;
    }

    /// Runs Bland's rule on the chosen cost row. Returns `false` if unbounded.
    fn run(&mut self, phase_one: bool, allowed: usize) -> bool {
        loop {
            let z = if phase_one { &self.z1 } else { &self.z2 };
            let Some(q) = (0..allowed).find(|&j| z[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.b.len() {
                let aiq = self.at(i, q);
                if !aiq.is_positive() {
                    continue;
                }
                let ratio = &self.b[i] / aiq;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, q),
                None => return false,
            }
        }
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> Result<LpResult, LpError> {
    lp.validate()?;
    let vars = lp.vars();
    let nv = vars.len();

    let mut colmap = Vec::with_capacity(nv);
    let mut ns = 0usize;
    for v in vars {
        match &v.lower {
            Some(l) => {
                colmap.push(ColMap::Shifted { col: ns, lower: l.clone() });
                ns += 1;
            }
            None => {
                colmap.push(ColMap::Split { pos: ns, neg: ns + 1 });
                ns += 2;
            }
        }
    }

    // Standard-form rows over structural columns, before sign normalisation.
    let mut kinds = Vec::new();
    let mut dense: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let mut push_row = |kind: RowKind, terms: &[(super::VarId, Rational)], r: &Rational| {
        let mut row = vec![Rational::zero(); ns];
        let mut b = r.clone();
        for (v, c) in terms {
            match &colmap[v.0] {
                ColMap::Shifted { col, lower } => {
                    row[*col] += c;
                    if !lower.is_zero() {
                        b -= &(c * lower);
                    }
                }
                ColMap::Split { pos, neg } => {
                    row[*pos] += c;
                    row[*neg] -= c;
                }
            }
        }
        kinds.push(kind);
        dense.push(row);
        rhs.push(b);
    };
    for (i, r) in lp.equalities().iter().enumerate() {
        push_row(RowKind::Eq(i), &r.terms, &r.rhs);
    }
    for (i, r) in lp.inequalities().iter().enumerate() {
        push_row(RowKind::Le(i), &r.terms, &r.rhs);
    }
    for (j, v) in vars.iter().enumerate() {
        if let Some(u) = &v.upper {
            push_row(RowKind::Upper(j), &[(super::VarId(j), Rational::one())], u);
        }
    }

    let m = kinds.len();
    let n_slack = kinds.iter().filter(|k| !matches!(k, RowKind::Eq(_))).count();
    let sign: Vec<bool> = rhs.iter().map(|b| b.is_negative()).collect(); // true = flipped
    let mut slack_col = vec![usize::MAX; m];
    let mut next_slack = ns;
    for (r, k) in kinds.iter().enumerate() {
        if !matches!(k, RowKind::Eq(_)) {
            slack_col[r] = next_slack;
            next_slack += 1;
        }
    }
    let art_start = ns + n_slack;
    let mut id_col = vec![0usize; m];
    let mut is_art = vec![false; m];
    let mut next_art = art_start;
    for r in 0..m {
        if slack_col[r] != usize::MAX && !sign[r] {
            id_col[r] = slack_col[r];
        } else {
            id_col[r] = next_art;
            is_art[r] = true;
            next_art += 1;
        }
    }
    let cols = next_art;

    let mut a = vec![Rational::zero(); m * cols];
    let mut b = Vec::with_capacity(m);
    for r in 0..m {
        let s = if sign[r] { -Rational::one() } else { Rational::one() };
        for (j, x) in dense[r].iter().enumerate() {
            if !x.is_zero() {
                a[r * cols + j] = if sign[r] { -x } else { x.clone() };
            }
        }
        if slack_col[r] != usize::MAX {
            a[r * cols + slack_col[r]] = s.clone();
        }
        if is_art[r] {
            a[r * cols + id_col[r]] = Rational::one();
        }
        b.push(if sign[r] { -&rhs[r] } else { rhs[r].clone() });
    }

    let cost = lp.cost_vector();
    let mut z2 = vec![Rational::zero(); cols];
    for (j, cm) in colmap.iter().enumerate() {
        match cm {
            ColMap::Shifted { col, .. } => z2[*col] = cost[j].clone(),
            ColMap::Split { pos, neg } => {
                z2[*pos] = cost[j].clone();
                z2[*neg] = -&cost[j];
            }
        }
    }
    let mut z1 = vec![Rational::zero(); cols];
    let mut z1v = Rational::zero();
    for c in art_start..cols {
        z1[c] = Rational::one();
    }
    for r in 0..m {
        if is_art[r] {
            for j in 0..cols {
                let x = &a[r * cols + j];
                if !x.is_zero() {
                    z1[j] -= x;
                }
            }
            z1v -= &b[r];
        }
    }

    let mut t = Tableau {
        cols,
        a,
        b,
        z1,
        z1v,
        z2,
        z2v: Rational::zero(),
        basis: id_col.clone(),
        track_phase_one: true,
    };

    let row_multipliers = |z: &[Rational], phase_one: bool| -> Vec<Rational> {
        (0..m)
            .map(|r| {
                let c = id_col[r];
                let base = if phase_one && c >= art_start { Rational::one() } else { Rational::zero() };
                let pi = &base - &z[c];
                if sign[r] {
                    -pi
                } else {
                    pi
                }
            })
            .collect()
    };
    let assemble = |pi: Vec<Rational>, z: &[Rational]| -> Multipliers {
        let mut out = Multipliers {
            equalities: vec![Rational::zero(); lp.equalities().len()],
            inequalities: vec![Rational::zero(); lp.inequalities().len()],
            lower: vec![Rational::zero(); nv],
            upper: vec![Rational::zero(); nv],
        };
        for (r, k) in kinds.iter().enumerate() {
            match *k {
                RowKind::Eq(i) => out.equalities[i] = pi[r].clone(),
                RowKind::Le(i) => out.inequalities[i] = -&pi[r],
                RowKind::Upper(j) => out.upper[j] = -&pi[r],
            }
        }
        for (j, cm) in colmap.iter().enumerate() {
            if let ColMap::Shifted { col, .. } = cm {
                out.lower[j] = z[*col].clone();
            }
        }
        out
    };

    if art_start < cols {
        t.run(true, cols);
        if (-&t.z1v).is_positive() {
            let pi = row_multipliers(&t.z1, true);
            return Ok(LpResult::Infeasible(assemble(pi, &t.z1)));
        }
        // Drive zero-level artificials out where a structural/slack pivot exists.
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(q) = (0..art_start).find(|&j| !t.at(r, j).is_zero()) {
                    t.pivot(r, q);
                }
            }
        }
    }
    t.track_phase_one = false;
    if !t.run(false, art_start) {
        return Ok(LpResult::Unbounded);
    }

    let mut xs = vec![Rational::zero(); cols];
    for (r, &c) in t.basis.iter().enumerate() {
        xs[c] = t.b[r].clone();
    }
    let primal: Vec<Rational> = colmap
        .iter()
        .map(|cm| match cm {
            ColMap::Shifted { col, lower } => lower + &xs[*col],
            ColMap::Split { pos, neg } => &xs[*pos] - &xs[*neg],
        })
        .collect();
    let objective: Rational = cost.iter().zip(&primal).map(|(c, x)| c * x).sum();
    let pi = row_multipliers(&t.z2, false);
    let duals = assemble(pi, &t.z2);
    Ok(LpResult::Optimal(Solution { primal, objective, duals }))
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn minimize_t_subject_to_t_at_least_one() {
        let mut lp = LinearProgram::new();
        let t = lp.add_nonneg("t");
        lp.add_ge(vec![(t, q("1"))], q("1"));
        lp.set_objective(vec![(t, q("1"))]);
        let res = solve(&lp).unwrap();
        let sol = res.optimal().expect("optimal");
        assert_eq!(sol.primal, vec![q("1")]);
        assert_eq!(sol.objective, q("1"));
        assert_eq!(sol.duals.inequalities, vec![q("1")]);
        assert!(verify_optimality(&lp, sol));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        lp.add_le(vec![(x, q("1"))], q("-1"));
        lp.set_objective(vec![(x, q("1"))]);
        let res = solve(&lp).unwrap();
        assert_eq!(res.status(), LpStatus::Infeasible);
        let LpResult::Infeasible(ray) = res else { unreachable!() };
        assert!(verify_infeasibility(&lp, &ray));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", None, None);
        let y = lp.add_nonneg("y");
        lp.add_le(vec![(x, q("1")), (y, q("-1"))], q("0"));
        lp.set_objective(vec![(x, q("1"))]);
        assert_eq!(solve(&lp).unwrap().status(), LpStatus::Unbounded);
    }

    #[test]
    fn free_and_boxed_variables() {
        // min -x - 2y  s.t. x + y <= 4, x free with x <= 3, 1 <= y <= 2, x - y = 0
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", None, Some(q("3")));
        let y = lp.add_var("y", Some(q("1")), Some(q("2")));
        lp.add_le(vec![(x, q("1")), (y, q("1"))], q("4"));
        lp.add_eq(vec![(x, q("1")), (y, q("-1"))], q("0"));
        lp.set_objective(vec![(x, q("-1")), (y, q("-2"))]);
        let res = solve(&lp).unwrap();
        let sol = res.optimal().unwrap();
        assert_eq!(sol.primal, vec![q("2"), q("2")]);
        assert_eq!(sol.objective, q("-6"));
        assert!(verify_optimality(&lp, sol));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling example (cycles under Dantzig's rule).
        let mut lp = LinearProgram::new();
        let x: Vec<_> = (0..4).map(|i| lp.add_nonneg(format!("x{i}"))).collect();
        lp.set_objective(vec![
            (x[0], q("-3/4")),
            (x[1], q("150")),
            (x[2], q("-1/50")),
            (x[3], q("6")),
        ]);
        lp.add_le(
            vec![(x[0], q("1/4")), (x[1], q("-60")), (x[2], q("-1/25")), (x[3], q("9"))],
            q("0"),
        );
        lp.add_le(
            vec![(x[0], q("1/2")), (x[1], q("-90")), (x[2], q("-1/50")), (x[3], q("3"))],
            q("0"),
        );
        lp.add_le(vec![(x[2], q("1"))], q("1"));
        let res = solve(&lp).unwrap();
        let sol = res.optimal().unwrap();
        assert_eq!(sol.objective, q("-1/20"));
        assert!(verify_optimality(&lp, sol));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.add_eq(vec![(x, q("1")), (y, q("1"))], q("2"));
        lp.add_eq(vec![(x, q("2")), (y, q("2"))], q("4"));
        lp.set_objective(vec![(x, q("1")), (y, q("3"))]);
        let res = solve(&lp).unwrap();
        let sol = res.optimal().unwrap();
        assert_eq!(sol.objective, q("2"));
        assert!(verify_optimality(&lp, sol));
    }

    #[test]
    fn wrong_primal_fails_certificate() {
        let mut lp = LinearProgram::new();
        let t = lp.add_nonneg("t");
        lp.add_ge(vec![(t, q("1"))], q("1"));
        lp.set_objective(vec![(t, q("1"))]);
        let mut sol = solve(&lp).unwrap().optimal().unwrap().clone();
        sol.primal[0] = q("2");
        sol.objective = q("2");
        assert!(!verify_optimality(&lp, &sol));
        assert!(matches!(
            check_optimality(&lp, &sol),
            Err(CertificateError::DualityGap { .. })
        ));
    }
}
