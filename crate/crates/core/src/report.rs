//! Tabular and JSON renderings of sweeps, certificates, rankings, oracle
//! runs and closed-form evaluations. Every reported time is scaled by the
//! distance `D`.

use std::io;

use serde::Serialize;
use serde_json::{json, Value};

use crate::certify::{eval_closed_form, match_closed_form, CertifiedInterval, ClosedForm, ClosedFormName, ClosedFormValue};
use crate::families::{build, BuildError, ParameterAssignment};
use crate::game::{check_primal, simulate, strategies_from_solution, GameConfig, SimError, StrategyDump, Validity};
use crate::lp::{solve, LinearProgram, LpError, LpResult};
use crate::oracle::OracleResult;
use crate::rational::Rational;
use crate::sweep::{FamilyRanking, SweepTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Decimal column companion of a rational column.
pub fn decimal(x: &Rational) -> String {
    x.to_decimal_digits(12)
}

/// One sweep row at distance `D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRecord {
    pub v: Rational,
    pub opt_sum: Rational,
    pub opt_avg: Rational,
    pub next_to_opt_sum: Option<Rational>,
    pub strategy_id: String,
    /// The matching closed form, or the nearest one when none matches.
    pub closed_form: Option<ClosedFormName>,
    pub closed_form_sum: Option<Rational>,
    #[serde(rename = "match")]
    pub matches: bool,
}

fn nearest_form(v: &Rational, value: &Rational) -> Option<(ClosedFormName, Rational)> {
    ClosedForm::all()
        .into_iter()
        .filter_map(|f| f.sum.eval(v).map(|s| (f.name, s)))
        .min_by(|a, b| (&a.1 - value).abs().cmp(&(&b.1 - value).abs()))
}

pub fn sweep_records(table: &SweepTable, distance: &Rational) -> Vec<SweepRecord> {
    table
        .rows
        .iter()
        .map(|row| {
            let unit = row.opt_sum();
            let (form, form_sum, matches) = match match_closed_form(&row.v, unit) {
                Some(name) => (Some(name), Some(unit.clone()), true),
                None => match nearest_form(&row.v, unit) {
                    Some((name, s)) => (Some(name), Some(s), false),
                    None => (None, None, false),
                },
            };
            SweepRecord {
                v: row.v.clone(),
                opt_sum: unit * distance,
                opt_avg: &row.opt_avg() * distance,
                next_to_opt_sum: row.next_to_opt.as_ref().map(|n| n * distance),
                strategy_id: row.opt.id.clone(),
                closed_form: form,
                closed_form_sum: form_sum.map(|s| &s * distance),
                matches,
            }
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 13] = [
    "v",
    "v_decimal",
    "opt_sum",
    "opt_sum_decimal",
    "opt_avg",
    "opt_avg_decimal",
    "next_to_opt_sum",
    "next_to_opt_sum_decimal",
    "strategy_id",
    "closed_form",
    "closed_form_sum",
    "closed_form_sum_decimal",
    "match",
];

fn pair(x: Option<&Rational>) -> [String; 2] {
    match x {
        Some(x) => [x.to_string(), decimal(x)],
        None => [String::new(), String::new()],
    }
}

pub fn write_sweep_csv<W: io::Write>(out: W, records: &[SweepRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in records {
        let mut row = Vec::with_capacity(SWEEP_HEADER.len());
        row.extend(pair(Some(&r.v)));
        row.extend(pair(Some(&r.opt_sum)));
        row.extend(pair(Some(&r.opt_avg)));
        row.extend(pair(r.next_to_opt_sum.as_ref()));
        row.push(r.strategy_id.clone());
        row.push(r.closed_form.map_or(String::new(), |f| f.to_string()));
        row.extend(pair(r.closed_form_sum.as_ref()));
        row.push(r.matches.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn metadata(table: &SweepTable, distance: &Rational) -> Value {
    json!({
        "variant": table.variant,
        "grid": table.steps,
        "distance": distance,
        "version": VERSION,
        "stats": table.stats,
    })
}

pub fn sweep_json(table: &SweepTable, distance: &Rational) -> Value {
    json!({
        "metadata": metadata(table, distance),
        "rows": sweep_records(table, distance),
    })
}

pub fn certify_json(table: &SweepTable, distance: &Rational, intervals: &[CertifiedInterval]) -> Value {
    json!({
        "metadata": metadata(table, distance),
        "intervals": intervals,
    })
}

pub fn certify_text(table: &SweepTable, intervals: &[CertifiedInterval]) -> String {
    let mut s = format!("{} grid 1/{}: {} certified interval(s)\n", table.variant, table.steps, intervals.len());
    for c in intervals {
        s.push_str(&format!(
            "[{}, {}] {} points, closed form {}, strategy {}\n",
            decimal(&c.lo),
            decimal(&c.hi),
            c.points,
            c.closed_form.map_or("none".to_string(), |f| f.to_string()),
            c.strategy_id,
        ));
    }
    s
}

pub fn ranking_json(ranking: &FamilyRanking, distance: &Rational, top: usize) -> Value {
    let opt = ranking.opt();
    let next = ranking.next_to_opt_entry();
    let entries: Vec<Value> = ranking
        .valid()
        .take(top)
        .map(|e| {
            json!({
                "id": e.id,
                "sum": &e.objective * distance,
                "sum_decimal": decimal(&(&e.objective * distance)),
                "times": e.times().map(|t| &t * distance),
                "signature": e.signature,
            })
        })
        .collect();
    json!({
        "variant": ranking.variant,
        "v": ranking.v,
        "distance": distance,
        "version": VERSION,
        "opt_sum": opt.map(|e| &e.objective * distance),
        "opt_avg": opt.map(|e| &(&e.objective * distance) / &Rational::from_integer(4)),
        "next_to_opt_sum": next.map(|e| &e.objective * distance),
        "strategy_id": opt.map(|e| e.id.clone()),
        "stats": ranking.stats,
        "ranking": entries,
    })
}

pub fn ranking_text(ranking: &FamilyRanking, distance: &Rational, top: usize) -> String {
    let mut s = String::new();
    match ranking.opt() {
        Some(opt) => {
            let sum = &opt.objective * distance;
            s.push_str(&format!("opt_sum {} ({})\n", sum, decimal(&sum)));
            s.push_str(&format!("opt_avg {}\n", &sum / &Rational::from_integer(4)));
            s.push_str(&format!("strategy {}\n", opt.id));
        }
        None => s.push_str("no valid strategy\n"),
    }
    if let Some(n) = ranking.next_to_opt_entry() {
        let sum = &n.objective * distance;
        s.push_str(&format!("next_to_opt_sum {} ({}) by {}\n", sum, decimal(&sum), n.id));
    }
    s.push_str(&format!(
        "{} LPs, {} optimal, {} replays valid\n",
        ranking.stats.lps_solved, ranking.stats.optimal, ranking.stats.replays_valid
    ));
    for (k, e) in ranking.valid().take(top).enumerate() {
        s.push_str(&format!("{:>4} {} {}\n", k + 1, decimal(&(&e.objective * distance)), e.id));
    }
    s
}

/// Closed-form rows at distance `D`; forms undefined at some `v` are left
/// out.
pub fn eval_rows(names: &[ClosedFormName], vs: &[Rational], distance: &Rational) -> Vec<ClosedFormValue> {
    let mut out = Vec::new();
    for &name in names {
        for v in vs {
            if let Ok(mut e) = eval_closed_form(name, v) {
                e.z = e.z.map(|z| &z * distance);
                e.times = e.times.map(|t| &t * distance);
                e.sum = &e.sum * distance;
                out.push(e);
            }
        }
    }
    out
}

pub fn write_eval_csv<W: io::Write>(out: W, rows: &[ClosedFormValue]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "v", "z", "t1", "t2", "t3", "t4", "sum", "sum_decimal"])?;
    for e in rows {
        let mut row = vec![e.name.to_string(), e.v.to_string(), e.z.as_ref().map_or(String::new(), |z| z.to_string())];
        row.extend(e.times.iter().map(|t| t.to_string()));
        row.push(e.sum.to_string());
        row.push(decimal(&e.sum));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn oracle_json(result: &OracleResult, lp_value: &Rational, distance: &Rational) -> Value {
    let value = &result.value * distance;
    let lp = lp_value * distance;
    json!({
        "variant": result.variant,
        "v": result.v,
        "distance": distance,
        "version": VERSION,
        "resolution": result.spec.resolution,
        "horizon": &result.spec.horizon * distance,
        "value": value,
        "value_decimal": decimal(&value),
        "lp_value": lp,
        "gap": &value - &lp,
        "gap_decimal": decimal(&(&value - &lp)),
        "nodes": result.nodes,
        "strategy": result.strategy,
        "times": result.outcome.times.clone().map(|t| &t * distance),
    })
}

pub fn oracle_text(result: &OracleResult, lp_value: &Rational, distance: &Rational) -> String {
    let value = &result.value * distance;
    let gap = &value - &(lp_value * distance);
    let s = &result.strategy;
    format!(
        "value {} ({})\nlp {}\ngap {} ({})\nframe {} order {} signs {} displacements {} directions {}{}\n",
        value,
        decimal(&value),
        lp_value * distance,
        gap,
        decimal(&gap),
        s.frame,
        s.order.label(),
        s.origin.signs.iter().map(|x| x.symbol()).collect::<String>(),
        s.origin.displacements.iter().map(|x| (x * distance).to_string()).collect::<Vec<_>>().join(","),
        s.agents.directions.iter().map(|x| x.symbol()).collect::<String>(),
        s.drop.as_ref().map_or(String::new(), |d| format!(
            " drop {}{} at {} in interval {}",
            d.sign.symbol(),
            &d.displacement * distance,
            &d.time * distance,
            d.interval
        )),
    )
}

#[derive(Debug, thiserror::Error)]
pub enum ShowError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("program of {0} is infeasible at this speed")]
    Infeasible(String),
    #[error("program of {0} is unbounded")]
    Unbounded(String),
    #[error("replay failed: {0}")]
    Replay(#[from] SimError),
    #[error(transparent)]
    Config(#[from] crate::game::ConfigError),
}

/// Solves one member's program at `v` and replays its optimum at distance
/// `D`. Also returns the program and whether the optimum passed the replay
/// check.
pub fn show_strategy(
    assignment: &ParameterAssignment,
    v: &Rational,
    distance: &Rational,
) -> Result<(StrategyDump, Validity, LinearProgram), ShowError> {
    let lp = build(assignment, v)?;
    let sol = match solve(&lp)? {
        LpResult::Optimal(s) => s,
        LpResult::Infeasible(_) => return Err(ShowError::Infeasible(assignment.id())),
        LpResult::Unbounded => return Err(ShowError::Unbounded(assignment.id())),
    };
    let validity = check_primal(&GameConfig::unit(v.clone(), assignment.variant)?, assignment, &sol.primal);
    let config = GameConfig::new(v.clone(), distance.clone(), assignment.variant)?;
    let (origin, agents, drop) = strategies_from_solution(assignment, &sol.primal, distance);
    let (outcome, marker) = simulate(&config, &origin, &agents, &assignment.order, drop.as_ref())?;
    let dump = StrategyDump::new(&config, &origin, &agents, &assignment.order, drop.as_ref(), outcome, marker);
    Ok((dump, validity, lp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Variant;
    use crate::sweep::{sweep, SweepOptions};

    #[test]
    fn csv_quotes_ids_and_pairs_decimals() {
        let table = sweep(Variant::NoMarker, 2, SweepOptions::default()).unwrap();
        let recs = sweep_records(&table, &Rational::one());
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_HEADER.join(","));
        let last = lines.last().unwrap();
        assert!(last.starts_with("1,1,13/2,6.5,13/8,1.625,"), "{last}");
        assert!(last.contains("\"none/"), "{last}");
        assert!(last.ends_with("exact_gt,13/2,6.5,true"), "{last}");
    }

    #[test]
    fn distance_scales_reported_sums() {
        let table = sweep(Variant::NoMarker, 4, SweepOptions::default()).unwrap();
        let one = sweep_records(&table, &Rational::one());
        let two = sweep_records(&table, &Rational::from_integer(2));
        for (a, b) in one.iter().zip(&two) {
            assert_eq!(&a.opt_sum * &Rational::from_integer(2), b.opt_sum);
            assert_eq!(a.matches, b.matches);
        }
    }
}
