//! One PASS/FAIL line per acceptance criterion.
//!
//! Runs the full grid-1000 sweeps, so expect a few minutes. The process
//! exits 0 once every line is printed; set `ACCEPTANCE_STRICT=1` to make any
//! FAIL line turn into a nonzero exit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rendezvous::certify::{certify, crossover, ClosedFormName, CertifiedInterval};
use rendezvous::families::enumerate;
use rendezvous::game::{simulate, strategies_from_solution, GameConfig, Variant};
use rendezvous::oracle::{brute_force_opt, GridStrategySpec};
use rendezvous::rational::Rational;
use rendezvous::report::{show_strategy, sweep_records};
use rendezvous::sweep::{game_value, sweep, SweepOptions, SweepTable};

const GRID: u32 = 1000;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn grid(k: u32) -> Rational {
    Rational::ratio(k as i64, GRID as i64)
}

fn poly(coeffs: &[i64], v: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, &c| &(&acc * v) + &r(c))
}

// Value curves written out directly, as sums of the four meeting times.

fn exact_lt(v: &Rational) -> Rational {
    &poly(&[8, 16, 4], v) / &poly(&[1, 2, 1], v)
}

fn exact_gt(v: &Rational) -> Rational {
    &poly(&[8, 28, 16], v) / &poly(&[1, 3, 3, 1], v)
}

fn marker_slow(v: &Rational) -> Rational {
    // (v+1)^3 (v+3) = v^4 + 6v^3 + 12v^2 + 10v + 3
    &poly(&[24, 76, 68, 24], v) / &poly(&[3, 10, 12, 6, 1], v)
}

fn marker_fast(v: &Rational) -> Rational {
    // (v+1)^2 (3v+1) = 3v^3 + 7v^2 + 5v + 1
    &poly(&[20, 52, 24], v) / &poly(&[1, 5, 7, 3], v)
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, n: u32, title: &str, problems: Vec<String>, detail: String) {
        if problems.is_empty() {
            println!("PASS {n} {title}: {detail}");
        } else {
            self.failures += 1;
            println!("FAIL {n} {title}: {detail}");
            for p in problems.iter().take(8) {
                println!("     - {p}");
            }
            if problems.len() > 8 {
                println!("     - ... {} more", problems.len() - 8);
            }
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn row_sum(t: &SweepTable, k: u32) -> &Rational {
    let row = &t.rows[(k - 1) as usize];
    assert_eq!(row.v, grid(k));
    row.opt_sum()
}

fn check_curve(t: &SweepTable, ks: std::ops::RangeInclusive<u32>, name: &str, f: fn(&Rational) -> Rational) -> Vec<String> {
    ks.filter_map(|k| {
        let (got, want) = (row_sum(t, k), f(&grid(k)));
        (*got != want).then(|| format!("v = {}: opt_sum {got} but {name} gives {want}", grid(k)))
    })
    .collect()
}

fn find_interval(ivs: &[CertifiedInterval], lo: &str, hi: &str, form: ClosedFormName) -> Option<String> {
    let (lo, hi) = (q(lo), q(hi));
    match ivs.iter().find(|iv| iv.lo == lo && iv.hi == hi) {
        Some(iv) if iv.closed_form == Some(form) => None,
        Some(iv) => Some(format!("[{lo}, {hi}] certified with form {:?}, expected {}", iv.closed_form, form.as_str())),
        None => Some(format!("[{}, {}] not certified", lo.to_decimal_digits(3), hi.to_decimal_digits(3))),
    }
}

/// Re-checks the monotonicity step condition over every reported interval.
fn lemma_holds(t: &SweepTable, ivs: &[CertifiedInterval]) -> Vec<String> {
    let mut out = Vec::new();
    for iv in ivs {
        let rows: Vec<_> = t.rows.iter().filter(|row| row.v >= iv.lo && row.v <= iv.hi).collect();
        for w in rows.windows(2) {
            if let Some(next) = &w[1].next_to_opt {
                if w[0].opt_sum() >= next {
                    out.push(format!("step {} -> {}: opt {} not below next {}", w[0].v, w[1].v, w[0].opt_sum(), next));
                }
            }
        }
    }
    out
}

fn show(ivs: &[CertifiedInterval]) -> String {
    ivs.iter()
        .map(|iv| {
            let form = iv.closed_form.map_or("?", |f| f.as_str());
            format!("[{}, {}] {form}", iv.lo.to_decimal_digits(3), iv.hi.to_decimal_digits(3))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn main() -> ExitCode {
    let mut rep = Report { failures: 0 };

    // 1
    let (members, took) = timed(|| enumerate(Variant::NoMarker));
    let mut p = Vec::new();
    if members.len() != 1536 {
        p.push(format!("{} assignments", members.len()));
    }
    if took >= Duration::from_secs(1) {
        p.push(format!("took {took:?}"));
    }
    rep.line(1, "enumeration", p, format!("{} no-marker assignments in {took:?}", members.len()));

    let prune = SweepOptions { prune: true };
    let (none, t_none) = timed(|| sweep(Variant::NoMarker, GRID, prune).unwrap());
    let (slow, t_slow) = timed(|| sweep(Variant::MarkerSlow, GRID, prune).unwrap());
    let (fast, t_fast) = timed(|| sweep(Variant::MarkerFast, GRID, prune).unwrap());

    // 2
    let mut p = check_curve(&none, 1..=618, "exact_lt", exact_lt);
    p.extend(check_curve(&none, 619..=990, "exact_gt", exact_gt));
    let v0 = game_value(Variant::NoMarker, &Rational::zero()).unwrap();
    if v0 != r(8) {
        p.push(format!("v = 0 gives {v0}"));
    }
    if *row_sum(&none, 500) != q("68/9") {
        p.push(format!("v = 1/2 gives {}", row_sum(&none, 500)));
    }
    let last = none.rows.last().unwrap();
    if (last.opt_sum().clone(), last.opt_avg()) != (q("13/2"), q("13/8")) {
        p.push(format!("v = 1 gives {} (avg {})", last.opt_sum(), last.opt_avg()));
    }
    rep.line(2, "no-marker sweep", p, format!("990 rows against the two curves, spots 8, 68/9, 13/2 (13/8), {t_none:?}"));

    // 3
    let mut p = check_curve(&slow, 17..=1000, "marker_slow", marker_slow);
    for row in &slow.rows[16..] {
        let e = &row.opt;
        let t1 = &e.times()[0];
        match (e.assignment.marker, e.drop_time()) {
            (Some(m), Some(z)) if m.interval == 1 && !z.is_negative() && z <= *t1 => {}
            _ => p.push(format!("v = {}: drop not in [0, t1] ({})", row.v, e.id)),
        }
        if !e.find_times().iter().flatten().any(|f| f == t1) {
            p.push(format!("v = {}: no find at t1 = {t1}", row.v));
        }
    }
    let at_one = &slow.rows.last().unwrap().opt;
    let schedule = (at_one.drop_time(), at_one.times(), at_one.objective.clone());
    if schedule != (Some(q("1/4")), [q("3/4"), q("1"), q("7/4"), q("5/2")], r(6)) {
        p.push(format!("v = 1 schedule {schedule:?}"));
    }
    rep.line(3, "slow-marker sweep", p, format!("984 rows against marker_slow, drop/find structure, v = 1 schedule, {t_slow:?}"));

    // 4
    let mut p = Vec::new();
    let enclosure = crossover(ClosedFormName::ExactGt, ClosedFormName::MarkerFast, (&q("7/10"), &q("9/10")), &q("1/1000"));
    match &enclosure {
        Ok((lo, hi)) => {
            let cubic = |v: &Rational| poly(&[-3, -5, 6, 6], v);
            if (&cubic(lo) * &cubic(hi)).signum() > 0 {
                p.push(format!("cubic keeps its sign on [{lo}, {hi}]"));
            }
            if !(*lo <= q("0.805") && q("0.805") <= *hi) || hi - lo > q("1/1000") {
                p.push(format!("enclosure [{}, {}]", lo.to_decimal_digits(6), hi.to_decimal_digits(6)));
            }
            for (a, b) in none.rows.iter().zip(&fast.rows).filter(|(a, _)| a.v < *lo) {
                if a.opt_sum() != b.opt_sum() {
                    p.push(format!("v = {}: fast {} but no-marker {}", a.v, b.opt_sum(), a.opt_sum()));
                }
            }
        }
        Err(e) => p.push(format!("no enclosure: {e}")),
    }
    p.extend(check_curve(&fast, 807..=966, "marker_fast", marker_fast));
    let shown = enclosure.map_or("none".into(), |(lo, hi)| format!("[{}, {}]", lo.to_decimal_digits(7), hi.to_decimal_digits(7)));
    rep.line(4, "fast-marker sweep", p, format!("crossover {shown}, 160 rows against marker_fast, {t_fast:?}"));

    // 5
    let (iv_none, iv_slow, iv_fast) = (certify(&none), certify(&slow), certify(&fast));
    let mut p: Vec<String> = [
        find_interval(&iv_none, "0.001", "0.618", ClosedFormName::ExactLt),
        find_interval(&iv_none, "0.619", "0.990", ClosedFormName::ExactGt),
        find_interval(&iv_slow, "0.017", "1", ClosedFormName::MarkerSlow),
        find_interval(&iv_fast, "0.807", "0.966", ClosedFormName::MarkerFast),
    ]
    .into_iter()
    .flatten()
    .collect();
    for (t, ivs) in [(&none, &iv_none), (&slow, &iv_slow), (&fast, &iv_fast)] {
        p.extend(lemma_holds(t, ivs));
    }
    rep.line(
        5,
        "certification",
        p,
        format!("none: {}; slow-marker: {}; fast-marker: {}", show(&iv_none), show(&iv_slow), show(&iv_fast)),
    );

    // 6
    let mut p = Vec::new();
    let width = q("1/1000000000000");
    match crossover(ClosedFormName::ExactLt, ClosedFormName::ExactGt, (&q("1/2"), &q("7/10")), &width) {
        Ok((lo, hi)) => {
            // (sqrt 5 - 1)/2 is the positive root of x^2 + x - 1
            let g = |x: &Rational| poly(&[-1, 1, 1], x);
            if g(&lo).is_positive() || g(&hi).is_negative() {
                p.push(format!("[{lo}, {hi}] misses the golden root"));
            }
            if &hi - &lo > width {
                p.push(format!("width {}", (&hi - &lo).to_decimal_digits(15)));
            }
            let d = |x: &Rational| &exact_lt(x) - &exact_gt(x);
            let (below, above) = (d(&(&lo - &width)), d(&(&hi + &width)));
            if below.signum() >= 0 || above.signum() <= 0 {
                p.push(format!("difference signs {} / {}", below.signum(), above.signum()));
            }
            rep.line(6, "golden crossover", p, format!("[{}, {}]", lo.to_decimal_digits(15), hi.to_decimal_digits(15)));
        }
        Err(e) => rep.line(6, "golden crossover", vec![e.to_string()], "no enclosure".into()),
    }

    // 7
    let mut p = Vec::new();
    for t in [&none, &slow, &fast] {
        for w in t.rows.windows(2) {
            if w[1].opt_sum() > w[0].opt_sum() {
                p.push(format!("{:?} rises at v = {}", t.variant, w[1].v));
            }
        }
    }
    for (i, base) in none.rows.iter().enumerate() {
        if *base.opt_sum() > r(8) {
            p.push(format!("no-marker value {} at v = {}", base.opt_sum(), base.v));
        }
        for t in [&slow, &fast] {
            if t.rows[i].opt_sum() > base.opt_sum() {
                p.push(format!("{:?} above no-marker at v = {}", t.variant, base.v));
            }
        }
    }
    for t in [&slow, &fast] {
        if *t.rows.last().unwrap().opt_sum() != r(6) {
            p.push(format!("{:?} value {} at v = 1", t.variant, t.rows.last().unwrap().opt_sum()));
        }
    }
    let d = q("13/7");
    for t in [&none, &slow, &fast] {
        for (a, b) in sweep_records(t, &Rational::one()).iter().zip(sweep_records(t, &d)) {
            if &a.opt_sum * &d != b.opt_sum || a.next_to_opt_sum.as_ref().map(|x| x * &d) != b.next_to_opt_sum {
                p.push(format!("{:?} record at v = {} does not scale", t.variant, a.v));
            }
        }
        for k in [1, 250, 618, 619, 805, 1000] {
            let row = &t.rows[k - 1];
            let (one, _, _) = show_strategy(&row.opt.assignment, &row.v, &Rational::one()).unwrap();
            let (big, _, _) = show_strategy(&row.opt.assignment, &row.v, &d).unwrap();
            let scaled: Vec<_> = one.outcome.times.iter().map(|x| x * &d).collect();
            if scaled != big.outcome.times || one.marker.drop_time.as_ref().map(|x| x * &d) != big.marker.drop_time {
                p.push(format!("{:?} replay at v = {} does not scale", t.variant, row.v));
            }
        }
    }
    rep.line(7, "properties", p, "monotone, marker <= no-marker <= 8, value 6 at v = 1, D-scaling".into());

    // 8
    let mut p = Vec::new();
    let (mut lps, mut replayed) = (0, 0);
    for t in [&none, &slow, &fast] {
        let s = &t.stats;
        lps += s.lps_solved;
        if s.certificates_verified != s.lps_solved || s.replays_valid != s.replays {
            p.push(format!("{:?} stats {s:?}", t.variant));
        }
        for row in &t.rows {
            let a = &row.opt.assignment;
            let cfg = GameConfig::unit(row.v.clone(), a.variant).unwrap();
            let (o, ag, drop) = strategies_from_solution(a, &row.opt.primal, &Rational::one());
            match simulate(&cfg, &o, &ag, &a.order, drop.as_ref()) {
                Ok((out, _)) if out.sum == row.opt.objective => replayed += 1,
                Ok((out, _)) => p.push(format!("v = {}: replay {} vs LP {}", row.v, out.sum, row.opt.objective)),
                Err(e) => p.push(format!("v = {}: replay failed: {e}", row.v)),
            }
        }
    }
    rep.line(8, "solver soundness", p, format!("{lps} LP certificates, {replayed} optima replayed exactly"));

    // 9
    let mut p = Vec::new();
    let mut worst = (Rational::zero(), Duration::ZERO);
    for variant in [Variant::NoMarker, Variant::MarkerSlow, Variant::MarkerFast] {
        for v in ["1/4", "1/2", "3/4", "1"].map(q) {
            let lp = game_value(variant, &v).unwrap();
            let (res, took) = timed(|| brute_force_opt(variant, &v, &GridStrategySpec::new(64)).unwrap());
            let gap = &res.value - &lp;
            if gap.is_negative() || gap > q("1/10") || took >= Duration::from_secs(60) {
                p.push(format!("{variant:?} v = {v}: grid {} lp {lp} in {took:?}", res.value));
            }
            worst = (worst.0.max(gap), worst.1.max(took));
        }
    }
    for (variant, want) in [(Variant::NoMarker, q("13/2")), (Variant::MarkerSlow, r(6))] {
        let got = brute_force_opt(variant, &Rational::one(), &GridStrategySpec::new(8)).unwrap().value;
        if got != want {
            p.push(format!("{variant:?} at N = 8: {got}"));
        }
    }
    rep.line(9, "oracle", p, format!("largest gap {} at N = 64, slowest point {:?}", worst.0.to_decimal_digits(5), worst.1));

    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|s| s == "1");
    println!("{} of 9 criteria failed", rep.failures);
    if strict && rep.failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
