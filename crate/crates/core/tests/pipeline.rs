use rendezvous::certify::certify;
use rendezvous::families::ParameterAssignment;
use rendezvous::game::Variant;
use rendezvous::oracle::{brute_force_opt, GridStrategySpec};
use rendezvous::rational::Rational;
use rendezvous::report::{self, show_strategy};
use rendezvous::sweep::{game_value, solve_game, sweep, SweepOptions, SweepTable};

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn table(variant: Variant, steps: u32) -> SweepTable {
    sweep(variant, steps, SweepOptions::default()).unwrap()
}

fn csv_bytes(t: &SweepTable, distance: &Rational) -> Vec<u8> {
    let mut buf = Vec::new();
    report::write_sweep_csv(&mut buf, &report::sweep_records(t, distance)).unwrap();
    buf
}

#[test]
fn sweeps_are_deterministic() {
    let a = table(Variant::MarkerFast, 5);
    let b = table(Variant::MarkerFast, 5);
    assert_eq!(csv_bytes(&a, &Rational::one()), csv_bytes(&b, &Rational::one()));
    assert_eq!(report::sweep_json(&a, &q("3")), report::sweep_json(&b, &q("3")));
}

#[test]
fn pruning_does_not_change_rows() {
    for (variant, steps) in [(Variant::NoMarker, 40), (Variant::MarkerSlow, 2)] {
        let fast = sweep(variant, steps, SweepOptions { prune: true }).unwrap();
        let full = sweep(variant, steps, SweepOptions { prune: false }).unwrap();
        assert_eq!(csv_bytes(&fast, &Rational::one()), csv_bytes(&full, &Rational::one()), "{variant:?}");
        assert!(fast.stats.lps_solved < full.stats.lps_solved);
    }
}

#[test]
fn records_scale_with_distance() {
    let t = table(Variant::MarkerSlow, 5);
    let d = q("7/3");
    for (a, b) in report::sweep_records(&t, &Rational::one()).iter().zip(report::sweep_records(&t, &d)) {
        assert_eq!(&a.opt_sum * &d, b.opt_sum);
        assert_eq!(&a.opt_avg * &d, b.opt_avg);
        assert_eq!(a.next_to_opt_sum.as_ref().map(|x| x * &d), b.next_to_opt_sum);
        assert_eq!((a.closed_form, a.matches), (b.closed_form, b.matches));
    }
}

#[test]
fn shown_strategy_scales_with_distance() {
    let v = q("1/2");
    let best = solve_game(Variant::MarkerSlow, &v).unwrap().opt().unwrap().assignment.clone();
    let (one, valid, _) = show_strategy(&best, &v, &Rational::one()).unwrap();
    let (five, _, _) = show_strategy(&best, &v, &q("5")).unwrap();
    assert!(valid.is_valid());
    assert_eq!(&one.outcome.sum * &q("5"), five.outcome.sum);
    for (a, b) in one.outcome.times.iter().zip(&five.outcome.times) {
        assert_eq!(a * &q("5"), *b);
    }
}

#[test]
fn fast_marker_matches_no_marker_at_low_speed() {
    let none = table(Variant::NoMarker, 10);
    let fast = table(Variant::MarkerFast, 10);
    // below the golden ratio conjugate the marker cannot help
    for (a, b) in none.rows.iter().zip(&fast.rows).take(6) {
        assert_eq!(a.opt_sum(), b.opt_sum(), "v = {}", a.v);
    }
    for (a, b) in none.rows.iter().zip(&fast.rows) {
        assert!(b.opt_sum() <= a.opt_sum());
    }
}

#[test]
fn both_marker_games_reach_six_at_equal_speed() {
    assert_eq!(game_value(Variant::NoMarker, &Rational::one()).unwrap(), q("13/2"));
    assert_eq!(game_value(Variant::MarkerSlow, &Rational::one()).unwrap(), q("6"));
    assert_eq!(game_value(Variant::MarkerFast, &Rational::one()).unwrap(), q("6"));
}

#[test]
fn coarse_certification_is_consistent() {
    let t = table(Variant::NoMarker, 20);
    let intervals = certify(&t);
    assert!(!intervals.is_empty());
    for w in intervals.windows(2) {
        assert!(w[0].hi < w[1].lo);
    }
    for iv in &intervals {
        assert!(iv.points >= 2);
        let row = t.rows.iter().find(|r| r.v == iv.lo).unwrap();
        assert_eq!(row.opt.id, iv.strategy_id);
    }
}

#[test]
fn finer_oracle_grids_never_get_worse() {
    let v = q("1/2");
    let mut last = None;
    for n in [2, 4, 8] {
        let r = brute_force_opt(Variant::NoMarker, &v, &GridStrategySpec::new(n)).unwrap();
        if let Some(prev) = last {
            assert!(r.value <= prev, "N = {n}");
        }
        last = Some(r.value);
    }
    assert!(last.unwrap() >= q("68/9"));
}

#[test]
fn oracle_strategy_replays_to_its_value() {
    let r = brute_force_opt(Variant::MarkerSlow, &Rational::one(), &GridStrategySpec::new(8)).unwrap();
    assert_eq!(r.value, q("6"));
    assert_eq!(r.outcome.sum, r.value);
    assert!(r.strategy.drop.is_some());
}

#[test]
fn ids_round_trip_through_the_ranking() {
    let ranking = solve_game(Variant::MarkerFast, &q("9/10")).unwrap();
    for entry in ranking.entries.iter().take(20) {
        assert_eq!(ParameterAssignment::parse_id(&entry.id).unwrap().id(), entry.id);
    }
}
