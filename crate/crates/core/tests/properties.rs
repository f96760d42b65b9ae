use proptest::prelude::*;

use rendezvous::families::{build, enumerate_buildable, ParameterAssignment};
use rendezvous::game::{
    check_primal, scale_outcome, simulate, strategies_from_solution, AgentStrategy, GameConfig,
    MeetingOrder, OriginStrategy, Sign, Variant,
};
use rendezvous::lp::{check_infeasibility, check_optimality, solve, LpResult};
use rendezvous::oracle::{brute_force_opt, GridStrategySpec};
use rendezvous::poly::Polynomial;
use rendezvous::rational::Rational;
use rendezvous::sweep::{game_value, solve_game};

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=40).prop_map(|(n, d)| Rational::ratio(n, d))
}

fn nonneg() -> impl Strategy<Value = Rational> {
    (0i64..=12, 1i64..=8).prop_map(|(n, d)| Rational::ratio(n, d))
}

fn unit_speed() -> impl Strategy<Value = Rational> {
    (0i64..=60).prop_map(|k| Rational::ratio(k, 60))
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn signs4() -> impl Strategy<Value = [Sign; 4]> {
    [sign(), sign(), sign(), sign()]
}

fn order() -> impl Strategy<Value = MeetingOrder> {
    (0usize..24).prop_map(|i| MeetingOrder::all()[i])
}

proptest! {
    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &Rational::zero(), a.clone());
        prop_assert_eq!(&a * &Rational::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Rational::one());
        }
    }

    #[test]
    fn rational_parse_round_trip(a in rational()) {
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn isolated_root_is_bracketed(n in 1i64..99, extra in 1i64..5, k in 1u32..40) {
        // (x - r)(x^2 + extra) has its only real root at r
        let r = Rational::ratio(n, 100);
        let p = Polynomial::new(vec![-&r, Rational::one()])
            .mul(&Polynomial::from_integers(&[extra, 0, 1]));
        let width = Rational::ratio(1, 1i64 << (k % 40));
        let (lo, hi) = p.isolate_root(&Rational::zero(), &Rational::one(), &width).unwrap();
        prop_assert!(lo <= r && r <= hi);
        prop_assert!(&hi - &lo <= width);
        prop_assert!((&p.eval(&lo) * &p.eval(&hi)).signum() <= 0);
    }

    #[test]
    fn simulated_times_are_ordered(
        v in unit_speed(),
        variant in prop_oneof![Just(Variant::NoMarker), Just(Variant::MarkerFast)],
        o in order(),
        a in signs4(),
        d in signs4(),
        disp in [nonneg(), nonneg(), nonneg(), nonneg()],
    ) {
        let cfg = GameConfig::unit(v, variant).unwrap();
        let origin = OriginStrategy { signs: a, displacements: disp };
        if let Ok((out, _)) = simulate(&cfg, &origin, &AgentStrategy { directions: d }, &o, None) {
            prop_assert!(!out.times[0].is_negative());
            prop_assert!(out.times.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(out.sum, out.times.iter().sum::<Rational>());
        }
    }

    #[test]
    fn unused_marker_changes_nothing(
        v in unit_speed(),
        o in order(),
        a in signs4(),
        d in signs4(),
        disp in [nonneg(), nonneg(), nonneg(), nonneg()],
    ) {
        let origin = OriginStrategy { signs: a, displacements: disp };
        let agents = AgentStrategy { directions: d };
        let plain = simulate(&GameConfig::unit(v.clone(), Variant::NoMarker).unwrap(), &origin, &agents, &o, None);
        let slow = simulate(&GameConfig::unit(v, Variant::MarkerSlow).unwrap(), &origin, &agents, &o, None);
        prop_assert_eq!(plain.map(|r| r.0), slow.map(|r| r.0));
    }

    #[test]
    fn scaling_composes(a in 1i64..20, b in 1i64..20, den in 1i64..7) {
        let v = Rational::ratio(1, 2);
        let cfg = GameConfig::unit(v.clone(), Variant::NoMarker).unwrap();
        let ranking = solve_game(Variant::NoMarker, &v).unwrap();
        let best = ranking.opt().unwrap();
        let (o, ag, _) = strategies_from_solution(&best.assignment, &best.primal, &Rational::one());
        let (out, _) = simulate(&cfg, &o, &ag, &best.assignment.order, None).unwrap();
        let (x, y) = (Rational::ratio(a, den), Rational::ratio(b, den));
        let twice = scale_outcome(&scale_outcome(&out, &x).unwrap(), &y).unwrap();
        prop_assert_eq!(twice, scale_outcome(&out, &(&x * &y)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every solver answer carries a certificate, and every replay-valid
    /// optimum reproduces its objective in the simulator.
    #[test]
    fn member_optima_are_certified_and_replay(
        variant in prop_oneof![Just(Variant::NoMarker), Just(Variant::MarkerSlow), Just(Variant::MarkerFast)],
        pick in any::<prop::sample::Index>(),
        v in unit_speed(),
    ) {
        let members = enumerate_buildable(variant);
        let a: &ParameterAssignment = pick.get(&members);
        let lp = build(a, &v).unwrap();
        match solve(&lp).unwrap() {
            LpResult::Optimal(s) => {
                prop_assert!(check_optimality(&lp, &s).is_ok());
                let cfg = GameConfig::unit(v.clone(), variant).unwrap();
                if check_primal(&cfg, a, &s.primal).is_valid() {
                    let (o, ag, drop) = strategies_from_solution(a, &s.primal, &Rational::one());
                    let (out, _) = simulate(&cfg, &o, &ag, &a.order, drop.as_ref()).unwrap();
                    prop_assert_eq!(out.sum, s.objective);
                }
            }
            LpResult::Infeasible(ray) => prop_assert!(check_infeasibility(&lp, &ray).is_ok()),
            LpResult::Unbounded => prop_assert!(false, "{} unbounded", a.id()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn no_marker_value_is_monotone_and_bounded(i in 0i64..=40, j in 0i64..=40) {
        let (lo, hi) = (i.min(j), i.max(j));
        let a = game_value(Variant::NoMarker, &Rational::ratio(lo, 40)).unwrap();
        let b = game_value(Variant::NoMarker, &Rational::ratio(hi, 40)).unwrap();
        prop_assert!(b <= a);
        prop_assert!(a <= Rational::from_integer(8));
    }

    #[test]
    fn grid_strategies_never_beat_the_lp(k in 1i64..=8, n in 1u32..=6) {
        let v = Rational::ratio(k, 8);
        let grid = brute_force_opt(Variant::NoMarker, &v, &GridStrategySpec::new(n)).unwrap();
        prop_assert!(grid.value >= game_value(Variant::NoMarker, &v).unwrap());
    }
}
