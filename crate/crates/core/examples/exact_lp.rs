//! A small LP solved in exact arithmetic, with both certificates checked.

use rendezvous::lp::{check_infeasibility, check_optimality, solve, LinearProgram, LpResult};
use rendezvous::rational::Rational;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn main() {
    // min x + 2y  s.t.  x + y >= 3/2,  x - y <= 1/3
    let mut lp = LinearProgram::new();
    let x = lp.add_nonneg("x");
    let y = lp.add_nonneg("y");
    lp.add_ge(vec![(x, q("1")), (y, q("1"))], q("3/2"));
    lp.add_le(vec![(x, q("1")), (y, q("-1"))], q("1/3"));
    lp.set_objective(vec![(x, q("1")), (y, q("2"))]);
    print!("{lp}");

    match solve(&lp).unwrap() {
        LpResult::Optimal(s) => {
            check_optimality(&lp, &s).expect("duality certificate");
            println!("optimum {} at x = {}, y = {}", s.objective, s.value(x), s.value(y));
        }
        other => println!("unexpected {:?}", other.status()),
    }

    // adding x + y <= 1 makes it infeasible; the Farkas ray proves it
    lp.add_le(vec![(x, q("1")), (y, q("1"))], q("1"));
    match solve(&lp).unwrap() {
        LpResult::Infeasible(ray) => {
            check_infeasibility(&lp, &ray).expect("Farkas certificate");
            println!("infeasible, certificate checked");
        }
        other => println!("unexpected {:?}", other.status()),
    }
}
