//! Builds one family member's program, solves it and replays the optimum.
//!
//!     cargo run --example solve_member -- 'slow-marker/+-,-+,++,--/d+---/a+-+-/m-1/k1--' 1

use rendezvous::families::ParameterAssignment;
use rendezvous::report::show_strategy;
use rendezvous::rational::Rational;

fn main() {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "none/+-,-+,++,--/d++--/a+-+-".into());
    let v: Rational = args.next().unwrap_or_else(|| "1".into()).parse().expect("v as p/q");
    let assignment = ParameterAssignment::parse_id(&id).expect("assignment id");

    let (dump, validity, lp) = show_strategy(&assignment, &v, &Rational::one()).expect("solvable member");
    print!("{lp}");
    println!("replay valid: {}", validity.is_valid());
    println!("meeting times {:?}", dump.outcome.times.iter().map(|t| t.to_string()).collect::<Vec<_>>());
    println!("sum {}", dump.outcome.sum);
}
