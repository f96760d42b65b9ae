//! Solves the whole game at one speed ratio and prints the best members.
//!
//!     cargo run --release --example rank_members -- none 1/2

use rendezvous::game::Variant;
use rendezvous::rational::Rational;
use rendezvous::sweep::solve_game;

fn main() {
    let mut args = std::env::args().skip(1);
    let variant: Variant = args.next().unwrap_or_else(|| "none".into()).parse().unwrap();
    let v: Rational = args.next().unwrap_or_else(|| "1/2".into()).parse().unwrap();
    let ranking = solve_game(variant, &v).unwrap();
    let s = &ranking.stats;
    println!("{} LPs, {} optimal, {} valid after replay", s.lps_solved, s.optimal, s.replays_valid);
    for e in ranking.valid().take(8) {
        println!("{:>16} {}", e.objective.to_decimal(), e.id);
    }
    let opt = ranking.opt().unwrap();
    let next = ranking.next_to_opt_entry().unwrap();
    println!("opt {} with motion {}", opt.objective, opt.signature.as_ref().unwrap());
    println!("next-to-opt {} by {}", next.objective, next.id);
}
