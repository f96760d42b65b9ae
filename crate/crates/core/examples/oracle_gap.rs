//! Brute-force grid search against the LP value.
//!
//!     cargo run --release --example oracle_gap -- slow-marker 32

use rendezvous::game::Variant;
use rendezvous::oracle::{brute_force_opt, GridStrategySpec};
use rendezvous::rational::Rational;
use rendezvous::sweep::game_value;

fn main() {
    let mut args = std::env::args().skip(1);
    let variant: Variant = args.next().unwrap_or_else(|| "none".into()).parse().unwrap();
    let n: u32 = args.next().map_or(16, |s| s.parse().unwrap());
    for v in ["1/4", "1/2", "3/4", "1"] {
        let v: Rational = v.parse().unwrap();
        let grid = brute_force_opt(variant, &v, &GridStrategySpec::new(n)).unwrap();
        let lp = game_value(variant, &v).unwrap();
        println!(
            "v={:<4} grid {:<10} lp {:<12} gap {} ({} nodes)",
            v.to_string(),
            grid.value.to_string(),
            lp.to_string(),
            (&grid.value - &lp).to_decimal(),
            grid.nodes
        );
    }
}
