//! Intervals of speed ratios on which one strategy is certified optimal.
//!
//!     cargo run --release --example certify_intervals -- none 1000

use rendezvous::certify::certify;
use rendezvous::game::Variant;
use rendezvous::report::certify_text;
use rendezvous::sweep::{sweep, SweepOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let variant: Variant = args.next().unwrap_or_else(|| "none".into()).parse().unwrap();
    let steps: u32 = args.next().map_or(100, |s| s.parse().unwrap());
    let table = sweep(variant, steps, SweepOptions::default()).unwrap();
    let intervals = certify(&table);
    print!("{}", certify_text(&table, &intervals));
    for c in &intervals {
        println!("  motion on [{}, {}]: {}", c.lo, c.hi, c.signature);
    }
}
