//! Grid sweep written as CSV to stdout.
//!
//!     cargo run --release --example sweep_table -- none 100 > sweep.csv

use rendezvous::game::Variant;
use rendezvous::rational::Rational;
use rendezvous::report::{sweep_records, write_sweep_csv};
use rendezvous::sweep::{sweep, SweepOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let variant: Variant = args.next().unwrap_or_else(|| "none".into()).parse().unwrap();
    let steps: u32 = args.next().map_or(20, |s| s.parse().unwrap());
    let table = sweep(variant, steps, SweepOptions::default()).unwrap();
    eprintln!("{} LPs solved, {} skipped by their bounds", table.stats.lps_solved, table.stats.skipped);
    write_sweep_csv(std::io::stdout(), &sweep_records(&table, &Rational::one())).unwrap();
}
