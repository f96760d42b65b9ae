//! Counts the LP family members of each game and how many build a program.

use rendezvous::families::{enumerate, enumerate_buildable};
use rendezvous::game::Variant;

fn main() {
    for variant in Variant::ALL {
        let all = enumerate(variant);
        let buildable = enumerate_buildable(variant);
        println!("{:<12} {:>7} assignments, {:>7} buildable", variant.to_string(), all.len(), buildable.len());
        println!("  e.g. {}", buildable[0].id());
    }
}
