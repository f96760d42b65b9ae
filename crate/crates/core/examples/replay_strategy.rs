//! Replays a hand-written strategy pair: the slow player drops the marker a
//! quarter unit behind the start, and the agent that finds it keeps going.

use rendezvous::game::{simulate, AgentIdentity, AgentStrategy, DropPlan, GameConfig, MeetingOrder, OriginStrategy, Sign, Variant};
use rendezvous::rational::Rational;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn main() {
    let config = GameConfig::unit(q("1"), Variant::MarkerSlow).unwrap();
    let order = MeetingOrder::new(["+-", "-+", "++", "--"].map(|s| AgentIdentity::parse(s).unwrap())).unwrap();
    let origin = OriginStrategy {
        signs: [Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus],
        displacements: ["1/2", "1/4", "3/4", "3/4"].map(q),
    };
    let agents = AgentStrategy { directions: [Sign::Plus, Sign::Minus, Sign::Minus, Sign::Minus] };
    let drop = DropPlan { sign: Sign::Minus, interval: 1, time: q("1/4"), displacement: q("1/4") };

    match simulate(&config, &origin, &agents, &order, Some(&drop)) {
        Ok((outcome, marker)) => {
            for (k, t) in outcome.times.iter().enumerate() {
                println!("slot {} agent {} met at {}", k + 1, order.agent(k + 1), t);
            }
            println!("sum {} average {}", outcome.sum, outcome.average);
            for a in AgentIdentity::ALL {
                if let Some(f) = &marker.finds[a.index()] {
                    println!("agent {a} finds the marker at {} (interval {})", f.time, f.interval);
                }
            }
        }
        Err(e) => println!("invalid strategy: {e}"),
    }
}
