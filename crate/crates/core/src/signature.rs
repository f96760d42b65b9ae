//! Canonical description of the motion an LP optimum encodes.
//!
//! Two family members can describe the same motion: an interval of zero
//! length makes its direction signs irrelevant, a leg of zero length makes
//! its sign irrelevant, a marker nobody profits from makes the drop
//! irrelevant, and tied meeting times make the slot order irrelevant. The
//! signature records only what can be observed: the sequence of event
//! instants and, between them, which way each player moves.
//!
//! An event records the agents met, whether the marker is dropped and which
//! agents find it. A find only counts when it changes the finder's path,
//! i.e. when player II turns at some point between the find and the
//! finder's meeting. A drop counts when some find counts; otherwise the drop
//! interval is a single leg with the net direction.
//!
//! The reflection of the line maps agent `(o, b)` to `(-o, -b)` and flips the
//! origin player's direction. Without a marker event the two players can
//! also trade places: seen from player II, the origin player is an agent
//! `(-o·b, b)` and the two motion columns swap.

use std::fmt;

use serde::Serialize;

use crate::families::{layout, ParameterAssignment};
use crate::game::AgentIdentity;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Signature(String);

impl Signature {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Item {
    /// Origin player direction (`+`, `-`, `0`) and player II direction
    /// (`+`, `-`, or `*` once every unmet agent ignores it).
    Piece(char, char),
    Event { met: Vec<AgentIdentity>, drop: bool, found: Vec<AgentIdentity> },
}

fn sign_char(x: &Rational) -> char {
    match x.signum() {
        1 => '+',
        -1 => '-',
        _ => '0',
    }
}

fn flip(c: char) -> char {
    match c {
        '+' => '-',
        '-' => '+',
        c => c,
    }
}

fn render(items: &[Item]) -> String {
    let mut s = String::new();
    for it in items {
        match it {
            Item::Piece(x, y) => {
                s.push('(');
                s.push(*x);
                s.push(*y);
                s.push(')');
            }
            Item::Event { met, drop, found } => {
                let names = |v: &[AgentIdentity]| v.iter().map(|a| a.label()).collect::<Vec<_>>().join(",");
                s.push('<');
                s.push_str(&names(met));
                if *drop {
                    s.push_str("|z");
                }
                if !found.is_empty() {
                    s.push_str("|f");
                    s.push_str(&names(found));
                }
                s.push('>');
            }
        }
    }
    s
}

fn map_agents(items: &[Item], f: impl Fn(AgentIdentity) -> AgentIdentity, piece: impl Fn(char, char) -> (char, char)) -> Vec<Item> {
    items
        .iter()
        .map(|it| match it {
            Item::Piece(x, y) => {
                let (a, b) = piece(*x, *y);
                Item::Piece(a, b)
            }
            Item::Event { met, drop, found } => {
                let mut met: Vec<_> = met.iter().map(|&a| f(a)).collect();
                let mut found: Vec<_> = found.iter().map(|&a| f(a)).collect();
                met.sort();
                found.sort();
                Item::Event { met, drop: *drop, found }
            }
        })
        .collect()
}

fn mirror(items: &[Item]) -> Vec<Item> {
    map_agents(items, AgentIdentity::mirrored, |x, y| (flip(x), y))
}

fn swap(items: &[Item]) -> Vec<Item> {
    map_agents(
        items,
        |a| AgentIdentity::new(a.origin.times(a.forward).flip(), a.forward),
        |x, y| (y, x),
    )
}

/// Sub-interval of the drop interval: before the drop, after it, or the
/// whole interval when the drop is ignored.
enum Leg {
    Whole(usize),
    BeforeDrop,
    AfterDrop(usize),
}

/// Signature of the LP point `primal` (unit distance) of `assignment`.
pub fn signature(assignment: &ParameterAssignment, primal: &[Rational]) -> Signature {
    let lay = layout(assignment);
    let t: [&Rational; 4] = lay.t.map(|v| &primal[v.0]);
    let zero = Rational::zero();
    let start = |i: usize| if i == 1 { &zero } else { t[i - 2] };
    let disp = |i: usize| &primal[lay.disp[i - 1].0];
    let d = assignment.d;

    // effective finds per slot
    let mut found_at: [Option<&Rational>; 5] = [None; 5];
    let mut drop = None;
    if let Some(m) = &assignment.marker {
        for slot in 2..=4 {
            if let Some(f) = m.finds.for_slot(slot) {
                let turns = (f + 1..=slot).any(|i| d[i - 1] != d[f - 1] && t[i - 1] > start(i));
                if turns {
                    found_at[slot] = Some(&primal[lay.find[slot - 1].expect("find var").0]);
                }
            }
        }
        if found_at.iter().any(Option::is_some) {
            drop = Some((m, &primal[lay.drop_time.expect("drop var").0]));
        }
    }

    let mut instants: Vec<&Rational> = t.to_vec();
    if let Some((_, z)) = drop {
        instants.push(z);
    }
    instants.extend(found_at.iter().flatten().copied());
    instants.sort();
    instants.dedup();

    let order = assignment.order;
    let mut items = Vec::new();
    let mut prev = &zero;
    for &at in &instants {
        if at > prev {
            // interval containing (prev, at]
            let i = (1..=4).find(|&i| at <= t[i - 1]).expect("instant within horizon");
            let leg = match (&assignment.marker, drop) {
                (Some(m), Some((_, z))) if m.interval == i => {
                    if at <= z {
                        Leg::BeforeDrop
                    } else {
                        Leg::AfterDrop(i)
                    }
                }
                _ => Leg::Whole(i),
            };
            let player = match leg {
                Leg::BeforeDrop => {
                    let m = assignment.marker.expect("marker");
                    sign_char(&(&m.sign.rational() * &primal[lay.drop_disp.expect("drop disp").0]))
                }
                Leg::AfterDrop(i) => sign_char(&(&assignment.a[i - 1].rational() * disp(i))),
                Leg::Whole(i) => {
                    let mut net = &assignment.a[i - 1].rational() * disp(i);
                    if let Some(m) = assignment.marker.filter(|m| m.interval == i) {
                        net += &(&m.sign.rational() * &primal[lay.drop_disp.expect("drop disp").0]);
                    }
                    sign_char(&net)
                }
            };
            let ignored = (i..=4).all(|s| found_at[s].is_some_and(|f| f <= prev));
            let other = if ignored { '*' } else { d[i - 1].symbol() };
            items.push(Item::Piece(player, other));
        }
        let mut met: Vec<AgentIdentity> = (1..=4).filter(|&s| t[s - 1] == at).map(|s| order.agent(s)).collect();
        let mut found: Vec<AgentIdentity> =
            (2..=4).filter(|&s| found_at[s] == Some(at)).map(|s| order.agent(s)).collect();
        met.sort();
        found.sort();
        let dropped = drop.is_some_and(|(_, z)| z == at);
        items.push(Item::Event { met, drop: dropped, found });
        prev = at;
    }

    let mut orbit = vec![items];
    let swappable = drop.is_none();
    let mut k = 0;
    while k < orbit.len() {
        let mut next = vec![mirror(&orbit[k])];
        if swappable {
            next.push(swap(&orbit[k]));
        }
        for n in next {
            if !orbit.contains(&n) {
                orbit.push(n);
            }
        }
        k += 1;
    }
    Signature(orbit.iter().map(|it| render(it)).min().expect("orbit is never empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::build;
    use crate::lp::{solve, LpResult};

    fn sig_at(id: &str, v: &str) -> (Rational, Signature) {
        let a = ParameterAssignment::parse_id(id).unwrap();
        let lp = build(&a, &v.parse().unwrap()).unwrap();
        match solve(&lp).unwrap() {
            LpResult::Optimal(s) => (s.objective.clone(), signature(&a, &s.primal)),
            other => panic!("{id}: {:?}", other.status()),
        }
    }

    #[test]
    fn tied_first_meetings_and_mirror_share_a_signature() {
        let ids = [
            "none/+-,-+,++,--/d++--/a+++-",
            "none/+-,-+,++,--/d+---/a+-+-",
            "none/-+,+-,++,--/d++--/a+++-",
            "none/+-,-+,--,++/d++--/a++-+",
        ];
        let sigs: Vec<_> = ids.iter().map(|id| sig_at(id, "1/2")).collect();
        assert!(sigs.iter().all(|s| s == &sigs[0]), "{sigs:?}");
        assert_eq!(sigs[0].0, "68/9".parse().unwrap());
        // the two tied first meetings form one event
        assert_eq!(sigs[0].1.as_str().matches('<').count(), 3, "{}", sigs[0].1);
    }

    #[test]
    fn waiting_differs_from_moving() {
        let (_, wait) = sig_at("none/+-,-+,++,--/d++--/a+++-", "1/2");
        let (_, go) = sig_at("none/+-,-+,++,--/d++--/a+-+-", "9/10");
        assert_ne!(wait, go);
    }

    #[test]
    fn slow_marker_optimum_records_the_find_at_the_first_meeting() {
        let (value, sig) = sig_at("slow-marker/+-,-+,++,--/d+---/a+-+-/m-1/k1--", "1");
        assert_eq!(value, Rational::from_integer(6));
        assert!(sig.as_str().contains("|z"), "{sig}");
        assert!(sig.as_str().contains("|f"), "{sig}");
        let (_, mirrored) = sig_at("slow-marker/-+,+-,--,++/d+---/a-+-+/m+1/k1--", "1");
        assert_eq!(sig, mirrored);
    }

    #[test]
    fn unused_marker_reduces_to_the_plain_motion() {
        // the drop is never exploited: same motion as without a marker
        let (v1, plain) = sig_at("none/+-,-+,++,--/d++--/a+++-", "1/2");
        let (v2, marked) = sig_at("slow-marker/+-,-+,++,--/d++--/a+++-/m+1/k---", "1/2");
        assert_eq!(v1, v2);
        assert_eq!(plain, marked);
    }
}
