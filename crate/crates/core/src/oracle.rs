//! Brute-force search over grid strategies, independent of the LP families.
//!
//! A grid strategy has the same interval structure as the replay: in
//! interval `k` player II moves in one direction and the origin player
//! walks one constant-speed leg that ends where the `k`-th agent is met.
//! Leg lengths, the drop leg and the drop time are restricted to a grid:
//! a leg must take a whole number of steps `h = D/N` at full speed. Every
//! candidate is scored by [`Replay`], which rejects anything that breaks the
//! meeting order or a speed bound, so the search returns the value of a
//! genuine strategy pair and can only overestimate the game value.
//!
//! The search is a depth-first branch and bound over intervals. After an
//! interval ending at `T`, an unmet agent at distance `g` cannot be met
//! before `T + g / (v_origin + v_agent)`.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::game::{
    simulate, AgentIdentity, AgentStrategy, ConfigError, DropPlan, GameConfig, MeetingOrder, OriginStrategy,
    RendezvousOutcome, Replay, SimError, Sign, Variant,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridStrategySpec {
    /// Grid steps per unit distance.
    pub resolution: u32,
    /// Every meeting must happen by this time, in units of `D`.
    pub horizon: Rational,
}

impl GridStrategySpec {
    pub fn new(resolution: u32) -> Self {
        GridStrategySpec { resolution, horizon: Rational::from_integer(4) }
    }

    pub fn step(&self) -> Rational {
        Rational::ratio(1, self.resolution as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("resolution must be at least 1")]
    Resolution,
    #[error("horizon must be positive")]
    Horizon,
    #[error("no grid strategy meets every agent within the horizon")]
    Empty,
    #[error("best grid strategy failed its replay: {0}")]
    Replay(SimError),
}

/// Strategy pair found by the search, in the replay's terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridStrategy {
    /// Game whose roles the replay uses; a marker game's optimum may come
    /// from the no-marker game, which puts the slow player at the origin.
    pub frame: Variant,
    pub order: MeetingOrder,
    pub origin: OriginStrategy,
    pub agents: AgentStrategy,
    pub drop: Option<DropPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub variant: Variant,
    pub v: Rational,
    pub spec: GridStrategySpec,
    /// Minimum sum of meeting times at unit distance.
    pub value: Rational,
    pub strategy: GridStrategy,
    pub outcome: RendezvousOutcome,
    /// Search nodes expanded.
    pub nodes: u64,
}

#[derive(Debug, Clone)]
struct Move {
    agent: AgentIdentity,
    sign: Sign,
    displacement: Rational,
    direction: Sign,
    drop: Option<DropPlan>,
}

#[derive(Debug, Clone)]
struct Node {
    replay: Replay,
    moves: Vec<Move>,
    bound: Rational,
}

struct Best {
    frame: Variant,
    value: Option<Rational>,
    key: String,
    moves: Vec<Move>,
}

struct Search {
    frame: Variant,
    h: Rational,
    horizon: Rational,
    has_marker: bool,
    best: Mutex<Best>,
    nodes: AtomicU64,
}

fn key(moves: &[Move]) -> String {
    moves
        .iter()
        .map(|m| {
            let drop = m.drop.as_ref().map_or(String::new(), |d| format!("/{}{}@{}", d.sign.symbol(), d.displacement, d.time));
            format!("{}:{}{}:{}{}", m.agent.label(), m.sign.symbol(), m.displacement, m.direction.symbol(), drop)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn floor_i64(x: &Rational) -> i64 {
    x.numer().div_floor(&x.denom()).to_i64().unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
}

/// Integers `i` in `[lo, hi]` with `a + b·i >= 0` for every `(a, b)`; an
/// empty range comes back with `lo > hi`.
fn int_range(cons: &[(Rational, Rational)], mut lo: i64, mut hi: i64) -> (i64, i64) {
    for (a, b) in cons {
        match b.signum() {
            1 => lo = lo.max(-floor_i64(&(a / b))),
            -1 => hi = hi.min(floor_i64(&(a / &-b))),
            _ if a.is_negative() => return (1, 0),
            _ => {}
        }
    }
    (lo, hi)
}

impl Search {
    fn incumbent(&self) -> Option<Rational> {
        self.best.lock().expect("lock").value.clone()
    }

    fn beaten(&self, bound: &Rational) -> bool {
        self.incumbent().is_some_and(|b| *bound > b)
    }

    /// Lower bound on the final sum from the state after some intervals.
    fn bound(&self, r: &Replay) -> Rational {
        let closing = r.origin_speed() + r.agent_speed();
        let mut lb = r.partial_sum();
        for a in AgentIdentity::ALL {
            if !r.is_met(a) {
                let gap = (r.player() - r.agent_position(a.index())).abs();
                lb += r.time();
                lb += &(&gap / &closing);
            }
        }
        lb
    }

    /// [`Self::bound`] of the state after meeting `agent` at `end` at time
    /// `t`, computed without replaying the interval.
    fn child_bound(&self, r: &Replay, agent: AgentIdentity, direction: Sign, end: &Rational, t: &Rational) -> Rational {
        let closing = r.origin_speed() + r.agent_speed();
        let span = t - r.time();
        let mut lb = &r.partial_sum() + t;
        for a in AgentIdentity::ALL {
            if a != agent && !r.is_met(a) {
                let at = r.agent_position(a.index()) + &(&r.agent_velocity(a.index(), direction) * &span);
                lb += t;
                lb += &(&(end - &at).abs() / &closing);
            }
        }
        lb
    }

    fn drop_options(&self, r: &Replay) -> Vec<Option<DropPlan>> {
        let mut out = vec![None];
        // a find in the last interval changes nothing: that agent is met
        // before its frozen velocity could differ from the chosen one
        if !self.has_marker || r.marker_dropped() || r.intervals() >= 3 {
            return out;
        }
        let k = r.intervals() + 1;
        let vmax = r.origin_speed();
        // the drop precedes this interval's meeting, which every later
        // meeting follows
        let mut latest = self.horizon.clone();
        if let Some(inc) = self.incumbent() {
            latest = latest.min(&(&inc - &r.partial_sum()) / &Rational::from_integer(4 - r.intervals() as i64));
        }
        let jmax = if vmax.is_zero() { 0 } else { floor_i64(&(&(&latest - r.time()) / &self.h)) };
        for j in 0..=jmax.max(0) {
            let dt = &self.h * &Rational::from_integer(j);
            for sign in Sign::BOTH {
                if j == 0 && sign == Sign::Minus {
                    continue;
                }
                out.push(Some(DropPlan { sign, interval: k, time: r.time() + &dt, displacement: vmax * &dt }));
            }
        }
        out
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        let r = &node.replay;
        let k = r.intervals();
        let remaining = Rational::from_integer(4 - k as i64);
        let vmax = r.origin_speed().clone();
        let partial = r.partial_sum();
        let mut out = Vec::new();
        let drops = self.drop_options(r);
        for agent in AgentIdentity::ALL {
            // reflection symmetry: the first agent met starts on the positive side
            if r.is_met(agent) || (k == 0 && agent.origin == Sign::Minus) {
                continue;
            }
            let x = r.agent_position(agent.index());
            for direction in Sign::BOTH {
                let vel = r.agent_velocity(agent.index(), direction);
                for drop in &drops {
                    let (start, from) = match drop {
                        Some(d) => (r.player() + &(&d.sign.rational() * &d.displacement), d.time.clone()),
                        None => (r.player().clone(), r.time().clone()),
                    };
                    let imax = if vmax.is_zero() { 0 } else { floor_i64(&(&(&self.horizon - &from) / &self.h)) };
                    for sign in Sign::BOTH {
                        let (lo, hi) = if vel.is_zero() {
                            (0, imax)
                        } else {
                            // t(i) = c + s·i; every screen below is linear in i
                            let c = r.time() + &(&(&start - x) / &vel);
                            let s = &(&(&sign.rational() * &vmax) * &self.h) / &vel;
                            let mut cons = vec![(&c - &from, s.clone()), (&self.horizon - &c, -&s)];
                            if !vmax.is_zero() {
                                cons.push((&c - &from, &s - &self.h));
                            }
                            if let Some(inc) = self.incumbent() {
                                cons.push((&(&inc - &partial) - &(&remaining * &c), -&(&remaining * &s)));
                            }
                            int_range(&cons, 0, imax)
                        };
                        for i in lo..=hi {
                            if i == 0 && sign == Sign::Minus {
                                continue;
                            }
                            let disp = &(&vmax * &self.h) * &Rational::from_integer(i);
                            let end = &start + &(&sign.rational() * &disp);
                            // meeting time, screened before the full replay step
                            let t = if vel.is_zero() {
                                if &end != x {
                                    continue;
                                }
                                if vmax.is_zero() {
                                    from.clone()
                                } else {
                                    &from + &(&disp / &vmax)
                                }
                            } else {
                                r.time() + &(&(&end - x) / &vel)
                            };
                            if t < from || t > self.horizon || (!vmax.is_zero() && &disp / &vmax > &t - &from) {
                                continue;
                            }
                            if self.beaten(&self.child_bound(r, agent, direction, &end, &t)) {
                                continue;
                            }
                            let mut next = r.clone();
                            if next.step(agent, sign, &disp, direction, drop.as_ref()).is_err() {
                                continue;
                            }
                            let bound = self.bound(&next);
                            let mut moves = node.moves.clone();
                            moves.push(Move { agent, sign, displacement: disp, direction, drop: drop.clone() });
                            out.push(Node { replay: next, moves, bound });
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| a.bound.cmp(&b.bound));
        out
    }

    fn offer(&self, node: Node) {
        let Ok((outcome, _)) = node.replay.finish() else { return };
        let value = outcome.sum;
        let k = format!("{} {}", self.frame, key(&node.moves));
        let mut best = self.best.lock().expect("lock");
        let better = match &best.value {
            None => true,
            Some(b) => value < *b || (value == *b && k < best.key),
        };
        if better {
            best.frame = self.frame;
            best.key = k;
            best.moves = node.moves;
            best.value = Some(value);
        }
    }

    fn dfs(&self, node: Node) {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        if self.beaten(&node.bound) {
            return;
        }
        if node.replay.intervals() == 4 {
            self.offer(node);
            return;
        }
        for child in self.children(&node) {
            self.dfs(child);
        }
    }
}

fn run(config: &GameConfig, spec: &GridStrategySpec, has_marker: bool, seed: Option<Best>) -> (Option<Best>, u64) {
    let search = Search {
        frame: config.variant,
        h: spec.step(),
        horizon: spec.horizon.clone(),
        has_marker,
        best: Mutex::new(seed.unwrap_or(Best { frame: config.variant, value: None, key: String::new(), moves: Vec::new() })),
        nodes: AtomicU64::new(0),
    };
    let root = Node { replay: Replay::new(config), moves: Vec::new(), bound: Rational::zero() };
    search.children(&root).into_par_iter().for_each(|child| search.dfs(child));
    let best = search.best.into_inner().expect("lock");
    (best.value.is_some().then_some(best), search.nodes.into_inner())
}

/// Minimum sum of meeting times, at unit distance, over all grid strategies
/// of `variant` at speed ratio `v`.
pub fn brute_force_opt(variant: Variant, v: &Rational, spec: &GridStrategySpec) -> Result<OracleResult, OracleError> {
    if spec.resolution == 0 {
        return Err(OracleError::Resolution);
    }
    if !spec.horizon.is_positive() {
        return Err(OracleError::Horizon);
    }
    let config = GameConfig::unit(v.clone(), variant)?;
    // never dropping the marker is the no-marker game, searched with the
    // slow player at the origin; its optimum seeds the marker search
    let (seed, mut nodes) = if variant.has_marker() {
        run(&GameConfig::unit(v.clone(), Variant::NoMarker)?, spec, false, None)
    } else {
        (None, 0)
    };
    let (best, more) = run(&config, spec, variant.has_marker(), seed);
    nodes += more;
    let Some(best) = best else {
        return Err(OracleError::Empty);
    };
    let moves = best.moves;
    let config = GameConfig::unit(v.clone(), best.frame)?;
    let strategy = GridStrategy {
        frame: best.frame,
        order: MeetingOrder::new(std::array::from_fn(|k| moves[k].agent)).expect("search meets each agent once"),
        origin: OriginStrategy {
            signs: std::array::from_fn(|k| moves[k].sign),
            displacements: std::array::from_fn(|k| moves[k].displacement.clone()),
        },
        agents: AgentStrategy { directions: std::array::from_fn(|k| moves[k].direction) },
        drop: moves.iter().find_map(|m| m.drop.clone()),
    };
    let (outcome, _) =
        simulate(&config, &strategy.origin, &strategy.agents, &strategy.order, strategy.drop.as_ref())
            .map_err(OracleError::Replay)?;
    Ok(OracleResult {
        variant,
        v: v.clone(),
        spec: spec.clone(),
        value: outcome.sum.clone(),
        strategy,
        outcome,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn equal_speeds_on_a_coarse_grid() {
        let r = brute_force_opt(Variant::NoMarker, &q("1"), &GridStrategySpec::new(8)).unwrap();
        assert_eq!(r.value, q("13/2"));
    }

    #[test]
    fn stationary_player_gives_eight() {
        for n in [1, 3] {
            let r = brute_force_opt(Variant::NoMarker, &q("0"), &GridStrategySpec::new(n)).unwrap();
            assert_eq!(r.value, q("8"));
        }
    }

    #[test]
    fn slow_marker_at_equal_speeds() {
        let r = brute_force_opt(Variant::MarkerSlow, &q("1"), &GridStrategySpec::new(8)).unwrap();
        assert_eq!(r.value, q("6"));
        assert!(r.strategy.drop.is_some());
        assert_eq!(r.strategy.frame, Variant::MarkerSlow);
    }

    #[test]
    fn fast_holder_may_keep_the_marker() {
        // below the crossover the no-marker strategy wins; the slow player
        // waits, which only the no-marker frame can express
        let r = brute_force_opt(Variant::MarkerFast, &q("1/4"), &GridStrategySpec::new(8)).unwrap();
        let plain = brute_force_opt(Variant::NoMarker, &q("1/4"), &GridStrategySpec::new(8)).unwrap();
        assert_eq!(r.value, plain.value);
        assert_eq!(r.strategy.frame, Variant::NoMarker);
    }

    #[test]
    fn bad_specs() {
        assert_eq!(
            brute_force_opt(Variant::NoMarker, &q("1"), &GridStrategySpec::new(0)).unwrap_err(),
            OracleError::Resolution
        );
        let tight = GridStrategySpec { resolution: 4, horizon: q("1/2") };
        assert_eq!(brute_force_opt(Variant::NoMarker, &q("1"), &tight).unwrap_err(), OracleError::Empty);
    }
}
