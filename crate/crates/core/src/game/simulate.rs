//! Event-driven replay of a strategy pair.
//!
//! The origin player's leg in interval `k` ends where the slot-`k` agent is
//! met, so the end time of the interval is the agent's arrival time at the
//! leg's endpoint. Marker finds freeze an agent's velocity for the rest of
//! the game. A find at the same instant as a meeting is processed first.

use thiserror::Error;

use super::{
    AgentIdentity, AgentStrategy, ConfigError, DropPlan, FindRecord, GameConfig, MarkerState, MeetingOrder,
    OriginStrategy, RendezvousOutcome, Sign,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("displacement of segment {segment} is negative")]
    NegativeDisplacement { segment: usize },
    #[error("invalid drop plan: {0}")]
    BadDrop(&'static str),
    #[error("segment {segment} exceeds the origin player's speed bound")]
    SpeedViolation { segment: usize },
    #[error("agent {agent} of slot {slot} never reaches the meeting point")]
    NeverMeets { slot: usize, agent: String },
    #[error("slot {slot} agent arrives before the marker is dropped")]
    DropAfterMeeting { slot: usize },
    #[error("slot {slot} meeting lies beyond the horizon")]
    Horizon { slot: usize },
    #[error("agent {agent} declared for slot {slot} is met earlier, at time {time}")]
    OrderViolation { slot: usize, agent: String, time: Rational },
}

/// Linear position `start_pos + vel·(t - start)` on `[start, end]`.
#[derive(Debug, Clone)]
struct Piece {
    start: Rational,
    end: Rational,
    start_pos: Rational,
    vel: Rational,
}

impl Piece {
    fn new(start: &Rational, end: &Rational, start_pos: &Rational, displacement: &Rational) -> Self {
        let len = end - start;
        let vel = if len.is_zero() { Rational::zero() } else { displacement / &len };
        Piece { start: start.clone(), end: end.clone(), start_pos: start_pos.clone(), vel }
    }

    fn at(&self, t: &Rational) -> Rational {
        &self.start_pos + &(&self.vel * &(t - &self.start))
    }
}

/// Earliest `t` in `[lo, hi]` with `p0 + pv (t - lo) = q0 + qv (t - lo)`.
fn first_coincidence(
    lo: &Rational,
    hi: &Rational,
    p0: &Rational,
    pv: &Rational,
    q0: &Rational,
    qv: &Rational,
) -> Option<Rational> {
    let gap = q0 - p0;
    let rel = pv - qv;
    if rel.is_zero() {
        return gap.is_zero().then(|| lo.clone());
    }
    let t = lo + &(&gap / &rel);
    (&t >= lo && &t <= hi).then_some(t)
}

/// Interval-by-interval replay. [`simulate`] runs all four intervals; a
/// search can clone the state after a prefix and try several continuations.
#[derive(Debug, Clone)]
pub struct Replay {
    variant: super::Variant,
    vmax: Rational,
    w: Rational,
    horizon: Rational,
    /// Agents in the order they were declared met.
    met: Vec<AgentIdentity>,
    pos: [Rational; 4],
    frozen: [Option<Rational>; 4],
    finds: [Option<FindRecord>; 4],
    marker: Option<Rational>,
    drop: Option<DropPlan>,
    player: Rational,
    t_prev: Rational,
    times: Vec<Rational>,
    player_pieces: Vec<Vec<Piece>>,
    agent_pieces: Vec<[Piece; 4]>,
}

impl Replay {
    pub fn new(config: &GameConfig) -> Self {
        Replay {
            variant: config.variant,
            vmax: config.origin_speed(),
            w: config.agent_speed(),
            horizon: config.horizon(),
            met: Vec::with_capacity(4),
            pos: std::array::from_fn(|a| &AgentIdentity::ALL[a].origin.rational() * &config.distance),
            frozen: Default::default(),
            finds: Default::default(),
            marker: None,
            drop: None,
            player: Rational::zero(),
            t_prev: Rational::zero(),
            times: Vec::with_capacity(4),
            player_pieces: Vec::with_capacity(4),
            agent_pieces: Vec::with_capacity(4),
        }
    }

    /// Intervals played so far.
    pub fn intervals(&self) -> usize {
        self.times.len()
    }

    /// End time of the last interval played.
    pub fn time(&self) -> &Rational {
        &self.t_prev
    }

    /// Origin player's position.
    pub fn player(&self) -> &Rational {
        &self.player
    }

    /// Agent position, indexed by [`AgentIdentity::index`].
    pub fn agent_position(&self, a: usize) -> &Rational {
        &self.pos[a]
    }

    /// Velocity agent `a` would have in the next interval if player II
    /// moves in `direction`.
    pub fn agent_velocity(&self, a: usize, direction: Sign) -> Rational {
        self.frozen[a].clone().unwrap_or_else(|| {
            let s = AgentIdentity::ALL[a].forward.times(direction);
            &s.rational() * &self.w
        })
    }

    pub fn origin_speed(&self) -> &Rational {
        &self.vmax
    }

    pub fn agent_speed(&self) -> &Rational {
        &self.w
    }

    pub fn is_met(&self, agent: AgentIdentity) -> bool {
        self.met.contains(&agent)
    }

    pub fn marker_dropped(&self) -> bool {
        self.drop.is_some()
    }

    /// Sum of the meeting times so far.
    pub fn partial_sum(&self) -> Rational {
        self.times.iter().sum()
    }

    /// Plays the next interval: player II moves in `direction`, the origin
    /// player covers `displacement` in direction `sign` (after the drop
    /// leg, if `drop` falls in this interval) and meets `agent` where the
    /// leg ends. Returns the meeting time.
    pub fn step(
        &mut self,
        agent: AgentIdentity,
        sign: Sign,
        displacement: &Rational,
        direction: Sign,
        drop: Option<&DropPlan>,
    ) -> Result<&Rational, SimError> {
        let k = self.times.len() + 1;
        if k > 4 {
            return Err(SimError::BadDrop("all four intervals already played"));
        }
        if displacement.is_negative() {
            return Err(SimError::NegativeDisplacement { segment: k });
        }
        if let Some(d) = drop {
            if !self.variant.has_marker() {
                return Err(SimError::BadDrop("this variant has no marker"));
            }
            if self.drop.is_some() || d.interval != k {
                return Err(SimError::BadDrop("drop interval must be 1..4"));
            }
            if d.displacement.is_negative() || d.time.is_negative() {
                return Err(SimError::BadDrop("negative drop time or displacement"));
            }
            if d.time < self.t_prev {
                return Err(SimError::BadDrop("drop time precedes its interval"));
            }
        }
        if self.met.contains(&agent) {
            return Err(SimError::OrderViolation { slot: k, agent: agent.label(), time: self.t_prev.clone() });
        }

        let vel: [Rational; 4] = std::array::from_fn(|a| self.agent_velocity(a, direction));
        let leg = &sign.rational() * displacement;
        let (leg_start, leg_from) = match drop {
            Some(d) => (&self.player + &(&d.sign.rational() * &d.displacement), d.time.clone()),
            None => (self.player.clone(), self.t_prev.clone()),
        };
        let end_pos = &leg_start + &leg;

        let s = agent.index();
        let t_k = if !vel[s].is_zero() {
            let t = &self.t_prev + &(&(&end_pos - &self.pos[s]) / &vel[s]);
            if t < self.t_prev {
                return Err(SimError::NeverMeets { slot: k, agent: agent.label() });
            }
            t
        } else {
            if self.pos[s] != end_pos {
                return Err(SimError::NeverMeets { slot: k, agent: agent.label() });
            }
            if self.vmax.is_zero() {
                if !displacement.is_zero() {
                    return Err(SimError::SpeedViolation { segment: k });
                }
                leg_from.clone()
            } else {
                &leg_from + &(displacement / &self.vmax)
            }
        };
        if t_k > self.horizon {
            return Err(SimError::Horizon { slot: k });
        }

        let mut pieces = Vec::with_capacity(2);
        match drop {
            Some(d) => {
                if t_k < d.time {
                    return Err(SimError::DropAfterMeeting { slot: k });
                }
                if d.displacement > &self.vmax * &(&d.time - &self.t_prev)
                    || *displacement > &self.vmax * &(&t_k - &d.time)
                {
                    return Err(SimError::SpeedViolation { segment: k });
                }
                let pre = &d.sign.rational() * &d.displacement;
                pieces.push(Piece::new(&self.t_prev, &d.time, &self.player, &pre));
                pieces.push(Piece::new(&d.time, &t_k, &leg_start, &leg));
                self.marker = Some(leg_start.clone());
                self.drop = Some(d.clone());
            }
            None => {
                if *displacement > &self.vmax * &(&t_k - &self.t_prev) {
                    return Err(SimError::SpeedViolation { segment: k });
                }
                pieces.push(Piece::new(&self.t_prev, &t_k, &self.player, &leg));
            }
        }

        if let (Some(m), Some(d)) = (&self.marker, &self.drop) {
            let lo = if d.interval == k { d.time.clone() } else { self.t_prev.clone() };
            for a in 0..4 {
                if self.finds[a].is_some() || self.met.contains(&AgentIdentity::ALL[a]) {
                    continue;
                }
                let at_lo = &self.pos[a] + &(&vel[a] * &(&lo - &self.t_prev));
                if let Some(t) = first_coincidence(&lo, &t_k, &at_lo, &vel[a], m, &Rational::zero()) {
                    self.finds[a] = Some(FindRecord { interval: k, time: t });
                    self.frozen[a] = Some(vel[a].clone());
                }
            }
        }

        let span = &t_k - &self.t_prev;
        self.agent_pieces.push(std::array::from_fn(|a| Piece {
            start: self.t_prev.clone(),
            end: t_k.clone(),
            start_pos: self.pos[a].clone(),
            vel: vel[a].clone(),
        }));
        for a in 0..4 {
            self.pos[a] += &(&vel[a] * &span);
        }
        self.player_pieces.push(pieces);
        self.player = end_pos;
        self.met.push(agent);
        self.times.push(t_k.clone());
        self.t_prev = t_k;
        Ok(&self.t_prev)
    }

    /// Checks that no agent crosses the origin player before its declared
    /// meeting and returns the outcome. Needs all four intervals.
    pub fn finish(self) -> Result<(RendezvousOutcome, MarkerState), SimError> {
        let order = MeetingOrder::new(
            self.met.clone().try_into().map_err(|_| SimError::BadDrop("fewer than four intervals played"))?,
        )
        .map_err(|_| SimError::BadDrop("meeting order is not a permutation"))?;
        for (slot0, agent) in self.met.iter().enumerate() {
            let a = agent.index();
            let due = &self.times[slot0];
            'intervals: for k in 0..=slot0 {
                let ap = &self.agent_pieces[k][a];
                for pp in &self.player_pieces[k] {
                    let q0 = ap.at(&pp.start);
                    if let Some(t) = first_coincidence(&pp.start, &pp.end, &pp.start_pos, &pp.vel, &q0, &ap.vel) {
                        if &t < due {
                            return Err(SimError::OrderViolation {
                                slot: slot0 + 1,
                                agent: agent.label(),
                                time: t,
                            });
                        }
                        break 'intervals;
                    }
                }
            }
        }
        let state = MarkerState {
            holder: self.variant.holder(),
            drop_time: self.drop.as_ref().map(|d| d.time.clone()),
            position: self.marker,
            finds: self.finds,
        };
        let times: [Rational; 4] = self.times.try_into().expect("four intervals");
        Ok((RendezvousOutcome::from_slot_times(&order, times), state))
    }
}

pub fn simulate(
    config: &GameConfig,
    origin: &OriginStrategy,
    agents: &AgentStrategy,
    order: &MeetingOrder,
    drop: Option<&DropPlan>,
) -> Result<(RendezvousOutcome, MarkerState), SimError> {
    if let Some(dp) = drop {
        if !config.variant.has_marker() {
            return Err(SimError::BadDrop("this variant has no marker"));
        }
        if !(1..=4).contains(&dp.interval) {
            return Err(SimError::BadDrop("drop interval must be 1..4"));
        }
    }
    for (i, d) in origin.displacements.iter().enumerate() {
        if d.is_negative() {
            return Err(SimError::NegativeDisplacement { segment: i + 1 });
        }
    }
    let mut replay = Replay::new(config);
    for k in 1..=4 {
        replay.step(
            order.agent(k),
            origin.signs[k - 1],
            &origin.displacements[k - 1],
            agents.directions[k - 1],
            drop.filter(|d| d.interval == k),
        )?;
    }
    replay.finish()
}

/// Multiplies every time by `distance`; outcomes are linear in the initial
/// distance.
pub fn scale_outcome(
    outcome: &RendezvousOutcome,
    distance: &Rational,
) -> Result<RendezvousOutcome, ConfigError> {
    if !distance.is_positive() {
        return Err(ConfigError::Distance(distance.clone()));
    }
    let scale = |xs: &[Rational; 4]| -> [Rational; 4] { std::array::from_fn(|i| &xs[i] * distance) };
    Ok(RendezvousOutcome {
        times: scale(&outcome.times),
        agent_times: scale(&outcome.agent_times),
        sum: &outcome.sum * distance,
        average: &outcome.average * distance,
    })
}
