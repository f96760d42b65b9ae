//! The rendezvous game on the line: players, agents, strategies and outcomes.
//!
//! Player I starts at the origin. Player II starts at distance `D` on an
//! unknown side facing an unknown way, which gives four agents `(o, b)`:
//! agent `(o, b)` is at `o·D + b·g(t)` where `g` is player II's path in its
//! own frame. Who is slow depends on the variant; with the marker held by the
//! fast player the origin player is the fast one.

mod check;
mod simulate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

pub use check::{check_primal, check_solution, strategies_from_solution, InvalidReason, Validity};
pub use simulate::{scale_outcome, simulate, Replay, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn rational(self) -> Rational {
        Rational::from_integer(self.value())
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "none")]
    NoMarker,
    #[serde(rename = "slow-marker")]
    MarkerSlow,
    #[serde(rename = "fast-marker")]
    MarkerFast,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::NoMarker, Variant::MarkerSlow, Variant::MarkerFast];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NoMarker => "none",
            Variant::MarkerSlow => "slow-marker",
            Variant::MarkerFast => "fast-marker",
        }
    }

    pub fn holder(self) -> Option<Holder> {
        match self {
            Variant::NoMarker => None,
            Variant::MarkerSlow => Some(Holder::Slow),
            Variant::MarkerFast => Some(Holder::Fast),
        }
    }

    pub fn has_marker(self) -> bool {
        self != Variant::NoMarker
    }

    /// True when the player at the origin is the fast one.
    pub fn origin_is_fast(self) -> bool {
        self == Variant::MarkerFast
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown variant {0:?} (expected none, slow-marker or fast-marker)")]
pub struct UnknownVariant(pub String);

impl FromStr for Variant {
    type Err = UnknownVariant;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" | "no-marker" => Ok(Variant::NoMarker),
            "slow-marker" | "slow" => Ok(Variant::MarkerSlow),
            "fast-marker" | "fast" => Ok(Variant::MarkerFast),
            _ => Err(UnknownVariant(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Holder {
    Slow,
    Fast,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("speed ratio {0} outside [0, 1]")]
    Speed(Rational),
    #[error("distance {0} must be positive")]
    Distance(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameConfig {
    pub v: Rational,
    pub distance: Rational,
    pub variant: Variant,
}

impl GameConfig {
    pub fn new(v: Rational, distance: Rational, variant: Variant) -> Result<Self, ConfigError> {
        if v.is_negative() || v > Rational::one() {
            return Err(ConfigError::Speed(v));
        }
        if !distance.is_positive() {
            return Err(ConfigError::Distance(distance));
        }
        Ok(GameConfig { v, distance, variant })
    }

    /// Unit distance.
    pub fn unit(v: Rational, variant: Variant) -> Result<Self, ConfigError> {
        Self::new(v, Rational::one(), variant)
    }

    /// Speed bound of the player at the origin.
    pub fn origin_speed(&self) -> Rational {
        if self.variant.origin_is_fast() {
            Rational::one()
        } else {
            self.v.clone()
        }
    }

    /// Speed at which the agents always move.
    pub fn agent_speed(&self) -> Rational {
        if self.variant.origin_is_fast() {
            self.v.clone()
        } else {
            Rational::one()
        }
    }

    /// Time after which a configuration is declared non-terminating.
    pub fn horizon(&self) -> Rational {
        let floor = Rational::ratio(1, 100);
        let v = self.v.clone().max(floor);
        &(&Rational::from_integer(10) * &self.distance) / &v
    }
}

/// One of the four possible realisations of player II.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentIdentity {
    pub origin: Sign,
    pub forward: Sign,
}

impl AgentIdentity {
    pub const ALL: [AgentIdentity; 4] = [
        AgentIdentity { origin: Sign::Plus, forward: Sign::Plus },
        AgentIdentity { origin: Sign::Plus, forward: Sign::Minus },
        AgentIdentity { origin: Sign::Minus, forward: Sign::Plus },
        AgentIdentity { origin: Sign::Minus, forward: Sign::Minus },
    ];

    pub fn new(origin: Sign, forward: Sign) -> Self {
        AgentIdentity { origin, forward }
    }

    /// Position in [`AgentIdentity::ALL`].
    pub fn index(self) -> usize {
        match (self.origin, self.forward) {
            (Sign::Plus, Sign::Plus) => 0,
            (Sign::Plus, Sign::Minus) => 1,
            (Sign::Minus, Sign::Plus) => 2,
            (Sign::Minus, Sign::Minus) => 3,
        }
    }

    /// Image under the reflection `x -> -x` of the line.
    pub fn mirrored(self) -> Self {
        AgentIdentity { origin: self.origin.flip(), forward: self.forward.flip() }
    }

    /// Two-character label such as `+-` (origin, forward).
    pub fn label(self) -> String {
        format!("{}{}", self.origin.symbol(), self.forward.symbol())
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut c = s.chars();
        let o = Sign::from_symbol(c.next()?)?;
        let b = Sign::from_symbol(c.next()?)?;
        c.next().is_none().then_some(AgentIdentity::new(o, b))
    }
}

impl fmt::Display for AgentIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.origin.value(), self.forward.value())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("meeting order must list each of the four agents exactly once")]
pub struct NotABijection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MeetingOrder {
    slots: [AgentIdentity; 4],
}

impl MeetingOrder {
    pub fn new(slots: [AgentIdentity; 4]) -> Result<Self, NotABijection> {
        let mut seen = [false; 4];
        for a in slots {
            if std::mem::replace(&mut seen[a.index()], true) {
                return Err(NotABijection);
            }
        }
        Ok(MeetingOrder { slots })
    }

    /// All 24 orders, lexicographic in the agent indices.
    pub fn all() -> Vec<MeetingOrder> {
        let mut out = Vec::with_capacity(24);
        let ids = AgentIdentity::ALL;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        if let Ok(o) = MeetingOrder::new([ids[i], ids[j], ids[k], ids[l]]) {
                            out.push(o);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn slots(&self) -> &[AgentIdentity; 4] {
        &self.slots
    }

    /// Agent met at slot `k` (1-based).
    pub fn agent(&self, k: usize) -> AgentIdentity {
        self.slots[k - 1]
    }

    /// 1-based slot of `agent`.
    pub fn slot_of(&self, agent: AgentIdentity) -> usize {
        self.slots.iter().position(|&a| a == agent).expect("bijection") + 1
    }

    pub fn label(&self) -> String {
        self.slots.iter().map(|a| a.label()).collect::<Vec<_>>().join(",")
    }
}

/// Motion of the player at the origin: per interval a direction and a
/// distance covered, at constant speed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OriginStrategy {
    pub signs: [Sign; 4],
    pub displacements: [Rational; 4],
}

impl OriginStrategy {
    pub fn stationary() -> Self {
        OriginStrategy {
            signs: [Sign::Plus; 4],
            displacements: std::array::from_fn(|_| Rational::zero()),
        }
    }
}

/// Player II's directions per interval; the agents always move at their
/// full speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AgentStrategy {
    pub directions: [Sign; 4],
}

/// Where and when the origin player drops the marker. Inside interval
/// `interval` it first covers `displacement` in direction `sign`, reaching
/// the drop point at absolute time `time`, then plays that interval's own
/// leg.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DropPlan {
    pub sign: Sign,
    pub interval: usize,
    pub time: Rational,
    pub displacement: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FindRecord {
    pub interval: usize,
    pub time: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkerState {
    pub holder: Option<Holder>,
    pub drop_time: Option<Rational>,
    pub position: Option<Rational>,
    /// Indexed by [`AgentIdentity::index`].
    pub finds: [Option<FindRecord>; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RendezvousOutcome {
    /// Meeting times in slot order.
    pub times: [Rational; 4],
    /// Meeting time of each agent, indexed by [`AgentIdentity::index`].
    pub agent_times: [Rational; 4],
    pub sum: Rational,
    pub average: Rational,
}

impl RendezvousOutcome {
    pub fn from_slot_times(order: &MeetingOrder, times: [Rational; 4]) -> Self {
        let mut agent_times: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
        for (k, a) in order.slots().iter().enumerate() {
            agent_times[a.index()] = times[k].clone();
        }
        let sum: Rational = times.iter().sum();
        let average = &sum / &Rational::from_integer(4);
        RendezvousOutcome { times, agent_times, sum, average }
    }
}

/// Serializable replay of one strategy pair, used by `show-strategy`.
#[derive(Debug, Clone, Serialize)]
pub struct StrategyDump {
    pub config: GameConfig,
    pub order: Vec<String>,
    pub origin_signs: Vec<String>,
    pub origin_displacements: Vec<Rational>,
    pub agent_directions: Vec<String>,
    pub drop: Option<DropPlan>,
    pub marker: MarkerState,
    pub outcome: RendezvousOutcome,
}

impl StrategyDump {
    pub fn new(
        config: &GameConfig,
        origin: &OriginStrategy,
        agents: &AgentStrategy,
        order: &MeetingOrder,
        drop: Option<&DropPlan>,
        outcome: RendezvousOutcome,
        marker: MarkerState,
    ) -> Self {
        StrategyDump {
            config: config.clone(),
            order: order.slots().iter().map(|a| a.label()).collect(),
            origin_signs: origin.signs.iter().map(|s| s.symbol().to_string()).collect(),
            origin_displacements: origin.displacements.to_vec(),
            agent_directions: agents.directions.iter().map(|s| s.symbol().to_string()).collect(),
            drop: drop.cloned(),
            marker,
            outcome,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dump is plain data")
    }
}
