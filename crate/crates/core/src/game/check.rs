//! Replay of an LP optimum through the simulator.

use thiserror::Error;

use super::{simulate, AgentStrategy, DropPlan, GameConfig, OriginStrategy, SimError};
use crate::families::{layout, ParameterAssignment};
use crate::lp::Solution;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidReason {
    #[error("config is for {config}, assignment for {assignment}")]
    VariantMismatch { config: String, assignment: String },
    #[error("replay failed: {0}")]
    Simulation(#[from] SimError),
    #[error("slot {slot}: program says {lp}, replay gives {simulated}")]
    TimeMismatch { slot: usize, lp: Rational, simulated: Rational },
    #[error("slot {slot} agent does not find the marker as declared")]
    FindMismatch { slot: usize },
    #[error("slot {slot} agent, declared a non-finder, crosses the marker at {time}")]
    NonFinderCrossing { slot: usize, time: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(InvalidReason),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// The strategies encoded by an LP point of `assignment`'s program, scaled
/// from unit distance to `distance`.
pub fn strategies_from_solution(
    assignment: &ParameterAssignment,
    primal: &[Rational],
    distance: &Rational,
) -> (OriginStrategy, AgentStrategy, Option<DropPlan>) {
    let lay = layout(assignment);
    let val = |v: crate::lp::VarId| &primal[v.0] * distance;
    let origin = OriginStrategy { signs: assignment.a, displacements: lay.disp.map(val) };
    let agents = AgentStrategy { directions: assignment.d };
    let drop = assignment.marker.map(|m| DropPlan {
        sign: m.sign,
        interval: m.interval,
        time: val(lay.drop_time.expect("marker layout")),
        displacement: val(lay.drop_disp.expect("marker layout")),
    });
    (origin, agents, drop)
}

/// Valid iff replaying the LP point reproduces every meeting time, every
/// declared find (interval and time), and no undeclared agent picks up the
/// marker before its own interval.
pub fn check_solution(config: &GameConfig, assignment: &ParameterAssignment, solution: &Solution) -> Validity {
    check_primal(config, assignment, &solution.primal)
}

/// [`check_solution`] on a bare primal point of `assignment`'s program.
pub fn check_primal(config: &GameConfig, assignment: &ParameterAssignment, primal: &[Rational]) -> Validity {
    match check(config, assignment, primal) {
        Ok(()) => Validity::Valid,
        Err(r) => Validity::Invalid(r),
    }
}

fn check(config: &GameConfig, assignment: &ParameterAssignment, primal: &[Rational]) -> Result<(), InvalidReason> {
    if config.variant != assignment.variant {
        return Err(InvalidReason::VariantMismatch {
            config: config.variant.to_string(),
            assignment: assignment.variant.to_string(),
        });
    }
    let d = &config.distance;
    let (origin, agents, drop) = strategies_from_solution(assignment, primal, d);
    let (outcome, marker) = simulate(config, &origin, &agents, &assignment.order, drop.as_ref())?;
    let lay = layout(assignment);
    for slot in 1..=4 {
        let lp = &primal[lay.t[slot - 1].0] * d;
        if outcome.times[slot - 1] != lp {
            return Err(InvalidReason::TimeMismatch { slot, lp, simulated: outcome.times[slot - 1].clone() });
        }
    }
    for slot in 2..=4 {
        let agent = assignment.order.agent(slot);
        let seen = marker.finds[agent.index()].as_ref().filter(|f| f.interval < slot);
        let declared = assignment.marker.and_then(|m| m.finds.for_slot(slot));
        match (declared, seen) {
            (None, None) => {}
            (None, Some(f)) => return Err(InvalidReason::NonFinderCrossing { slot, time: f.time.clone() }),
            (Some(_), None) => return Err(InvalidReason::FindMismatch { slot }),
            (Some(k), Some(f)) => {
                let tau = &primal[lay.find[slot - 1].expect("find layout").0] * d;
                if f.interval != k || f.time != tau {
                    return Err(InvalidReason::FindMismatch { slot });
                }
            }
        }
    }
    Ok(())
}
