//! Discrete parameter assignments and the linear program each one induces.
//!
//! Fixing the meeting order, all direction signs, the drop interval and the
//! find pattern leaves a purely linear program in the meeting times, the
//! origin player's per-interval displacements, the drop time and the find
//! times. Coefficients are affine in the speed ratio `v`.

use std::fmt;

use thiserror::Error;

use crate::game::{AgentIdentity, MeetingOrder, Sign, Variant};
use crate::lp::{Affine, AffineExpr, LinearProgram, ParametricProgram, VarId};
use crate::rational::Rational;

/// Interval (1-based) in which the slot-2, slot-3 and slot-4 agents find
/// the marker, if they do before their own interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FindPattern {
    pub slot2: Option<usize>,
    pub slot3: Option<usize>,
    pub slot4: Option<usize>,
}

impl FindPattern {
    /// The 24 legal patterns: each find strictly precedes the finder's slot.
    pub fn all() -> Vec<FindPattern> {
        let opts = |n: usize| std::iter::once(None).chain((1..=n).map(Some)).collect::<Vec<_>>();
        let mut out = Vec::with_capacity(24);
        for &slot2 in &opts(1) {
            for &slot3 in &opts(2) {
                for &slot4 in &opts(3) {
                    out.push(FindPattern { slot2, slot3, slot4 });
                }
            }
        }
        out
    }

    /// Find interval of the agent met at `slot` (1-based).
    pub fn for_slot(&self, slot: usize) -> Option<usize> {
        match slot {
            2 => self.slot2,
            3 => self.slot3,
            4 => self.slot4,
            _ => None,
        }
    }

    fn label(&self) -> String {
        [self.slot2, self.slot3, self.slot4]
            .iter()
            .map(|f| f.map_or("-".to_string(), |i| i.to_string()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkerChoice {
    /// Direction of the pre-drop leg.
    pub sign: Sign,
    /// Interval (1-based) containing the drop time.
    pub interval: usize,
    pub finds: FindPattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParameterAssignment {
    pub variant: Variant,
    pub order: MeetingOrder,
    /// Player II's direction per interval.
    pub d: [Sign; 4],
    /// Origin player's direction per interval.
    pub a: [Sign; 4],
    pub marker: Option<MarkerChoice>,
}

fn signs(s: &[Sign]) -> String {
    s.iter().map(|x| x.symbol()).collect()
}

impl ParameterAssignment {
    /// Stable identifier, e.g. `slow-marker/+-,-+,++,--/d+---/a+-+-/m-1/k1--`.
    pub fn id(&self) -> String {
        let mut s = format!("{}/{}/d{}/a{}", self.variant, self.order.label(), signs(&self.d), signs(&self.a));
        if let Some(m) = &self.marker {
            s.push_str(&format!("/m{}{}/k{}", m.sign.symbol(), m.interval, m.finds.label()));
        }
        s
    }

    pub fn parse_id(id: &str) -> Result<Self, BuildError> {
        let bad = || BuildError::BadId(id.to_string());
        let parts: Vec<&str> = id.split('/').collect();
        let variant: Variant = parts.first().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let expected = if variant.has_marker() { 6 } else { 4 };
        if parts.len() != expected {
            return Err(bad());
        }
        let agents: Vec<AgentIdentity> =
            parts[1].split(',').map(AgentIdentity::parse).collect::<Option<_>>().ok_or_else(bad)?;
        let order = MeetingOrder::new(agents.try_into().map_err(|_| bad())?).map_err(|_| bad())?;
        let four = |s: &str, tag: char| -> Result<[Sign; 4], BuildError> {
            let rest = s.strip_prefix(tag).ok_or_else(bad)?;
            let v: Vec<Sign> = rest.chars().map(Sign::from_symbol).collect::<Option<_>>().ok_or_else(bad)?;
            v.try_into().map_err(|_| bad())
        };
        let d = four(parts[2], 'd')?;
        let a = four(parts[3], 'a')?;
        let marker = if variant.has_marker() {
            let m: Vec<char> = parts[4].strip_prefix('m').ok_or_else(bad)?.chars().collect();
            if m.len() != 2 {
                return Err(bad());
            }
            let sign = Sign::from_symbol(m[0]).ok_or_else(bad)?;
            let interval = m[1].to_digit(10).ok_or_else(bad)? as usize;
            let k: Vec<char> = parts[5].strip_prefix('k').ok_or_else(bad)?.chars().collect();
            if k.len() != 3 {
                return Err(bad());
            }
            let f = |c: char| -> Result<Option<usize>, BuildError> {
                if c == '-' {
                    Ok(None)
                } else {
                    c.to_digit(10).map(|x| Some(x as usize)).ok_or_else(bad)
                }
            };
            let finds = FindPattern { slot2: f(k[0])?, slot3: f(k[1])?, slot4: f(k[2])? };
            Some(MarkerChoice { sign, interval, finds })
        } else {
            None
        };
        let parsed = ParameterAssignment { variant, order, d, a, marker };
        if parsed.id() != id {
            return Err(bad());
        }
        Ok(parsed)
    }

    /// False when some declared find precedes the drop interval; such
    /// assignments are rejected at build time.
    pub fn is_buildable(&self) -> bool {
        self.check_finds().is_ok()
    }

    fn check_finds(&self) -> Result<(), BuildError> {
        if let Some(m) = &self.marker {
            if !(1..=4).contains(&m.interval) {
                return Err(BuildError::BadId(self.id()));
            }
            for slot in 2..=4 {
                if let Some(f) = m.finds.for_slot(slot) {
                    if f >= slot {
                        return Err(BuildError::BadId(self.id()));
                    }
                    if f < m.interval {
                        return Err(BuildError::FindBeforeDrop { slot });
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ParameterAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("assignment is for {got}, builder expects {expected}")]
    WrongVariant { expected: Variant, got: Variant },
    #[error("speed ratio {0} outside [0, 1]")]
    SpeedOutOfRange(Rational),
    #[error("slot {slot} agent is declared to find the marker before it is dropped")]
    FindBeforeDrop { slot: usize },
    #[error("malformed assignment {0:?}")]
    BadId(String),
}

/// All assignments of a variant in lexicographic order of
/// `(order, d, a, a_0, drop interval, find pattern)`.
///
/// `d_1 = +1` always (reflection of the line); without a marker also
/// `a_1 = +1`. Marker assignments whose finds precede the drop are included
/// here and rejected by the builders.
pub fn enumerate(variant: Variant) -> Vec<ParameterAssignment> {
    let sign_tuples = |first_fixed: bool| -> Vec<[Sign; 4]> {
        let firsts: &[Sign] = if first_fixed { &[Sign::Plus] } else { &Sign::BOTH };
        let mut out = Vec::new();
        for &s1 in firsts {
            for s2 in Sign::BOTH {
                for s3 in Sign::BOTH {
                    for s4 in Sign::BOTH {
                        out.push([s1, s2, s3, s4]);
                    }
                }
            }
        }
        out
    };
    let ds = sign_tuples(true);
    let as_ = sign_tuples(!variant.has_marker());
    let patterns = FindPattern::all();
    let mut out = Vec::new();
    for order in MeetingOrder::all() {
        for &d in &ds {
            for &a in &as_ {
                if !variant.has_marker() {
                    out.push(ParameterAssignment { variant, order, d, a, marker: None });
                    continue;
                }
                for sign in Sign::BOTH {
                    for interval in 1..=4 {
                        for &finds in &patterns {
                            let marker = Some(MarkerChoice { sign, interval, finds });
                            out.push(ParameterAssignment { variant, order, d, a, marker });
                        }
                    }
                }
            }
        }
    }
    out
}

/// [`enumerate`] without the assignments the builders reject.
pub fn enumerate_buildable(variant: Variant) -> Vec<ParameterAssignment> {
    enumerate(variant).into_iter().filter(ParameterAssignment::is_buildable).collect()
}

/// Where each quantity lives in the program's variable vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarLayout {
    /// Meeting times `t_1..t_4`.
    pub t: [VarId; 4],
    /// Origin player's displacement per interval (after the drop, in the
    /// drop interval).
    pub disp: [VarId; 4],
    pub drop_time: Option<VarId>,
    pub drop_disp: Option<VarId>,
    /// Find time of the agent in each slot (index 0 is slot 1).
    pub find: [Option<VarId>; 4],
}

/// Variable layout of [`parametric`]'s program for `assignment`, without
/// building it.
pub fn layout(assignment: &ParameterAssignment) -> VarLayout {
    let t = std::array::from_fn(VarId);
    let disp = std::array::from_fn(|i| VarId(4 + i));
    let mut find = [None; 4];
    let (drop_time, drop_disp) = match &assignment.marker {
        Some(m) => {
            let mut next = 10;
            for slot in 2..=4 {
                if m.finds.for_slot(slot).is_some() {
                    find[slot - 1] = Some(VarId(next));
                    next += 1;
                }
            }
            (Some(VarId(8)), Some(VarId(9)))
        }
        None => (None, None),
    };
    VarLayout { t, disp, drop_time, drop_disp, find }
}

/// How the optimal value of a family member moves with `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    /// The feasible set grows with `v`: the value is nonincreasing and
    /// infeasibility persists downwards.
    Relaxing,
    /// Rescaling time by `v/v'` maps solutions at `v` to solutions at any
    /// `v' < v`, so `v·value` is nondecreasing and infeasibility persists
    /// upwards (for `v > 0`).
    TimeScaled,
}

#[derive(Debug, Clone)]
pub struct FamilyProgram {
    pub assignment: ParameterAssignment,
    pub program: ParametricProgram,
    pub layout: VarLayout,
}

impl FamilyProgram {
    pub fn monotonicity(&self) -> Monotonicity {
        if self.assignment.variant.origin_is_fast() {
            Monotonicity::TimeScaled
        } else {
            Monotonicity::Relaxing
        }
    }

    pub fn instantiate(&self, v: &Rational) -> Result<LinearProgram, BuildError> {
        check_speed(v)?;
        Ok(self.program.instantiate(v))
    }
}

fn check_speed(v: &Rational) -> Result<(), BuildError> {
    if v.is_negative() || *v > Rational::one() {
        return Err(BuildError::SpeedOutOfRange(v.clone()));
    }
    Ok(())
}

fn int(c: i64) -> Affine {
    Affine::int(c)
}

/// Adds `c·(t_i - t_{i-1})` with `t_0 = 0` (indices 1-based).
fn add_span(e: &mut AffineExpr, t: &[VarId; 4], i: usize, c: &Affine) {
    e.add(t[i - 1], c.clone());
    if i > 1 {
        e.add(t[i - 2], -c);
    }
}

/// Parametric program of one assignment.
pub fn parametric(assignment: &ParameterAssignment) -> Result<FamilyProgram, BuildError> {
    assignment.check_finds()?;
    let fast = assignment.variant.origin_is_fast();
    // origin player's speed bound and the agents' speed, as functions of v
    let (vmax, w) = if fast { (int(1), Affine::param()) } else { (Affine::param(), int(1)) };
    let disp_name = if fast { "ut" } else { "vt" };

    let mut p = ParametricProgram::new();
    let t: [VarId; 4] = std::array::from_fn(|i| p.add_nonneg(format!("t{}", i + 1)));
    let disp: [VarId; 4] = std::array::from_fn(|i| p.add_nonneg(format!("{disp_name}{}", i + 1)));
    let marker = assignment.marker;
    let (drop_time, drop_disp) = match marker {
        Some(_) => (Some(p.add_nonneg("z")), Some(p.add_nonneg(if fast { "uz" } else { "vz" }))),
        None => (None, None),
    };
    let mut find: [Option<VarId>; 4] = [None; 4];
    if let Some(m) = &marker {
        for slot in 2..=4 {
            if m.finds.for_slot(slot).is_some() {
                find[slot - 1] = Some(p.add_nonneg(format!("tz{slot}")));
            }
        }
    }
    p.set_objective(t.iter().map(|&v| (v, Rational::one())).collect());

    let a = assignment.a;
    let d = assignment.d;
    let drop_j = marker.map(|m| m.interval);

    // origin player's position after the first `k` intervals
    let position = |k: usize| -> AffineExpr {
        let mut e = AffineExpr::new();
        for i in 1..=k {
            e.add(disp[i - 1], int(a[i - 1].value()));
        }
        if let (Some(j), Some(q), Some(m)) = (drop_j, drop_disp, &marker) {
            if k >= j {
                e.add(q, int(m.sign.value()));
            }
        }
        e
    };
    let marker_pos = marker.map(|m| {
        let mut e = position(m.interval - 1);
        e.add(drop_disp.expect("marker variable"), int(m.sign.value()));
        e
    });

    for slot in 1..=4 {
        let agent = assignment.order.agent(slot);
        let o = agent.origin.value();
        let b = agent.forward.value();
        let find_interval = marker.and_then(|m| m.finds.for_slot(slot));
        // agent's displacement along its own frame, times b, at t_slot
        let mut lhs = AffineExpr::new();
        let last = find_interval.unwrap_or(slot);
        for i in 1..last {
            add_span(&mut lhs, &t, i, &w.scale(&Rational::from_integer(b * d[i - 1].value())));
        }
        let tail = w.scale(&Rational::from_integer(b * d[last - 1].value()));
        lhs.add(t[slot - 1], tail.clone());
        if last > 1 {
            lhs.add(t[last - 2], -&tail);
        }
        for (v, c) in position(slot).terms {
            lhs.add(v, -&c);
        }
        p.add_eq(lhs, int(-o));

        if let Some(f) = find_interval {
            let tau = find[slot - 1].expect("find variable");
            let mut e = AffineExpr::new();
            for i in 1..f {
                add_span(&mut e, &t, i, &w.scale(&Rational::from_integer(b * d[i - 1].value())));
            }
            let c = w.scale(&Rational::from_integer(b * d[f - 1].value()));
            e.add(tau, c.clone());
            if f > 1 {
                e.add(t[f - 2], -&c);
            }
            for (v, c) in marker_pos.as_ref().expect("marker").terms.iter() {
                e.add(*v, -c);
            }
            p.add_eq(e, int(-o));
        }
    }

    for i in 2..=4 {
        p.add_ge(AffineExpr::new().with(t[i - 1], int(1)).with(t[i - 2], int(-1)), int(0));
    }

    // speed rows: displacement <= vmax · elapsed time
    let neg_vmax = -&vmax;
    for i in 1..=4 {
        if drop_j == Some(i) {
            continue;
        }
        let mut e = AffineExpr::new().with(disp[i - 1], int(1));
        add_span(&mut e, &t, i, &neg_vmax);
        p.add_le(e, int(0));
    }
    if let (Some(j), Some(z), Some(q)) = (drop_j, drop_time, drop_disp) {
        // pre-drop leg on [t_{j-1}, z], post-drop leg on [z, t_j]
        let mut e = AffineExpr::new().with(q, int(1)).with(z, neg_vmax.clone());
        if j > 1 {
            e.add(t[j - 2], vmax.clone());
            p.add_ge(AffineExpr::new().with(z, int(1)).with(t[j - 2], int(-1)), int(0));
        }
        p.add_le(e, int(0));
        let e = AffineExpr::new()
            .with(disp[j - 1], int(1))
            .with(t[j - 1], neg_vmax.clone())
            .with(z, vmax.clone());
        p.add_le(e, int(0));
        p.add_ge(AffineExpr::new().with(t[j - 1], int(1)).with(z, int(-1)), int(0));

        for slot in 2..=4 {
            let (Some(tau), Some(f)) = (find[slot - 1], marker.and_then(|m| m.finds.for_slot(slot)))
            else {
                continue;
            };
            p.add_ge(AffineExpr::new().with(tau, int(1)).with(z, int(-1)), int(0));
            if f > 1 {
                p.add_ge(AffineExpr::new().with(tau, int(1)).with(t[f - 2], int(-1)), int(0));
            }
            p.add_ge(AffineExpr::new().with(t[f - 1], int(1)).with(tau, int(-1)), int(0));
        }
    }

    let built = VarLayout { t, disp, drop_time, drop_disp, find };
    debug_assert_eq!(built, layout(assignment));
    Ok(FamilyProgram { assignment: *assignment, program: p, layout: built })
}

fn build_checked(
    assignment: &ParameterAssignment,
    expected: Variant,
    v: &Rational,
) -> Result<LinearProgram, BuildError> {
    if assignment.variant != expected {
        return Err(BuildError::WrongVariant { expected, got: assignment.variant });
    }
    check_speed(v)?;
    parametric(assignment)?.instantiate(v)
}

pub fn build_no_marker(assignment: &ParameterAssignment, v: &Rational) -> Result<LinearProgram, BuildError> {
    build_checked(assignment, Variant::NoMarker, v)
}

pub fn build_marker_slow(assignment: &ParameterAssignment, v: &Rational) -> Result<LinearProgram, BuildError> {
    build_checked(assignment, Variant::MarkerSlow, v)
}

pub fn build_marker_fast(assignment: &ParameterAssignment, v: &Rational) -> Result<LinearProgram, BuildError> {
    build_checked(assignment, Variant::MarkerFast, v)
}

/// Builder matching the assignment's own variant.
pub fn build(assignment: &ParameterAssignment, v: &Rational) -> Result<LinearProgram, BuildError> {
    build_checked(assignment, assignment.variant, v)
}
