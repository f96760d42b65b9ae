//! Whole-family solves, opt / next-to-opt extraction and grid sweeps.
//!
//! A grid sweep avoids most LP solves with bounds that follow from how a
//! member's program depends on `v` (see [`Monotonicity`]): a member whose
//! bound already exceeds the current next-to-opt value cannot change
//! either number and is skipped. The skipped members are exactly those a
//! full solve would rank after the next-to-opt entry, so the table is the
//! same with or without pruning.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::families::{enumerate_buildable, layout, parametric, BuildError, Monotonicity, ParameterAssignment};
use crate::game::{check_primal, ConfigError, GameConfig, Validity, Variant};
use crate::lp::{check_infeasibility, check_optimality, solve, CertificateError, LpError, LpResult};
use crate::rational::Rational;
use crate::signature::{signature, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{id}: {error}")]
    Lp { id: String, error: LpError },
    #[error("{id}: solver output failed its certificate check: {error}")]
    Certificate { id: String, error: CertificateError },
    #[error("{id}: program is unbounded")]
    Unbounded { id: String },
    #[error("ranking has fewer than two distinct strategies")]
    SingleSignature,
    #[error("no valid strategy at v = {0}")]
    NoStrategy(Rational),
    #[error("grid needs at least one step")]
    EmptyGrid,
}

/// One solved family member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankingEntry {
    pub id: String,
    #[serde(skip)]
    pub assignment: ParameterAssignment,
    pub objective: Rational,
    pub valid: bool,
    /// Present for valid entries.
    pub signature: Option<Signature>,
    /// Optimal LP point at unit distance.
    #[serde(skip)]
    pub primal: Vec<Rational>,
}

impl RankingEntry {
    /// Meeting times `t_1..t_4` at unit distance.
    pub fn times(&self) -> [Rational; 4] {
        layout(&self.assignment).t.map(|v| self.primal[v.0].clone())
    }

    pub fn drop_time(&self) -> Option<Rational> {
        layout(&self.assignment).drop_time.map(|v| self.primal[v.0].clone())
    }

    /// Declared find time of the agent met at each slot (index 0 is slot 1).
    pub fn find_times(&self) -> [Option<Rational>; 4] {
        layout(&self.assignment).find.map(|f| f.map(|v| self.primal[v.0].clone()))
    }

    fn key(&self) -> (&Rational, &str) {
        (&self.objective, &self.id)
    }
}

/// Counters over every LP a call touched.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub lps_solved: u64,
    pub optimal: u64,
    pub infeasible: u64,
    /// Optimality or Farkas certificates re-checked; always equals `lps_solved`.
    pub certificates_verified: u64,
    /// Members not solved at some grid point because of their bound.
    pub skipped: u64,
    pub replays: u64,
    pub replays_valid: u64,
}

impl SolveStats {
    fn absorb(&mut self, other: &SolveStats) {
        self.lps_solved += other.lps_solved;
        self.optimal += other.optimal;
        self.infeasible += other.infeasible;
        self.certificates_verified += other.certificates_verified;
        self.skipped += other.skipped;
        self.replays += other.replays;
        self.replays_valid += other.replays_valid;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyRanking {
    pub variant: Variant,
    pub v: Rational,
    /// Sorted by objective, then id.
    pub entries: Vec<RankingEntry>,
    pub stats: SolveStats,
}

impl FamilyRanking {
    pub fn valid(&self) -> impl Iterator<Item = &RankingEntry> {
        self.entries.iter().filter(|e| e.valid)
    }

    pub fn opt(&self) -> Option<&RankingEntry> {
        self.valid().next()
    }

    /// Best valid entry whose signature differs from the optimum's.
    pub fn next_to_opt_entry(&self) -> Option<&RankingEntry> {
        let best = self.opt()?;
        self.valid().find(|e| e.signature != best.signature)
    }
}

pub fn next_to_opt(ranking: &FamilyRanking) -> Result<Rational, SweepError> {
    ranking.next_to_opt_entry().map(|e| e.objective.clone()).ok_or(SweepError::SingleSignature)
}

fn check_v(v: &Rational) -> Result<(), SweepError> {
    GameConfig::unit(v.clone(), Variant::NoMarker)?;
    Ok(())
}

/// Builds, solves and certificate-checks one member. `None` when infeasible.
fn solve_member(a: &ParameterAssignment, v: &Rational) -> Result<Option<Solved>, SweepError> {
    let lp = crate::families::build(a, v)?;
    let id = || a.id();
    match solve(&lp).map_err(|error| SweepError::Lp { id: id(), error })? {
        LpResult::Optimal(s) => {
            check_optimality(&lp, &s).map_err(|error| SweepError::Certificate { id: id(), error })?;
            Ok(Some(Solved { objective: s.objective, primal: s.primal, class: None }))
        }
        LpResult::Infeasible(ray) => {
            check_infeasibility(&lp, &ray).map_err(|error| SweepError::Certificate { id: id(), error })?;
            Ok(None)
        }
        LpResult::Unbounded => Err(SweepError::Unbounded { id: id() }),
    }
}

#[derive(Debug, Clone)]
struct Solved {
    objective: Rational,
    primal: Vec<Rational>,
    /// Replay verdict once computed: the signature when valid.
    class: Option<Option<Signature>>,
}

fn classify(a: &ParameterAssignment, v: &Rational, primal: &[Rational]) -> Result<Option<Signature>, SweepError> {
    let cfg = GameConfig::unit(v.clone(), a.variant)?;
    Ok(match check_primal(&cfg, a, primal) {
        Validity::Valid => Some(signature(a, primal)),
        Validity::Invalid(_) => None,
    })
}

fn count_solved(stats: &mut SolveStats, results: &[Option<Solved>]) {
    let n = results.len() as u64;
    let optimal = results.iter().filter(|r| r.is_some()).count() as u64;
    stats.lps_solved += n;
    stats.certificates_verified += n;
    stats.optimal += optimal;
    stats.infeasible += n - optimal;
}

/// Solves every buildable member of `variant`'s own family at `v`, replays
/// every optimum and ranks the results.
pub fn solve_family(variant: Variant, v: &Rational) -> Result<FamilyRanking, SweepError> {
    check_v(v)?;
    let members = enumerate_buildable(variant);
    let results: Vec<Option<Solved>> =
        members.par_iter().map(|a| solve_member(a, v)).collect::<Result<_, _>>()?;
    let mut stats = SolveStats::default();
    count_solved(&mut stats, &results);
    let mut entries: Vec<RankingEntry> = members
        .par_iter()
        .zip(results)
        .filter_map(|(a, r)| r.map(|s| (a, s)))
        .map(|(a, s)| {
            let sig = classify(a, v, &s.primal)?;
            Ok(RankingEntry {
                id: a.id(),
                assignment: *a,
                objective: s.objective,
                valid: sig.is_some(),
                signature: sig,
                primal: s.primal,
            })
        })
        .collect::<Result<_, SweepError>>()?;
    stats.replays = entries.len() as u64;
    stats.replays_valid = entries.iter().filter(|e| e.valid).count() as u64;
    entries.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(FamilyRanking { variant, v: v.clone(), entries, stats })
}

/// Families whose union makes up the game: a marker holder may also never
/// drop the marker.
pub fn game_families(variant: Variant) -> Vec<Variant> {
    if variant.has_marker() {
        vec![variant, Variant::NoMarker]
    } else {
        vec![Variant::NoMarker]
    }
}

/// Ranking of the union of [`game_families`].
pub fn solve_game(variant: Variant, v: &Rational) -> Result<FamilyRanking, SweepError> {
    let mut entries = Vec::new();
    let mut stats = SolveStats::default();
    for fam in game_families(variant) {
        let r = solve_family(fam, v)?;
        stats.absorb(&r.stats);
        entries.extend(r.entries);
    }
    entries.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(FamilyRanking { variant, v: v.clone(), entries, stats })
}

/// Optimal sum of meeting times at unit distance.
pub fn game_value(variant: Variant, v: &Rational) -> Result<Rational, SweepError> {
    let r = solve_game(variant, v)?;
    r.opt().map(|e| e.objective.clone()).ok_or_else(|| SweepError::NoStrategy(v.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Skip members whose monotonicity bound rules them out. Does not
    /// change the table.
    pub prune: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { prune: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub v: Rational,
    pub opt: RankingEntry,
    /// `None` when only one strategy is valid at this point.
    pub next_to_opt: Option<Rational>,
    /// Id of the entry attaining `next_to_opt`.
    pub runner_up: Option<String>,
}

impl SweepRow {
    pub fn opt_sum(&self) -> &Rational {
        &self.opt.objective
    }

    pub fn opt_avg(&self) -> Rational {
        &self.opt.objective / &Rational::from_integer(4)
    }

    pub fn signature(&self) -> &Signature {
        self.opt.signature.as_ref().expect("optimum is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepTable {
    pub variant: Variant,
    pub steps: u32,
    /// Ascending in `v`; row `k-1` is `v = k/steps`.
    pub rows: Vec<SweepRow>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone)]
enum Last {
    Unknown,
    Infeasible,
    /// Optimal value at the given `v`.
    At(Rational, Rational),
}

/// Per-family state carried along the grid.
struct FamilySweep {
    members: Vec<ParameterAssignment>,
    ids: Vec<String>,
    /// Members whose program passed the structural monotonicity check.
    boundable: Vec<bool>,
    last: Vec<Last>,
    mono: Monotonicity,
}

/// Members solved before the next-to-opt value is first known.
const SEED: usize = 256;

impl FamilySweep {
    fn new(variant: Variant) -> Result<Self, SweepError> {
        let mut members = enumerate_buildable(variant);
        let mut ids: Vec<String> = members.iter().map(|a| a.id()).collect();
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.sort_by(|&i, &j| ids[i].cmp(&ids[j]));
        members = order.iter().map(|&i| members[i]).collect();
        ids = order.iter().map(|&i| std::mem::take(&mut ids[i])).collect();
        let checks: Vec<(Monotonicity, bool)> = members
            .par_iter()
            .map(|a| {
                let fam = parametric(a)?;
                let mono = fam.monotonicity();
                let ok = match mono {
                    Monotonicity::Relaxing => fam.program.relaxes_upward(),
                    Monotonicity::TimeScaled => true,
                };
                Ok((mono, ok))
            })
            .collect::<Result<_, SweepError>>()?;
        let mono = checks.first().map_or(Monotonicity::Relaxing, |c| c.0);
        let boundable = checks.iter().map(|c| c.1).collect();
        let last = vec![Last::Unknown; members.len()];
        Ok(FamilySweep { members, ids, boundable, last, mono })
    }

    /// Grid indices `k` (for `v = k/n`) in the order bounds propagate.
    fn visit_order(&self, n: u32) -> Vec<u32> {
        match self.mono {
            Monotonicity::Relaxing => (1..=n).rev().collect(),
            Monotonicity::TimeScaled => (1..=n).collect(),
        }
    }

    fn lower_bound(&self, at: &Rational, value: &Rational, v: &Rational) -> Rational {
        match self.mono {
            Monotonicity::Relaxing => value.clone(),
            Monotonicity::TimeScaled => &(value * at) / v,
        }
    }

    /// Valid entries in ranking order up to and including the first whose
    /// signature differs from the best one; the last element's objective is
    /// next-to-opt when such an entry exists.
    fn prefix(
        &self,
        solved: &mut [(usize, Solved)],
        v: &Rational,
        stats: &mut SolveStats,
    ) -> Result<(Vec<usize>, Option<Rational>), SweepError> {
        let mut first: Option<Signature> = None;
        let mut out = Vec::new();
        for (k, (i, s)) in solved.iter_mut().enumerate() {
            if s.class.is_none() {
                let c = classify(&self.members[*i], v, &s.primal)?;
                stats.replays += 1;
                stats.replays_valid += c.is_some() as u64;
                s.class = Some(c);
            }
            if let Some(Some(sig)) = &s.class {
                out.push(k);
                match &first {
                    None => first = Some(sig.clone()),
                    Some(f) if f != sig => return Ok((out, Some(s.objective.clone()))),
                    Some(_) => {}
                }
            }
        }
        Ok((out, None))
    }

    fn point(&mut self, v: &Rational, options: SweepOptions, stats: &mut SolveStats) -> Result<Vec<RankingEntry>, SweepError> {
        let mut batch = Vec::new();
        let mut bounded: Vec<(Rational, usize)> = Vec::new();
        for i in 0..self.members.len() {
            if !options.prune || !self.boundable[i] {
                batch.push(i);
                continue;
            }
            match &self.last[i] {
                Last::Unknown => batch.push(i),
                Last::Infeasible => stats.skipped += 1,
                Last::At(at, value) => bounded.push((self.lower_bound(at, value, v), i)),
            }
        }
        bounded.sort();
        let mut next = SEED.min(bounded.len());
        batch.extend(bounded[..next].iter().map(|b| b.1));

        let mut solved: Vec<(usize, Solved)> = Vec::new();
        let mut prefix;
        loop {
            let results: Vec<Option<Solved>> =
                batch.par_iter().map(|&i| solve_member(&self.members[i], v)).collect::<Result<_, _>>()?;
            count_solved(stats, &results);
            for (&i, r) in batch.iter().zip(results) {
                match r {
                    Some(s) => {
                        self.last[i] = Last::At(v.clone(), s.objective.clone());
                        solved.push((i, s));
                    }
                    None => self.last[i] = Last::Infeasible,
                }
            }
            solved.sort_by(|a, b| a.1.objective.cmp(&b.1.objective).then(a.0.cmp(&b.0)));
            let (p, o2) = self.prefix(&mut solved, v, stats)?;
            prefix = p;
            let start = next;
            while next < bounded.len() && o2.as_ref().is_none_or(|o| bounded[next].0 <= *o) {
                next += 1;
            }
            batch = bounded[start..next].iter().map(|b| b.1).collect();
            if batch.is_empty() {
                break;
            }
        }
        stats.skipped += (bounded.len() - next) as u64;

        Ok(prefix
            .into_iter()
            .map(|k| {
                let (i, s) = &solved[k];
                RankingEntry {
                    id: self.ids[*i].clone(),
                    assignment: self.members[*i],
                    objective: s.objective.clone(),
                    valid: true,
                    signature: s.class.clone().flatten(),
                    primal: s.primal.clone(),
                }
            })
            .collect())
    }
}

/// Sweeps `v = k/steps`, `k = 1..=steps`, over the union of the game's
/// families.
pub fn sweep(variant: Variant, steps: u32, options: SweepOptions) -> Result<SweepTable, SweepError> {
    if steps == 0 {
        return Err(SweepError::EmptyGrid);
    }
    let n = steps as usize;
    let mut stats = SolveStats::default();
    let mut merged: Vec<Vec<RankingEntry>> = vec![Vec::new(); n];
    for fam in game_families(variant) {
        let mut state = FamilySweep::new(fam)?;
        for k in state.visit_order(steps) {
            let v = Rational::ratio(k as i64, steps as i64);
            let prefix = state.point(&v, options, &mut stats)?;
            merged[k as usize - 1].extend(prefix);
        }
    }
    let mut rows = Vec::with_capacity(n);
    for (k, mut entries) in merged.into_iter().enumerate() {
        let v = Rational::ratio(k as i64 + 1, steps as i64);
        entries.sort_by(|a, b| a.key().cmp(&b.key()));
        let mut it = entries.into_iter();
        let opt = it.next().ok_or_else(|| SweepError::NoStrategy(v.clone()))?;
        let runner = it.find(|e| e.signature != opt.signature);
        rows.push(SweepRow {
            v,
            next_to_opt: runner.as_ref().map(|e| e.objective.clone()),
            runner_up: runner.map(|e| e.id),
            opt,
        });
    }
    Ok(SweepTable { variant, steps, rows, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn no_marker_family_spot_values() {
        assert_eq!(solve_family(Variant::NoMarker, &q("1")).unwrap().opt().unwrap().objective, q("13/2"));
        assert_eq!(solve_family(Variant::NoMarker, &q("0")).unwrap().opt().unwrap().objective, q("8"));
        let r = solve_family(Variant::NoMarker, &q("1/2")).unwrap();
        assert_eq!(r.opt().unwrap().objective, q("68/9"));
        assert!(next_to_opt(&r).unwrap() > q("68/9"));
        assert_eq!(r.stats.lps_solved, 1536);
    }

    #[test]
    fn next_to_opt_needs_two_signatures() {
        let mut r = solve_family(Variant::NoMarker, &q("1/2")).unwrap();
        let best = r.opt().unwrap().signature.clone();
        r.entries.retain(|e| e.signature == best);
        assert_eq!(next_to_opt(&r), Err(SweepError::SingleSignature));
    }

    #[test]
    fn tied_distinct_strategies_give_equal_next_to_opt() {
        let mut r = solve_family(Variant::NoMarker, &q("1/2")).unwrap();
        let mut twin = r.opt().unwrap().clone();
        twin.id.push('~');
        twin.signature = r.next_to_opt_entry().unwrap().signature.clone();
        r.entries.insert(1, twin);
        assert_eq!(next_to_opt(&r).unwrap(), r.opt().unwrap().objective);
    }

    #[test]
    fn pruned_sweep_matches_full_solves() {
        for variant in [Variant::NoMarker] {
            let pruned = sweep(variant, 8, SweepOptions { prune: true }).unwrap();
            let full = sweep(variant, 8, SweepOptions { prune: false }).unwrap();
            assert_eq!(pruned.rows, full.rows);
            assert!(pruned.stats.lps_solved < full.stats.lps_solved);
            for row in &full.rows {
                let r = solve_game(variant, &row.v).unwrap();
                assert_eq!(r.opt().unwrap().objective, row.opt.objective);
                assert_eq!(next_to_opt(&r).ok(), row.next_to_opt);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(solve_family(Variant::NoMarker, &q("3/2")).is_err());
        assert_eq!(sweep(Variant::NoMarker, 0, SweepOptions::default()), Err(SweepError::EmptyGrid));
    }
}
