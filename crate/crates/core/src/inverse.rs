//! The polynomial pipeline for the (co)Inverse 3-SAT question: given a
//! model set `φ`, does the conjunction of all 3-clauses satisfied by every
//! model of `φ` have a model outside `φ`?
//!
//! 1. Build the candidate formula and close it under 3-limited resolution.
//! 2. Build the prefix cover: partial assignments on `x1..xk` that leave `φ`
//!    exactly at position `k`.
//! 3. Restrict the closed formula by each cover entry, close again, and look
//!    for an entry whose closure lacks the empty clause.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::assignment::{PrefixAssignment, TotalAssignment};
use crate::clause::Clause;
use crate::closure::three_limited_closure;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::literal::{Literal, VarIndex};
use crate::model_set::ModelSet;

/// Smallest `kmin` the cover may start from when the 1- to 3-variable
/// strata are skipped.
pub const PAPER_KMIN: usize = 4;

fn require_candidate_size(phi: &ModelSet) -> Result<()> {
    if phi.n() < 3 {
        return Err(Error::InputTooSmall { n: phi.n(), min: 3 });
    }
    Ok(())
}

/// All 3-clauses over three distinct variables satisfied by every model.
///
/// For each variable triple, a clause is falsified by exactly one value
/// pattern on its variables: the one that makes all three literals false.
/// The clause belongs to the candidate formula iff no model shows that
/// pattern.
pub fn candidate_formula(phi: &ModelSet) -> Result<Formula> {
    require_candidate_size(phi)?;
    let n = phi.n();
    let bits: Vec<u64> = phi.iter().map(TotalAssignment::bits).collect();
    let bit = |m: u64, var: usize| (m >> (n - var) & 1) as usize;
    let mut clauses = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let seen = bits.iter().fold(0u8, |acc, &m| {
                    acc | 1 << (bit(m, i) << 2 | bit(m, j) << 1 | bit(m, k))
                });
                for signs in 0..8usize {
                    // Bit set = negated literal = the value making it false.
                    if seen >> signs & 1 == 1 {
                        continue;
                    }
                    let lits = [
                        Literal::new(VarIndex::new(i as u32), signs >> 2 & 1 == 1),
                        Literal::new(VarIndex::new(j as u32), signs >> 1 & 1 == 1),
                        Literal::new(VarIndex::new(k as u32), signs & 1 == 1),
                    ];
                    clauses.push(Clause::new(lits).expect("distinct variables"));
                }
            }
        }
    }
    Ok(Formula::new(n, clauses))
}

/// The candidate formula closed under 3-limited resolution.
pub fn closed_candidate_formula(phi: &ModelSet) -> Result<Formula> {
    let candidate = candidate_formula(phi)?;
    Ok(three_limited_closure(&candidate)?.closed)
}

fn check_prefix_len(phi: &ModelSet, k: usize, min: usize) -> Result<()> {
    if k < min || k > phi.n() {
        return Err(Error::PrefixLengthOutOfRange { k, min, n: phi.n() });
    }
    Ok(())
}

/// The length-`k` prefixes of the models.
pub fn model_prefixes(phi: &ModelSet, k: usize) -> Result<BTreeSet<PrefixAssignment>> {
    check_prefix_len(phi, k, 0)?;
    Ok(phi.iter().map(|m| m.prefix(k)).collect())
}

/// Length-`k` prefixes that extend a model prefix of length `k - 1` but are
/// themselves no model's prefix.
///
/// Entries come out in generation order: for each model in stored order,
/// its `k`-prefix with the last value flipped.
pub fn cover_level(phi: &ModelSet, k: usize) -> Result<Vec<PrefixAssignment>> {
    check_prefix_len(phi, k, 1)?;
    let present: HashSet<PrefixAssignment> = phi.iter().map(|m| m.prefix(k)).collect();
    let mut emitted = HashSet::new();
    Ok(phi
        .iter()
        .map(|m| m.prefix(k).flip_last())
        .filter(|p| !present.contains(p) && emitted.insert(*p))
        .collect())
}

/// The union of [`cover_level`] for `kmin <= k <= n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixCover {
    n: usize,
    kmin: usize,
    entries: Vec<PrefixAssignment>,
}

impl PrefixCover {
    pub fn kmin(&self) -> usize {
        self.kmin
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entries by ascending length, then generation order.
    pub fn entries(&self) -> &[PrefixAssignment] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn level(&self, k: usize) -> impl Iterator<Item = &PrefixAssignment> {
        self.entries.iter().filter(move |p| p.len() == k)
    }

    /// Entries by ascending length, then lexicographically.
    pub fn sorted(&self) -> Vec<PrefixAssignment> {
        let mut sorted = self.entries.clone();
        sorted.sort();
        sorted
    }

    /// True iff some entry is a prefix of `assignment`.
    pub fn covers(&self, assignment: &TotalAssignment) -> bool {
        self.entries.iter().any(|p| p.is_prefix_of(assignment))
    }

    /// One prefix per line, grouped by ascending length and lexicographic
    /// within a group.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in self.sorted() {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn prefix_cover(phi: &ModelSet, kmin: usize) -> Result<PrefixCover> {
    if kmin < 1 || kmin > phi.n() {
        return Err(Error::KminOutOfRange { kmin, n: phi.n() });
    }
    let mut entries = Vec::new();
    for k in kmin..=phi.n() {
        entries.extend(cover_level(phi, k)?);
    }
    Ok(PrefixCover {
        n: phi.n(),
        kmin,
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    /// The candidate formula has a model outside `φ`: `φ` is not the exact
    /// model set of any 3-CNF.
    ExtraModelExists,
    /// `φ` is exactly the model set of its candidate formula.
    NoExtraModel,
}

impl Answer {
    pub fn from_extra(extra: bool) -> Answer {
        if extra {
            Answer::ExtraModelExists
        } else {
            Answer::NoExtraModel
        }
    }

    pub fn extra_model_exists(self) -> bool {
        self == Answer::ExtraModelExists
    }
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub kmin: usize,
    /// Worker threads for the per-prefix closures; 1 runs inline.
    pub jobs: usize,
    pub timeout: Option<Duration>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            kmin: 1,
            jobs: 1,
            timeout: None,
        }
    }
}

impl DecideOptions {
    pub fn with_kmin(kmin: usize) -> Self {
        DecideOptions {
            kmin,
            ..Default::default()
        }
    }

    pub fn paper_mode() -> Self {
        Self::with_kmin(PAPER_KMIN)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub prefix: PrefixAssignment,
    pub closure: Formula,
    pub contains_empty: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepTimings {
    /// Candidate formula plus its closure.
    pub closed_candidate: Duration,
    pub cover: Duration,
    pub prefix_closures: Duration,
}

impl StepTimings {
    pub fn total(&self) -> Duration {
        self.closed_candidate + self.cover + self.prefix_closures
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecisionReport {
    pub n: usize,
    pub models: usize,
    pub kmin: usize,
    pub candidate_clauses: usize,
    pub closed_candidate: Formula,
    pub cover_entries: usize,
    pub answer: Answer,
    pub witness: Option<TotalAssignment>,
    /// The cover entry the witness extends.
    pub witness_prefix: Option<PrefixAssignment>,
    pub trace: Vec<TraceEntry>,
    #[serde(skip)]
    pub timings: StepTimings,
}

impl DecisionReport {
    pub fn trace_for(&self, prefix: &PrefixAssignment) -> Option<&TraceEntry> {
        self.trace.iter().find(|e| &e.prefix == prefix)
    }
}

fn prefix_closure(closed: &Formula, prefix: &PrefixAssignment) -> Result<TraceEntry> {
    let restricted = closed.restrict(&prefix.to_partial());
    let closure = three_limited_closure(&restricted)?.closed;
    Ok(TraceEntry {
        prefix: *prefix,
        contains_empty: closure.contains_empty(),
        closure,
    })
}

fn check_deadline(deadline: Option<(Instant, Duration)>) -> Result<()> {
    match deadline {
        Some((at, limit)) if Instant::now() > at => Err(Error::Timeout {
            limit_ms: limit.as_millis(),
        }),
        _ => Ok(()),
    }
}

/// The three pipeline steps, before any witness is extracted.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub kmin: usize,
    pub candidate: Formula,
    pub closed: Formula,
    pub cover: PrefixCover,
    /// One entry per cover entry, in cover order.
    pub trace: Vec<TraceEntry>,
    pub timings: StepTimings,
}

impl PipelineRun {
    /// The first cover entry whose restricted closure lacks `(∅)`.
    pub fn open_prefix(&self) -> Option<PrefixAssignment> {
        self.trace
            .iter()
            .find(|e| !e.contains_empty)
            .map(|e| e.prefix)
    }

    /// The pipeline's answer before witness extraction.
    pub fn claim(&self) -> Answer {
        Answer::from_extra(self.open_prefix().is_some())
    }

    /// Extracts and verifies the witness, if the run claims one exists.
    pub fn into_decision(self, phi: &ModelSet) -> Result<DecisionReport> {
        let open = self.open_prefix();
        let witness = match open {
            Some(prefix) => {
                let witness = extract_witness(&self.closed, &prefix)?;
                if !self.candidate.evaluate(&witness) || phi.contains(&witness) {
                    return Err(Error::WitnessRejected {
                        prefix,
                        witness: witness.to_string(),
                    });
                }
                Some(witness)
            }
            None => None,
        };
        Ok(DecisionReport {
            n: phi.n(),
            models: phi.len(),
            kmin: self.kmin,
            candidate_clauses: self.candidate.len(),
            cover_entries: self.cover.len(),
            closed_candidate: self.closed,
            answer: Answer::from_extra(witness.is_some()),
            witness,
            witness_prefix: open,
            trace: self.trace,
            timings: self.timings,
        })
    }
}

/// Steps 1 to 3: closed candidate formula, prefix cover, and the closure of
/// the closed candidate restricted by every cover entry.
pub fn run_pipeline(phi: &ModelSet, options: &DecideOptions) -> Result<PipelineRun> {
    require_candidate_size(phi)?;
    if options.kmin < 1 || options.kmin > phi.n() {
        return Err(Error::KminOutOfRange {
            kmin: options.kmin,
            n: phi.n(),
        });
    }
    let started = Instant::now();
    let deadline = options.timeout.map(|t| (started + t, t));
    let mut timings = StepTimings::default();

    let candidate = candidate_formula(phi)?;
    let closed = three_limited_closure(&candidate)?.closed;
    timings.closed_candidate = started.elapsed();
    check_deadline(deadline)?;

    let step = Instant::now();
    let cover = prefix_cover(phi, options.kmin)?;
    timings.cover = step.elapsed();
    check_deadline(deadline)?;

    let step = Instant::now();
    let run = |prefix: &PrefixAssignment| {
        check_deadline(deadline)?;
        prefix_closure(&closed, prefix)
    };
    let trace: Vec<TraceEntry> = if options.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?;
        pool.install(|| cover.entries().par_iter().map(run).collect::<Result<_>>())?
    } else {
        cover.entries().iter().map(run).collect::<Result<_>>()?
    };
    timings.prefix_closures = step.elapsed();

    Ok(PipelineRun {
        kmin: options.kmin,
        candidate,
        closed,
        cover,
        trace,
        timings,
    })
}

/// Runs the pipeline and, if it answers that an extra model exists,
/// extracts and verifies a witness.
///
/// Every cover entry is closed, so the trace is complete. The witness comes
/// from the first entry, in cover order, whose closure lacks `(∅)`.
pub fn decide(phi: &ModelSet, options: &DecideOptions) -> Result<DecisionReport> {
    run_pipeline(phi, options)?.into_decision(phi)
}

/// Extends `prefix` to a total assignment satisfying `closed`.
///
/// Backtracking search with unit propagation over the restricted formula,
/// branching on the lowest free variable with `0` tried first, so the
/// result is deterministic.
pub fn extract_witness(closed: &Formula, prefix: &PrefixAssignment) -> Result<TotalAssignment> {
    let n = closed.num_vars();
    assert!(prefix.len() <= n, "prefix longer than the formula");
    let restricted = closed.restrict(&prefix.to_partial());
    let mut values: Vec<Option<bool>> = vec![None; n + 1];
    if !search(restricted.clauses(), &mut values, prefix.len() + 1) {
        return Err(Error::WitnessExtractionFailed { prefix: *prefix });
    }
    let suffix: Vec<bool> = values[prefix.len() + 1..]
        .iter()
        .map(|v| v.unwrap_or(false))
        .collect();
    Ok(prefix.extend(&suffix))
}

enum Propagation {
    Conflict,
    Done,
}

fn propagate(
    clauses: &[Clause],
    values: &mut [Option<bool>],
    trail: &mut Vec<usize>,
) -> Propagation {
    loop {
        let mut changed = false;
        for clause in clauses {
            let mut unassigned = None;
            let mut free = 0;
            let mut satisfied = false;
            for lit in clause.literals() {
                match values[lit.var().get() as usize] {
                    Some(v) if lit.eval(v) => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        free += 1;
                        unassigned = Some(*lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (free, unassigned) {
                (0, _) => return Propagation::Conflict,
                (1, Some(lit)) => {
                    let var = lit.var().get() as usize;
                    values[var] = Some(!lit.is_negated());
                    trail.push(var);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Propagation::Done;
        }
    }
}

fn search(clauses: &[Clause], values: &mut Vec<Option<bool>>, first_free: usize) -> bool {
    let mut trail = Vec::new();
    if let Propagation::Done = propagate(clauses, values, &mut trail) {
        let next = (first_free..values.len()).find(|&v| values[v].is_none());
        let Some(var) = next else {
            return true;
        };
        for value in [false, true] {
            values[var] = Some(value);
            if search(clauses, values, var + 1) {
                return true;
            }
            values[var] = None;
        }
    }
    for var in trail {
        values[var] = None;
    }
    false
}
