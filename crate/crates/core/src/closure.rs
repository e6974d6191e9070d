//! 3-limited resolution closure.
//!
//! A 3-limited resolution step resolves two clauses of at most three
//! literals and keeps the resolvent only if it also has at most three
//! literals. The closure is the fixpoint of these steps combined with
//! subsumption deletion; it is unique and independent of processing order.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::clause::Clause;
use crate::error::{Error, Result};
use crate::formula::Formula;

/// Maximum clause width for operands and resolvents.
pub const WIDTH: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    pub closed: Formula,
    /// Resolvents that entered the clause set.
    pub resolution_steps: usize,
    /// Clauses removed or rejected because another clause subsumes them.
    pub subsumption_deletions: usize,
}

/// Computes the 3-limited closure of `formula`.
///
/// If the empty clause is derived (or present) the result is exactly
/// `{(∅)}`. Input clauses wider than three literals are a contract error.
pub fn three_limited_closure(formula: &Formula) -> Result<ClosureResult> {
    close_clauses(formula.num_vars(), formula.clauses())
}

/// Like [`three_limited_closure`], but feeds `clauses` to the engine in the
/// order given. The result is the same for every order.
pub fn close_clauses(num_vars: usize, clauses: &[Clause]) -> Result<ClosureResult> {
    if let Some(wide) = clauses.iter().find(|c| c.len() > WIDTH) {
        return Err(Error::OversizedClause { len: wide.len() });
    }
    let mut engine = Engine::new(num_vars);
    for clause in clauses {
        if engine.insert(clause.clone(), false) == Insert::Empty {
            return Ok(engine.refuted(num_vars));
        }
    }
    if engine.saturate() == Insert::Empty {
        return Ok(engine.refuted(num_vars));
    }
    Ok(engine.finish(num_vars))
}

/// True iff `formula` is closed under 3-limited resolution: no clause is
/// subsumed by a different clause, and every 3-limited resolvent of two
/// of its clauses is subsumed by some clause.
///
/// This is a direct pairwise check, independent of the engine above.
pub fn is_closed_3limited(formula: &Formula) -> bool {
    let clauses = formula.clauses();
    for (i, c) in clauses.iter().enumerate() {
        for (j, d) in clauses.iter().enumerate() {
            if i != j && c.subsumes(d) {
                return false;
            }
        }
    }
    let present: HashSet<&Clause> = clauses.iter().collect();
    for (i, c) in clauses.iter().enumerate() {
        if c.len() > WIDTH {
            continue;
        }
        for d in &clauses[i + 1..] {
            if d.len() > WIDTH {
                continue;
            }
            let Some(pivot) = c.single_clash(d) else {
                continue;
            };
            let resolvent = c.resolve(d, pivot).expect("single clash");
            if resolvent.len() > WIDTH {
                continue;
            }
            // A clause subsumes the resolvent iff it is one of its subsets.
            let full = (1u32 << resolvent.len()) - 1;
            let subsumed = (0..=full).any(|mask| present.contains(&resolvent.select(mask)));
            if !subsumed {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Insert {
    Added,
    Subsumed,
    Empty,
}

struct Engine {
    arena: Vec<Clause>,
    alive: Vec<bool>,
    live: HashMap<Clause, usize>,
    /// Clause ids per literal code; may hold dead ids.
    occurs: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    steps: usize,
    deletions: usize,
}

impl Engine {
    fn new(num_vars: usize) -> Self {
        Engine {
            arena: Vec::new(),
            alive: Vec::new(),
            live: HashMap::new(),
            occurs: vec![Vec::new(); 2 * (num_vars + 1)],
            queue: VecDeque::new(),
            steps: 0,
            deletions: 0,
        }
    }

    fn is_subsumed(&self, clause: &Clause) -> bool {
        let full = (1u32 << clause.len()) - 1;
        (1..=full).any(|mask| self.live.contains_key(&clause.select(mask)))
    }

    fn insert(&mut self, clause: Clause, derived: bool) -> Insert {
        if clause.is_empty() {
            return Insert::Empty;
        }
        if self.is_subsumed(&clause) {
            if !derived {
                self.deletions += 1;
            }
            return Insert::Subsumed;
        }
        // Backward subsumption: every superset contains each literal of
        // `clause`, so scanning the shortest occurrence list suffices.
        let scan = clause
            .literals()
            .iter()
            .min_by_key(|l| self.occurs[l.code()].len())
            .expect("nonempty clause");
        let victims: Vec<usize> = self.occurs[scan.code()]
            .iter()
            .copied()
            .filter(|&id| self.alive[id] && clause.subsumes(&self.arena[id]))
            .collect();
        for id in victims {
            self.alive[id] = false;
            self.live.remove(&self.arena[id]);
            self.deletions += 1;
        }
        let id = self.arena.len();
        for lit in clause.literals() {
            self.occurs[lit.code()].push(id);
        }
        self.live.insert(clause.clone(), id);
        self.arena.push(clause);
        self.alive.push(true);
        self.queue.push_back(id);
        Insert::Added
    }

    /// Resolves each queued clause against every live partner until no new
    /// clause appears.
    fn saturate(&mut self) -> Insert {
        while let Some(id) = self.queue.pop_front() {
            if !self.alive[id] {
                continue;
            }
            let clause = self.arena[id].clone();
            'lits: for &lit in clause.literals() {
                let partners = self.occurs[lit.complement().code()].clone();
                for pid in partners {
                    if !self.alive[id] {
                        // Subsumed by one of its own resolvents; the
                        // subsuming clause is queued and covers it.
                        break 'lits;
                    }
                    if !self.alive[pid] {
                        continue;
                    }
                    let other = &self.arena[pid];
                    if clause.single_clash(other) != Some(lit.var()) {
                        continue;
                    }
                    let resolvent = clause.resolve(other, lit.var()).expect("single clash");
                    if resolvent.len() > WIDTH {
                        continue;
                    }
                    match self.insert(resolvent, true) {
                        Insert::Empty => {
                            self.steps += 1;
                            return Insert::Empty;
                        }
                        Insert::Added => self.steps += 1,
                        Insert::Subsumed => {}
                    }
                }
            }
        }
        Insert::Added
    }

    fn refuted(self, num_vars: usize) -> ClosureResult {
        ClosureResult {
            closed: Formula::new(num_vars, [Clause::empty()]),
            resolution_steps: self.steps,
            subsumption_deletions: self.deletions,
        }
    }

    fn finish(self, num_vars: usize) -> ClosureResult {
        ClosureResult {
            closed: Formula::new(num_vars, self.live.into_keys()),
            resolution_steps: self.steps,
            subsumption_deletions: self.deletions,
        }
    }
}
