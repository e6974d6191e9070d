//! Invariant checks run on a single model set before a discrepancy may be
//! blamed on the procedure rather than on this implementation.
//!
//! Every check recomputes its ground truth by direct enumeration.

use serde::Serialize;

use crate::assignment::TotalAssignment;
use crate::clause::Clause;
use crate::closure::{close_clauses, is_closed_3limited, three_limited_closure};
use crate::error::Result;
use crate::formula::Formula;
use crate::inverse::{candidate_formula, prefix_cover};
use crate::literal::{Literal, VarIndex};
use crate::model_set::ModelSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatteryCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BatteryReport {
    pub checks: Vec<BatteryCheck>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: &'static str, outcome: std::result::Result<(), String>) {
        let (passed, detail) = match outcome {
            Ok(()) => (true, String::new()),
            Err(detail) => (false, detail),
        };
        self.checks.push(BatteryCheck {
            name,
            passed,
            detail,
        });
    }
}

/// Runs every check on `phi`. `cap` bounds the enumerations.
pub fn run_battery(phi: &ModelSet, cap: usize) -> Result<BatteryReport> {
    let mut report = BatteryReport::default();
    let candidate = candidate_formula(phi)?;
    let closure = three_limited_closure(&candidate)?;
    let closed = closure.closed;

    report.record(
        "candidate_maximality",
        check_candidate_maximality(phi, &candidate),
    );
    let candidate_models = candidate.enumerate_models(cap)?;
    report.record(
        "models_within_candidate",
        check_models_within(phi, &candidate_models),
    );
    report.record("closure_closed", check_closed(&closed));
    report.record(
        "closure_subsumes_candidate",
        check_subsumes_input(&candidate, &closed),
    );
    report.record(
        "closure_preserves_models",
        check_same_models(&closed, &candidate_models, cap),
    );
    report.record(
        "closure_order_independent",
        check_order_independence(&candidate, &closed),
    );
    report.record("restriction_semantics", check_restrictions(phi, &closed));
    report.record("cover_exactness", check_cover(phi));
    Ok(report)
}

fn check_candidate_maximality(
    phi: &ModelSet,
    candidate: &Formula,
) -> std::result::Result<(), String> {
    let n = phi.n();
    let mut expected = 0;
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for signs in 0..8u32 {
                    let clause = Clause::new([
                        Literal::new(VarIndex::new(i as u32), signs & 4 != 0),
                        Literal::new(VarIndex::new(j as u32), signs & 2 != 0),
                        Literal::new(VarIndex::new(k as u32), signs & 1 != 0),
                    ])
                    .expect("distinct variables");
                    let everywhere = phi.iter().all(|m| clause.eval(|v| m.value(v)));
                    if everywhere != candidate.contains(&clause) {
                        return Err(format!("{clause}: satisfied by all models = {everywhere}"));
                    }
                    expected += everywhere as usize;
                }
            }
        }
    }
    if expected != candidate.len() {
        return Err(format!(
            "candidate has {} clauses, expected {expected}",
            candidate.len()
        ));
    }
    Ok(())
}

fn check_models_within(
    phi: &ModelSet,
    candidate_models: &[TotalAssignment],
) -> std::result::Result<(), String> {
    match phi
        .iter()
        .find(|m| candidate_models.binary_search(m).is_err())
    {
        Some(m) => Err(format!("model {m} falsifies the candidate formula")),
        None => Ok(()),
    }
}

fn check_closed(closed: &Formula) -> std::result::Result<(), String> {
    if closed.contains_empty() && closed.len() != 1 {
        return Err("empty clause alongside other clauses".into());
    }
    if is_closed_3limited(closed) {
        Ok(())
    } else {
        Err(format!("not 3-limited closed: {closed}"))
    }
}

fn check_subsumes_input(candidate: &Formula, closed: &Formula) -> std::result::Result<(), String> {
    match candidate
        .clauses()
        .iter()
        .find(|c| !closed.clauses().iter().any(|d| d.subsumes(c)))
    {
        Some(c) => Err(format!("{c} not subsumed by the closure")),
        None => Ok(()),
    }
}

fn check_same_models(
    closed: &Formula,
    expected: &[TotalAssignment],
    cap: usize,
) -> std::result::Result<(), String> {
    let models = closed.enumerate_models(cap).map_err(|e| e.to_string())?;
    if models == expected {
        Ok(())
    } else {
        Err(format!(
            "closure has {} models, candidate has {}",
            models.len(),
            expected.len()
        ))
    }
}

fn check_order_independence(
    candidate: &Formula,
    closed: &Formula,
) -> std::result::Result<(), String> {
    let mut reversed = candidate.clauses().to_vec();
    reversed.reverse();
    let mut interleaved: Vec<Clause> = candidate.clauses().iter().step_by(2).cloned().collect();
    interleaved.extend(candidate.clauses().iter().skip(1).step_by(2).cloned());
    for order in [reversed, interleaved] {
        let other = close_clauses(candidate.num_vars(), &order)
            .map_err(|e| e.to_string())?
            .closed;
        if &other != closed {
            return Err(format!(
                "closure depends on clause order: {other} vs {closed}"
            ));
        }
    }
    Ok(())
}

/// For every cover entry `I`: `F|I` agrees with `F` on every assignment
/// extending `I`, and mentions no bound variable.
fn check_restrictions(phi: &ModelSet, closed: &Formula) -> std::result::Result<(), String> {
    let n = phi.n();
    let cover = prefix_cover(phi, 1).map_err(|e| e.to_string())?;
    for prefix in cover.entries() {
        let restricted = closed.restrict(&prefix.to_partial());
        if let Some(c) = restricted.clauses().iter().find(|c| {
            c.literals()
                .iter()
                .any(|l| (l.var().get() as usize) <= prefix.len())
        }) {
            return Err(format!("{c} survives restriction by {prefix}"));
        }
        let free = n - prefix.len();
        for suffix in 0..1u64 << free {
            let a = TotalAssignment::new(n, prefix.bits() << free | suffix);
            if restricted.evaluate(&a) != closed.evaluate(&a) {
                return Err(format!("restriction by {prefix} disagrees at {a}"));
            }
        }
    }
    Ok(())
}

fn check_cover(phi: &ModelSet) -> std::result::Result<(), String> {
    let n = phi.n();
    let cover = prefix_cover(phi, 1).map_err(|e| e.to_string())?;
    if cover.len() > n * phi.len() {
        return Err(format!(
            "cover has {} entries, bound is {}",
            cover.len(),
            n * phi.len()
        ));
    }
    if let Some((p, m)) = cover
        .entries()
        .iter()
        .find_map(|p| phi.iter().find(|m| p.is_prefix_of(m)).map(|m| (p, m)))
    {
        return Err(format!("entry {p} is a prefix of model {m}"));
    }
    for bits in 0..1u64 << n {
        let a = TotalAssignment::new(n, bits);
        if cover.covers(&a) == phi.contains(&a) {
            return Err(format!("cover misclassifies {a}"));
        }
    }
    Ok(())
}
