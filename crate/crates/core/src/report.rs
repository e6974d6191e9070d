//! `key=value` text renderings shared by the decision pipeline and the
//! oracle, so the two outputs can be diffed line by line.

use std::fmt::Write;

use crate::inverse::{Answer, DecisionReport};
use crate::oracle::OracleVerdict;

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

/// Both framings of the answer: the co-question and the representability
/// question it negates.
pub fn answer_lines(answer: Answer) -> String {
    let extra = answer.extra_model_exists();
    format!(
        "extra_model_exists={}\nexact_model_set_of_3cnf={}\n",
        yes_no(extra),
        yes_no(!extra)
    )
}

pub fn decision_text(report: &DecisionReport) -> String {
    let mut out = String::new();
    writeln!(out, "source=decide").unwrap();
    writeln!(out, "n={}", report.n).unwrap();
    writeln!(out, "models={}", report.models).unwrap();
    out.push_str(&answer_lines(report.answer));
    match report.witness {
        Some(w) => writeln!(out, "witness={w}").unwrap(),
        None => writeln!(out, "witness=none").unwrap(),
    }
    writeln!(out, "kmin={}", report.kmin).unwrap();
    writeln!(out, "candidate_clauses={}", report.candidate_clauses).unwrap();
    writeln!(
        out,
        "closed_candidate_clauses={}",
        report.closed_candidate.len()
    )
    .unwrap();
    writeln!(out, "closed_candidate={}", report.closed_candidate).unwrap();
    writeln!(out, "cover_entries={}", report.cover_entries).unwrap();
    if let Some(prefix) = report.witness_prefix {
        writeln!(out, "witness_prefix={prefix}").unwrap();
    }
    for entry in &report.trace {
        writeln!(
            out,
            "trace={} closure_size={} contains_empty={} closure={}",
            entry.prefix,
            entry.closure.len(),
            yes_no(entry.contains_empty),
            entry.closure
        )
        .unwrap();
    }
    out
}

pub fn oracle_text(verdict: &OracleVerdict) -> String {
    let mut out = String::new();
    writeln!(out, "source=oracle").unwrap();
    writeln!(out, "n={}", verdict.n).unwrap();
    writeln!(out, "models={}", verdict.models).unwrap();
    out.push_str(&answer_lines(verdict.answer()));
    match verdict.extra_models.first() {
        Some(w) => writeln!(out, "witness={w}").unwrap(),
        None => writeln!(out, "witness=none").unwrap(),
    }
    writeln!(out, "checked={}", verdict.checked).unwrap();
    writeln!(out, "extra_model_count={}", verdict.extra_models.len()).unwrap();
    let listed: Vec<String> = verdict.extra_models.iter().map(|m| m.to_string()).collect();
    writeln!(out, "extra_models={}", listed.join(",")).unwrap();
    out
}
