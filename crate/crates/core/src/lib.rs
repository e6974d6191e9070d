//! Inverse 3-SAT: given a set of models `φ`, decide whether the tightest
//! 3-CNF consistent with `φ` (its *candidate formula*) has a model outside
//! `φ`.
//!
//! The crate holds two independent routes to that answer:
//!
//! - [`inverse::decide`], a polynomial pipeline built on 3-limited resolution
//!   closure ([`closure`]) and a prefix cover of the non-members of `φ`;
//! - [`oracle::oracle_decide`], exhaustive enumeration of all `2^n`
//!   assignments.
//!
//! The [`harness`] module runs the two against each other, shrinks any
//! disagreement and classifies it.

pub mod assignment;
pub mod clause;
pub mod closure;
pub mod error;
pub mod formula;
pub mod harness;
pub mod inverse;
pub mod literal;
pub mod model_set;
pub mod oracle;
pub mod report;

pub use assignment::{PartialAssignment, PrefixAssignment, TotalAssignment, MAX_VARS};
pub use clause::{Clause, Restricted};
pub use closure::{close_clauses, is_closed_3limited, three_limited_closure, ClosureResult};
pub use error::{Error, ParseError, Result};
pub use formula::{Formula, PackedFormula, DEFAULT_ENUMERATION_CAP};
pub use inverse::{
    candidate_formula, closed_candidate_formula, cover_level, decide, extract_witness,
    model_prefixes, prefix_cover, run_pipeline, Answer, DecideOptions, DecisionReport, PipelineRun,
    PrefixCover, StepTimings, TraceEntry, PAPER_KMIN,
};
pub use literal::{Literal, VarIndex};
pub use model_set::ModelSet;
pub use oracle::{oracle_decide, verify_witness, OracleVerdict};
