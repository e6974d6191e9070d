//! Exhaustive reference for the (co)Inverse 3-SAT question: enumerate every
//! assignment, keep the models of the candidate formula, subtract `φ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::assignment::{TotalAssignment, MAX_VARS};
use crate::error::{Error, Result};
use crate::formula::{Formula, PackedFormula};
use crate::inverse::{candidate_formula, Answer};
use crate::model_set::ModelSet;

/// Above this many variables the enumeration is split across rayon tasks.
const PARALLEL_FROM: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub n: usize,
    pub models: usize,
    /// Models of the candidate formula that are not in `φ`, ascending.
    pub extra_models: Vec<TotalAssignment>,
    /// Assignments evaluated: `2^n`.
    pub checked: u64,
}

impl OracleVerdict {
    pub fn answer(&self) -> Answer {
        Answer::from_extra(!self.extra_models.is_empty())
    }
}

/// Models of `formula` in lexicographic order, splitting the range across
/// rayon tasks for large `n`. The result does not depend on scheduling.
pub fn enumerate_models_parallel(formula: &Formula, cap: usize) -> Result<Vec<TotalAssignment>> {
    let n = formula.num_vars();
    if n > cap || n >= MAX_VARS {
        return Err(Error::CapExceeded { n, cap });
    }
    if n < PARALLEL_FROM {
        return formula.enumerate_models(cap);
    }
    let packed = PackedFormula::new(formula);
    let chunk_bits = PARALLEL_FROM - 4;
    let chunks = 1u64 << (n - chunk_bits);
    let per_chunk: Vec<Vec<TotalAssignment>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let base = chunk << chunk_bits;
            (base..base + (1 << chunk_bits))
                .filter(|&bits| packed.eval(bits))
                .map(|bits| TotalAssignment::new(n, bits))
                .collect()
        })
        .collect();
    Ok(per_chunk.into_iter().flatten().collect())
}

pub fn oracle_decide(phi: &ModelSet, cap: usize) -> Result<OracleVerdict> {
    let n = phi.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let candidate = candidate_formula(phi)?;
    let extra_models = enumerate_models_parallel(&candidate, cap)?
        .into_iter()
        .filter(|m| !phi.contains(m))
        .collect();
    Ok(OracleVerdict {
        n,
        models: phi.len(),
        extra_models,
        checked: 1u64 << n,
    })
}

/// True iff `witness` satisfies the candidate formula of `phi` and is not
/// one of its models.
pub fn verify_witness(phi: &ModelSet, witness: &TotalAssignment) -> bool {
    if witness.len() != phi.n() || phi.contains(witness) {
        return false;
    }
    // Below three variables there are no 3-clauses to satisfy.
    candidate_formula(phi).map_or(true, |f| f.evaluate(witness))
}
