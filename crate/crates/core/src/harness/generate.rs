use std::collections::HashSet;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assignment::TotalAssignment;
use crate::clause::Clause;
use crate::error::{Error, Result};
use crate::formula::{Formula, DEFAULT_ENUMERATION_CAP};
use crate::literal::{Literal, VarIndex};
use crate::model_set::ModelSet;

/// Draws per generated formula before giving up on finding a satisfiable one.
pub const MAX_GENERATOR_ATTEMPTS: usize = 1000;

/// Largest `n` for which exhaustive subsets are indexable by a `u64` mask.
pub const MAX_EXHAUSTIVE_N: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `m` distinct assignments drawn uniformly.
    RandomSubset { m: usize, seed: u64 },
    /// The models of a random 3-CNF with `clause_count` clauses; redrawn
    /// while unsatisfiable. The result is representable by construction.
    ModelsOfRandom3Cnf { clause_count: usize, seed: u64 },
    /// The subset whose members are the assignments `a` with bit `a` of
    /// `mask` set.
    Exhaustive { mask: u64 },
}

/// A reproducible instance description: `(n, generator)` fully determines
/// the model set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub generator: Generator,
}

impl InstanceSpec {
    pub fn random_subset(n: usize, m: usize, seed: u64) -> Self {
        InstanceSpec {
            n,
            generator: Generator::RandomSubset { m, seed },
        }
    }

    pub fn models_of_random_3cnf(n: usize, clause_count: usize, seed: u64) -> Self {
        InstanceSpec {
            n,
            generator: Generator::ModelsOfRandom3Cnf { clause_count, seed },
        }
    }

    pub fn subset(n: usize, mask: u64) -> Self {
        InstanceSpec {
            n,
            generator: Generator::Exhaustive { mask },
        }
    }

    /// Every nonempty subset of `{0,1}^n`, by ascending mask.
    pub fn exhaustive(n: usize) -> impl Iterator<Item = InstanceSpec> {
        assert!(
            n <= MAX_EXHAUSTIVE_N,
            "exhaustive enumeration needs n <= {MAX_EXHAUSTIVE_N}"
        );
        let last = if n == MAX_EXHAUSTIVE_N {
            u64::MAX
        } else {
            (1u64 << (1u64 << n)) - 1
        };
        (1..=last).map(move |mask| InstanceSpec::subset(n, mask))
    }

    pub fn seed(&self) -> Option<u64> {
        match self.generator {
            Generator::RandomSubset { seed, .. } | Generator::ModelsOfRandom3Cnf { seed, .. } => {
                Some(seed)
            }
            Generator::Exhaustive { .. } => None,
        }
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.generator {
            Generator::RandomSubset { m, seed } => {
                write!(f, "random_subset(n={},m={m},seed={seed})", self.n)
            }
            Generator::ModelsOfRandom3Cnf { clause_count, seed } => write!(
                f,
                "models_of_random_3cnf(n={},clauses={clause_count},seed={seed})",
                self.n
            ),
            Generator::Exhaustive { mask } => write!(f, "exhaustive(n={},mask={mask:#x})", self.n),
        }
    }
}

/// SplitMix64 finalizer; derives independent child seeds from a campaign
/// seed and an index.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn generate(spec: &InstanceSpec) -> Result<ModelSet> {
    let n = spec.n;
    match spec.generator {
        Generator::RandomSubset { m, seed } => random_subset(n, m, seed),
        Generator::ModelsOfRandom3Cnf { clause_count, seed } => {
            models_of_random_3cnf(n, clause_count, seed)
        }
        Generator::Exhaustive { mask } => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(Error::GeneratorRange(format!(
                    "exhaustive subsets need n <= {MAX_EXHAUSTIVE_N}"
                )));
            }
            let universe = 1u64 << n;
            if mask == 0 || (universe < 64 && mask >> universe != 0) {
                return Err(Error::GeneratorRange(format!(
                    "mask {mask:#x} is not a nonempty subset of {{0,1}}^{n}"
                )));
            }
            let models = (0..universe)
                .filter(|a| mask >> a & 1 == 1)
                .map(|a| TotalAssignment::new(n, a));
            ModelSet::new(n, models)
        }
    }
}

fn random_subset(n: usize, m: usize, seed: u64) -> Result<ModelSet> {
    if n >= 63 {
        return Err(Error::GeneratorRange(format!(
            "n={n} too large for random subsets"
        )));
    }
    let universe = 1u64 << n;
    if m == 0 || m as u64 > universe {
        return Err(Error::GeneratorRange(format!("m={m} outside [1, 2^{n}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits: Vec<u64> = if n <= 20 {
        sample(&mut rng, universe as usize, m)
            .into_iter()
            .map(|a| a as u64)
            .collect()
    } else {
        let mut seen = HashSet::with_capacity(m);
        let mut picked = Vec::with_capacity(m);
        while picked.len() < m {
            let a = rng.gen_range(0..universe);
            if seen.insert(a) {
                picked.push(a);
            }
        }
        picked
    };
    ModelSet::new(n, bits.into_iter().map(|a| TotalAssignment::new(n, a)))
}

/// A uniformly random clause over three distinct variables.
pub fn random_3clause(rng: &mut impl Rng, n: usize) -> Clause {
    let lits = sample(rng, n, 3)
        .into_iter()
        .map(|v| Literal::new(VarIndex::new(v as u32 + 1), rng.gen()))
        .collect::<Vec<_>>();
    Clause::new(lits).expect("distinct variables")
}

fn models_of_random_3cnf(n: usize, clause_count: usize, seed: u64) -> Result<ModelSet> {
    if !(3..=DEFAULT_ENUMERATION_CAP).contains(&n) {
        return Err(Error::GeneratorRange(format!(
            "n={n} outside [3, {DEFAULT_ENUMERATION_CAP}] for random 3-CNF models"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_GENERATOR_ATTEMPTS {
        let formula = Formula::new(n, (0..clause_count).map(|_| random_3clause(&mut rng, n)));
        let models = formula.enumerate_models(DEFAULT_ENUMERATION_CAP)?;
        if !models.is_empty() {
            return ModelSet::new(n, models);
        }
    }
    Err(Error::GeneratorExhausted {
        attempts: MAX_GENERATOR_ATTEMPTS,
    })
}

/// `count` sampled instances with `n` drawn from `n_min..=n_max`,
/// alternating random subsets (`1 <= m <= 2n`) and models of random 3-CNFs
/// (`3n..=6n` clauses). Instance `i` uses `split_seed(seed, i)`.
pub fn sampled_specs(n_min: usize, n_max: usize, count: usize, seed: u64) -> Vec<InstanceSpec> {
    assert!(3 <= n_min && n_min <= n_max, "need 3 <= n_min <= n_max");
    (0..count)
        .map(|i| {
            let child = split_seed(seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(child);
            let n = rng.gen_range(n_min..=n_max);
            if i % 2 == 0 {
                let max_m = (2 * n).min(1 << n.min(20));
                InstanceSpec::random_subset(n, rng.gen_range(1..=max_m), child)
            } else {
                InstanceSpec::models_of_random_3cnf(n, rng.gen_range(3 * n..=6 * n), child)
            }
        })
        .collect()
}
