use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::assignment::PartialAssignment;
use crate::error::{Error, Result};
use crate::literal::{Literal, VarIndex};

/// A disjunction of literals, stored as a sorted set.
///
/// Construction rejects tautologies, so a clause never holds both a literal
/// and its complement. The empty clause is a valid value and is false under
/// every assignment.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: SmallVec<[Literal; 3]>,
}

/// Outcome of restricting a clause by a partial assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restricted {
    Satisfied,
    Clause(Clause),
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Literal>>(literals: I) -> Result<Clause> {
        let mut lits: SmallVec<[Literal; 3]> = literals.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        // Complementary literals are adjacent after sorting.
        if let Some(pair) = lits.windows(2).find(|w| w[0].var() == w[1].var()) {
            return Err(Error::Tautology {
                var: pair[0].var().get(),
            });
        }
        Ok(Clause { lits })
    }

    pub fn empty() -> Clause {
        Clause::default()
    }

    /// Convenience constructor from signed integers, DIMACS style.
    ///
    /// # Panics
    ///
    /// Panics on a zero entry or a tautology; meant for literals in tests
    /// and examples.
    pub fn from_dimacs(values: &[i64]) -> Clause {
        Clause::new(values.iter().map(|&v| Literal::from_dimacs(v)))
            .expect("non-tautological clause")
    }

    /// The sub-clause selecting the literals whose positions are set in
    /// `mask`.
    pub(crate) fn select(&self, mask: u32) -> Clause {
        let lits = self
            .lits
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| *l)
            .collect();
        Clause { lits }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn max_var(&self) -> Option<VarIndex> {
        self.lits.last().map(|l| l.var())
    }

    /// True iff every literal of `self` occurs in `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        if self.len() > other.len() {
            return false;
        }
        // Both sides are sorted: a single merge pass.
        let mut rest = other.lits.iter();
        'outer: for lit in &self.lits {
            for candidate in rest.by_ref() {
                match candidate.cmp(lit) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    /// Resolves `self` with `other` on `pivot`.
    ///
    /// Returns `Err(Tautology)` when the union keeps another complementary
    /// pair.
    ///
    /// # Panics
    ///
    /// Panics unless `pivot` occurs positively in one operand and negatively
    /// in the other.
    pub fn resolve(&self, other: &Clause, pivot: VarIndex) -> Result<Clause> {
        let (pos, neg) = (pivot.positive(), pivot.negative());
        let ok = (self.contains(pos) && other.contains(neg))
            || (self.contains(neg) && other.contains(pos));
        assert!(
            ok,
            "{pivot} is not a resolution pivot for {self} and {other}"
        );
        Clause::new(
            self.lits
                .iter()
                .chain(other.lits.iter())
                .copied()
                .filter(|l| l.var() != pivot),
        )
    }

    /// The unique pivot on which `self` and `other` clash, if they clash on
    /// exactly one variable.
    pub fn single_clash(&self, other: &Clause) -> Option<VarIndex> {
        let mut clash = None;
        for lit in &self.lits {
            if other.contains(lit.complement()) {
                if clash.is_some() {
                    return None;
                }
                clash = Some(lit.var());
            }
        }
        clash
    }

    pub fn restrict(&self, assignment: &PartialAssignment) -> Restricted {
        let mut kept = SmallVec::<[Literal; 3]>::new();
        for &lit in &self.lits {
            match assignment.get(lit.var()) {
                Some(value) if lit.eval(value) => return Restricted::Satisfied,
                Some(_) => {}
                None => kept.push(lit),
            }
        }
        Restricted::Clause(Clause { lits: kept })
    }

    /// Evaluates under a total valuation given as a lookup function.
    pub fn eval(&self, value_of: impl Fn(VarIndex) -> bool) -> bool {
        self.lits.iter().any(|l| l.eval(value_of(l.var())))
    }

    pub fn to_dimacs_line(&self) -> String {
        let mut line = String::new();
        for lit in &self.lits {
            line.push_str(&lit.to_dimacs().to_string());
            line.push(' ');
        }
        line.push('0');
        line
    }
}

impl Ord for Clause {
    /// Shorter clauses first, then lexicographic by literal.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.lits.as_slice().cmp(other.lits.as_slice()))
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("(∅)");
        }
        f.write_str("(")?;
        for (i, lit) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{lit}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(values: &[i64]) -> Clause {
        Clause::from_dimacs(values)
    }

    fn lits(values: &[i64]) -> Vec<Literal> {
        values.iter().map(|&v| Literal::from_dimacs(v)).collect()
    }

    #[test]
    fn construction_merges_duplicates() {
        let clause = Clause::new(lits(&[3, 1, 1])).unwrap();
        assert_eq!(clause.literals(), lits(&[1, 3]).as_slice());
    }

    #[test]
    fn construction_rejects_tautologies() {
        assert_eq!(
            Clause::new(lits(&[1, -1, 2])),
            Err(Error::Tautology { var: 1 })
        );
    }

    #[test]
    fn empty_clause_is_valid_and_false() {
        let clause = Clause::new(Vec::new()).unwrap();
        assert!(clause.is_empty());
        assert!(!clause.eval(|_| true));
        assert!(!clause.eval(|_| false));
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let clause = c(&[5, -2, 3]);
        assert_eq!(
            Clause::new(clause.literals().iter().copied()).unwrap(),
            clause
        );
    }

    #[test]
    fn subsumption() {
        assert!(c(&[3, 5]).subsumes(&c(&[3, 4, 5])));
        assert!(Clause::empty().subsumes(&c(&[5])));
        assert!(c(&[1, 2, 3]).subsumes(&c(&[1, 2, 3])));
        assert!(!c(&[3, 4, 5]).subsumes(&c(&[3, 5])));
        assert!(!c(&[3, -5]).subsumes(&c(&[3, 4, 5])));
        assert!(!c(&[6]).subsumes(&c(&[3, 4, 5])));
    }

    #[test]
    fn resolution() {
        let x4 = VarIndex::new(4);
        assert_eq!(c(&[3, 4]).resolve(&c(&[-4, 5]), x4), Ok(c(&[3, 5])));
        let x1 = VarIndex::new(1);
        assert_eq!(c(&[1]).resolve(&c(&[-1]), x1), Ok(Clause::empty()));
        assert_eq!(
            c(&[1, 2]).resolve(&c(&[-1, -2]), x1),
            Err(Error::Tautology { var: 2 })
        );
    }

    #[test]
    #[should_panic(expected = "not a resolution pivot")]
    fn resolution_requires_a_clashing_pivot() {
        let _ = c(&[1, 2]).resolve(&c(&[1, 3]), VarIndex::new(1));
    }

    #[test]
    fn single_clash() {
        assert_eq!(
            c(&[3, 4]).single_clash(&c(&[-4, 5])),
            Some(VarIndex::new(4))
        );
        assert_eq!(c(&[1, 2]).single_clash(&c(&[-1, -2])), None);
        assert_eq!(c(&[1, 2]).single_clash(&c(&[1, 3])), None);
    }

    #[test]
    fn restriction() {
        let i1011 = PartialAssignment::from_prefix_str("1011").unwrap();
        let i0100 = PartialAssignment::from_prefix_str("0100").unwrap();
        assert_eq!(c(&[-1, 2, 5]).restrict(&i1011), Restricted::Clause(c(&[5])));
        assert_eq!(
            c(&[3, 4]).restrict(&i0100),
            Restricted::Clause(Clause::empty())
        );
        assert_eq!(c(&[1, 3]).restrict(&i1011), Restricted::Satisfied);
        assert_eq!(
            c(&[3, 5]).restrict(&PartialAssignment::new()),
            Restricted::Clause(c(&[3, 5]))
        );
    }

    #[test]
    fn ordering_puts_shorter_clauses_first() {
        let mut clauses = vec![c(&[1, 2, 3]), c(&[4]), Clause::empty(), c(&[1, -2])];
        clauses.sort();
        assert_eq!(
            clauses,
            vec![Clause::empty(), c(&[4]), c(&[1, -2]), c(&[1, 2, 3])]
        );
    }

    #[test]
    fn display() {
        assert_eq!(c(&[-1, 3]).to_string(), "(-x1 x3)");
        assert_eq!(Clause::empty().to_string(), "(∅)");
        assert_eq!(c(&[-1, 3]).to_dimacs_line(), "-1 3 0");
        assert_eq!(Clause::empty().to_dimacs_line(), "0");
    }
}
