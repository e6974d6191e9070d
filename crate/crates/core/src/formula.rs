use std::fmt;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::assignment::{PartialAssignment, TotalAssignment, MAX_VARS};
use crate::clause::{Clause, Restricted};
use crate::error::{Error, ParseError, Result};

/// Default bound on `n` for anything that enumerates all `2^n` assignments.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// A CNF formula: a set of clauses over `x1..=xn`.
///
/// Clauses are kept sorted (see [`Clause`]'s ordering) and deduplicated, so
/// two formulas with the same clause set compare equal regardless of how
/// they were built.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    /// # Panics
    ///
    /// Panics if a clause mentions a variable above `num_vars`.
    pub fn new<I: IntoIterator<Item = Clause>>(num_vars: usize, clauses: I) -> Formula {
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        for clause in &clauses {
            if let Some(var) = clause.max_var() {
                assert!(
                    var.get() as usize <= num_vars,
                    "{clause} mentions {var} beyond n={num_vars}"
                );
            }
        }
        clauses.sort_unstable();
        clauses.dedup();
        Formula { num_vars, clauses }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.clauses.binary_search(clause).is_ok()
    }

    /// True iff the empty clause is a member.
    pub fn contains_empty(&self) -> bool {
        // The empty clause sorts first.
        self.clauses.first().is_some_and(Clause::is_empty)
    }

    pub fn max_clause_len(&self) -> usize {
        self.clauses.last().map_or(0, Clause::len)
    }

    /// The formula induced by `assignment`: satisfied clauses are dropped,
    /// false literals removed, and clauses emptied this way kept as `(∅)`.
    pub fn restrict(&self, assignment: &PartialAssignment) -> Formula {
        let clauses = self
            .clauses
            .iter()
            .filter_map(|c| match c.restrict(assignment) {
                Restricted::Satisfied => None,
                Restricted::Clause(c) => Some(c),
            });
        Formula::new(self.num_vars, clauses)
    }

    pub fn evaluate(&self, assignment: &TotalAssignment) -> bool {
        assert_eq!(assignment.len(), self.num_vars, "assignment length");
        self.clauses.iter().all(|c| c.eval(|v| assignment.value(v)))
    }

    /// All satisfying assignments, in lexicographic order.
    pub fn enumerate_models(&self, cap: usize) -> Result<Vec<TotalAssignment>> {
        let n = self.num_vars;
        if n > cap || n >= MAX_VARS {
            return Err(Error::CapExceeded { n, cap });
        }
        let packed = PackedFormula::new(self);
        Ok((0..1u64 << n)
            .filter(|&bits| packed.eval(bits))
            .map(|bits| TotalAssignment::new(n, bits))
            .collect())
    }

    /// DIMACS CNF text, clauses in canonical order.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            out.push_str(&clause.to_dimacs_line());
            out.push('\n');
        }
        out
    }

    /// Parses DIMACS CNF. Comment lines (`c ...`) and a trailing `%` line are
    /// skipped; clauses may span lines. The clause count in the header must
    /// match the number of clauses read (before deduplication).
    pub fn parse_dimacs(text: &str) -> std::result::Result<Formula, ParseError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut pending = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if header.is_some() {
                    return Err(dimacs_error(line_no, "second header line"));
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let [kind, vars, count] = fields.as_slice() else {
                    return Err(dimacs_error(line_no, "expected `p cnf <vars> <clauses>`"));
                };
                if *kind != "cnf" {
                    return Err(dimacs_error(line_no, "expected `p cnf <vars> <clauses>`"));
                }
                let vars = vars
                    .parse()
                    .map_err(|_| dimacs_error(line_no, "bad variable count"))?;
                let count = count
                    .parse()
                    .map_err(|_| dimacs_error(line_no, "bad clause count"))?;
                header = Some((vars, count, line_no));
                continue;
            }
            let Some((vars, _, _)) = header else {
                return Err(dimacs_error(line_no, "clause before the header"));
            };
            for token in line.split_whitespace() {
                let value: i64 = token
                    .parse()
                    .map_err(|_| dimacs_error(line_no, &format!("bad literal {token:?}")))?;
                if value == 0 {
                    let clause = Clause::new(pending.drain(..))
                        .map_err(|e| dimacs_error(line_no, &e.to_string()))?;
                    clauses.push(clause);
                } else {
                    if value.unsigned_abs() as usize > vars {
                        return Err(dimacs_error(
                            line_no,
                            &format!("literal {value} beyond {vars} variables"),
                        ));
                    }
                    pending.push(crate::literal::Literal::from_dimacs(value));
                }
            }
        }
        let Some((vars, count, header_line)) = header else {
            return Err(dimacs_error(last_line.max(1), "missing `p cnf` header"));
        };
        if !pending.is_empty() {
            return Err(dimacs_error(
                last_line,
                "last clause is not terminated by 0",
            ));
        }
        if clauses.len() != count {
            return Err(dimacs_error(
                header_line,
                &format!("header declares {count} clauses, found {}", clauses.len()),
            ));
        }
        Ok(Formula::new(vars, clauses))
    }
}

fn dimacs_error(line: usize, message: &str) -> ParseError {
    ParseError::Dimacs {
        line,
        message: message.to_string(),
    }
}

impl Serialize for Formula {
    /// `{"num_vars": n, "clauses": [[1, -2], ...]}` with DIMACS literals.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("Formula", 2)?;
        state.serialize_field("num_vars", &self.num_vars)?;
        let clauses: Vec<Vec<i64>> = self
            .clauses
            .iter()
            .map(|c| c.literals().iter().map(|l| l.to_dimacs()).collect())
            .collect();
        state.serialize_field("clauses", &clauses)?;
        state.end()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("⊤");
        }
        for clause in &self.clauses {
            write!(f, "{clause}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[n={}] {self}", self.num_vars)
    }
}

/// A formula compiled to per-clause bit masks for fast truth-table
/// evaluation. Bit layout matches [`TotalAssignment::bits`].
#[derive(Clone, Debug)]
pub struct PackedFormula {
    num_vars: usize,
    clauses: Vec<(u64, u64)>,
}

impl PackedFormula {
    pub fn new(formula: &Formula) -> Self {
        let n = formula.num_vars();
        let clauses = formula
            .clauses()
            .iter()
            .map(|clause| {
                clause
                    .literals()
                    .iter()
                    .fold((0u64, 0u64), |(pos, neg), lit| {
                        let bit = 1u64 << (n - lit.var().get() as usize);
                        if lit.is_negated() {
                            (pos, neg | bit)
                        } else {
                            (pos | bit, neg)
                        }
                    })
            })
            .collect();
        PackedFormula {
            num_vars: n,
            clauses,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn eval(&self, bits: u64) -> bool {
        self.clauses
            .iter()
            .all(|&(pos, neg)| bits & pos != 0 || !bits & neg != 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::VarIndex;

    fn c(values: &[i64]) -> Clause {
        Clause::from_dimacs(values)
    }

    fn example_closed_formula() -> Formula {
        Formula::new(
            5,
            [
                c(&[1, 2, 3]),
                c(&[-1, -2, 3]),
                c(&[1, -2, 5]),
                c(&[-1, 2, 5]),
                c(&[3, 4]),
                c(&[3, 5]),
                c(&[-4, 5]),
            ],
        )
    }

    #[test]
    fn construction_is_order_insensitive() {
        let a = Formula::new(3, [c(&[1, 2]), c(&[3]), c(&[1, 2])]);
        let b = Formula::new(3, [c(&[3]), c(&[1, 2])]);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn restriction_by_1011_leaves_x5() {
        let restricted =
            example_closed_formula().restrict(&PartialAssignment::from_prefix_str("1011").unwrap());
        assert_eq!(restricted, Formula::new(5, [c(&[5])]));
    }

    #[test]
    fn restriction_by_0100_keeps_the_empty_clause() {
        let restricted =
            example_closed_formula().restrict(&PartialAssignment::from_prefix_str("0100").unwrap());
        assert_eq!(restricted, Formula::new(5, [c(&[5]), Clause::empty()]));
        assert!(restricted.contains_empty());
    }

    #[test]
    fn restriction_by_nothing_is_identity() {
        let f = example_closed_formula();
        assert_eq!(f.restrict(&PartialAssignment::new()), f);
    }

    #[test]
    fn evaluation() {
        let f = example_closed_formula();
        assert!(f.evaluate(&"10111".parse().unwrap()));
        assert!(!f.evaluate(&"00000".parse().unwrap()));
        let with_empty = Formula::new(2, [Clause::empty()]);
        for bits in 0..4 {
            assert!(!with_empty.evaluate(&TotalAssignment::new(2, bits)));
        }
    }

    #[test]
    fn empty_formula_has_every_model() {
        let models = Formula::new(2, [])
            .enumerate_models(DEFAULT_ENUMERATION_CAP)
            .unwrap();
        let shown: Vec<String> = models.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["00", "01", "10", "11"]);
    }

    #[test]
    fn enumeration_respects_the_cap() {
        let f = Formula::new(25, []);
        assert_eq!(
            f.enumerate_models(DEFAULT_ENUMERATION_CAP),
            Err(Error::CapExceeded { n: 25, cap: 24 })
        );
    }

    #[test]
    fn packed_evaluation_matches_clause_evaluation() {
        let f = example_closed_formula();
        let packed = PackedFormula::new(&f);
        for bits in 0..32 {
            assert_eq!(
                packed.eval(bits),
                f.evaluate(&TotalAssignment::new(5, bits))
            );
        }
    }

    #[test]
    fn dimacs_export() {
        let f = Formula::new(3, [c(&[1, -3]), Clause::empty(), c(&[2])]);
        assert_eq!(f.to_dimacs(), "p cnf 3 3\n0\n2 0\n1 -3 0\n");
    }

    #[test]
    fn dimacs_round_trip() {
        let f = example_closed_formula();
        assert_eq!(Formula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn dimacs_errors_carry_line_numbers() {
        let err = Formula::parse_dimacs("p cnf 2 1\n1 3 0\n").unwrap_err();
        assert_eq!(err.line(), Some(2));
        let err = Formula::parse_dimacs("c hi\n1 0\n").unwrap_err();
        assert_eq!(err.line(), Some(2));
        let err = Formula::parse_dimacs("p cnf 2 2\n1 0\n").unwrap_err();
        assert_eq!(err.line(), Some(1));
        assert!(Formula::parse_dimacs("p cnf 2 1\n1 -1 0\n").is_err());
        assert!(Formula::parse_dimacs("p cnf 2 1\n1 2\n").is_err());
    }

    #[test]
    fn dimacs_accepts_comments_and_split_clauses() {
        let f = Formula::parse_dimacs("c x\np cnf 3 2\n1\n2 0 -3 0\n").unwrap();
        assert_eq!(f, Formula::new(3, [c(&[1, 2]), c(&[-3])]));
        assert!(f.contains(&c(&[-3])));
        assert!(!f.contains(&Clause::new([VarIndex::new(3).positive()]).unwrap()));
    }
}
