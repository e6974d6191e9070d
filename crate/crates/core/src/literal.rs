use std::fmt;

use serde::{Deserialize, Serialize};

/// A 1-based propositional variable index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarIndex(u32);

impl VarIndex {
    /// # Panics
    ///
    /// Panics if `index` is zero.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        VarIndex(index)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, false)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, true)
    }
}

impl fmt::Display for VarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal packed as `var << 1 | negated`.
///
/// The derived ordering is therefore by variable first, with the positive
/// literal before the negative one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    pub fn new(var: VarIndex, negated: bool) -> Self {
        Literal(var.0 << 1 | negated as u32)
    }

    /// Builds a literal from a signed DIMACS integer.
    ///
    /// # Panics
    ///
    /// Panics on zero.
    pub fn from_dimacs(value: i64) -> Self {
        assert!(value != 0, "0 is the DIMACS clause terminator");
        let var = u32::try_from(value.unsigned_abs()).expect("variable index fits in u32");
        Literal::new(VarIndex::new(var), value < 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0);
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> VarIndex {
        VarIndex(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn complement(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    /// The value this literal takes when its variable is set to `value`.
    pub fn eval(self, value: bool) -> bool {
        value != self.is_negated()
    }

    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "-{}", self.var())
        } else {
            write!(f, "{}", self.var())
        }
    }
}
