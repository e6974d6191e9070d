//! Total, partial and prefix assignments.
//!
//! Total and prefix assignments pack their values into a `u64` with `x1` in
//! the most significant used bit, so numeric order on equal-length values is
//! the lexicographic order of their bit strings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError};
use crate::literal::VarIndex;

/// Largest variable count representable by the packed assignments.
pub const MAX_VARS: usize = 64;

fn mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn parse_bits(s: &str) -> Result<(usize, u64), ParseError> {
    let mut bits = 0u64;
    let mut len = 0usize;
    for (i, ch) in s.chars().enumerate() {
        let bit = match ch {
            '0' => 0,
            '1' => 1,
            other => {
                return Err(ParseError::BadCharacter {
                    line: 1,
                    column: i + 1,
                    found: other,
                })
            }
        };
        len += 1;
        if len > MAX_VARS {
            return Err(ParseError::VariableCount {
                line: 1,
                n: s.chars().count(),
                max: MAX_VARS,
            });
        }
        bits = bits << 1 | bit;
    }
    Ok((len, bits))
}

fn write_bits(f: &mut fmt::Formatter<'_>, len: usize, bits: u64) -> fmt::Result {
    for i in (0..len).rev() {
        f.write_str(if bits >> i & 1 == 1 { "1" } else { "0" })?;
    }
    Ok(())
}

/// A value for every variable `x1..=xn`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct TotalAssignment {
    n: u8,
    bits: u64,
}

impl TotalAssignment {
    /// `bits` holds `x1` at bit `n - 1` and `xn` at bit 0.
    ///
    /// # Panics
    ///
    /// Panics if `n > MAX_VARS` or `bits` has set bits above position `n`.
    pub fn new(n: usize, bits: u64) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} variables");
        assert!(bits & !mask(n) == 0, "bits beyond the assignment length");
        TotalAssignment { n: n as u8, bits }
    }

    pub fn from_values(values: &[bool]) -> Self {
        let bits = values.iter().fold(0u64, |acc, &v| acc << 1 | v as u64);
        TotalAssignment::new(values.len(), bits)
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// # Panics
    ///
    /// Panics if `var` is beyond `n`.
    pub fn value(&self, var: VarIndex) -> bool {
        let i = var.get() as usize;
        assert!(i <= self.len(), "{var} beyond n={}", self.n);
        self.bits >> (self.len() - i) & 1 == 1
    }

    pub fn values(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len()).map(|i| self.bits >> (self.len() - i) & 1 == 1)
    }

    pub fn prefix(&self, k: usize) -> PrefixAssignment {
        assert!(k <= self.len());
        PrefixAssignment::new(k, self.bits >> (self.len() - k))
    }

    pub fn to_partial(&self) -> PartialAssignment {
        self.prefix(self.len()).to_partial()
    }

    /// Removes variable `var` and renumbers the ones after it.
    pub fn project_out(&self, var: VarIndex) -> TotalAssignment {
        let i = var.get() as usize;
        assert!(i >= 1 && i <= self.len());
        let low_len = self.len() - i;
        let high = self.bits >> (low_len + 1);
        let low = self.bits & mask(low_len);
        TotalAssignment::new(self.len() - 1, high << low_len | low)
    }
}

impl fmt::Display for TotalAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_bits(f, self.len(), self.bits)
    }
}

impl fmt::Debug for TotalAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TotalAssignment {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (len, bits) = parse_bits(s)?;
        Ok(TotalAssignment::new(len, bits))
    }
}

impl From<TotalAssignment> for String {
    fn from(value: TotalAssignment) -> Self {
        value.to_string()
    }
}

impl TryFrom<String> for TotalAssignment {
    type Error = ParseError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

/// Values for `x1..=xk` under the fixed variable order.
///
/// Ordered by length first, then lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PrefixAssignment {
    len: u8,
    bits: u64,
}

impl PrefixAssignment {
    pub fn new(len: usize, bits: u64) -> Self {
        assert!(len <= MAX_VARS, "at most {MAX_VARS} variables");
        assert!(bits & !mask(len) == 0, "bits beyond the prefix length");
        PrefixAssignment {
            len: len as u8,
            bits,
        }
    }

    pub fn empty() -> Self {
        PrefixAssignment::new(0, 0)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// The prefix with its last value complemented.
    ///
    /// # Panics
    ///
    /// Panics on the empty prefix.
    pub fn flip_last(&self) -> Self {
        assert!(self.len > 0, "the empty prefix has no last value");
        PrefixAssignment::new(self.len(), self.bits ^ 1)
    }

    /// Drops the last value.
    pub fn parent(&self) -> Option<Self> {
        (self.len > 0).then(|| PrefixAssignment::new(self.len() - 1, self.bits >> 1))
    }

    pub fn is_prefix_of(&self, total: &TotalAssignment) -> bool {
        self.len() <= total.len() && total.bits() >> (total.len() - self.len()) == self.bits
    }

    pub fn value(&self, var: VarIndex) -> Option<bool> {
        let i = var.get() as usize;
        (i <= self.len()).then(|| self.bits >> (self.len() - i) & 1 == 1)
    }

    /// Concatenates `suffix` values after this prefix.
    pub fn extend(&self, suffix: &[bool]) -> TotalAssignment {
        let bits = suffix.iter().fold(self.bits, |acc, &v| acc << 1 | v as u64);
        TotalAssignment::new(self.len() + suffix.len(), bits)
    }

    pub fn to_partial(&self) -> PartialAssignment {
        (1..=self.len())
            .map(|i| {
                (
                    VarIndex::new(i as u32),
                    self.bits >> (self.len() - i) & 1 == 1,
                )
            })
            .collect()
    }
}

impl fmt::Display for PrefixAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        write_bits(f, self.len(), self.bits)
    }
}

impl fmt::Debug for PrefixAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PrefixAssignment {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "ε" {
            return Ok(PrefixAssignment::empty());
        }
        let (len, bits) = parse_bits(s)?;
        Ok(PrefixAssignment::new(len, bits))
    }
}

impl From<PrefixAssignment> for String {
    fn from(value: PrefixAssignment) -> Self {
        value.to_string()
    }
}

impl TryFrom<String> for PrefixAssignment {
    type Error = ParseError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

/// Values for an arbitrary subset of the variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    bindings: BTreeMap<VarIndex, bool>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_prefix_str(s: &str) -> Result<Self, ParseError> {
        Ok(s.parse::<PrefixAssignment>()?.to_partial())
    }

    /// Binds `var`; returns `Err` if it is already bound, leaving the
    /// existing binding in place.
    pub fn bind(&mut self, var: VarIndex, value: bool) -> Result<(), Error> {
        match self.bindings.entry(var) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(value);
                Ok(())
            }
            std::collections::btree_map::Entry::Occupied(_) => {
                Err(Error::AlreadyBound { var: var.get() })
            }
        }
    }

    pub fn get(&self, var: VarIndex) -> Option<bool> {
        self.bindings.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarIndex, bool)> + '_ {
        self.bindings.iter().map(|(&v, &b)| (v, b))
    }

    /// True when every binding of `self` also appears in `other`.
    pub fn subsumes(&self, other: &PartialAssignment) -> bool {
        self.iter().all(|(v, b)| other.get(v) == Some(b))
    }
}

impl FromIterator<(VarIndex, bool)> for PartialAssignment {
    /// Later bindings of the same variable are ignored.
    fn from_iter<T: IntoIterator<Item = (VarIndex, bool)>>(iter: T) -> Self {
        let mut partial = PartialAssignment::new();
        for (var, value) in iter {
            let _ = partial.bind(var, value);
        }
        partial
    }
}
