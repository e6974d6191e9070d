use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assignment::{TotalAssignment, MAX_VARS};
use crate::error::{Error, ParseError, Result};
use crate::literal::VarIndex;

/// A nonempty set of distinct total assignments over `n` variables.
///
/// The models keep the order they were given in; prefix covers are
/// generated by walking models in that order.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModelSetRepr", into = "ModelSetRepr")]
pub struct ModelSet {
    n: usize,
    models: Vec<TotalAssignment>,
    sorted: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ModelSetRepr {
    n: usize,
    models: Vec<TotalAssignment>,
}

impl TryFrom<ModelSetRepr> for ModelSet {
    type Error = Error;

    fn try_from(repr: ModelSetRepr) -> Result<Self> {
        ModelSet::new(repr.n, repr.models)
    }
}

impl From<ModelSet> for ModelSetRepr {
    fn from(set: ModelSet) -> Self {
        ModelSetRepr {
            n: set.n,
            models: set.models,
        }
    }
}

impl ModelSet {
    pub fn new<I: IntoIterator<Item = TotalAssignment>>(n: usize, models: I) -> Result<ModelSet> {
        if n > MAX_VARS {
            return Err(Error::TooManyVariables { n, max: MAX_VARS });
        }
        let models: Vec<TotalAssignment> = models.into_iter().collect();
        if models.is_empty() {
            return Err(Error::EmptyModelSet);
        }
        if let Some(bad) = models.iter().find(|m| m.len() != n) {
            return Err(Error::ModelLength {
                expected: n,
                found: bad.len(),
            });
        }
        let mut sorted: Vec<u64> = models.iter().map(|m| m.bits()).collect();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateModel {
                model: TotalAssignment::new(n, w[0]).to_string(),
            });
        }
        Ok(ModelSet { n, models, sorted })
    }

    /// Convenience constructor from bit strings.
    ///
    /// # Panics
    ///
    /// Panics on malformed strings; use [`ModelSet::parse`] for input files.
    pub fn from_strs(models: &[&str]) -> Result<ModelSet> {
        let parsed: Vec<TotalAssignment> = models
            .iter()
            .map(|s| s.parse().expect("model bit string"))
            .collect();
        let n = parsed.first().map_or(0, TotalAssignment::len);
        ModelSet::new(n, parsed)
    }

    /// Every assignment over `n` variables, in lexicographic order.
    pub fn full(n: usize) -> Result<ModelSet> {
        if n >= MAX_VARS {
            return Err(Error::TooManyVariables {
                n,
                max: MAX_VARS - 1,
            });
        }
        ModelSet::new(n, (0..1u64 << n).map(|b| TotalAssignment::new(n, b)))
    }

    /// Parses the model-set text format: one bit string per line, all of the
    /// same length; lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> std::result::Result<ModelSet, ParseError> {
        let mut n: Option<(usize, usize)> = None;
        let mut seen: HashMap<u64, usize> = HashMap::new();
        let mut models = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let len = line.chars().count();
            if let Some((column, found)) = line
                .chars()
                .enumerate()
                .find(|(_, ch)| *ch != '0' && *ch != '1')
            {
                return Err(ParseError::BadCharacter {
                    line: line_no,
                    column: column + 1 + raw.find(line).unwrap_or(0),
                    found,
                });
            }
            match n {
                None => {
                    if len > MAX_VARS {
                        return Err(ParseError::VariableCount {
                            line: line_no,
                            n: len,
                            max: MAX_VARS,
                        });
                    }
                    n = Some((len, line_no));
                }
                Some((expected, first_line)) if expected != len => {
                    return Err(ParseError::RaggedLength {
                        line: line_no,
                        expected,
                        found: len,
                        first_line,
                    })
                }
                Some(_) => {}
            }
            let model: TotalAssignment = line.parse().map_err(|_| ParseError::VariableCount {
                line: line_no,
                n: len,
                max: MAX_VARS,
            })?;
            if let Some(&first_line) = seen.get(&model.bits()) {
                return Err(ParseError::DuplicateModel {
                    line: line_no,
                    first_line,
                });
            }
            seen.insert(model.bits(), line_no);
            models.push(model);
        }
        let Some((n, _)) = n else {
            return Err(ParseError::Empty);
        };
        Ok(ModelSet::new(n, models).expect("validated above"))
    }

    /// One model per line, in stored order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.models {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[TotalAssignment] {
        &self.models
    }

    pub fn iter(&self) -> impl Iterator<Item = &TotalAssignment> {
        self.models.iter()
    }

    pub fn contains(&self, assignment: &TotalAssignment) -> bool {
        assignment.len() == self.n && self.sorted.binary_search(&assignment.bits()).is_ok()
    }

    /// The models sorted lexicographically.
    pub fn sorted(&self) -> Vec<TotalAssignment> {
        self.sorted
            .iter()
            .map(|&b| TotalAssignment::new(self.n, b))
            .collect()
    }

    /// Removes the model at `index`, or `None` if that would empty the set.
    pub fn without_model(&self, index: usize) -> Option<ModelSet> {
        if self.models.len() <= 1 {
            return None;
        }
        let models = self
            .models
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, m)| *m);
        Some(ModelSet::new(self.n, models).expect("subset of a valid set"))
    }

    /// Deletes variable `var` from every model, merging models that become
    /// equal (first occurrence wins).
    pub fn project_out(&self, var: VarIndex) -> ModelSet {
        let mut seen = std::collections::HashSet::new();
        let models: Vec<TotalAssignment> = self
            .models
            .iter()
            .map(|m| m.project_out(var))
            .filter(|m| seen.insert(m.bits()))
            .collect();
        ModelSet::new(self.n - 1, models).expect("projection of a valid set")
    }
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.models.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
