use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Ground-truth dynamics class, encoded 0/1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    Semigroup = 0,
    Markovian = 1,
    NonMarkovian = 2,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 3] =
        [ClassLabel::Semigroup, ClassLabel::Markovian, ClassLabel::NonMarkovian];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Semigroup => "semigroup",
            ClassLabel::Markovian => "markovian",
            ClassLabel::NonMarkovian => "nonmarkovian",
        }
    }

    pub fn one_hot(self) -> [f64; 3] {
        let mut v = [0.0; 3];
        v[self.index()] = 1.0;
        v
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "0" | "semigroup" => Ok(ClassLabel::Semigroup),
            "1" | "markovian" => Ok(ClassLabel::Markovian),
            "2" | "nonmarkovian" | "non-markovian" => Ok(ClassLabel::NonMarkovian),
            other => Err(format!("unknown class label `{other}`")),
        }
    }
}
