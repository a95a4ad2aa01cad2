//! Complete mode orderings and the follow-set relation between them.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

/// A permutation of the modes `0..r`, listed from highest to lowest
/// lexicographic priority.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    /// Builds an ordering, rejecting anything that is not a permutation of `0..len`.
    pub fn new(modes: Vec<usize>) -> Result<Self> {
        let r = modes.len();
        let mut seen = vec![false; r];
        for &m in &modes {
            if m >= r {
                return Err(Error::invalid(format!("mode {m} out of range for rank {r}")));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::invalid(format!("mode {m} repeated in ordering")));
            }
        }
        Ok(Ordering(modes))
    }

    /// The identity ordering `(0, 1, ..., r-1)`.
    pub fn simple(rank: usize) -> Self {
        Ordering((0..rank).collect())
    }

    /// Every ordering of rank `r`, in lexicographic order.
    pub fn all(rank: usize) -> impl Iterator<Item = Ordering> {
        (0..rank).permutations(rank).map(Ordering)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn modes(&self) -> &[usize] {
        &self.0
    }

    pub fn is_simple(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &m)| i == m)
    }

    /// Index of `mode` within the ordering.
    pub fn position(&self, mode: usize) -> Option<usize> {
        self.0.iter().position(|&m| m == mode)
    }

    /// The set of modes that come after `mode` in this ordering.
    pub fn follow_set(&self, mode: usize) -> Result<BTreeSet<usize>> {
        let at = self
            .position(mode)
            .ok_or_else(|| Error::invalid(format!("mode {mode} not in ordering {self}")))?;
        Ok(self.0[at + 1..].iter().copied().collect())
    }

    /// The ordering `inv` with `inv[self[i]] == i`.
    pub fn inverse(&self) -> Ordering {
        let mut inv = vec![0; self.rank()];
        for (i, &m) in self.0.iter().enumerate() {
            inv[m] = i;
        }
        Ordering(inv)
    }

    /// Parses the 1-based command-line notation: a digit string such as
    /// `"2134"`, or a comma-separated list such as `"2,1,3,4"` for rank > 9.
    pub fn parse_one_based(s: &str) -> Result<Self> {
        let s = s.trim();
        let raw: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::invalid(format!("bad mode {t:?} in ordering {s:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::invalid(format!("bad mode {c:?} in ordering {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        if raw.is_empty() {
            return Err(Error::invalid("empty ordering"));
        }
        let modes = raw
            .into_iter()
            .map(|m| m.checked_sub(1).ok_or_else(|| Error::invalid("modes are 1-based")))
            .collect::<Result<Vec<_>>>()?;
        Ordering::new(modes)
    }

    /// Inverse of [`Ordering::parse_one_based`].
    pub fn to_one_based(&self) -> String {
        if self.rank() <= 9 {
            self.0.iter().map(|m| (m + 1).to_string()).collect()
        } else {
            self.0.iter().map(|m| (m + 1).to_string()).join(",")
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

impl AsRef<[usize]> for Ordering {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}
