use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing iterate indices at which series are sampled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Checkpoints(Vec<usize>);

impl Checkpoints {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("at least one checkpoint is needed"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("checkpoints must be strictly increasing"));
        }
        Ok(Self(indices))
    }

    /// `round(10^(k/4))` for `k = 0, 1, ...` below `n`, followed by `n`.
    pub fn geometric(n: usize) -> Self {
        let mut v: Vec<usize> = Vec::new();
        for k in 0.. {
            let c = 10f64.powf(k as f64 / 4.0).round() as usize;
            if c >= n {
                break;
            }
            if v.last() != Some(&c) {
                v.push(c);
            }
        }
        v.push(n);
        Self(v)
    }

    /// The entries of [`Checkpoints::geometric`] that are at least `from`.
    pub fn geometric_from(from: usize, n: usize) -> Self {
        let mut v = Self::geometric(n).0;
        v.retain(|&c| c >= from.min(n));
        Self(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("checkpoints are nonempty")
    }

    /// Position of the first checkpoint of the tail half.
    pub fn tail_start(&self) -> usize {
        self.0.len() / 2
    }

    pub fn tail_half(&self) -> &[usize] {
        &self.0[self.tail_start()..]
    }

    /// Errors if a checkpoint lies past `last_index`.
    pub fn check_within(&self, last_index: usize) -> Result<()> {
        if self.last() > last_index {
            return Err(Error::invalid(format!(
                "checkpoint {} is past the last iterate {last_index}",
                self.last()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Checkpoints {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Checkpoints> for Vec<usize> {
    fn from(c: Checkpoints) -> Self {
        c.0
    }
}
