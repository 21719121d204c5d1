use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::SubdiffDescription;
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionKind {
    /// First vertex of the description (lowest active piece index).
    FirstActive,
    MinNorm,
    RandomVertex,
    /// Dirichlet(1, ..., 1) combination of the vertices.
    RandomHull,
}

impl SelectionKind {
    pub const ALL: [SelectionKind; 4] = [
        SelectionKind::FirstActive,
        SelectionKind::MinNorm,
        SelectionKind::RandomVertex,
        SelectionKind::RandomHull,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SelectionKind::FirstActive => "first-active",
            SelectionKind::MinNorm => "min-norm",
            SelectionKind::RandomVertex => "random-vertex",
            SelectionKind::RandomHull => "random-hull",
        }
    }
}

impl fmt::Display for SelectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SelectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown selection policy `{s}`")))
    }
}

/// How a subgradient is picked from the Clarke subdifferential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    pub kind: SelectionKind,
    pub seed: u64,
}

impl SelectionPolicy {
    pub fn new(kind: SelectionKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    /// Fresh stateful selector. Random kinds own their generator, so one
    /// selector must not be shared between concurrent runs.
    pub fn selector(&self) -> Selector {
        Selector { kind: self.kind, rng: ChaCha8Rng::seed_from_u64(self.seed) }
    }
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self::new(SelectionKind::FirstActive, 0)
    }
}

#[derive(Debug, Clone)]
pub struct Selector {
    kind: SelectionKind,
    rng: ChaCha8Rng,
}

impl Selector {
    pub fn kind(&self) -> SelectionKind {
        self.kind
    }

    pub fn select(&mut self, sd: &SubdiffDescription) -> Vec<f64> {
        let k = sd.len();
        if k == 1 {
            return sd.vertex(0).to_vec();
        }
        match self.kind {
            SelectionKind::FirstActive => sd.vertex(0).to_vec(),
            SelectionKind::MinNorm => sd.min_norm_element(),
            SelectionKind::RandomVertex => sd.vertex(self.rng.random_range(0..k)).to_vec(),
            SelectionKind::RandomHull => {
                let mut w: Vec<f64> = (0..k).map(|_| self.rng.sample::<f64, _>(Exp1)).collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                sd.combine(&w)
            }
        }
    }
}

/// One-shot selection with a fresh selector for `policy`.
pub fn select(policy: &SelectionPolicy, sd: &SubdiffDescription) -> Vec<f64> {
    policy.selector().select(sd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm;

    fn tripod_hull() -> SubdiffDescription {
        SubdiffDescription::hull(&[[-2.0, 0.0], [1.0, 1.0], [1.0, -1.0]]).unwrap()
    }

    #[test]
    fn singleton_is_returned_by_every_policy() {
        let sd = SubdiffDescription::singleton(vec![2.0, 0.0]);
        for kind in SelectionKind::ALL {
            assert_eq!(select(&SelectionPolicy::new(kind, 3), &sd), vec![2.0, 0.0]);
        }
    }

    #[test]
    fn min_norm_selection() {
        let seg = SubdiffDescription::hull(&[[1.0, 1.0], [1.0, -1.0]]).unwrap();
        let policy = SelectionPolicy::new(SelectionKind::MinNorm, 0);
        assert_eq!(select(&policy, &seg), vec![1.0, 0.0]);
        assert!(norm(&select(&policy, &tripod_hull())) < 1e-15);
    }

    #[test]
    fn random_policies_are_reproducible_and_in_hull() {
        let sd = tripod_hull();
        for kind in [SelectionKind::RandomVertex, SelectionKind::RandomHull] {
            let mut a = SelectionPolicy::new(kind, 42).selector();
            let mut b = SelectionPolicy::new(kind, 42).selector();
            for _ in 0..100 {
                let va = a.select(&sd);
                assert_eq!(va, b.select(&sd));
                assert!(sd.distance_to(&va) <= 1e-12 * (1.0 + norm(&va)));
            }
        }
    }

    #[test]
    fn random_vertex_hits_every_vertex() {
        let sd = tripod_hull();
        let mut s = SelectionPolicy::new(SelectionKind::RandomVertex, 1).selector();
        let mut seen = [false; 3];
        for _ in 0..200 {
            let v = s.select(&sd);
            let k = (0..3).find(|&k| sd.vertex(k) == v.as_slice()).unwrap();
            seen[k] = true;
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SelectionKind::ALL {
            assert_eq!(kind.as_str().parse::<SelectionKind>().unwrap(), kind);
        }
        assert!("steepest".parse::<SelectionKind>().is_err());
    }
}
