use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};

/// Sorted, duplicate-free subset of `{0, .., universe-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPositionSet", into = "RawPositionSet")]
pub struct PositionSet {
    universe: usize,
    members: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawPositionSet {
    universe: usize,
    members: Vec<usize>,
}

impl TryFrom<RawPositionSet> for PositionSet {
    type Error = Error;
    fn try_from(raw: RawPositionSet) -> Result<Self> {
        PositionSet::new(raw.universe, raw.members)
    }
}

impl From<PositionSet> for RawPositionSet {
    fn from(p: PositionSet) -> Self {
        RawPositionSet {
            universe: p.universe,
            members: p.members,
        }
    }
}

impl PositionSet {
    /// Builds a set from arbitrary indices; sorts them and rejects
    /// duplicates or out-of-range members.
    pub fn new(universe: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("duplicate position {}", w[0])));
        }
        if let Some(&last) = members.last() {
            if last >= universe {
                return Err(Error::domain(format!(
                    "position {last} outside universe of size {universe}"
                )));
            }
        }
        Ok(PositionSet { universe, members })
    }

    pub fn empty(universe: usize) -> Self {
        PositionSet {
            universe,
            members: Vec::new(),
        }
    }

    pub fn full(universe: usize) -> Self {
        PositionSet {
            universe,
            members: (0..universe).collect(),
        }
    }

    pub fn from_predicate(universe: usize, pred: impl Fn(usize) -> bool) -> Self {
        PositionSet {
            universe,
            members: (0..universe).filter(|&i| pred(i)).collect(),
        }
    }

    /// Uniformly random subset of `pool` with exactly `size` members.
    pub fn random_subset<R: Rng + ?Sized>(pool: &PositionSet, size: usize, rng: &mut R) -> Result<Self> {
        if size > pool.len() {
            return Err(Error::domain(format!(
                "cannot draw {size} positions from a pool of {}",
                pool.len()
            )));
        }
        let picked = index::sample(rng, pool.len(), size)
            .into_iter()
            .map(|k| pool.members[k])
            .collect();
        PositionSet::new(pool.universe, picked)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> PositionSet {
        PositionSet::from_predicate(self.universe, |i| !self.contains(i))
    }

    pub fn difference(&self, other: &PositionSet) -> Result<PositionSet> {
        ensure_len("position set difference", self.universe, other.universe)?;
        Ok(PositionSet::from_predicate(self.universe, |i| {
            self.contains(i) && !other.contains(i)
        }))
    }

    pub fn intersection(&self, other: &PositionSet) -> Result<PositionSet> {
        ensure_len("position set intersection", self.universe, other.universe)?;
        Ok(PositionSet::from_predicate(self.universe, |i| {
            self.contains(i) && other.contains(i)
        }))
    }

    pub fn is_disjoint(&self, other: &PositionSet) -> bool {
        self.members.iter().all(|&i| !other.contains(i))
    }

    /// Bitmask form (bit `universe-1-i` set for member `i`), matching the
    /// big-endian index convention of [`crate::gf2::BitVec::to_index`].
    pub fn to_mask(&self) -> usize {
        assert!(self.universe <= usize::BITS as usize);
        self.members
            .iter()
            .fold(0usize, |acc, &i| acc | 1 << (self.universe - 1 - i))
    }

    pub fn from_mask(universe: usize, mask: usize) -> Self {
        PositionSet::from_predicate(universe, |i| (mask >> (universe - 1 - i)) & 1 == 1)
    }
}
