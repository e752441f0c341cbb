use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommitId(pub u32);

/// Ideal commitment: values are fixed at commit time and readable only
/// through [`CommitmentOracle::open`].
#[derive(Debug)]
pub struct CommitmentOracle<V> {
    ledger: Vec<V>,
    opened: BTreeSet<CommitId>,
}

impl<V: Clone> Default for CommitmentOracle<V> {
    fn default() -> Self {
        CommitmentOracle {
            ledger: Vec::new(),
            opened: BTreeSet::new(),
        }
    }
}

impl<V: Clone> CommitmentOracle<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn commit(&mut self, value: V) -> CommitId {
        self.ledger.push(value);
        CommitId(self.ledger.len() as u32 - 1)
    }

    pub fn commit_all(&mut self, values: impl IntoIterator<Item = V>) -> Vec<CommitId> {
        values.into_iter().map(|v| self.commit(v)).collect()
    }

    /// Reveals a committed value to the verifier.
    pub fn open(&mut self, id: CommitId) -> Result<V> {
        let v = self
            .ledger
            .get(id.0 as usize)
            .cloned()
            .ok_or_else(|| Error::ProtocolViolation(format!("no commitment with id {}", id.0)))?;
        self.opened.insert(id);
        Ok(v)
    }

    pub fn is_opened(&self, id: CommitId) -> bool {
        self.opened.contains(&id)
    }

    pub fn opened(&self) -> impl Iterator<Item = CommitId> + '_ {
        self.opened.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.ledger.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ledger.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reveal_returns_committed_value() {
        let mut o = CommitmentOracle::new();
        let ids = o.commit_all([true, false, true]);
        assert!(!o.is_opened(ids[1]));
        assert!(!o.open(ids[1]).unwrap());
        assert!(o.open(ids[2]).unwrap());
        assert!(o.is_opened(ids[1]) && !o.is_opened(ids[0]));
        assert_eq!(o.opened().collect::<Vec<_>>(), vec![ids[1], ids[2]]);
    }

    #[test]
    fn missing_id_is_protocol_violation() {
        let mut o: CommitmentOracle<bool> = CommitmentOracle::new();
        assert!(matches!(o.open(CommitId(4)), Err(Error::ProtocolViolation(_))));
    }
}
