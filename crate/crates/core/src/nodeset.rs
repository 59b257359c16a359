use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sorted set of distinct node ids (0-based internally).
///
/// Display and serde use 1-based ids, matching every human-facing interface.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }

    pub fn empty() -> Self {
        NodeSet(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        NodeSet((0..n).collect())
    }

    /// Parses 1-based ids; zero is rejected.
    pub fn from_one_based(ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut out = Vec::new();
        for id in ids {
            if id == 0 {
                return Err(Error::InvalidParameter("node ids are 1-based; got 0".into()));
            }
            out.push(id - 1);
        }
        Ok(NodeSet::new(out))
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
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

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn intersects(&self, other: &NodeSet) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            match self.0[a].cmp(&other.0[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    /// Errors if any id is `>= n`.
    pub fn check(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&id) if id >= n => Err(Error::NodeOutOfRange { id, n, line: None }),
            _ => Ok(()),
        }
    }

    pub fn membership(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.0 {
            m[i] = true;
        }
        m
    }

    pub(crate) fn from_mask(mask: u64) -> Self {
        NodeSet((0..64).filter(|b| mask >> b & 1 == 1).collect())
    }

    #[cfg(test)]
    pub(crate) fn to_mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | 1 << i)
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        NodeSet::new(iter)
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, id) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", id + 1)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for NodeSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        NodeSet::from_one_based(ids).map_err(serde::de::Error::custom)
    }
}
