//! Coalitions and coalition structures.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// One-based agent identifier.
pub type AgentId = usize;

/// A nonempty set of agents, stored sorted and without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coalition(Vec<AgentId>);

impl Coalition {
    pub fn new(mut members: Vec<AgentId>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidStructure("empty coalition".into()));
        }
        if members[0] == 0 {
            return Err(Error::InvalidStructure("agent ids start at 1".into()));
        }
        Ok(Self(members))
    }

    pub fn members(&self) -> &[AgentId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.0.binary_search(&agent).is_ok()
    }

    pub fn min(&self) -> AgentId {
        self.0[0]
    }

    pub fn max(&self) -> AgentId {
        *self.0.last().unwrap()
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.0.iter().all(|&j| other.contains(j))
    }

    pub fn intersects(&self, other: &Coalition) -> bool {
        let (mut i, mut k) = (0, 0);
        while i < self.0.len() && k < other.0.len() {
            match self.0[i].cmp(&other.0[k]) {
                Ordering::Less => i += 1,
                Ordering::Greater => k += 1,
                Ordering::Equal => return true,
            }
        }
        false
    }

    /// Size first, then lexicographic on the sorted member list.
    pub fn canonical_cmp(&self, other: &Coalition) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// A set of coalitions over agents `1..=n`. Insertion order is kept so that
/// coalition indices in instance files stay meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalitionStructure {
    n_agents: usize,
    coalitions: Vec<Coalition>,
}

impl CoalitionStructure {
    /// Validates ranges and drops repeated coalitions, keeping the first.
    pub fn new(n_agents: usize, coalitions: Vec<Coalition>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(coalitions.len());
        for c in coalitions {
            if c.max() > n_agents {
                return Err(Error::InvalidStructure(format!(
                    "coalition {c} mentions agent {} but there are only {n_agents} agents",
                    c.max()
                )));
            }
            if seen.insert(c.clone()) {
                kept.push(c);
            }
        }
        Ok(Self { n_agents, coalitions: kept })
    }

    pub fn from_lists(n_agents: usize, lists: &[Vec<AgentId>]) -> Result<Self> {
        let coalitions = lists.iter().map(|l| Coalition::new(l.clone())).collect::<Result<Vec<_>>>()?;
        Self::new(n_agents, coalitions)
    }

    pub fn empty(n_agents: usize) -> Self {
        Self { n_agents, coalitions: Vec::new() }
    }

    /// The Nash structure: every agent alone.
    pub fn singletons(n_agents: usize) -> Self {
        let coalitions = (1..=n_agents).map(|j| Coalition(vec![j])).collect();
        Self { n_agents, coalitions }
    }

    /// Every nonempty subset of agents, in canonical order.
    pub fn all_nonempty(n_agents: usize) -> Self {
        assert!(n_agents < 32, "power set of {n_agents} agents is too large");
        let mut coalitions: Vec<Coalition> = (1u32..(1u32 << n_agents))
            .map(|mask| Coalition((0..n_agents).filter(|&j| mask >> j & 1 == 1).map(|j| j + 1).collect()))
            .collect();
        coalitions.sort_by(Coalition::canonical_cmp);
        Self { n_agents, coalitions }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    pub fn contains(&self, c: &Coalition) -> bool {
        self.coalitions.contains(c)
    }

    /// Adds coalitions not already present, appending at the end.
    pub fn with_added(&self, extra: impl IntoIterator<Item = Coalition>) -> Result<Self> {
        let mut all = self.coalitions.clone();
        all.extend(extra);
        Self::new(self.n_agents, all)
    }

    /// Union with the Nash structure.
    pub fn with_singletons(&self) -> Self {
        let extra = (1..=self.n_agents).map(|j| Coalition(vec![j]));
        self.with_added(extra).expect("singletons are in range")
    }

    /// Coalitions sorted by size, then lexicographically.
    pub fn canonical_order(&self) -> Vec<&Coalition> {
        let mut out: Vec<&Coalition> = self.coalitions.iter().collect();
        out.sort_by(|a, b| a.canonical_cmp(b));
        out
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, c) in self.coalitions.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coalitions_normalize_and_compare() {
        let c = Coalition::new(vec![3, 1, 3]).unwrap();
        assert_eq!(c.members(), &[1, 3]);
        assert_eq!(c.to_string(), "{1,3}");
        assert!(Coalition::new(vec![]).is_err());
        assert!(Coalition::new(vec![0, 1]).is_err());
        let d = Coalition::new(vec![2, 3]).unwrap();
        assert!(c.intersects(&d));
        assert!(!c.is_subset(&d));
        assert_eq!(c.canonical_cmp(&d), Ordering::Less);
    }

    #[test]
    fn structures_dedup_and_validate() {
        let s = CoalitionStructure::from_lists(3, &[vec![1, 2], vec![2, 1], vec![3]]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(CoalitionStructure::from_lists(2, &[vec![1, 3]]).is_err());
        assert_eq!(CoalitionStructure::all_nonempty(3).len(), 7);
        assert_eq!(s.with_singletons().len(), 4);
        let order: Vec<String> = s.with_singletons().canonical_order().iter().map(|c| c.to_string()).collect();
        assert_eq!(order, vec!["{1}", "{2}", "{3}", "{1,2}"]);
    }
}
