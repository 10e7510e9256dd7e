//! Finite strategic-form games with exact payoffs.

use crate::error::{Error, Result};
use crate::rational::Cost;
use crate::rsg::Rsg;

/// Joint pure strategy: one strategy index per agent (agent `j` at `j - 1`).
pub type Profile = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategicGame {
    strategy_counts: Vec<usize>,
    /// `payoffs[index(profile) * n + (j - 1)]`, higher is better.
    payoffs: Vec<Cost>,
}

impl StrategicGame {
    /// `payoff(profile)` returns one value per agent and is called once for
    /// every profile.
    pub fn from_fn(strategy_counts: Vec<usize>, mut payoff: impl FnMut(&[usize]) -> Vec<Cost>) -> Result<Self> {
        if strategy_counts.is_empty() {
            return Err(Error::InvalidGame("at least one agent is required".into()));
        }
        if strategy_counts.contains(&0) {
            return Err(Error::InvalidGame("every agent needs at least one strategy".into()));
        }
        let n = strategy_counts.len();
        let total = strategy_counts
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::InvalidGame("profile space too large".into()))?;
        let mut payoffs = Vec::with_capacity(total * n);
        let mut profile = vec![0; n];
        for _ in 0..total {
            let row = payoff(&profile);
            if row.len() != n {
                return Err(Error::InvalidGame(format!("payoff row has {} entries, expected {n}", row.len())));
            }
            payoffs.extend(row);
            advance(&mut profile, &strategy_counts);
        }
        Ok(Self { strategy_counts, payoffs })
    }

    /// Strategy `i` of every agent is resource `i`; payoff is minus the cost.
    pub fn from_rsg(g: &Rsg) -> Result<Self> {
        let m = g.n_resources();
        Self::from_fn(vec![m; g.n_agents()], |profile| {
            let mut loads = vec![0; m];
            for &r in profile {
                loads[r] += 1;
            }
            profile.iter().map(|&r| -g.cost(r, loads[r])).collect()
        })
    }

    pub fn n_agents(&self) -> usize {
        self.strategy_counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.strategy_counts
    }

    fn index(&self, profile: &[usize]) -> usize {
        let mut idx = 0;
        for (j, &s) in profile.iter().enumerate().rev() {
            idx = idx * self.strategy_counts[j] + s;
        }
        idx
    }

    pub fn check_profile(&self, profile: &[usize]) -> Result<()> {
        if profile.len() != self.n_agents() {
            return Err(Error::InvalidAllocation(format!(
                "profile has {} entries, game has {} agents",
                profile.len(),
                self.n_agents()
            )));
        }
        for (j, (&s, &k)) in profile.iter().zip(&self.strategy_counts).enumerate() {
            if s >= k {
                return Err(Error::InvalidAllocation(format!("agent {} has no strategy {}", j + 1, s + 1)));
            }
        }
        Ok(())
    }

    /// Payoff of agent `agent` (1-based) at `profile`.
    pub fn payoff(&self, profile: &[usize], agent: usize) -> Cost {
        let n = self.n_agents();
        self.payoffs[self.index(profile) * n + agent - 1]
    }
}

/// Mixed-radix increment, first agent fastest. Returns `false` on wrap-around.
pub(crate) fn advance(profile: &mut [usize], radix: &[usize]) -> bool {
    for (slot, &k) in profile.iter_mut().zip(radix) {
        *slot += 1;
        if *slot < k {
            return true;
        }
        *slot = 0;
    }
    false
}
