//! Resource selection games and the quantities derived from them.

use std::fmt;
use std::sync::Arc;

use crate::coalition::AgentId;
use crate::error::{Error, Result};
use crate::rational::Cost;
use num_traits::Zero;

/// Zero-based resource index.
pub type ResourceId = usize;

/// A resource selection game: `n` agents each pick one resource, and an agent
/// on resource `i` with load `q` pays `f_i(q)`.
///
/// Cost tables hold `f_i(1), ..., f_i(n)`; `f_i(0) = 0` is implicit. Tables of
/// identical resources may share storage, which keeps instances with
/// thousands of resources cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rsg {
    n_agents: usize,
    tables: Vec<Arc<[Cost]>>,
}

impl Rsg {
    pub fn new(n_agents: usize, tables: Vec<Vec<Cost>>) -> Result<Self> {
        Self::from_shared(n_agents, tables.into_iter().map(Arc::from).collect())
    }

    pub fn from_shared(n_agents: usize, tables: Vec<Arc<[Cost]>>) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::InvalidGame("at least one agent is required".into()));
        }
        if tables.is_empty() {
            return Err(Error::InvalidGame("at least one resource is required".into()));
        }
        for (i, table) in tables.iter().enumerate() {
            if table.len() != n_agents {
                return Err(Error::InvalidGame(format!(
                    "resource {} has {} cost entries, expected {}",
                    i + 1,
                    table.len(),
                    n_agents
                )));
            }
            if let Some(q) = table.iter().position(|c| *c <= Cost::zero()) {
                return Err(Error::InvalidGame(format!(
                    "resource {}: cost at load {} is not positive",
                    i + 1,
                    q + 1
                )));
            }
            if let Some(q) = table.windows(2).position(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGame(format!(
                    "resource {}: costs are not strictly increasing at load {}",
                    i + 1,
                    q + 2
                )));
            }
        }
        Ok(Self { n_agents, tables })
    }

    /// All resources share one cost table.
    pub fn identical(n_agents: usize, n_resources: usize, table: Vec<Cost>) -> Result<Self> {
        let shared: Arc<[Cost]> = Arc::from(table);
        Self::from_shared(n_agents, vec![shared; n_resources])
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_resources(&self) -> usize {
        self.tables.len()
    }

    pub fn table(&self, resource: ResourceId) -> &[Cost] {
        &self.tables[resource]
    }

    pub fn shared_table(&self, resource: ResourceId) -> &Arc<[Cost]> {
        &self.tables[resource]
    }

    /// `f_i(load)`, with `f_i(0) = 0`.
    pub fn cost(&self, resource: ResourceId, load: usize) -> Cost {
        if load == 0 {
            Cost::zero()
        } else {
            self.tables[resource][load - 1]
        }
    }

    pub fn is_identical(&self) -> bool {
        let first = &self.tables[0];
        self.tables.iter().all(|t| Arc::ptr_eq(t, first) || t[..] == first[..])
    }

    /// Largest load `q` in `0..=n` with `f_i(q) <= bound`.
    pub fn max_load_within(&self, resource: ResourceId, bound: Cost) -> usize {
        self.tables[resource].partition_point(|c| *c <= bound)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResourceType {
    /// Cost at quota equals the minmaxcost.
    Type1,
    /// Cost at quota is below the minmaxcost.
    Type2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsgDerived {
    pub alpha: Cost,
    pub quota: Vec<usize>,
    pub kind: Vec<ResourceType>,
    /// `f_i(q_i - 1)` for Type 1 resources.
    pub beta: Vec<Option<Cost>>,
}

impl RsgDerived {
    pub fn type1(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.kind.iter().enumerate().filter(|(_, k)| **k == ResourceType::Type1).map(|(i, _)| i)
    }

    pub fn type2(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.kind.iter().enumerate().filter(|(_, k)| **k == ResourceType::Type2).map(|(i, _)| i)
    }

    pub fn quota_sum(&self) -> usize {
        self.quota.iter().sum()
    }

    /// Number of low resources at every Nash allocation.
    pub fn low_count(&self, n_agents: usize) -> usize {
        self.quota_sum() - n_agents
    }
}

/// Exact minmaxcost, choosing the method by instance size: exhaustive load
/// enumeration for two resources or at most 12 agents, bisection over table
/// entries otherwise.
pub fn minmaxcost(g: &Rsg) -> Cost {
    if g.n_resources() == 2 || g.n_agents() <= 12 {
        minmaxcost_enumerated(g)
    } else {
        minmaxcost_bisected(g)
    }
}

/// Minimum over all load vectors of the maximum incurred cost, by
/// branch-and-bound enumeration of load vectors.
pub fn minmaxcost_enumerated(g: &Rsg) -> Cost {
    fn go(g: &Rsg, resource: usize, remaining: usize, current: Option<Cost>, best: &mut Option<Cost>) {
        if let (Some(c), Some(b)) = (current, *best) {
            if c >= b {
                return;
            }
        }
        let m = g.n_resources();
        if resource + 1 == m {
            let mut worst = current;
            if remaining > 0 {
                let c = g.cost(resource, remaining);
                worst = Some(worst.map_or(c, |w| w.max(c)));
            }
            if let Some(w) = worst {
                if best.is_none_or(|b| w < b) {
                    *best = Some(w);
                }
            }
            return;
        }
        for load in 0..=remaining {
            let next = if load == 0 {
                current
            } else {
                let c = g.cost(resource, load);
                Some(current.map_or(c, |w| w.max(c)))
            };
            go(g, resource + 1, remaining - load, next, best);
        }
    }
    let mut best = None;
    go(g, 0, g.n_agents(), None, &mut best);
    best.expect("n >= 1 agents always incur some cost")
}

/// Smallest table entry `v` with `sum_i max{q : f_i(q) <= v} >= n`.
pub fn minmaxcost_bisected(g: &Rsg) -> Cost {
    let mut values: Vec<Cost> = Vec::new();
    let mut seen: Vec<&Arc<[Cost]>> = Vec::new();
    for i in 0..g.n_resources() {
        let t = g.shared_table(i);
        if seen.iter().any(|s| Arc::ptr_eq(s, t)) {
            continue;
        }
        seen.push(t);
        values.extend(t.iter().copied());
    }
    values.sort();
    values.dedup();
    let n = g.n_agents();
    let feasible = |v: Cost| {
        let mut cap = 0usize;
        for i in 0..g.n_resources() {
            cap += g.max_load_within(i, v);
            if cap >= n {
                return true;
            }
        }
        false
    };
    let idx = values.partition_point(|v| !feasible(*v));
    values[idx]
}

pub fn derive_rsg(g: &Rsg) -> RsgDerived {
    let alpha = minmaxcost(g);
    derive_with_alpha(g, alpha)
}

pub(crate) fn derive_with_alpha(g: &Rsg, alpha: Cost) -> RsgDerived {
    let m = g.n_resources();
    let mut quota = Vec::with_capacity(m);
    let mut kind = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    for i in 0..m {
        let q = g.max_load_within(i, alpha);
        quota.push(q);
        if q >= 1 && g.cost(i, q) == alpha {
            kind.push(ResourceType::Type1);
            beta.push(Some(g.cost(i, q - 1)));
        } else {
            kind.push(ResourceType::Type2);
            beta.push(None);
        }
    }
    RsgDerived { alpha, quota, kind, beta }
}

/// An assignment of every agent to exactly one resource.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    n_resources: usize,
    /// Indexed by `agent - 1`.
    assignment: Vec<ResourceId>,
}

impl Allocation {
    pub fn from_assignment(n_resources: usize, assignment: Vec<ResourceId>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidAllocation("no agents".into()));
        }
        if let Some(j) = assignment.iter().position(|&r| r >= n_resources) {
            return Err(Error::InvalidAllocation(format!(
                "agent {} assigned to resource {} but only {} resources exist",
                j + 1,
                assignment[j] + 1,
                n_resources
            )));
        }
        Ok(Self { n_resources, assignment })
    }

    /// Builds an allocation from per-resource agent lists (1-based agent ids).
    pub fn from_sets(n_agents: usize, sets: &[Vec<AgentId>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n_agents];
        for (r, set) in sets.iter().enumerate() {
            for &j in set {
                if j == 0 || j > n_agents {
                    return Err(Error::InvalidAllocation(format!("agent {j} out of range 1..={n_agents}")));
                }
                if assignment[j - 1] != usize::MAX {
                    return Err(Error::InvalidAllocation(format!("agent {j} assigned twice")));
                }
                assignment[j - 1] = r;
            }
        }
        if let Some(j) = assignment.iter().position(|&r| r == usize::MAX) {
            return Err(Error::InvalidAllocation(format!("agent {} is unassigned", j + 1)));
        }
        Self::from_assignment(sets.len(), assignment)
    }

    pub fn check_against(&self, g: &Rsg) -> Result<()> {
        if self.n_agents() != g.n_agents() || self.n_resources != g.n_resources() {
            return Err(Error::InvalidAllocation(format!(
                "allocation has {} agents on {} resources, game has {} agents on {} resources",
                self.n_agents(),
                self.n_resources,
                g.n_agents(),
                g.n_resources()
            )));
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_resources(&self) -> usize {
        self.n_resources
    }

    pub fn resource_of(&self, agent: AgentId) -> ResourceId {
        self.assignment[agent - 1]
    }

    pub fn assignment(&self) -> &[ResourceId] {
        &self.assignment
    }

    pub fn set_resource(&mut self, agent: AgentId, resource: ResourceId) {
        assert!(resource < self.n_resources);
        self.assignment[agent - 1] = resource;
    }

    pub fn loads(&self) -> Vec<usize> {
        let mut loads = vec![0; self.n_resources];
        for &r in &self.assignment {
            loads[r] += 1;
        }
        loads
    }

    pub fn load(&self, resource: ResourceId) -> usize {
        self.assignment.iter().filter(|&&r| r == resource).count()
    }

    /// Sorted agents on `resource`.
    pub fn members(&self, resource: ResourceId) -> Vec<AgentId> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == resource)
            .map(|(j, _)| j + 1)
            .collect()
    }

    pub fn sets(&self) -> Vec<Vec<AgentId>> {
        let mut sets = vec![Vec::new(); self.n_resources];
        for (j, &r) in self.assignment.iter().enumerate() {
            sets[r].push(j + 1);
        }
        sets
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (r, set) in self.sets().iter().enumerate() {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (k, j) in set.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{j}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, ")")
    }
}

/// Cost paid by each agent (indexed by `agent - 1`).
pub fn allocation_costs(g: &Rsg, a: &Allocation) -> Vec<Cost> {
    let loads = a.loads();
    a.assignment().iter().map(|&r| g.cost(r, loads[r])).collect()
}

pub fn maxcost(g: &Rsg, a: &Allocation) -> Cost {
    let loads = a.loads();
    (0..g.n_resources())
        .filter(|&i| loads[i] > 0)
        .map(|i| g.cost(i, loads[i]))
        .max()
        .expect("some resource is used")
}

/// Nash test through the load characterization: Type 2 resources at quota,
/// Type 1 resources at quota or one below, and some Type 1 resource at quota.
pub fn is_nash_by_loads(d: &RsgDerived, a: &Allocation) -> bool {
    let loads = a.loads();
    let mut some_type1_full = false;
    for (i, &load) in loads.iter().enumerate() {
        let q = d.quota[i];
        match d.kind[i] {
            ResourceType::Type2 => {
                if load != q {
                    return false;
                }
            }
            ResourceType::Type1 => {
                if load == q {
                    some_type1_full = true;
                } else if load + 1 != q {
                    return false;
                }
            }
        }
    }
    some_type1_full
}

/// Nash test by scanning every unilateral move.
pub fn is_nash_by_moves(g: &Rsg, a: &Allocation) -> bool {
    let loads = a.loads();
    let m = g.n_resources();
    for r in 0..m {
        if loads[r] == 0 {
            continue;
        }
        let now = g.cost(r, loads[r]);
        for i in 0..m {
            if i != r && g.cost(i, loads[i] + 1) < now {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowHigh {
    pub low: Vec<ResourceId>,
    pub high: Vec<ResourceId>,
}

/// Splits the resources of a Nash allocation into low (Type 1 at quota - 1)
/// and high (everything else).
pub fn classify_low_high(g: &Rsg, d: &RsgDerived, a: &Allocation) -> Result<LowHigh> {
    a.check_against(g)?;
    if !is_nash_by_loads(d, a) {
        return Err(Error::NotNash);
    }
    let loads = a.loads();
    let (low, high) = (0..g.n_resources())
        .partition(|&i| d.kind[i] == ResourceType::Type1 && loads[i] + 1 == d.quota[i]);
    Ok(LowHigh { low, high })
}
