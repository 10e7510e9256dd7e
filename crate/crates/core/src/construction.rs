//! Equilibrium constructors.

use crate::coalition::{AgentId, Coalition, CoalitionStructure};
use crate::error::{Error, Result};
use crate::rational::Cost;
use crate::rsg::{derive_rsg, Allocation, ResourceType, Rsg, RsgDerived};
use crate::stability::{beta_value, gamma_value, is_structure_stable, lemma_c123_check, lemma_roles};
use crate::structure::{is_laminar, PathWitness};
use crate::two_color::two_color;

/// A Nash allocation: Type 2 resources at quota, Type 1 resources one below
/// quota except for as many as needed at quota (lowest indices first).
/// Agents fill resources in index order, lowest ids first.
pub fn construct_nash(g: &Rsg) -> Allocation {
    let d = derive_rsg(g);
    construct_nash_with(g, &d)
}

pub fn construct_nash_with(g: &Rsg, d: &RsgDerived) -> Allocation {
    let loads = nash_loads(g.n_agents(), d);
    fill_in_order(&loads)
}

pub(crate) fn nash_loads(n: usize, d: &RsgDerived) -> Vec<usize> {
    let mut extra = n + d.type1().count() - d.quota_sum();
    d.kind
        .iter()
        .zip(&d.quota)
        .map(|(kind, &q)| match kind {
            ResourceType::Type2 => q,
            ResourceType::Type1 if extra > 0 => {
                extra -= 1;
                q
            }
            ResourceType::Type1 => q - 1,
        })
        .collect()
}

fn fill_in_order(loads: &[usize]) -> Allocation {
    let mut assignment = Vec::with_capacity(loads.iter().sum());
    for (i, &l) in loads.iter().enumerate() {
        assignment.extend(std::iter::repeat_n(i, l));
    }
    Allocation::from_assignment(loads.len(), assignment).expect("loads are consistent")
}

/// Deals agents in path order round-robin over the resources.
pub fn algorithm1_round_robin(g: &Rsg, path: &PathWitness) -> Result<Allocation> {
    if !g.is_identical() {
        return Err(Error::Precondition("round-robin construction needs identical resources".into()));
    }
    if !path.is_permutation_of(g.n_agents()) {
        return Err(Error::InvalidWitness("path is not a permutation of the agents".into()));
    }
    let m = g.n_resources();
    let mut assignment = vec![0; g.n_agents()];
    for (k, &j) in path.order.iter().enumerate() {
        assignment[j - 1] = k % m;
    }
    Allocation::from_assignment(m, assignment)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoResourceCase {
    /// One resource is Type 2; filling both to quota is super-strong.
    Case1,
    /// Both resources at quota; no deviation can change a load profitably.
    NoLowResource,
    /// Equal beta values: a balanced coloring decides the split.
    Case2,
    /// Different beta values: iterate dominating rewirings from a Nash start.
    Case3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// Two members on the full resource and none on the other: one moves.
    C1Move,
    /// Too many members on the cheaper-below-quota resource: rebalance.
    C3Rewire,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: StepRule,
    pub coalition: Coalition,
    pub allocation: Allocation,
    pub gamma: usize,
    pub beta: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoResourceOutcome {
    pub allocation: Allocation,
    pub case: TwoResourceCase,
    pub start: Allocation,
    pub steps: Vec<Step>,
}

/// A C-stable allocation of a two-resource game for a laminar structure.
pub fn construct_two_resource_laminar_eq(g: &Rsg, c: &CoalitionStructure) -> Result<TwoResourceOutcome> {
    if g.n_resources() != 2 {
        return Err(Error::Precondition(format!("needs exactly two resources, got {}", g.n_resources())));
    }
    if c.n_agents() != g.n_agents() {
        return Err(Error::InvalidStructure("structure and game disagree on the number of agents".into()));
    }
    if !is_laminar(c) {
        return Err(Error::NotLaminar);
    }
    let d = derive_rsg(g);
    let n = g.n_agents();
    let start = construct_nash_with(g, &d);
    let finish = |allocation: Allocation, case, steps| -> Result<TwoResourceOutcome> {
        let report = is_structure_stable(g, &allocation, c)?;
        if !report.stable {
            return Err(Error::Construction(format!("output {allocation} is not C-stable ({case:?})")));
        }
        Ok(TwoResourceOutcome { allocation, case, start: start.clone(), steps })
    };

    if d.kind.contains(&ResourceType::Type2) {
        return finish(start.clone(), TwoResourceCase::Case1, Vec::new());
    }
    if d.quota_sum() == n {
        return finish(start.clone(), TwoResourceCase::NoLowResource, Vec::new());
    }
    let beta = [d.beta[0].unwrap(), d.beta[1].unwrap()];
    if beta[0] == beta[1] {
        let small = if d.quota[0] <= d.quota[1] { 0 } else { 1 };
        let everyone: Vec<AgentId> = (1..=n).collect();
        let coloring = two_color(&everyone, c)?;
        let mut assignment = vec![1 - small; n];
        for &j in coloring.black.iter().take(d.quota[small]) {
            assignment[j - 1] = small;
        }
        let a = Allocation::from_assignment(2, assignment)?;
        return finish(a, TwoResourceCase::Case2, Vec::new());
    }

    let mut a = start.clone();
    let mut steps = Vec::new();
    let cap = 2 * c.len() * n * n + 1;
    let ordered = c.canonical_order();
    loop {
        let violated = ordered
            .iter()
            .copied()
            .map(|k| lemma_c123_check(g, &d, &a, k).map(|ok| (k, ok)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|(_, ok)| !ok)
            .map(|(k, _)| k);
        let Some(k) = violated else { break };
        if steps.len() >= cap {
            return Err(Error::Construction(format!("no C-stable allocation after {cap} steps")));
        }
        let (next, rule) = case3_step(g, &d, &a, k, c)?;
        steps.push(Step {
            rule,
            coalition: k.clone(),
            gamma: gamma_value(&next, c),
            beta: beta_value(g, &next),
            allocation: next.clone(),
        });
        a = next;
    }
    finish(a, TwoResourceCase::Case3, steps)
}

fn case3_step(
    g: &Rsg,
    d: &RsgDerived,
    a: &Allocation,
    k: &Coalition,
    c: &CoalitionStructure,
) -> Result<(Allocation, StepRule)> {
    let (hi, lo) = lemma_roles(g, d, a)?;
    let on_hi: Vec<AgentId> = k.members().iter().copied().filter(|&j| a.resource_of(j) == hi).collect();
    let on_lo: Vec<AgentId> = k.members().iter().copied().filter(|&j| a.resource_of(j) == lo).collect();
    if on_lo.is_empty() {
        // The second-lowest member on the full resource crosses over.
        let mover = *on_hi.get(1).ok_or_else(|| Error::Construction("C1 step without two members".into()))?;
        let mut next = a.clone();
        next.set_resource(mover, lo);
        return Ok((next, StepRule::C1Move));
    }
    let size = on_lo.len() + 1;
    // One representative on the full resource per member below, taken from
    // the smallest coalition inside `k` around that member that reaches it.
    let mut chosen: Vec<AgentId> = Vec::new();
    for &j in &on_lo {
        let around = c
            .coalitions()
            .iter()
            .filter(|x| x.contains(j) && x.is_subset(k) && x.members().iter().any(|&y| a.resource_of(y) == hi))
            .min_by(|x, y| x.canonical_cmp(y))
            .ok_or_else(|| Error::Construction("no coalition links a member to the full resource".into()))?;
        let rep = *around.members().iter().find(|&&y| a.resource_of(y) == hi).unwrap();
        if !chosen.contains(&rep) {
            chosen.push(rep);
        }
    }
    for &j in &on_hi {
        if chosen.len() >= size {
            break;
        }
        if !chosen.contains(&j) {
            chosen.push(j);
        }
    }
    if chosen.len() != size {
        return Err(Error::Construction("not enough members on the full resource for a rewiring".into()));
    }
    let mut pool = chosen;
    pool.extend(&on_lo);
    let coloring = two_color(&pool, c)?;
    let mut next = a.clone();
    for &j in &coloring.black {
        next.set_resource(j, lo);
    }
    for &j in &coloring.white {
        next.set_resource(j, hi);
    }
    Ok((next, StepRule::C3Rewire))
}
