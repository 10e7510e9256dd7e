//! Exact stability oracles.
//!
//! A coalition deviates profitably when every member ends up with a cost no
//! higher than before and at least one member strictly lower.

use std::fmt;

use crate::coalition::{AgentId, Coalition, CoalitionStructure};
use crate::combinatorics::{composition_count, Compositions};
use crate::error::{Error, Result};
use crate::game::{advance, Profile, StrategicGame};
use crate::rational::Cost;
use crate::rsg::{allocation_costs, Allocation, ResourceId, ResourceType, Rsg, RsgDerived};

/// Default cap on load vectors examined per coalition.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// `count` members of the coalition currently on `from` switch to `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub from: ResourceId,
    pub to: ResourceId,
    pub count: usize,
}

/// A coalition's joint change of resources, recorded as an origin-to-target
/// count matrix without the diagonal. Members not covered by a move stay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub coalition: Coalition,
    pub moves: Vec<Move>,
}

impl Deviation {
    /// Dense `m x m` matrix including members that stay.
    pub fn count_matrix(&self, a: &Allocation) -> Vec<Vec<usize>> {
        let m = a.n_resources();
        let mut counts = vec![vec![0; m]; m];
        for &j in self.coalition.members() {
            let r = a.resource_of(j);
            counts[r][r] += 1;
        }
        for mv in &self.moves {
            counts[mv.from][mv.from] -= mv.count;
            counts[mv.from][mv.to] += mv.count;
        }
        counts
    }

    /// Assigns moves to concrete members: within each origin resource the
    /// lowest ids move first, targets taken in the order listed.
    pub fn member_moves(&self, a: &Allocation) -> Result<Vec<(AgentId, ResourceId, ResourceId)>> {
        let m = a.n_resources();
        let mut by_origin: Vec<Vec<AgentId>> = vec![Vec::new(); m];
        for &j in self.coalition.members() {
            if j > a.n_agents() {
                return Err(Error::InvalidWitness(format!("agent {j} does not exist")));
            }
            by_origin[a.resource_of(j)].push(j);
        }
        let mut cursor = vec![0usize; m];
        let mut out = Vec::new();
        for mv in &self.moves {
            if mv.from >= m || mv.to >= m || mv.from == mv.to {
                return Err(Error::InvalidWitness(format!("bad move {} -> {}", mv.from + 1, mv.to + 1)));
            }
            let group = &by_origin[mv.from];
            if cursor[mv.from] + mv.count > group.len() {
                return Err(Error::InvalidWitness(format!(
                    "move takes {} agents from resource {} but the coalition has only {} there",
                    mv.count,
                    mv.from + 1,
                    group.len()
                )));
            }
            for &j in &group[cursor[mv.from]..cursor[mv.from] + mv.count] {
                out.push((j, mv.from, mv.to));
            }
            cursor[mv.from] += mv.count;
        }
        Ok(out)
    }

    pub fn apply(&self, a: &Allocation) -> Result<Allocation> {
        let mut next = a.clone();
        for (j, _, to) in self.member_moves(a)? {
            next.set_resource(j, to);
        }
        Ok(next)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberOutcome {
    pub agent: AgentId,
    pub from: ResourceId,
    pub to: ResourceId,
    pub before: Cost,
    pub after: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub deviation: Deviation,
    pub outcomes: Vec<MemberOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub witness: Option<Witness>,
}

impl StabilityReport {
    pub fn stable() -> Self {
        Self { stable: true, witness: None }
    }

    pub fn violating_coalition(&self) -> Option<&Coalition> {
        self.witness.as_ref().map(|w| &w.deviation.coalition)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "coalition {}:", self.deviation.coalition)?;
        for o in &self.outcomes {
            write!(f, " agent {} r{}->r{} ({} -> {})", o.agent, o.from + 1, o.to + 1, o.before, o.after)?;
        }
        Ok(())
    }
}

/// Replays a deviation against the game and reports every member's cost
/// before and after.
pub fn replay(g: &Rsg, a: &Allocation, dev: &Deviation) -> Result<Witness> {
    a.check_against(g)?;
    let after_alloc = dev.apply(a)?;
    let before = allocation_costs(g, a);
    let after = allocation_costs(g, &after_alloc);
    let outcomes = dev
        .coalition
        .members()
        .iter()
        .map(|&j| MemberOutcome {
            agent: j,
            from: a.resource_of(j),
            to: after_alloc.resource_of(j),
            before: before[j - 1],
            after: after[j - 1],
        })
        .collect();
    Ok(Witness { deviation: dev.clone(), outcomes })
}

/// Pareto test on replayed outcomes.
pub fn is_profitable(w: &Witness) -> bool {
    w.outcomes.iter().all(|o| o.after <= o.before) && w.outcomes.iter().any(|o| o.after < o.before)
}

/// Replays and fails unless the deviation is profitable.
pub fn validate_deviation(g: &Rsg, a: &Allocation, dev: &Deviation) -> Result<Witness> {
    let w = replay(g, a, dev)?;
    if is_profitable(&w) {
        Ok(w)
    } else {
        Err(Error::InvalidWitness(format!("deviation of {} is not profitable", dev.coalition)))
    }
}

pub fn is_c_stable_rsg(g: &Rsg, a: &Allocation, c: &Coalition) -> Result<StabilityReport> {
    is_c_stable_rsg_budgeted(g, a, c, u64::MAX)
}

/// Exact c-stability.
///
/// Members sharing an origin pay the same cost before the deviation and
/// after it only the final loads matter, so the scan runs over final load
/// vectors and checks whether the origin groups can be routed to them along
/// cost-non-increasing edges with at least one strict edge used.
pub fn is_c_stable_rsg_budgeted(g: &Rsg, a: &Allocation, c: &Coalition, budget: u64) -> Result<StabilityReport> {
    a.check_against(g)?;
    if c.max() > g.n_agents() {
        return Err(Error::InvalidStructure(format!("coalition {c} mentions unknown agents")));
    }
    let m = g.n_resources();
    let size = c.len();
    let needed = composition_count(size, m);
    if needed > u128::from(budget) {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let loads = a.loads();
    let mut supply = vec![0usize; m];
    for &j in c.members() {
        supply[a.resource_of(j)] += 1;
    }
    let base: Vec<usize> = (0..m).map(|i| loads[i] - supply[i]).collect();
    let before: Vec<Cost> = (0..m).map(|i| g.cost(i, loads[i])).collect();
    let origins: Vec<usize> = (0..m).filter(|&r| supply[r] > 0).collect();

    for extra in Compositions::new(size, m) {
        let after: Vec<Cost> = (0..m).map(|i| g.cost(i, base[i] + extra[i])).collect();
        let mut allowed = vec![vec![false; m]; m];
        let mut strict = Vec::new();
        for &r in &origins {
            for i in 0..m {
                if extra[i] > 0 && after[i] <= before[r] {
                    allowed[r][i] = true;
                    if after[i] < before[r] {
                        strict.push((r, i));
                    }
                }
            }
        }
        for &(r, i) in &strict {
            let mut s = supply.clone();
            let mut d = extra.clone();
            s[r] -= 1;
            d[i] -= 1;
            if let Some(mut flow) = transport(&s, &d, &allowed) {
                flow[r][i] += 1;
                let dev = deviation_from_counts(c.clone(), &flow);
                let w = validate_deviation(g, a, &dev)?;
                return Ok(StabilityReport { stable: false, witness: Some(w) });
            }
        }
    }
    Ok(StabilityReport::stable())
}

fn deviation_from_counts(coalition: Coalition, counts: &[Vec<usize>]) -> Deviation {
    let mut moves = Vec::new();
    for (r, row) in counts.iter().enumerate() {
        for (i, &count) in row.iter().enumerate() {
            if r != i && count > 0 {
                moves.push(Move { from: r, to: i, count });
            }
        }
    }
    Deviation { coalition, moves }
}

/// Bipartite transport with unit-free capacities: routes all of `supply` to
/// exactly meet `demand` along allowed edges, or reports infeasibility.
fn transport(supply: &[usize], demand: &[usize], allowed: &[Vec<bool>]) -> Option<Vec<Vec<usize>>> {
    let m = supply.len();
    let total: usize = supply.iter().sum();
    if total != demand.iter().sum::<usize>() {
        return None;
    }
    let mut flow = vec![vec![0usize; m]; m];
    let mut left = supply.to_vec();
    let mut need = demand.to_vec();
    // Augmenting paths over the residual graph: origin -> target forward on
    // allowed edges, target -> origin backward where flow is positive.
    for _ in 0..total {
        let path = augmenting_path(&left, &need, allowed, &flow)?;
        // path alternates origin, target, origin, target, ...
        left[path[0]] -= 1;
        need[*path.last().unwrap()] -= 1;
        for step in path.windows(2).enumerate() {
            let (k, pair) = step;
            if k % 2 == 0 {
                flow[pair[0]][pair[1]] += 1;
            } else {
                flow[pair[1]][pair[0]] -= 1;
            }
        }
    }
    Some(flow)
}

fn augmenting_path(left: &[usize], need: &[usize], allowed: &[Vec<bool>], flow: &[Vec<usize>]) -> Option<Vec<usize>> {
    let m = left.len();
    // BFS over origins; prev_target[i] = origin that reached target i,
    // prev_origin[r] = target through which origin r was reached.
    let mut prev_target: Vec<Option<usize>> = vec![None; m];
    let mut prev_origin: Vec<Option<usize>> = vec![None; m];
    let mut seen_origin = vec![false; m];
    let mut queue: std::collections::VecDeque<usize> = (0..m).filter(|&r| left[r] > 0).collect();
    for &r in &queue {
        seen_origin[r] = true;
    }
    while let Some(r) = queue.pop_front() {
        for i in 0..m {
            if !allowed[r][i] || prev_target[i].is_some() {
                continue;
            }
            prev_target[i] = Some(r);
            if need[i] > 0 {
                let mut path = vec![i];
                let mut t = i;
                loop {
                    let o = prev_target[t].unwrap();
                    path.push(o);
                    match prev_origin[o] {
                        Some(t2) => {
                            path.push(t2);
                            t = t2;
                        }
                        None => break,
                    }
                }
                path.reverse();
                return Some(path);
            }
            for r2 in 0..m {
                if !seen_origin[r2] && flow[r2][i] > 0 {
                    seen_origin[r2] = true;
                    prev_origin[r2] = Some(i);
                    queue.push_back(r2);
                }
            }
        }
    }
    None
}

/// C-stability; coalitions are tried in canonical order and the first
/// violation is reported.
pub fn is_structure_stable(g: &Rsg, a: &Allocation, c: &CoalitionStructure) -> Result<StabilityReport> {
    is_structure_stable_budgeted(g, a, c, u64::MAX)
}

pub fn is_structure_stable_budgeted(
    g: &Rsg,
    a: &Allocation,
    c: &CoalitionStructure,
    budget: u64,
) -> Result<StabilityReport> {
    if c.n_agents() != g.n_agents() {
        return Err(Error::InvalidStructure(format!(
            "structure is over {} agents, game has {}",
            c.n_agents(),
            g.n_agents()
        )));
    }
    for coalition in c.canonical_order() {
        let report = is_c_stable_rsg_budgeted(g, a, coalition, budget)?;
        if !report.stable {
            return Ok(report);
        }
    }
    Ok(StabilityReport::stable())
}

/// Profitable deviation in a generic game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericWitness {
    pub coalition: Coalition,
    pub profile: Profile,
    /// `(agent, payoff before, payoff after)` for each member.
    pub payoffs: Vec<(AgentId, Cost, Cost)>,
}

/// Exhaustive scan of the coalition's joint strategies (first member varies
/// fastest). Payoffs are utilities: higher is better.
pub fn is_c_stable_generic(
    game: &StrategicGame,
    profile: &[usize],
    c: &Coalition,
    budget: u64,
) -> Result<Option<GenericWitness>> {
    game.check_profile(profile)?;
    if c.max() > game.n_agents() {
        return Err(Error::InvalidStructure(format!("coalition {c} mentions unknown agents")));
    }
    let radix: Vec<usize> = c.members().iter().map(|&j| game.strategy_counts()[j - 1]).collect();
    let needed = radix.iter().fold(1u128, |acc, &k| acc.saturating_mul(k as u128));
    if needed > u128::from(budget) {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let before: Vec<Cost> = c.members().iter().map(|&j| game.payoff(profile, j)).collect();
    let mut joint = vec![0usize; c.len()];
    let mut candidate = profile.to_vec();
    loop {
        for (k, &j) in c.members().iter().enumerate() {
            candidate[j - 1] = joint[k];
        }
        let after: Vec<Cost> = c.members().iter().map(|&j| game.payoff(&candidate, j)).collect();
        let weak = after.iter().zip(&before).all(|(x, y)| x >= y);
        let strict = after.iter().zip(&before).any(|(x, y)| x > y);
        if weak && strict {
            let payoffs = c.members().iter().zip(before.iter().zip(&after)).map(|(&j, (b, a))| (j, *b, *a)).collect();
            return Ok(Some(GenericWitness { coalition: c.clone(), profile: candidate, payoffs }));
        }
        if !advance(&mut joint, &radix) {
            return Ok(None);
        }
    }
}

/// The three conditions characterizing c-stability of a Nash allocation in
/// a two-resource game where both resources are Type 1.
pub fn lemma_c123_check(g: &Rsg, d: &RsgDerived, a: &Allocation, c: &Coalition) -> Result<bool> {
    let (hi, lo) = lemma_roles(g, d, a)?;
    let x = c.members().iter().filter(|&&j| a.resource_of(j) == hi).count();
    let y = c.members().iter().filter(|&&j| a.resource_of(j) == lo).count();
    let beta_hi = d.beta[hi].expect("type 1");
    let beta_lo = d.beta[lo].expect("type 1");
    let c1 = y > 0 || x <= 1;
    let c2 = !(beta_hi == beta_lo && y > 0) || x <= y + 1;
    let c3 = !(beta_hi < beta_lo && y > 0) || x <= y;
    Ok(c1 && c2 && c3)
}

/// `(i, i')`: the resource at quota and the one just below it.
pub fn lemma_roles(g: &Rsg, d: &RsgDerived, a: &Allocation) -> Result<(ResourceId, ResourceId)> {
    a.check_against(g)?;
    if g.n_resources() != 2 || d.kind.iter().any(|k| *k != ResourceType::Type1) {
        return Err(Error::Precondition("needs two resources, both of Type 1".into()));
    }
    let loads = a.loads();
    for (i, k) in [(0, 1), (1, 0)] {
        if loads[i] == d.quota[i] && loads[k] + 1 == d.quota[k] {
            return Ok((i, k));
        }
    }
    Err(Error::Precondition("one resource must be at quota and the other one below".into()))
}

/// Number of (resource, coalition) pairs that share an agent.
pub fn gamma_value(a: &Allocation, c: &CoalitionStructure) -> usize {
    let m = a.n_resources();
    let mut total = 0;
    let mut hit = vec![false; m];
    for k in c.coalitions() {
        hit.iter_mut().for_each(|h| *h = false);
        for &j in k.members() {
            hit[a.resource_of(j)] = true;
        }
        total += hit.iter().filter(|&&h| h).count();
    }
    total
}

/// Sum over resources of the cost at their current load.
pub fn beta_value(g: &Rsg, a: &Allocation) -> Cost {
    a.loads().iter().enumerate().map(|(i, &l)| g.cost(i, l)).sum()
}

/// `next` has a larger gamma value, or the same one and a smaller beta value.
pub fn gb_dominates(next: &Allocation, prev: &Allocation, g: &Rsg, c: &CoalitionStructure) -> bool {
    let (gn, gp) = (gamma_value(next, c), gamma_value(prev, c));
    gn > gp || (gn == gp && beta_value(g, next) < beta_value(g, prev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::cost;
    use crate::rsg::derive_rsg;

    fn example1() -> Rsg {
        Rsg::new(3, vec![vec![cost(1), cost(2), cost(3)]; 2]).unwrap()
    }

    fn co(v: &[usize]) -> Coalition {
        Coalition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn example1_pair_deviates() {
        let g = example1();
        let a = Allocation::from_sets(3, &[vec![1, 2], vec![3]]).unwrap();
        let r = is_c_stable_rsg(&g, &a, &co(&[1, 2])).unwrap();
        assert!(!r.stable);
        let w = r.witness.unwrap();
        assert!(is_profitable(&w));
        assert_eq!(w.deviation.moves, vec![Move { from: 0, to: 1, count: 1 }]);
        assert_eq!(w.outcomes[0].agent, 1);
        assert_eq!(w.outcomes[0].after, cost(2));
        assert_eq!(w.outcomes[1].after, cost(1));
        assert!(is_c_stable_rsg(&g, &a, &co(&[3])).unwrap().stable);
    }

    #[test]
    fn example1_has_no_super_strong_allocation() {
        let g = example1();
        let all = CoalitionStructure::all_nonempty(3);
        for mask in 0..8usize {
            let a = Allocation::from_assignment(2, (0..3).map(|j| mask >> j & 1).collect()).unwrap();
            let r = is_structure_stable(&g, &a, &all).unwrap();
            assert!(!r.stable, "{a}");
        }
    }

    #[test]
    fn generic_oracle_on_example1_and_pennies() {
        let g = example1();
        let sg = StrategicGame::from_rsg(&g).unwrap();
        let w = is_c_stable_generic(&sg, &[0, 0, 1], &co(&[1, 2]), 1000).unwrap().unwrap();
        assert_eq!(w.profile, vec![1, 0, 1]);

        let pennies = StrategicGame::from_fn(vec![2, 2], |p| {
            let v = if p[0] == p[1] { 1 } else { -1 };
            vec![cost(v), cost(-v)]
        })
        .unwrap();
        for s0 in 0..2 {
            for s1 in 0..2 {
                let p = [s0, s1];
                let dev1 = is_c_stable_generic(&pennies, &p, &co(&[1]), 10).unwrap();
                let dev2 = is_c_stable_generic(&pennies, &p, &co(&[2]), 10).unwrap();
                assert!(dev1.is_some() || dev2.is_some());
            }
        }
        assert!(matches!(
            is_c_stable_generic(&pennies, &[0, 0], &co(&[1, 2]), 3),
            Err(Error::BudgetExceeded { needed: 4, budget: 3 })
        ));
    }

    #[test]
    fn lemma_examples() {
        let g = example1();
        let d = derive_rsg(&g);
        let a = Allocation::from_sets(3, &[vec![1, 2], vec![3]]).unwrap();
        assert!(!lemma_c123_check(&g, &d, &a, &co(&[1, 2])).unwrap());
        assert!(lemma_c123_check(&g, &d, &a, &co(&[3])).unwrap());
        assert!(lemma_c123_check(&g, &d, &a, &co(&[1, 3])).unwrap());
        let bad = Allocation::from_sets(3, &[vec![1, 2, 3], vec![]]).unwrap();
        assert!(matches!(lemma_c123_check(&g, &d, &bad, &co(&[1])), Err(Error::Precondition(_))));
    }

    #[test]
    fn gamma_beta_examples() {
        let g = Rsg::new(2, vec![vec![cost(1), cost(2)]; 2]).unwrap();
        let c = CoalitionStructure::from_lists(2, &[vec![1, 2]]).unwrap();
        let spread = Allocation::from_sets(2, &[vec![1], vec![2]]).unwrap();
        let packed = Allocation::from_sets(2, &[vec![1, 2], vec![]]).unwrap();
        assert_eq!(gamma_value(&spread, &c), 2);
        assert_eq!(gamma_value(&packed, &c), 1);
        assert!(gb_dominates(&spread, &packed, &g, &c));
        assert!(!gb_dominates(&packed, &spread, &g, &c));
        assert_eq!(gamma_value(&spread, &CoalitionStructure::empty(2)), 0);

        let e1 = example1();
        let a = Allocation::from_sets(3, &[vec![1, 2], vec![3]]).unwrap();
        assert_eq!(beta_value(&e1, &a), cost(3));
    }

    #[test]
    fn swaps_with_unchanged_loads_are_not_profitable() {
        let g = example1();
        let a = Allocation::from_sets(3, &[vec![1, 2], vec![3]]).unwrap();
        let dev = Deviation {
            coalition: co(&[1, 3]),
            moves: vec![Move { from: 0, to: 1, count: 1 }, Move { from: 1, to: 0, count: 1 }],
        };
        let w = replay(&g, &a, &dev).unwrap();
        assert!(!is_profitable(&w));
        assert!(validate_deviation(&g, &a, &dev).is_err());
        let too_many = Deviation { coalition: co(&[3]), moves: vec![Move { from: 1, to: 0, count: 2 }] };
        assert!(replay(&g, &a, &too_many).is_err());
    }
}
