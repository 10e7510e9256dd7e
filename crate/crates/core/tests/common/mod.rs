//! Independent reference checks used by the integration tests. Nothing here
//! calls the library's oracles; costs are read straight from the tables.

#![allow(dead_code)]

use num_rational::BigRational;
use rsg_core::embedding::PlanarWitness;
use rsg_core::structure::PathWitness;
use rsg_core::{Allocation, Coalition, CoalitionStructure, Cost, Rsg};

pub fn loads(m: usize, assignment: &[usize]) -> Vec<usize> {
    let mut l = vec![0; m];
    for &r in assignment {
        l[r] += 1;
    }
    l
}

fn f(g: &Rsg, r: usize, load: usize) -> Cost {
    g.table(r)[load - 1]
}

/// Tries every joint move of the members; returns the targets of the first
/// profitable one in odometer order.
pub fn brute_deviation(g: &Rsg, a: &Allocation, c: &Coalition) -> Option<Vec<usize>> {
    let m = g.n_resources();
    let members = c.members();
    let before_loads = loads(m, a.assignment());
    let before: Vec<Cost> = members.iter().map(|&j| f(g, a.resource_of(j), before_loads[a.resource_of(j)])).collect();
    let mut targets = vec![0usize; members.len()];
    loop {
        let mut after_loads = before_loads.clone();
        for (&j, &t) in members.iter().zip(&targets) {
            after_loads[a.resource_of(j)] -= 1;
            after_loads[t] += 1;
        }
        let mut weak = true;
        let mut strict = false;
        for (k, &t) in targets.iter().enumerate() {
            let after = f(g, t, after_loads[t]);
            weak &= after <= before[k];
            strict |= after < before[k];
        }
        if weak && strict {
            return Some(targets);
        }
        let mut p = 0;
        loop {
            if p == targets.len() {
                return None;
            }
            targets[p] += 1;
            if targets[p] < m {
                break;
            }
            targets[p] = 0;
            p += 1;
        }
    }
}

pub fn brute_structure_stable(g: &Rsg, a: &Allocation, c: &CoalitionStructure) -> bool {
    c.coalitions().iter().all(|k| brute_deviation(g, a, k).is_none())
}

/// No single agent lowers its cost by switching resource.
pub fn nash_by_single_moves(g: &Rsg, a: &Allocation) -> bool {
    let m = g.n_resources();
    let l = loads(m, a.assignment());
    (1..=a.n_agents()).all(|j| {
        let r = a.resource_of(j);
        let now = f(g, r, l[r]);
        (0..m).filter(|&t| t != r).all(|t| f(g, t, l[t] + 1) >= now)
    })
}

/// Every coalition occupies consecutive positions of the order.
pub fn consecutive(c: &CoalitionStructure, p: &PathWitness) -> bool {
    let n = c.n_agents();
    let mut sorted = p.order.clone();
    sorted.sort_unstable();
    if sorted != (1..=n).collect::<Vec<_>>() {
        return false;
    }
    let mut pos = vec![0; n + 1];
    for (k, &j) in p.order.iter().enumerate() {
        pos[j] = k;
    }
    c.coalitions().iter().all(|k| {
        let ps: Vec<usize> = k.members().iter().map(|&j| pos[j]).collect();
        ps.iter().max().unwrap() - ps.iter().min().unwrap() + 1 == ps.len()
    })
}

/// Membership of every agent in every circle equals coalition membership.
pub fn embedding_matches(c: &CoalitionStructure, w: &PlanarWitness) -> bool {
    if w.circles.len() != c.len() || w.positions.len() != c.n_agents() {
        return false;
    }
    c.coalitions().iter().zip(&w.circles).all(|(k, circle)| {
        if !k.contains(circle.center) {
            return false;
        }
        let (cx, cy) = &w.positions[circle.center - 1];
        (1..=c.n_agents()).all(|j| {
            let (x, y) = &w.positions[j - 1];
            let d: BigRational = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            (d <= circle.radius_sq) == k.contains(j)
        })
    })
}

/// All `m^n` allocations in odometer order.
pub fn all_allocations(n: usize, m: usize) -> Vec<Allocation> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    loop {
        out.push(Allocation::from_assignment(m, assignment.clone()).unwrap());
        let mut p = 0;
        loop {
            if p == n {
                return out;
            }
            assignment[p] += 1;
            if assignment[p] < m {
                break;
            }
            assignment[p] = 0;
            p += 1;
        }
    }
}

/// γ: number of (resource, coalition) pairs that meet.
pub fn gamma(a: &Allocation, c: &CoalitionStructure) -> usize {
    (0..a.n_resources())
        .map(|r| c.coalitions().iter().filter(|k| k.members().iter().any(|&j| a.resource_of(j) == r)).count())
        .sum()
}

/// β: sum of resource costs at their loads (empty resources contribute 0).
pub fn beta(g: &Rsg, a: &Allocation) -> Cost {
    let l = loads(g.n_resources(), a.assignment());
    (0..g.n_resources()).filter(|&r| l[r] > 0).map(|r| f(g, r, l[r])).sum()
}

/// Recomputes a reported witness from the tables: members match the
/// coalition, origins match the allocation, costs match, and the move is a
/// Pareto improvement.
pub fn independent_witness_check(g: &Rsg, a: &Allocation, w: &rsg_core::stability::Witness) -> Result<(), String> {
    let c = &w.deviation.coalition;
    let agents: Vec<usize> = w.outcomes.iter().map(|o| o.agent).collect();
    if agents != c.members() {
        return Err(format!("outcomes cover {agents:?}, coalition is {c}"));
    }
    let m = g.n_resources();
    let before_loads = loads(m, a.assignment());
    let mut after_loads = before_loads.clone();
    for o in &w.outcomes {
        if o.from != a.resource_of(o.agent) {
            return Err(format!("agent {} is not on r{}", o.agent, o.from + 1));
        }
        after_loads[o.from] -= 1;
        after_loads[o.to] += 1;
    }
    let mut strict = false;
    for o in &w.outcomes {
        let before = f(g, o.from, before_loads[o.from]);
        let after = f(g, o.to, after_loads[o.to]);
        if before != o.before || after != o.after {
            return Err(format!("agent {} costs {} -> {}, reported {} -> {}", o.agent, before, after, o.before, o.after));
        }
        if after > before {
            return Err(format!("agent {} is worse off", o.agent));
        }
        strict |= after < before;
    }
    if strict {
        Ok(())
    } else {
        Err("no member strictly better off".into())
    }
}
