//! Seeded random games and coalition structures.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coalition::{AgentId, Coalition, CoalitionStructure};
use crate::rational::{cost, Cost};
use crate::rsg::Rsg;
use crate::structure::PathWitness;

/// Strictly increasing positive integer costs with steps in `1..=max_step`.
pub fn random_table<R: Rng>(n: usize, max_step: i64, rng: &mut R) -> Vec<Cost> {
    let mut v = 0;
    (0..n)
        .map(|_| {
            v += rng.gen_range(1..=max_step);
            cost(v)
        })
        .collect()
}

pub fn random_rsg<R: Rng>(n: usize, m: usize, max_step: i64, rng: &mut R) -> Rsg {
    Rsg::new(n, (0..m).map(|_| random_table(n, max_step, rng)).collect()).expect("valid tables")
}

pub fn random_identical_rsg<R: Rng>(n: usize, m: usize, max_step: i64, rng: &mut R) -> Rsg {
    Rsg::identical(n, m, random_table(n, max_step, rng)).expect("valid table")
}

fn shuffled<R: Rng>(n: usize, rng: &mut R) -> Vec<AgentId> {
    let mut agents: Vec<AgentId> = (1..=n).collect();
    agents.shuffle(rng);
    agents
}

/// Random cut points splitting `0..len` into nonempty chunks.
fn chunks<R: Rng>(len: usize, parts: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let parts = parts.clamp(1, len.max(1));
    let mut cuts: Vec<usize> = (1..len).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(len);
    bounds.windows(2).map(|w| (w[0], w[1])).collect()
}

pub fn random_partition<R: Rng>(n: usize, rng: &mut R) -> CoalitionStructure {
    let agents = shuffled(n, rng);
    let parts = rng.gen_range(1..=n);
    let lists: Vec<Vec<AgentId>> = chunks(n, parts, rng).into_iter().map(|(a, b)| agents[a..b].to_vec()).collect();
    CoalitionStructure::from_lists(n, &lists).expect("valid lists")
}

/// Nested random splits of a shuffled agent list; each piece is kept with
/// probability one half, so the result may miss N, singletons, or be empty.
pub fn random_laminar<R: Rng>(n: usize, rng: &mut R) -> CoalitionStructure {
    fn split<R: Rng>(agents: &[AgentId], out: &mut Vec<Vec<AgentId>>, rng: &mut R) {
        if rng.gen_bool(0.5) {
            out.push(agents.to_vec());
        }
        if agents.len() < 2 {
            return;
        }
        let parts = rng.gen_range(2..=3);
        for (a, b) in chunks(agents.len(), parts, rng) {
            split(&agents[a..b], out, rng);
        }
    }
    let agents = shuffled(n, rng);
    let mut lists = Vec::new();
    split(&agents, &mut lists, rng);
    CoalitionStructure::from_lists(n, &lists).expect("valid lists")
}

/// Random intervals of a random agent order, returned with that order.
pub fn random_contiguous<R: Rng>(n: usize, rng: &mut R) -> (CoalitionStructure, PathWitness) {
    let order = shuffled(n, rng);
    let count = rng.gen_range(0..=2 * n);
    let coalitions: Vec<Coalition> = (0..count)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            Coalition::new(order[a.min(b)..=a.max(b)].to_vec()).expect("nonempty")
        })
        .collect();
    (CoalitionStructure::new(n, coalitions).expect("valid"), PathWitness { order })
}

/// A random nonempty subset of `1..=n`.
pub fn random_subset<R: Rng>(n: usize, rng: &mut R) -> Vec<AgentId> {
    let k = rng.gen_range(1..=n);
    let mut s: Vec<AgentId> = shuffled(n, rng).into_iter().take(k).collect();
    s.sort_unstable();
    s
}
