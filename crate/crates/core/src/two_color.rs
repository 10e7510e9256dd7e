//! Balanced two-colorings of agent sets under a laminar structure.

use std::collections::VecDeque;

use crate::coalition::{AgentId, Coalition, CoalitionStructure};
use crate::error::{Error, Result};

/// The coalitions of a laminar structure together with the grand coalition
/// and every singleton, arranged as a rooted tree. Node 0 is the grand
/// coalition; a node's children partition it.
#[derive(Clone, Debug)]
pub struct LaminarForest {
    pub nodes: Vec<Coalition>,
    pub parent: Vec<Option<usize>>,
    /// Children ordered by their smallest member.
    pub children: Vec<Vec<usize>>,
    /// `levels[0] == [0]`; level `s + 1` holds the children of level `s`.
    pub levels: Vec<Vec<usize>>,
}

impl LaminarForest {
    pub fn build(c: &CoalitionStructure) -> Result<Self> {
        let n = c.n_agents();
        if n == 0 {
            return Err(Error::InvalidStructure("no agents".into()));
        }
        let grand = Coalition::new((1..=n).collect()).expect("n >= 1");
        let augmented = c
            .with_added(std::iter::once(grand).chain((1..=n).map(|j| Coalition::new(vec![j]).unwrap())))?;
        let mut nodes: Vec<Coalition> = augmented.coalitions().to_vec();
        nodes.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.members().cmp(b.members())));

        // Processing largest first, the owner of an agent is the smallest node
        // seen so far that contains it; a new node's members must agree on it.
        let mut owner: Vec<usize> = vec![0; n + 1];
        let mut parent = vec![None; nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        for (idx, node) in nodes.iter().enumerate().skip(1) {
            let p = owner[node.min()];
            if node.members().iter().any(|&j| owner[j] != p) {
                return Err(Error::NotLaminar);
            }
            parent[idx] = Some(p);
            children[p].push(idx);
            for &j in node.members() {
                owner[j] = idx;
            }
        }
        for list in children.iter_mut() {
            list.sort_by_key(|&k| nodes[k].min());
        }
        let mut levels = vec![vec![0]];
        let mut queue = VecDeque::from([0usize]);
        let mut depth = vec![0usize; nodes.len()];
        while let Some(k) = queue.pop_front() {
            for &ch in &children[k] {
                depth[ch] = depth[k] + 1;
                if levels.len() <= depth[ch] {
                    levels.push(Vec::new());
                }
                levels[depth[ch]].push(ch);
                queue.push_back(ch);
            }
        }
        Ok(Self { nodes, parent, children, levels })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoColoring {
    pub black: Vec<AgentId>,
    pub white: Vec<AgentId>,
}

impl TwoColoring {
    /// Black minus white within `c`.
    pub fn imbalance(&self, c: &Coalition) -> i64 {
        let b = self.black.iter().filter(|&&j| c.contains(j)).count() as i64;
        let w = self.white.iter().filter(|&&j| c.contains(j)).count() as i64;
        b - w
    }
}

/// Splits `subset` into `ceil(|subset| / 2)` black and the rest white so
/// that every coalition of the laminar structure `c` differs by at most one
/// between colors.
///
/// Starts from the lowest ids in black and repairs each level of the
/// laminar forest in turn by trading a black agent of an over-black node for
/// a white agent of an over-white sibling.
pub fn two_color(subset: &[AgentId], c: &CoalitionStructure) -> Result<TwoColoring> {
    let mut members: Vec<AgentId> = subset.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::Precondition("two-coloring needs a nonempty agent set".into()));
    }
    if *members.last().unwrap() > c.n_agents() || members[0] == 0 {
        return Err(Error::Precondition("agent set is not within the structure's agents".into()));
    }
    let forest = LaminarForest::build(c)?;
    let n = c.n_agents();
    let k = members.len().div_ceil(2);
    // color: 1 black, -1 white, 0 outside the subset.
    let mut color = vec![0i64; n + 1];
    for (idx, &j) in members.iter().enumerate() {
        color[j] = if idx < k { 1 } else { -1 };
    }
    let imbalance = |color: &[i64], node: &Coalition| -> i64 { node.members().iter().map(|&j| color[j]).sum() };

    for level in forest.levels.iter().skip(1) {
        loop {
            let mut changed = false;
            for &node in level {
                let mut d = imbalance(&color, &forest.nodes[node]);
                while d.abs() >= 2 {
                    let sign = d.signum();
                    let mother = forest.parent[node].expect("non-root");
                    let sibling = forest.children[mother]
                        .iter()
                        .copied()
                        .find(|&s| s != node && imbalance(&color, &forest.nodes[s]) * sign <= -1)
                        .ok_or_else(|| Error::Construction("two-coloring repair found no sibling".into()))?;
                    let from = lowest_with(&forest.nodes[node], &color, sign);
                    let to = lowest_with(&forest.nodes[sibling], &color, -sign);
                    color.swap(from, to);
                    d = imbalance(&color, &forest.nodes[node]);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    let black = members.iter().copied().filter(|&j| color[j] == 1).collect();
    let white = members.iter().copied().filter(|&j| color[j] == -1).collect();
    Ok(TwoColoring { black, white })
}

fn lowest_with(node: &Coalition, color: &[i64], want: i64) -> AgentId {
    *node.members().iter().find(|&&j| color[j] == want).expect("imbalance implies presence")
}
