//! Class recognition for coalition structures and path witnesses.

use fixedbitset::FixedBitSet;

use crate::coalition::{AgentId, Coalition, CoalitionStructure};
use crate::combinatorics::next_permutation;
use crate::error::{Error, Result};

/// Largest agent count for which contiguity is decided by trying every order.
pub const BRUTE_FORCE_MAX_AGENTS: usize = 8;

/// True iff `c` is exactly the set of singletons.
pub fn is_nash_structure(c: &CoalitionStructure) -> bool {
    if c.is_empty() {
        return true;
    }
    c.len() == c.n_agents() && c.coalitions().iter().all(|k| k.len() == 1)
}

pub fn is_partition(c: &CoalitionStructure) -> bool {
    if c.is_empty() {
        return true;
    }
    let mut seen = vec![false; c.n_agents() + 1];
    for k in c.coalitions() {
        for &j in k.members() {
            if std::mem::replace(&mut seen[j], true) {
                return false;
            }
        }
    }
    seen[1..].iter().all(|&s| s)
}

pub fn is_laminar(c: &CoalitionStructure) -> bool {
    first_crossing_pair(c).is_none()
}

/// Two coalitions that intersect without being nested.
pub fn first_crossing_pair(c: &CoalitionStructure) -> Option<(&Coalition, &Coalition)> {
    let cs = c.coalitions();
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            if a.intersects(b) && !a.is_subset(b) && !b.is_subset(a) {
                return Some((a, b));
            }
        }
    }
    None
}

/// An ordering of all agents under which every coalition is a block of
/// consecutive agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathWitness {
    pub order: Vec<AgentId>,
}

impl PathWitness {
    pub fn identity(n: usize) -> Self {
        Self { order: (1..=n).collect() }
    }

    /// `positions()[j]` is the index of agent `j` in the order (entry 0 unused).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.order.len() + 1];
        for (k, &j) in self.order.iter().enumerate() {
            pos[j] = k;
        }
        pos
    }

    pub fn is_permutation_of(&self, n: usize) -> bool {
        if self.order.len() != n {
            return false;
        }
        let mut seen = vec![false; n + 1];
        for &j in &self.order {
            if j == 0 || j > n || std::mem::replace(&mut seen[j], true) {
                return false;
            }
        }
        true
    }

    pub fn check(&self, c: &CoalitionStructure) -> Result<()> {
        if !self.is_permutation_of(c.n_agents()) {
            return Err(Error::InvalidWitness(format!(
                "path is not a permutation of agents 1..={}",
                c.n_agents()
            )));
        }
        let pos = self.positions();
        for k in c.coalitions() {
            let (lo, hi) = span(k, &pos);
            if hi - lo + 1 != k.len() {
                return Err(Error::InvalidWitness(format!("coalition {k} is not consecutive on the path")));
            }
        }
        Ok(())
    }

    pub fn verify(&self, c: &CoalitionStructure) -> bool {
        self.check(c).is_ok()
    }
}

pub(crate) fn span(k: &Coalition, pos: &[usize]) -> (usize, usize) {
    let mut lo = usize::MAX;
    let mut hi = 0;
    for &j in k.members() {
        lo = lo.min(pos[j]);
        hi = hi.max(pos[j]);
    }
    (lo, hi)
}

/// Returns a path witness iff `c` is contiguous. Small instances return the
/// lexicographically first valid order.
pub fn find_contiguous_path(c: &CoalitionStructure) -> Option<PathWitness> {
    if c.n_agents() <= BRUTE_FORCE_MAX_AGENTS {
        find_contiguous_path_brute(c)
    } else {
        find_contiguous_path_c1p(c)
    }
}

/// Tries all `n!` orders.
pub fn find_contiguous_path_brute(c: &CoalitionStructure) -> Option<PathWitness> {
    let mut w = PathWitness::identity(c.n_agents());
    loop {
        if w.verify(c) {
            return Some(w);
        }
        if !next_permutation(&mut w.order) {
            return None;
        }
    }
}

/// Consecutive-ones test that scales past brute force.
///
/// Sets that overlap (intersect without nesting) are grouped into components.
/// Within a component the arrangement of its Venn regions is forced up to
/// reversal and is built one set at a time. Component unions are then
/// laminar, and each nested union sits inside one region of its parent, so
/// the final order is assembled recursively.
pub fn find_contiguous_path_c1p(c: &CoalitionStructure) -> Option<PathWitness> {
    let n = c.n_agents();
    let mut sets: Vec<FixedBitSet> = Vec::new();
    for k in c.coalitions() {
        if k.len() <= 1 || k.len() == n {
            continue;
        }
        let mut b = FixedBitSet::with_capacity(n + 1);
        for &j in k.members() {
            b.insert(j);
        }
        if !sets.contains(&b) {
            sets.push(b);
        }
    }

    let components = overlap_components(&sets);
    let mut arranged: Vec<Arranged> = Vec::new();
    for comp in &components {
        let classes = arrange_component(&sets, comp)?;
        let mut union = FixedBitSet::with_capacity(n + 1);
        for k in &classes {
            union.union_with(k);
        }
        arranged.push(Arranged { union, classes, single: comp.len() == 1 });
    }
    // A lone set equal to another component's union adds no constraint.
    let mut keep = vec![true; arranged.len()];
    for i in 0..arranged.len() {
        if arranged[i].single
            && (0..arranged.len()).any(|k| k != i && keep[k] && arranged[k].union == arranged[i].union)
        {
            keep[i] = false;
        }
    }
    let arranged: Vec<Arranged> = arranged.into_iter().zip(keep).filter(|(_, k)| *k).map(|(a, _)| a).collect();

    // Parent = smallest strictly larger union containing it.
    let count = arranged.len();
    let mut parent: Vec<Option<usize>> = vec![None; count];
    for i in 0..count {
        let mut best: Option<usize> = None;
        for k in 0..count {
            if k != i
                && arranged[i].union.is_subset(&arranged[k].union)
                && arranged[i].union != arranged[k].union
                && best.is_none_or(|b| arranged[k].union.count_ones(..) < arranged[b].union.count_ones(..))
            {
                best = Some(k);
            }
        }
        parent[i] = best;
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); count];
    let mut roots = Vec::new();
    for i in 0..count {
        match parent[i] {
            Some(p) => children[p].push(i),
            None => roots.push(i),
        }
    }
    let min_of = |i: usize| arranged[i].union.ones().next().unwrap_or(0);
    for list in children.iter_mut() {
        list.sort_by_key(|&i| min_of(i));
    }
    roots.sort_by_key(|&i| min_of(i));

    let mut order = Vec::with_capacity(n);
    let mut root_region = FixedBitSet::with_capacity(n + 1);
    root_region.insert_range(1..n + 1);
    emit_region(&root_region, &roots, &arranged, &children, &mut order)?;
    let w = PathWitness { order };
    w.verify(c).then_some(w)
}

struct Arranged {
    union: FixedBitSet,
    classes: Vec<FixedBitSet>,
    single: bool,
}

fn emit_region(
    region: &FixedBitSet,
    inside: &[usize],
    arranged: &[Arranged],
    children: &[Vec<usize>],
    order: &mut Vec<AgentId>,
) -> Option<()> {
    let mut covered = FixedBitSet::with_capacity(region.len());
    for &i in inside {
        emit_component(i, arranged, children, order)?;
        covered.union_with(&arranged[i].union);
    }
    order.extend(region.difference(&covered));
    Some(())
}

fn emit_component(i: usize, arranged: &[Arranged], children: &[Vec<usize>], order: &mut Vec<AgentId>) -> Option<()> {
    let a = &arranged[i];
    let mut placed = vec![false; children[i].len()];
    for class in &a.classes {
        let inside: Vec<usize> = children[i]
            .iter()
            .enumerate()
            .filter(|(_, &ch)| arranged[ch].union.is_subset(class))
            .map(|(k, &ch)| {
                placed[k] = true;
                ch
            })
            .collect();
        emit_region(class, &inside, arranged, children, order)?;
    }
    // A child straddling two regions means the structure is not contiguous.
    placed.iter().all(|&p| p).then_some(())
}

fn overlaps(a: &FixedBitSet, b: &FixedBitSet) -> bool {
    !a.is_disjoint(b) && !a.is_subset(b) && !b.is_subset(a)
}

/// Connected components of the overlap graph, each in BFS order so that
/// every set after the first overlaps an earlier one.
fn overlap_components(sets: &[FixedBitSet]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; sets.len()];
    let mut out = Vec::new();
    for start in 0..sets.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut head = 0;
        while head < comp.len() {
            let s = comp[head];
            head += 1;
            for t in 0..sets.len() {
                if !seen[t] && overlaps(&sets[s], &sets[t]) {
                    seen[t] = true;
                    comp.push(t);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Ordered regions of one overlap component, or `None` if its sets cannot
/// all be made consecutive.
fn arrange_component(sets: &[FixedBitSet], comp: &[usize]) -> Option<Vec<FixedBitSet>> {
    let mut classes = vec![sets[comp[0]].clone()];
    let mut union = sets[comp[0]].clone();
    for &idx in &comp[1..] {
        let s = &sets[idx];
        let fresh: FixedBitSet = s.difference(&union).into_bitset(s.len());
        let touched: Vec<usize> = (0..classes.len()).filter(|&k| !classes[k].is_disjoint(s)).collect();
        let (l, r) = (*touched.first()?, *touched.last()?);
        if touched.len() != r - l + 1 {
            return None;
        }
        let full = |k: usize| classes[k].is_subset(s);
        if (l + 1..r).any(|k| !full(k)) {
            return None;
        }
        let last = classes.len() - 1;
        if fresh.is_clear() {
            if l == r {
                return None;
            }
            split(&mut classes, r, s, false);
            split(&mut classes, l, s, true);
        } else if r == last && (l + 1..=last).all(full) {
            split(&mut classes, l, s, true);
            classes.push(fresh.clone());
        } else if l == 0 && (0..r).all(full) {
            split(&mut classes, r, s, false);
            classes.insert(0, fresh.clone());
        } else {
            return None;
        }
        union.union_with(&fresh);
    }
    Some(classes)
}

/// Splits class `k` into its parts outside and inside `s`, putting the
/// inside part on the right when `inside_right` holds.
fn split(classes: &mut Vec<FixedBitSet>, k: usize, s: &FixedBitSet, inside_right: bool) {
    let inside: FixedBitSet = classes[k].intersection(s).into_bitset(s.len());
    let outside: FixedBitSet = classes[k].difference(s).into_bitset(s.len());
    if outside.is_clear() {
        return;
    }
    let (first, second) = if inside_right { (outside, inside) } else { (inside, outside) };
    classes[k] = second;
    classes.insert(k, first);
}

trait IntoBitSet {
    fn into_bitset(self, len: usize) -> FixedBitSet;
}

impl<I: Iterator<Item = usize>> IntoBitSet for I {
    fn into_bitset(self, len: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(len);
        b.extend(self);
        b
    }
}

/// Builds a path for a laminar structure by recursively placing the largest
/// proper coalition first and the rest after it.
pub fn laminar_to_path(c: &CoalitionStructure) -> Result<PathWitness> {
    if !is_laminar(c) {
        return Err(Error::NotLaminar);
    }
    let mut coalitions: Vec<&Coalition> = c.coalitions().iter().collect();
    // Largest first, ties lexicographic: the first entry that fits is maximal.
    coalitions.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.members().cmp(b.members())));
    let mut order = Vec::with_capacity(c.n_agents());
    let all: Vec<AgentId> = (1..=c.n_agents()).collect();
    laminar_rec(&all, &coalitions, &mut order);
    let w = PathWitness { order };
    debug_assert!(w.verify(c));
    Ok(w)
}

fn laminar_rec(agents: &[AgentId], family: &[&Coalition], order: &mut Vec<AgentId>) {
    let mut stack: Vec<(Vec<AgentId>, Vec<&Coalition>)> = vec![(agents.to_vec(), family.to_vec())];
    // Explicit stack keeps deep nestings (thousands of agents) off the call stack.
    // Entries are processed left to right: the top is always the next block.
    while let Some((agents, family)) = stack.pop() {
        let proper = family.iter().find(|k| k.len() < agents.len());
        let Some(&c) = proper else {
            order.extend(agents);
            continue;
        };
        let inside: Vec<&Coalition> = family.iter().copied().filter(|k| k.len() < c.len() && k.is_subset(c)).collect();
        let outside: Vec<&Coalition> = family.iter().copied().filter(|k| !k.intersects(c)).collect();
        let rest: Vec<AgentId> = agents.iter().copied().filter(|&j| !c.contains(j)).collect();
        stack.push((rest, outside));
        stack.push((c.members().to_vec(), inside));
    }
}
