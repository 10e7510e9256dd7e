//! Proof-guided refutation of Nash allocations in the example 2 instance.
//!
//! Every Nash allocation of that instance admits a profitable deviation by a
//! coalition of its laminar structure. The refuter walks the case analysis:
//! first the grand coalition when `x` is full, then the grand coalition when
//! many `y` resources are full, and otherwise a block coalition that has two
//! members on a full `z` resource and at most one on some `x`/`y` resource
//! below quota.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coalition::{AgentId, Coalition};
use crate::error::{Error, Result};
use crate::fixtures::{ex2_blocks, ex2_kind, ex2_x, Ex2Kind, Fixture, EX2_AGENTS};
use crate::rsg::{classify_low_high, Allocation, ResourceId, RsgDerived};
use crate::stability::{validate_deviation, Deviation, Move, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefuteStep {
    /// `x` at quota: two low resources trade occupants with `x`.
    XHigh,
    /// At least eight full `y` resources: a three-way rotation x -> y -> z -> x.
    ManyHighY,
    /// A block has no member on some low `x`/`y` resource: one member moves there.
    BlockMoveOne,
    /// A block has exactly one member there: two members swap in for it.
    BlockSwapTwoForOne,
}

#[derive(Clone, Debug)]
pub struct Refutation {
    pub step: RefuteStep,
    pub witness: Witness,
}

impl Refutation {
    pub fn coalition(&self) -> &Coalition {
        &self.witness.deviation.coalition
    }
}

/// Finds and validates a profitable deviation for a Nash allocation of the
/// example 2 fixture. Fails loudly if no case applies.
pub fn refute_example2(f: &Fixture, d: &RsgDerived, a: &Allocation) -> Result<Refutation> {
    let g = &f.game;
    let lh = classify_low_high(g, d, a)?;
    let m = g.n_resources();
    let mut is_low = vec![false; m];
    for &r in &lh.low {
        is_low[r] = true;
    }
    let members = a.sets();
    let grand = || Coalition::new((1..=g.n_agents()).collect()).expect("nonempty");

    let (step, deviation) = if !is_low[ex2_x()] {
        let pair: Vec<ResourceId> = lh.low.iter().copied().take(2).collect();
        if pair.len() < 2 {
            return Err(Error::Refutation("fewer than two low resources".into()));
        }
        let (i, k) = (pair[0], pair[1]);
        let moves = vec![
            Move { from: ex2_x(), to: i, count: d.quota[i] },
            Move { from: ex2_x(), to: k, count: d.quota[k] },
            Move { from: i, to: ex2_x(), count: members[i].len() },
            Move { from: k, to: ex2_x(), count: members[k].len() },
        ];
        (RefuteStep::XHigh, Deviation { coalition: grand(), moves })
    } else if count_kind(&lh.high, Ex2Kind::Y) >= 8 {
        let ys: Vec<ResourceId> = lh.high.iter().copied().filter(|&r| ex2_kind(r) == Ex2Kind::Y).take(7).collect();
        let zs: Vec<ResourceId> = lh.low.iter().copied().filter(|&r| ex2_kind(r) == Ex2Kind::Z).take(8).collect();
        if zs.len() < 8 {
            return Err(Error::Refutation("fewer than eight low z resources".into()));
        }
        let mut moves: Vec<Move> = ys.iter().map(|&y| Move { from: ex2_x(), to: y, count: 7 }).collect();
        // Deal the y occupants, resource by resource, seven to each z.
        let mut slot = 0usize;
        for &y in &ys {
            let mut left = members[y].len();
            while left > 0 {
                let z = zs[slot / 7];
                let take = left.min(7 - slot % 7);
                moves.push(Move { from: y, to: z, count: take });
                left -= take;
                slot += take;
            }
        }
        moves.extend(zs.iter().map(|&z| Move { from: z, to: ex2_x(), count: members[z].len() }));
        (RefuteStep::ManyHighY, Deviation { coalition: grand(), moves })
    } else {
        block_deviation(f, a, &is_low, &members)?
    };
    let witness = validate_deviation(g, a, &deviation)?;
    Ok(Refutation { step, witness })
}

fn count_kind(resources: &[ResourceId], kind: Ex2Kind) -> usize {
    resources.iter().filter(|&&r| ex2_kind(r) == kind).count()
}

fn block_deviation(
    f: &Fixture,
    a: &Allocation,
    is_low: &[bool],
    members: &[Vec<AgentId>],
) -> Result<(RefuteStep, Deviation)> {
    let blocks = ex2_blocks(f);
    let on_high_z = |c: &Coalition| {
        c.members()
            .iter()
            .filter(|&&j| {
                let r = a.resource_of(j);
                ex2_kind(r) == Ex2Kind::Z && !is_low[r]
            })
            .count()
    };
    // The block with the most members on full z resources (first on ties).
    let c = blocks
        .iter()
        .copied()
        .max_by(|p, q| on_high_z(p).cmp(&on_high_z(q)).then_with(|| q.min().cmp(&p.min())))
        .ok_or_else(|| Error::Refutation("no blocks".into()))?;
    let in_c = |r: ResourceId| -> Vec<AgentId> { members[r].iter().copied().filter(|&j| c.contains(j)).collect() };
    let (z, _) = (0..a.n_resources())
        .filter(|&r| ex2_kind(r) == Ex2Kind::Z && !is_low[r])
        .map(|r| (r, in_c(r)))
        .find(|(_, on)| on.len() >= 2)
        .ok_or_else(|| Error::Refutation(format!("block {} has no full z resource with two members", c.min())))?;
    let (y, on_y) = (0..a.n_resources())
        .filter(|&r| ex2_kind(r) != Ex2Kind::Z && is_low[r])
        .map(|r| (r, in_c(r)))
        .find(|(_, on)| on.len() <= 1)
        .ok_or_else(|| Error::Refutation("every low x/y resource holds two block members".into()))?;
    if on_y.is_empty() {
        let moves = vec![Move { from: z, to: y, count: 1 }];
        Ok((RefuteStep::BlockMoveOne, Deviation { coalition: c.clone(), moves }))
    } else {
        let moves = vec![Move { from: z, to: y, count: 2 }, Move { from: y, to: z, count: 1 }];
        Ok((RefuteStep::BlockSwapTwoForOne, Deviation { coalition: c.clone(), moves }))
    }
}

/// Places agents in a uniformly random order onto the given loads.
pub fn place_randomly<R: Rng>(loads: &[usize], rng: &mut R) -> Allocation {
    let n: usize = loads.iter().sum();
    let mut agents: Vec<AgentId> = (1..=n).collect();
    agents.shuffle(rng);
    let mut assignment = vec![0; n];
    let mut it = agents.into_iter();
    for (r, &l) in loads.iter().enumerate() {
        for j in it.by_ref().take(l) {
            assignment[j - 1] = r;
        }
    }
    Allocation::from_assignment(loads.len(), assignment).expect("loads are consistent")
}

/// A uniformly random Nash load pattern (1001 low resources out of 2001)
/// with agents placed uniformly.
pub fn sample_nash_uniform<R: Rng>(d: &RsgDerived, rng: &mut R) -> Allocation {
    let m = d.quota.len();
    let low_count = d.low_count(EX2_AGENTS);
    let mut idx: Vec<ResourceId> = (0..m).collect();
    idx.shuffle(rng);
    let mut loads = d.quota.clone();
    for &r in &idx[..low_count] {
        loads[r] -= 1;
    }
    place_randomly(&loads, rng)
}

/// Nash allocations with `x` low and at most seven full `y` resources, the
/// regime handled by block deviations. Uniform sampling almost never lands
/// there.
pub fn sample_nash_block_regime<R: Rng>(d: &RsgDerived, rng: &mut R) -> Allocation {
    let m = d.quota.len();
    let low_count = d.low_count(EX2_AGENTS);
    let high_y = rng.gen_range(0..=7usize);
    let mut ys: Vec<ResourceId> = (0..m).filter(|&r| ex2_kind(r) == Ex2Kind::Y).collect();
    let mut zs: Vec<ResourceId> = (0..m).filter(|&r| ex2_kind(r) == Ex2Kind::Z).collect();
    ys.shuffle(rng);
    zs.shuffle(rng);
    let mut loads = d.quota.clone();
    loads[ex2_x()] -= 1;
    let low_y = ys.len() - high_y;
    for &r in &ys[..low_y] {
        loads[r] -= 1;
    }
    let low_z = low_count - 1 - low_y;
    for &r in &zs[..low_z] {
        loads[r] -= 1;
    }
    place_randomly(&loads, rng)
}
