//! Instances on which a class of equilibria fails to exist.

use std::sync::Arc;

use crate::coalition::{Coalition, CoalitionStructure};
use crate::embedding::{verify_embedding, Circle, PlanarWitness};
use crate::error::{Error, Result};
use crate::rational::{coord, coord_frac, cost, Cost};
use crate::rsg::{derive_rsg, ResourceId, ResourceType, Rsg, RsgDerived};
use crate::structure::{is_laminar, PathWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Claim {
    NoSuperStrong,
    NoLaminar,
    NoContiguous,
    NoCentralized,
}

impl Claim {
    pub fn label(self) -> &'static str {
        match self {
            Claim::NoSuperStrong => "no super-strong equilibrium",
            Claim::NoLaminar => "no laminar equilibrium",
            Claim::NoContiguous => "no contiguous equilibrium",
            Claim::NoCentralized => "no centralized equilibrium",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub claim: Claim,
    pub game: Rsg,
    pub structure: CoalitionStructure,
    pub path: Option<PathWitness>,
    pub embedding: Option<PlanarWitness>,
}

fn table(values: &[i64]) -> Vec<Cost> {
    values.iter().map(|&v| cost(v)).collect()
}

/// Costs `1, 2, ..., n`.
pub fn linear_table(n: usize) -> Vec<Cost> {
    (1..=n as i64).map(cost).collect()
}

fn structure(n: usize, lists: &[&[usize]]) -> CoalitionStructure {
    CoalitionStructure::from_lists(n, &lists.iter().map(|l| l.to_vec()).collect::<Vec<_>>()).expect("fixture is valid")
}

/// Three agents, two identical linear resources, every coalition viable.
pub fn example1() -> Fixture {
    Fixture {
        name: "example1",
        claim: Claim::NoSuperStrong,
        game: Rsg::identical(3, 2, linear_table(3)).expect("valid"),
        structure: CoalitionStructure::all_nonempty(3),
        path: None,
        embedding: None,
    }
}

/// Six agents on two resources with a contiguous structure along 1..6.
pub fn theorem8() -> Fixture {
    let n = 6;
    let f1 = table(&[1, 2, 4, 5, 6, 7]);
    let f2 = linear_table(n);
    let c = CoalitionStructure::singletons(n)
        .with_added(structure(n, &[&[1, 2], &[3, 4], &[5, 6], &[1, 2, 3], &[4, 5, 6]]).coalitions().to_vec())
        .expect("valid");
    Fixture {
        name: "theorem8",
        claim: Claim::NoContiguous,
        game: Rsg::new(n, vec![f1, f2]).expect("valid"),
        structure: c,
        path: Some(PathWitness::identity(n)),
        embedding: None,
    }
}

/// Five agents on two identical resources with a centralized structure and
/// the drawn planar witness (squared radii).
pub fn theorem9() -> Fixture {
    let n = 5;
    let extra: &[(&[usize], usize, Cost)] = &[
        (&[1, 2], 1, cost(1)),
        (&[3, 4], 3, Cost::new(13, 4)),
        (&[5, 4], 5, Cost::new(25, 4)),
        (&[1, 2, 3, 5], 1, cost(20)),
        (&[5, 2, 3, 4], 5, cost(13)),
    ];
    let mut coalitions: Vec<Coalition> = (1..=n).map(|j| Coalition::new(vec![j]).unwrap()).collect();
    let mut circles: Vec<Circle> =
        (1..=n).map(|j| Circle { center: j, radius_sq: coord_frac(1, 4) }).collect();
    for (members, center, r2) in extra {
        coalitions.push(Coalition::new(members.to_vec()).unwrap());
        circles.push(Circle { center: *center, radius_sq: coord_frac(*r2.numer(), *r2.denom()) });
    }
    let positions = vec![
        (coord(4), coord(4)),
        (coord(4), coord(3)),
        (coord(1), coord(3)),
        (coord(0), coord_frac(3, 2)),
        (coord(2), coord(0)),
    ];
    Fixture {
        name: "theorem9",
        claim: Claim::NoCentralized,
        game: Rsg::identical(n, 2, linear_table(n)).expect("valid"),
        structure: CoalitionStructure::new(n, coalitions).expect("valid"),
        path: None,
        embedding: Some(PlanarWitness { positions, circles }),
    }
}

pub const EX2_AGENTS: usize = 14052;
pub const EX2_Y: usize = 1000;
pub const EX2_Z: usize = 1000;
pub const EX2_BLOCK: usize = 2342;
pub const EX2_ALPHA: i64 = 100;

/// Resource 0 is `x`, then the `y` resources, then the `z` resources.
pub fn ex2_x() -> ResourceId {
    0
}

pub fn ex2_y(k: usize) -> ResourceId {
    1 + k
}

pub fn ex2_z(k: usize) -> ResourceId {
    1 + EX2_Y + k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ex2Kind {
    X,
    Y,
    Z,
}

pub fn ex2_kind(r: ResourceId) -> Ex2Kind {
    if r == 0 {
        Ex2Kind::X
    } else if r <= EX2_Y {
        Ex2Kind::Y
    } else {
        Ex2Kind::Z
    }
}

/// `f(q) = q` up to `linear_to`, then `beta`, then `alpha`, then +1 per
/// extra agent.
fn ex2_table(n: usize, linear_to: i64, beta: i64) -> Vec<Cost> {
    (1..=n as i64)
        .map(|q| {
            if q <= linear_to {
                cost(q)
            } else if q == linear_to + 1 {
                cost(beta)
            } else {
                cost(EX2_ALPHA + (q - linear_to - 2))
            }
        })
        .collect()
}

/// 14052 agents, one `x` resource of quota 53, 1000 `y` resources of quota 8
/// and 1000 `z` resources of quota 7, with six disjoint blocks of 2342 agents
/// plus all singletons and the grand coalition.
pub fn example2() -> Fixture {
    let n = EX2_AGENTS;
    let fx: Arc<[Cost]> = Arc::from(ex2_table(n, 51, 98));
    let fy: Arc<[Cost]> = Arc::from(ex2_table(n, 6, 97));
    let fz: Arc<[Cost]> = Arc::from(ex2_table(n, 5, 96));
    let mut tables = vec![fx];
    tables.extend(std::iter::repeat_n(fy, EX2_Y));
    tables.extend(std::iter::repeat_n(fz, EX2_Z));
    let game = Rsg::from_shared(n, tables).expect("valid");
    let mut coalitions: Vec<Coalition> = (0..6)
        .map(|b| Coalition::new((b * EX2_BLOCK + 1..=(b + 1) * EX2_BLOCK).collect()).unwrap())
        .collect();
    coalitions.extend((1..=n).map(|j| Coalition::new(vec![j]).unwrap()));
    coalitions.push(Coalition::new((1..=n).collect()).unwrap());
    Fixture {
        name: "example2",
        claim: Claim::NoLaminar,
        game,
        structure: CoalitionStructure::new(n, coalitions).expect("valid"),
        path: None,
        embedding: None,
    }
}

/// The six blocks of the example 2 structure.
pub fn ex2_blocks(f: &Fixture) -> Vec<&Coalition> {
    f.structure.coalitions().iter().filter(|c| c.len() == EX2_BLOCK).collect()
}

/// Facts about example 2 that the refuter relies on, all checked exactly.
#[derive(Clone, Debug)]
pub struct Example2Facts {
    pub derived: RsgDerived,
    pub low_count: usize,
    pub beta_x: Cost,
    pub beta_y: Cost,
    pub beta_z: Cost,
    pub fx_below_beta: Cost,
}

pub fn check_example2(f: &Fixture) -> Result<Example2Facts> {
    let g = &f.game;
    let fail = |msg: String| Err(Error::InvalidGame(format!("example 2: {msg}")));
    if g.n_agents() != EX2_AGENTS || g.n_resources() != 1 + EX2_Y + EX2_Z {
        return fail("wrong size".into());
    }
    let d = derive_rsg(g);
    if d.alpha != cost(EX2_ALPHA) {
        return fail(format!("minmaxcost is {}", d.alpha));
    }
    if d.kind.iter().any(|k| *k != ResourceType::Type1) {
        return fail("some resource is not Type 1".into());
    }
    for r in 0..g.n_resources() {
        let want = match ex2_kind(r) {
            Ex2Kind::X => 53,
            Ex2Kind::Y => 8,
            Ex2Kind::Z => 7,
        };
        if d.quota[r] != want {
            return fail(format!("resource {} has quota {}", r + 1, d.quota[r]));
        }
    }
    let beta_x = d.beta[ex2_x()].unwrap();
    let beta_y = d.beta[ex2_y(0)].unwrap();
    let beta_z = d.beta[ex2_z(0)].unwrap();
    let fx_below_beta = g.cost(ex2_x(), 51);
    if !(beta_x > beta_y && beta_y > beta_z && beta_z > fx_below_beta) {
        return fail("beta chain does not hold".into());
    }
    if (1..=EX2_Y).any(|k| d.beta[ex2_y(k - 1)] != Some(beta_y)) || (0..EX2_Z).any(|k| d.beta[ex2_z(k)] != Some(beta_z)) {
        return fail("beta values differ within a resource family".into());
    }
    let low_count = d.low_count(g.n_agents());
    if low_count != 1001 {
        return fail(format!("{low_count} low resources"));
    }
    let blocks = ex2_blocks(f);
    if blocks.len() != 6 || !is_laminar(&f.structure) {
        return fail("structure is not six disjoint blocks in a laminar family".into());
    }
    Ok(Example2Facts { derived: d, low_count, beta_x, beta_y, beta_z, fx_below_beta })
}

/// The small fixtures whose allocation spaces are enumerated exhaustively.
pub fn small_fixtures() -> Vec<Fixture> {
    vec![example1(), theorem8(), theorem9()]
}

/// Checks the witness attached to a fixture.
pub fn check_fixture_witness(f: &Fixture) -> Result<()> {
    if let Some(p) = &f.path {
        p.check(&f.structure)?;
    }
    if let Some(e) = &f.embedding {
        if !verify_embedding(&f.structure, e) {
            return Err(Error::InvalidWitness(format!("{} embedding does not match its structure", f.name)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::is_partition;

    #[test]
    fn small_fixture_witnesses_verify() {
        for f in small_fixtures() {
            check_fixture_witness(&f).unwrap();
        }
        assert!(!is_laminar(&theorem8().structure));
        assert!(!is_laminar(&theorem9().structure));
    }

    #[test]
    fn theorem8_and_9_derived() {
        let d8 = derive_rsg(&theorem8().game);
        assert_eq!(d8.alpha, cost(4));
        assert_eq!(d8.quota, vec![3, 4]);
        let d9 = derive_rsg(&theorem9().game);
        assert_eq!(d9.alpha, cost(3));
        assert_eq!(d9.quota, vec![3, 3]);
    }

    #[test]
    fn example2_constraints() {
        let f = example2();
        let facts = check_example2(&f).unwrap();
        assert_eq!(facts.low_count, 1001);
        assert_eq!(facts.beta_x, cost(98));
        assert_eq!(facts.beta_y, cost(97));
        assert_eq!(facts.beta_z, cost(96));
        assert!(!is_partition(&f.structure));
    }
}
