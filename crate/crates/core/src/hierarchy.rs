//! Machine-checked witnesses for the strict inclusions between structure
//! classes: Nash ⊂ partition ⊂ laminar ⊂ contiguous ⊂ centralized, and the
//! exclusion of the full power set from all of them.

use std::fmt;

use crate::coalition::{AgentId, CoalitionStructure};
use crate::embedding::{check_embedding, Circle, PlanarWitness};
use crate::rational::coord;
use crate::structure::{
    find_contiguous_path, find_contiguous_path_brute, first_crossing_pair, is_laminar, is_nash_structure,
    is_partition, PathWitness,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StructureClass {
    Nash,
    Partition,
    Laminar,
    Contiguous,
    Centralized,
}

impl StructureClass {
    pub fn name(self) -> &'static str {
        match self {
            StructureClass::Nash => "nash",
            StructureClass::Partition => "partition",
            StructureClass::Laminar => "laminar",
            StructureClass::Contiguous => "contiguous",
            StructureClass::Centralized => "centralized",
        }
    }
}

/// One membership or non-membership fact, with what was checked.
#[derive(Clone, Debug)]
pub struct ClassFact {
    pub structure: CoalitionStructure,
    pub class: StructureClass,
    pub member: bool,
    pub holds: bool,
    pub evidence: String,
}

/// A strict inclusion `lower ⊂ upper` witnessed by a structure in `upper`
/// but not in `lower`.
#[derive(Clone, Debug)]
pub struct HierarchyClaim {
    pub title: String,
    pub facts: Vec<ClassFact>,
}

impl HierarchyClaim {
    pub fn holds(&self) -> bool {
        self.facts.iter().all(|f| f.holds)
    }
}

#[derive(Clone, Debug)]
pub struct HierarchyReport {
    pub n_agents: usize,
    pub claims: Vec<HierarchyClaim>,
}

impl HierarchyReport {
    pub fn all_hold(&self) -> bool {
        self.claims.iter().all(HierarchyClaim::holds)
    }
}

impl fmt::Display for HierarchyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "agents: {}", self.n_agents)?;
        if self.claims.is_empty() {
            writeln!(f, "no strict inclusion is witnessed with fewer than 2 agents")?;
        }
        for claim in &self.claims {
            writeln!(f, "[{}] {}", if claim.holds() { "ok" } else { "FAIL" }, claim.title)?;
            for fact in &claim.facts {
                writeln!(
                    f,
                    "    {} {} {}: {} ({})",
                    fact.structure,
                    if fact.member { "in" } else { "not in" },
                    fact.class.name(),
                    if fact.holds { "verified" } else { "refuted" },
                    fact.evidence
                )?;
            }
        }
        Ok(())
    }
}

fn structure(n: usize, lists: &[&[AgentId]]) -> CoalitionStructure {
    CoalitionStructure::from_lists(n, &lists.iter().map(|l| l.to_vec()).collect::<Vec<_>>()).expect("valid lists")
}

fn fact(c: &CoalitionStructure, class: StructureClass, member: bool, found: bool, evidence: String) -> ClassFact {
    ClassFact { structure: c.clone(), class, member, holds: found == member, evidence }
}

fn nash_fact(c: &CoalitionStructure, member: bool) -> ClassFact {
    let found = is_nash_structure(c);
    let evidence = if found { "exactly the singletons" } else { "differs from the singletons" };
    fact(c, StructureClass::Nash, member, found, evidence.into())
}

fn partition_fact(c: &CoalitionStructure, member: bool) -> ClassFact {
    let found = is_partition(c);
    let evidence = if found { "disjoint cover" } else { "some agent is in zero or several coalitions" };
    fact(c, StructureClass::Partition, member, found, evidence.into())
}

fn laminar_fact(c: &CoalitionStructure, member: bool) -> ClassFact {
    let found = is_laminar(c);
    let evidence = match first_crossing_pair(c) {
        Some((p, q)) => format!("{p} and {q} cross"),
        None => "every intersecting pair is nested".into(),
    };
    fact(c, StructureClass::Laminar, member, found, evidence)
}

fn contiguous_fact(c: &CoalitionStructure, member: bool) -> ClassFact {
    let found = find_contiguous_path(c);
    let brute = if c.n_agents() <= 8 { Some(find_contiguous_path_brute(c).is_some()) } else { None };
    let agrees = brute.is_none_or(|b| b == found.is_some());
    let evidence = match (&found, brute) {
        (Some(p), _) => format!("path {}", path_text(p)),
        (None, Some(_)) => format!("none of the {} orders works", factorial(c.n_agents())),
        (None, None) => "consecutive-ones test fails".into(),
    };
    let mut f = fact(c, StructureClass::Contiguous, member, found.is_some(), evidence);
    f.holds &= agrees && found.as_ref().is_none_or(|p| p.verify(c));
    f
}

fn centralized_fact(c: &CoalitionStructure, w: &PlanarWitness) -> ClassFact {
    let (found, evidence) = match check_embedding(c, w) {
        Ok(()) => (true, "embedding verified exactly".to_string()),
        Err(e) => (false, e.to_string()),
    };
    fact(c, StructureClass::Centralized, true, found, evidence)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn path_text(p: &PathWitness) -> String {
    p.order.iter().map(|j| j.to_string()).collect::<Vec<_>>().join("-")
}

/// Adds singletons `{3}, ..., {n}` so that `{{1,2}}` is a partition of N.
fn padded_pair(n: usize) -> CoalitionStructure {
    let mut lists = vec![vec![1, 2]];
    lists.extend((3..=n).map(|j| vec![j]));
    CoalitionStructure::from_lists(n, &lists).expect("valid lists")
}

/// Four agents on the corners of a unit square, each the center of a unit
/// circle; agents 5.. sit far away on the x-axis.
pub fn square_structure(n: usize) -> (CoalitionStructure, PlanarWitness) {
    assert!(n >= 4, "the square structure needs four agents");
    let c = structure(n, &[&[1, 2, 3], &[2, 3, 4], &[3, 4, 1], &[4, 1, 2]]);
    let mut positions = vec![(coord(0), coord(0)), (coord(1), coord(0)), (coord(1), coord(1)), (coord(0), coord(1))];
    positions.extend((5..=n).map(|j| (coord(10 * j as i64), coord(0))));
    let circles = [2, 3, 4, 1].iter().map(|&center| Circle { center, radius_sq: coord(1) }).collect();
    (c, PlanarWitness { positions, circles })
}

/// Center choices for the circles of `{1,2}`, `{2,3}` and `{1,3}` that are
/// not ruled out by distance inequalities. Each circle centered at `a` with
/// other member `b` must exclude the third agent `t`, forcing
/// `d(a,t) > d(a,b)`; a set of choices is infeasible when these strict
/// inequalities over the three pairwise distances contain a cycle.
pub fn feasible_pair_centers() -> Vec<[AgentId; 3]> {
    let pairs = [(1, 2, 3), (2, 3, 1), (1, 3, 2)];
    let dist = |a: AgentId, b: AgentId| -> usize {
        match (a.min(b), a.max(b)) {
            (1, 2) => 0,
            (2, 3) => 1,
            _ => 2,
        }
    };
    let mut feasible = Vec::new();
    for choice in 0..8u32 {
        let mut centers = [0; 3];
        // greater[u][v]: distance u strictly exceeds distance v.
        let mut greater = [[false; 3]; 3];
        for (k, &(p, q, t)) in pairs.iter().enumerate() {
            let (a, b) = if choice >> k & 1 == 0 { (p, q) } else { (q, p) };
            centers[k] = a;
            greater[dist(a, t)][dist(a, b)] = true;
        }
        for k in 0..3 {
            for u in 0..3 {
                for v in 0..3 {
                    greater[u][v] |= greater[u][k] && greater[k][v];
                }
            }
        }
        if !(0..3).any(|u| greater[u][u]) {
            feasible.push(centers);
        }
    }
    feasible
}

fn power_set_claims(n: usize) -> HierarchyClaim {
    let full = CoalitionStructure::all_nonempty(n);
    let mut facts = vec![
        nash_fact(&full, false),
        partition_fact(&full, false),
        laminar_fact(&full, false),
        contiguous_fact(&full, false),
    ];
    let feasible = feasible_pair_centers();
    facts.push(ClassFact {
        structure: full.clone(),
        class: StructureClass::Centralized,
        member: false,
        holds: feasible.is_empty(),
        evidence: "each of the 8 center choices for {1,2}, {2,3}, {1,3} yields a cyclic strict order on d12, d23, d13"
            .into(),
    });
    HierarchyClaim { title: "the full power set is in none of the classes".into(), facts }
}

/// Checks every strictness witness that applies with `n` agents.
pub fn hierarchy_demo(n: usize) -> HierarchyReport {
    let mut claims = Vec::new();
    if n >= 2 {
        let pair = padded_pair(n);
        claims.push(HierarchyClaim {
            title: "nash ⊂ partition".into(),
            facts: vec![nash_fact(&pair, false), partition_fact(&pair, true)],
        });
        let nested = structure(n, &[&[1], &[1, 2]]);
        claims.push(HierarchyClaim {
            title: "partition ⊂ laminar".into(),
            facts: vec![partition_fact(&nested, false), laminar_fact(&nested, true)],
        });
    }
    if n >= 3 {
        let chain = structure(n, &[&[1, 2], &[2, 3]]);
        claims.push(HierarchyClaim {
            title: "laminar ⊂ contiguous".into(),
            facts: vec![laminar_fact(&chain, false), contiguous_fact(&chain, true)],
        });
    }
    if n >= 4 {
        let (square, w) = square_structure(n);
        claims.push(HierarchyClaim {
            title: "contiguous ⊂ centralized".into(),
            facts: vec![contiguous_fact(&square, false), centralized_fact(&square, &w)],
        });
    }
    // The power set has 2^n - 1 coalitions; the witness only needs n = 3.
    if n == 3 {
        claims.push(power_set_claims(n));
    }
    HierarchyReport { n_agents: n, claims }
}

/// Class memberships decidable from the structure alone (centralized needs
/// a supplied embedding).
pub fn memberships(c: &CoalitionStructure) -> Vec<(StructureClass, bool)> {
    vec![
        (StructureClass::Nash, is_nash_structure(c)),
        (StructureClass::Partition, is_partition(c)),
        (StructureClass::Laminar, is_laminar(c)),
        (StructureClass::Contiguous, find_contiguous_path(c).is_some()),
    ]
}
