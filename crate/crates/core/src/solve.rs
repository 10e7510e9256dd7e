//! Routes an instance and an equilibrium notion to the applicable
//! constructor, falling back to exhaustive search.

use std::fmt;
use std::str::FromStr;

use crate::coalition::CoalitionStructure;
use crate::construction::{algorithm1_round_robin, construct_nash, construct_two_resource_laminar_eq, TwoResourceCase};
use crate::embedding::{check_embedding, contiguous_to_embedding};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rsg::{Allocation, Rsg};
use crate::search::{find_equilibrium_by_search, Budget, Certificate, SearchOutcome};
use crate::stability::is_structure_stable_budgeted;
use crate::structure::{find_contiguous_path, is_laminar, is_partition, laminar_to_path, PathWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Notion {
    Nash,
    Partition,
    Laminar,
    Contiguous,
    Centralized,
    SuperStrong,
}

impl Notion {
    pub const ALL: [Notion; 6] = [
        Notion::Nash,
        Notion::Partition,
        Notion::Laminar,
        Notion::Contiguous,
        Notion::Centralized,
        Notion::SuperStrong,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Notion::Nash => "nash",
            Notion::Partition => "partition",
            Notion::Laminar => "laminar",
            Notion::Contiguous => "contiguous",
            Notion::Centralized => "centralized",
            Notion::SuperStrong => "super-strong",
        }
    }
}

impl FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Notion::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown notion \"{s}\"")))
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a solution was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    NashFill,
    RoundRobin(PathWitness),
    TwoResource { case: TwoResourceCase, steps: usize },
    Search,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::NashFill => write!(f, "quota fill"),
            Method::RoundRobin(p) => {
                let order: Vec<String> = p.order.iter().map(|j| j.to_string()).collect();
                write!(f, "round robin along path {}", order.join("-"))
            }
            Method::TwoResource { case, steps } => write!(f, "two-resource laminar construction ({case:?}, {steps} steps)"),
            Method::Search => write!(f, "exhaustive search"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Solution {
    /// A stable allocation; `coalitions_checked` coalitions were confirmed
    /// stable by the exact oracle.
    Found { allocation: Allocation, coalitions_checked: usize },
    /// Certified non-existence.
    None(Certificate),
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub notion: Notion,
    pub structure: CoalitionStructure,
    pub method: Method,
    pub solution: Solution,
}

/// The structure the notion is evaluated against. Nash and super-strong fix
/// their own structure; the other notions use the instance's coalitions
/// after checking they belong to the notion's class.
pub fn structure_for(inst: &Instance, notion: Notion) -> Result<CoalitionStructure> {
    let n = inst.game.n_agents();
    let c = &inst.structure;
    let reject = |class: &str| Err(Error::InvalidStructure(format!("the instance's coalitions are not {class}")));
    match notion {
        Notion::Nash => Ok(CoalitionStructure::singletons(n)),
        Notion::SuperStrong => Ok(CoalitionStructure::all_nonempty(n)),
        Notion::Partition if !is_partition(c) => reject("a partition"),
        Notion::Laminar if !is_laminar(c) => reject("laminar"),
        Notion::Contiguous => {
            match &inst.path {
                Some(p) => p.check(c)?,
                None if find_contiguous_path(c).is_none() => return reject("contiguous"),
                None => {}
            }
            Ok(c.clone())
        }
        Notion::Centralized => {
            match &inst.embedding {
                Some(w) => check_embedding(c, w)?,
                None => {
                    let path = find_contiguous_path(c).ok_or_else(|| {
                        Error::InvalidStructure("centralized notion needs an embedding for a non-contiguous structure".into())
                    })?;
                    contiguous_to_embedding(c, &path)?;
                }
            }
            Ok(c.clone())
        }
        Notion::Partition | Notion::Laminar => Ok(c.clone()),
    }
}

fn path_for(inst: &Instance, c: &CoalitionStructure) -> Option<PathWitness> {
    if let Some(p) = &inst.path {
        if p.verify(c) {
            return Some(p.clone());
        }
    }
    if is_laminar(c) {
        return laminar_to_path(c).ok();
    }
    find_contiguous_path(c)
}

/// Solves and verifies. Constructed allocations are re-checked with the
/// exact oracle; search results carry a replayable certificate.
pub fn solve(inst: &Instance, notion: Notion, budget: Budget) -> Result<SolveReport> {
    let g = &inst.game;
    let c = structure_for(inst, notion)?;
    let (method, allocation) = match notion {
        Notion::Nash => (Method::NashFill, Some(construct_nash(g))),
        _ if g.is_identical() && notion != Notion::SuperStrong => match path_for(inst, &c) {
            Some(p) => {
                let a = algorithm1_round_robin(g, &p)?;
                (Method::RoundRobin(p), Some(a))
            }
            None => (Method::Search, None),
        },
        Notion::Partition | Notion::Laminar if g.n_resources() == 2 => {
            let out = construct_two_resource_laminar_eq(g, &c)?;
            (Method::TwoResource { case: out.case, steps: out.steps.len() }, Some(out.allocation))
        }
        _ => (Method::Search, None),
    };
    let solution = match allocation {
        Some(a) => {
            verify_found(g, &a, &c, budget)?;
            Solution::Found { allocation: a, coalitions_checked: c.len() }
        }
        None => match find_equilibrium_by_search(g, &c, budget)? {
            SearchOutcome::Found(a) => Solution::Found { allocation: a, coalitions_checked: c.len() },
            SearchOutcome::None(cert) => {
                cert.check(g, &c)?;
                Solution::None(cert)
            }
        },
    };
    Ok(SolveReport { notion, structure: c, method, solution })
}

fn verify_found(g: &Rsg, a: &Allocation, c: &CoalitionStructure, budget: Budget) -> Result<()> {
    let report = is_structure_stable_budgeted(g, a, c, budget.deviations)?;
    match report.witness {
        None => Ok(()),
        Some(w) => Err(Error::Construction(format!("constructed allocation {a} is not stable: {w}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1, theorem8, theorem9};
    use crate::rational::cost;

    fn inst(f: crate::fixtures::Fixture) -> Instance {
        Instance::from_fixture(&f)
    }

    #[test]
    fn notion_names_round_trip() {
        for n in Notion::ALL {
            assert_eq!(n.name().parse::<Notion>().unwrap(), n);
        }
        assert!("strong".parse::<Notion>().is_err());
    }

    #[test]
    fn fixtures_have_no_solution() {
        let r = solve(&inst(example1()), Notion::SuperStrong, Budget::default()).unwrap();
        assert!(matches!(r.solution, Solution::None(ref c) if c.entries.len() == 8));
        let r = solve(&inst(theorem8()), Notion::Contiguous, Budget::default()).unwrap();
        assert_eq!(r.method, Method::Search);
        assert!(matches!(r.solution, Solution::None(_)));
        let r = solve(&inst(theorem9()), Notion::Centralized, Budget::default()).unwrap();
        match r.solution {
            Solution::None(cert) => assert_eq!(cert.entries.len(), 32),
            Solution::Found { allocation, .. } => panic!("found {allocation}"),
        }
    }

    #[test]
    fn constructors_are_routed() {
        let mut i = inst(theorem8());
        i.structure = CoalitionStructure::from_lists(6, &[vec![1, 2], vec![3, 4], vec![5, 6], vec![1, 2, 3, 4, 5, 6]]).unwrap();
        i.path = None;
        let r = solve(&i, Notion::Laminar, Budget::default()).unwrap();
        assert!(matches!(r.method, Method::TwoResource { .. }));
        assert!(matches!(r.solution, Solution::Found { .. }));
        assert!(solve(&i, Notion::Partition, Budget::default()).is_err());

        let mut i = inst(theorem8());
        i.game = Rsg::identical(6, 2, (1..=6).map(cost).collect()).unwrap();
        let r = solve(&i, Notion::Contiguous, Budget::default()).unwrap();
        assert!(matches!(r.method, Method::RoundRobin(_)));
        assert!(matches!(r.solution, Solution::Found { .. }));

        let r = solve(&inst(theorem9()), Notion::Nash, Budget::default()).unwrap();
        assert_eq!(r.structure, CoalitionStructure::singletons(5));
        assert!(matches!(r.solution, Solution::Found { .. }));
    }

    #[test]
    fn budget_refusal_is_an_error() {
        let err = solve(&inst(theorem8()), Notion::Contiguous, Budget::allocations(3)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}
