//! Exhaustive equilibrium search and non-existence certificates.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::coalition::{AgentId, CoalitionStructure};
use crate::error::{Error, Result};
use crate::rsg::{Allocation, Rsg};
use crate::stability::{is_profitable, is_structure_stable_budgeted, replay, Deviation, Move, Witness, DEFAULT_BUDGET};

/// Upper bound on allocations examined by a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub allocations: u64,
    /// Per-coalition cap passed to the deviation oracle.
    pub deviations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { allocations: 2_000_000, deviations: DEFAULT_BUDGET }
    }
}

impl Budget {
    pub fn allocations(allocations: u64) -> Self {
        Self { allocations, ..Self::default() }
    }
}

/// One refuted allocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateEntry {
    pub allocation: Allocation,
    pub witness: Witness,
}

impl fmt::Display for CertificateEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.witness;
        write!(f, "{} -> {} ->", self.allocation, w.deviation.coalition)?;
        for mv in &w.deviation.moves {
            write!(f, " r{}>r{}:{}", mv.from + 1, mv.to + 1, mv.count)?;
        }
        write!(f, " | costs")?;
        for o in &w.outcomes {
            write!(f, " {}:{}>{}", o.agent, o.before, o.after)?;
        }
        Ok(())
    }
}

/// How the enumerated allocations relate to the full allocation space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every one of the `m^n` allocations.
    Full,
    /// One representative per orbit under permutations of agents that
    /// belong to exactly the same coalitions. Classes are listed by agent.
    Symmetry(Vec<Vec<AgentId>>),
}

/// Evidence that no allocation is stable: a profitable deviation by a
/// coalition of the structure for every allocation in the covered space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub coverage: Coverage,
    pub entries: Vec<CertificateEntry>,
}

impl Certificate {
    /// Replays every entry and checks that the entries cover the space.
    pub fn check(&self, g: &Rsg, c: &CoalitionStructure) -> Result<()> {
        let m = g.n_resources();
        let n = g.n_agents();
        let expected = match &self.coverage {
            Coverage::Full => (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX),
            Coverage::Symmetry(classes) => {
                if classes != &membership_classes(c) {
                    return Err(Error::InvalidWitness("symmetry classes do not match the structure".into()));
                }
                orbit_count(classes, m)
            }
        };
        if self.entries.len() as u128 != expected {
            return Err(Error::InvalidWitness(format!(
                "certificate has {} entries, the space has {expected}",
                self.entries.len()
            )));
        }
        let mut seen = HashSet::new();
        for (k, e) in self.entries.iter().enumerate() {
            e.allocation.check_against(g)?;
            if let Coverage::Symmetry(classes) = &self.coverage {
                if !is_canonical(&e.allocation, classes) {
                    return Err(Error::InvalidWitness(format!("entry {} is not an orbit representative", k + 1)));
                }
            }
            if !seen.insert(e.allocation.assignment().to_vec()) {
                return Err(Error::InvalidWitness(format!("entry {} repeats an allocation", k + 1)));
            }
            if !c.contains(&e.witness.deviation.coalition) {
                return Err(Error::InvalidWitness(format!("entry {} uses a coalition outside the structure", k + 1)));
            }
            let fresh = replay(g, &e.allocation, &e.witness.deviation)?;
            if fresh != e.witness || !is_profitable(&fresh) {
                return Err(Error::InvalidWitness(format!("entry {} does not replay as profitable", k + 1)));
            }
        }
        Ok(())
    }
}

impl Certificate {
    /// Line format: a `coverage:` header, an `entries:` count, then one
    /// entry per line as printed by [`CertificateEntry`]'s `Display`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("coverage: ");
        match &self.coverage {
            Coverage::Full => out.push_str("full"),
            Coverage::Symmetry(classes) => {
                out.push_str("symmetry");
                for cl in classes {
                    out.push(' ');
                    out.push_str(&braced(cl));
                }
            }
        }
        out.push_str(&format!("\nentries: {}\n", self.entries.len()));
        for e in &self.entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    /// Reads the line format back, replaying each deviation against `g`.
    /// Listed costs must match the replay.
    pub fn parse(text: &str, g: &Rsg) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let bad = |line: usize, msg: &str| Error::Parse(format!("certificate line {}: {msg}", line + 1));
        let (k, header) = lines.next().ok_or_else(|| bad(0, "empty certificate"))?;
        let coverage = match header.trim().strip_prefix("coverage:").map(str::trim) {
            Some("full") => Coverage::Full,
            Some(rest) if rest.starts_with("symmetry") => {
                let classes = rest["symmetry".len()..]
                    .split_whitespace()
                    .map(parse_braced)
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad(k, "malformed symmetry classes"))?;
                Coverage::Symmetry(classes)
            }
            _ => return Err(bad(k, "expected `coverage: full` or `coverage: symmetry ...`")),
        };
        let (k, count) = lines.next().ok_or_else(|| bad(k + 1, "missing entries count"))?;
        let count: usize = count
            .trim()
            .strip_prefix("entries:")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad(k, "expected `entries: <count>`"))?;
        let mut entries = Vec::with_capacity(count);
        for (k, line) in lines {
            entries.push(parse_entry(line, g).map_err(|msg| bad(k, &msg))?);
        }
        if entries.len() != count {
            return Err(Error::Parse(format!("certificate lists {} entries, header says {count}", entries.len())));
        }
        Ok(Certificate { coverage, entries })
    }
}

fn braced(agents: &[AgentId]) -> String {
    let inner: Vec<String> = agents.iter().map(|j| j.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn parse_braced(text: &str) -> Option<Vec<AgentId>> {
    let inner = text.trim().strip_prefix('{')?.strip_suffix('}')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|v| v.trim().parse().ok()).collect()
}

fn parse_entry(line: &str, g: &Rsg) -> std::result::Result<CertificateEntry, String> {
    let (body, costs) = line.split_once('|').ok_or("missing `| costs` section")?;
    let mut parts = body.split("->").map(str::trim);
    let alloc = parts.next().ok_or("missing allocation")?;
    let coalition = parts.next().ok_or("missing coalition")?;
    let moves = parts.next().ok_or("missing moves")?;
    let sets_text = alloc.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or("allocation must be parenthesized")?;
    let mut sets = Vec::new();
    let mut rest = sets_text;
    while let Some(start) = rest.find('{') {
        let end = rest[start..].find('}').ok_or("unclosed resource set")? + start;
        sets.push(parse_braced(&rest[start..=end]).ok_or("malformed resource set")?);
        rest = &rest[end + 1..];
    }
    let allocation = Allocation::from_sets(g.n_agents(), &sets).map_err(|e| e.to_string())?;
    allocation.check_against(g).map_err(|e| e.to_string())?;
    let members = parse_braced(coalition).ok_or("malformed coalition")?;
    let coalition = crate::coalition::Coalition::new(members).map_err(|e| e.to_string())?;
    let mut parsed_moves = Vec::new();
    for token in moves.split_whitespace() {
        let parse = || -> Option<Move> {
            let (route, count) = token.split_once(':')?;
            let (from, to) = route.split_once('>')?;
            let from: usize = from.strip_prefix('r')?.parse().ok()?;
            let to: usize = to.strip_prefix('r')?.parse().ok()?;
            Some(Move { from: from.checked_sub(1)?, to: to.checked_sub(1)?, count: count.parse().ok()? })
        };
        parsed_moves.push(parse().ok_or_else(|| format!("malformed move `{token}`"))?);
    }
    let deviation = Deviation { coalition, moves: parsed_moves };
    let witness = replay(g, &allocation, &deviation).map_err(|e| e.to_string())?;
    let listed: Vec<&str> = costs.trim().strip_prefix("costs").ok_or("missing `costs`")?.split_whitespace().collect();
    if listed.len() != witness.outcomes.len() {
        return Err(format!("{} member costs listed, replay has {}", listed.len(), witness.outcomes.len()));
    }
    for (token, o) in listed.iter().zip(&witness.outcomes) {
        let expected = format!("{}:{}>{}", o.agent, o.before, o.after);
        if *token != expected {
            return Err(format!("listed `{token}`, replay gives `{expected}`"));
        }
    }
    Ok(CertificateEntry { allocation, witness })
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Allocation),
    None(Certificate),
}

/// Groups agents by the set of coalitions containing them. Classes are
/// ordered by their smallest agent.
pub fn membership_classes(c: &CoalitionStructure) -> Vec<Vec<AgentId>> {
    let n = c.n_agents();
    let mut signature: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (k, coal) in c.coalitions().iter().enumerate() {
        for &j in coal.members() {
            signature[j].push(k);
        }
    }
    let mut groups: BTreeMap<Vec<usize>, Vec<AgentId>> = BTreeMap::new();
    for (j, sig) in signature.into_iter().enumerate().skip(1) {
        groups.entry(sig).or_default().push(j);
    }
    let mut classes: Vec<Vec<AgentId>> = groups.into_values().collect();
    classes.sort_by_key(|cl| cl[0]);
    classes
}

fn orbit_count(classes: &[Vec<AgentId>], m: usize) -> u128 {
    classes
        .iter()
        .map(|cl| crate::combinatorics::composition_count(cl.len(), m))
        .fold(1u128, |acc, x| acc.saturating_mul(x))
}

fn is_canonical(a: &Allocation, classes: &[Vec<AgentId>]) -> bool {
    classes.iter().all(|cl| cl.windows(2).all(|w| a.resource_of(w[0]) <= a.resource_of(w[1])))
}

/// Visits one allocation per orbit, resources non-decreasing along each
/// class. The callback returns `false` to stop.
fn for_each_orbit(n: usize, m: usize, classes: &[Vec<AgentId>], mut visit: impl FnMut(&Allocation) -> Result<bool>) -> Result<()> {
    let mut assignment = vec![0usize; n];
    loop {
        let a = Allocation::from_assignment(m, assignment.clone())?;
        if !visit(&a)? {
            return Ok(());
        }
        // Odometer over classes; within a class, next multiset in colex order.
        let mut advanced = false;
        for cl in classes {
            if next_multiset(&mut assignment, cl, m) {
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Ok(());
        }
    }
}

/// Advances the non-decreasing resource sequence of `class`; resets it and
/// returns `false` after the last one.
fn next_multiset(assignment: &mut [usize], class: &[AgentId], m: usize) -> bool {
    let k = class.len();
    for p in (0..k).rev() {
        let v = assignment[class[p] - 1];
        if v + 1 < m {
            for &j in &class[p..] {
                assignment[j - 1] = v + 1;
            }
            return true;
        }
    }
    for &j in class {
        assignment[j - 1] = 0;
    }
    false
}

/// Searches the orbit representatives for a C-stable allocation. When none
/// exists, returns a certificate refuting every representative.
pub fn find_equilibrium_by_search(g: &Rsg, c: &CoalitionStructure, budget: Budget) -> Result<SearchOutcome> {
    check_sizes(g, c)?;
    let classes = membership_classes(c);
    let needed = orbit_count(&classes, g.n_resources());
    if needed > u128::from(budget.allocations) {
        return Err(Error::BudgetExceeded { needed, budget: budget.allocations });
    }
    let mut entries = Vec::new();
    let mut found = None;
    for_each_orbit(g.n_agents(), g.n_resources(), &classes, |a| {
        let report = is_structure_stable_budgeted(g, a, c, budget.deviations)?;
        match report.witness {
            None => {
                found = Some(a.clone());
                Ok(false)
            }
            Some(w) => {
                entries.push(CertificateEntry { allocation: a.clone(), witness: w });
                Ok(true)
            }
        }
    })?;
    Ok(match found {
        Some(a) => SearchOutcome::Found(a),
        None => SearchOutcome::None(Certificate { coverage: Coverage::Symmetry(classes), entries }),
    })
}

/// Refutes every one of the `m^n` allocations, or reports a stable one.
pub fn verify_no_equilibrium(g: &Rsg, c: &CoalitionStructure, budget: Budget) -> Result<SearchOutcome> {
    check_sizes(g, c)?;
    let n = g.n_agents();
    let m = g.n_resources();
    let needed = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > u128::from(budget.allocations) {
        return Err(Error::BudgetExceeded { needed, budget: budget.allocations });
    }
    let mut assignment = vec![0usize; n];
    let radix = vec![m; n];
    let mut entries = Vec::new();
    loop {
        let a = Allocation::from_assignment(m, assignment.clone())?;
        match is_structure_stable_budgeted(g, &a, c, budget.deviations)?.witness {
            None => return Ok(SearchOutcome::Found(a)),
            Some(w) => entries.push(CertificateEntry { allocation: a, witness: w }),
        }
        if !crate::game::advance(&mut assignment, &radix) {
            break;
        }
    }
    Ok(SearchOutcome::None(Certificate { coverage: Coverage::Full, entries }))
}

fn check_sizes(g: &Rsg, c: &CoalitionStructure) -> Result<()> {
    if c.n_agents() != g.n_agents() {
        return Err(Error::InvalidStructure(format!(
            "structure is over {} agents, game has {}",
            c.n_agents(),
            g.n_agents()
        )));
    }
    Ok(())
}
