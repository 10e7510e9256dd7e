//! Desk-scale evidence for the existence table: which structure classes
//! always admit an equilibrium for which kinds of resources.
//!
//! Positive cells are exercised by constructing (or searching for) stable
//! allocations on seeded random instances; negative cells by replaying the
//! non-existence certificates and the example 2 refuter.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalition::CoalitionStructure;
use crate::construction::{algorithm1_round_robin, construct_nash_with, construct_two_resource_laminar_eq};
use crate::embedding::check_embedding;
use crate::error::{Error, Result};
use crate::fixtures::{check_example2, example2, theorem8, theorem9, Fixture};
use crate::refute::{refute_example2, sample_nash_block_regime, sample_nash_uniform};
use crate::rsg::{Allocation, Rsg};
use crate::sample::{random_contiguous, random_identical_rsg, random_laminar, random_partition, random_rsg};
use crate::search::{find_equilibrium_by_search, verify_no_equilibrium, Budget, SearchOutcome};
use crate::stability::{is_profitable, is_structure_stable};
use crate::structure::laminar_to_path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Row {
    Partition,
    Laminar,
    Contiguous,
    Centralized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Column {
    General,
    Two,
    Identical,
    TwoIdentical,
}

impl Row {
    pub const ALL: [Row; 4] = [Row::Partition, Row::Laminar, Row::Contiguous, Row::Centralized];

    pub fn name(self) -> &'static str {
        match self {
            Row::Partition => "partition",
            Row::Laminar => "laminar",
            Row::Contiguous => "contiguous",
            Row::Centralized => "centralized",
        }
    }
}

impl Column {
    pub const ALL: [Column; 4] = [Column::General, Column::Two, Column::Identical, Column::TwoIdentical];

    pub fn name(self) -> &'static str {
        match self {
            Column::General => "general",
            Column::Two => "two",
            Column::Identical => "identical",
            Column::TwoIdentical => "two-identical",
        }
    }
}

/// A table cell, written `row:column`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub row: Row,
    pub column: Column,
}

impl CellId {
    pub fn all() -> Vec<CellId> {
        Row::ALL.iter().flat_map(|&row| Column::ALL.iter().map(move |&column| CellId { row, column })).collect()
    }

    /// Whether an equilibrium always exists in this cell.
    pub fn expected(self) -> bool {
        match self.row {
            Row::Partition => true,
            Row::Laminar => self.column != Column::General,
            Row::Contiguous => matches!(self.column, Column::Identical | Column::TwoIdentical),
            Row::Centralized => false,
        }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.row.name(), self.column.name())
    }
}

impl FromStr for CellId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown cell \"{s}\", expected row:column such as laminar:two"));
        let (r, c) = s.split_once(':').ok_or_else(bad)?;
        let row = Row::ALL.into_iter().find(|x| x.name() == r).ok_or_else(bad)?;
        let column = Column::ALL.into_iter().find(|x| x.name() == c).ok_or_else(bad)?;
        Ok(CellId { row, column })
    }
}

#[derive(Clone, Debug)]
pub struct ReproduceConfig {
    pub seed: u64,
    /// Random instances per constructive cell.
    pub samples: usize,
    /// Random Nash allocations handed to the example 2 refuter.
    pub refute_samples: usize,
    pub budget: Budget,
    /// Restrict the run to these cells; empty means all sixteen.
    pub cells: Vec<CellId>,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self { seed: 0, samples: 200, refute_samples: 1000, budget: Budget::default(), cells: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct CellResult {
    pub cell: CellId,
    pub expected: bool,
    pub consistent: bool,
    pub evidence: String,
}

#[derive(Clone, Debug)]
pub struct ReproduceReport {
    pub seed: u64,
    pub cells: Vec<CellResult>,
}

impl ReproduceReport {
    pub fn all_consistent(&self) -> bool {
        self.cells.iter().all(|c| c.consistent)
    }

    pub fn consistent_count(&self) -> usize {
        self.cells.iter().filter(|c| c.consistent).count()
    }
}

impl fmt::Display for ReproduceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed: {}", self.seed)?;
        write!(f, "{:<12}", "")?;
        for c in Column::ALL {
            write!(f, "{:>15}", c.name())?;
        }
        writeln!(f)?;
        for r in Row::ALL {
            if !self.cells.iter().any(|c| c.cell.row == r) {
                continue;
            }
            write!(f, "{:<12}", r.name())?;
            for c in Column::ALL {
                let text = match self.cells.iter().find(|x| x.cell == CellId { row: r, column: c }) {
                    None => ".".to_string(),
                    Some(x) => format!("{} {}", if x.expected { "+" } else { "-" }, if x.consistent { "ok" } else { "FAIL" }),
                };
                write!(f, "{text:>15}")?;
            }
            writeln!(f)?;
        }
        for c in &self.cells {
            writeln!(f, "{}: {}", c.cell, c.evidence)?;
        }
        write!(f, "{}/{} cells consistent", self.consistent_count(), self.cells.len())
    }
}

/// Shared state for the negative cells, built once.
struct Certificates {
    theorem8: Option<Result<String>>,
    theorem9: Option<Result<String>>,
}

pub fn reproduce(config: &ReproduceConfig) -> ReproduceReport {
    let cells = if config.cells.is_empty() { CellId::all() } else { config.cells.clone() };
    let mut certs = Certificates { theorem8: None, theorem9: None };
    let mut results = Vec::new();
    for (k, &cell) in cells.iter().enumerate() {
        // Each cell gets its own stream so single-cell runs match full runs.
        let index = CellId::all().iter().position(|&c| c == cell).unwrap_or(k) as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (index.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        let outcome = run_cell(cell, config, &mut rng, &mut certs);
        let (consistent, evidence) = match outcome {
            Ok(text) => (true, text),
            Err(e) => (false, e.to_string()),
        };
        results.push(CellResult { cell, expected: cell.expected(), consistent, evidence });
    }
    ReproduceReport { seed: config.seed, cells: results }
}

fn run_cell(cell: CellId, config: &ReproduceConfig, rng: &mut ChaCha8Rng, certs: &mut Certificates) -> Result<String> {
    match (cell.row, cell.column) {
        (Row::Partition, col) => partition_cell(col, config, rng),
        (Row::Laminar, Column::General) => example2_cell(config, rng),
        (Row::Laminar, Column::Two) => laminar_two_cell(config, rng),
        (Row::Laminar, col) => round_robin_cell(col, true, config, rng),
        (Row::Contiguous, Column::General | Column::Two) => {
            certs.theorem8.get_or_insert_with(|| certificate_evidence(&theorem8(), config.budget)).clone()
        }
        (Row::Contiguous, col) => round_robin_cell(col, false, config, rng),
        (Row::Centralized, _) => {
            certs.theorem9.get_or_insert_with(|| certificate_evidence(&theorem9(), config.budget)).clone()
        }
    }
}

fn random_game(col: Column, n: usize, rng: &mut ChaCha8Rng) -> Rsg {
    match col {
        Column::General => {
            let m = rng.gen_range(2..=3);
            random_rsg(n, m, 3, rng)
        }
        Column::Two => random_rsg(n, 2, 3, rng),
        Column::Identical => {
            let m = rng.gen_range(2..=4);
            random_identical_rsg(n, m, 3, rng)
        }
        Column::TwoIdentical => random_identical_rsg(n, 2, 3, rng),
    }
}

fn fail_on(g: &Rsg, c: &CoalitionStructure, what: &str) -> Error {
    let tables: Vec<String> =
        (0..g.n_resources()).map(|r| format!("{:?}", g.table(r).iter().map(|v| v.to_string()).collect::<Vec<_>>())).collect();
    Error::Construction(format!("{what} on tables {} with structure {c}", tables.join(" ")))
}

fn confirm_stable(g: &Rsg, a: &Allocation, c: &CoalitionStructure, what: &str) -> Result<()> {
    if is_structure_stable(g, a, c)?.stable {
        Ok(())
    } else {
        Err(fail_on(g, c, &format!("{what} output {a} is not stable")))
    }
}

fn partition_cell(col: Column, config: &ReproduceConfig, rng: &mut ChaCha8Rng) -> Result<String> {
    let mut examined = 0u128;
    for _ in 0..config.samples {
        let n = rng.gen_range(1..=6);
        let g = random_game(col, n, rng);
        let c = random_partition(n, rng);
        match find_equilibrium_by_search(&g, &c, config.budget)? {
            SearchOutcome::Found(a) => {
                examined += 1;
                confirm_stable(&g, &a, &c, "search")?;
            }
            SearchOutcome::None(_) => return Err(fail_on(&g, &c, "no partition equilibrium found")),
        }
    }
    Ok(format!("search found a stable allocation on {examined}/{} random partition instances (n <= 6)", config.samples))
}

fn laminar_two_cell(config: &ReproduceConfig, rng: &mut ChaCha8Rng) -> Result<String> {
    let mut steps = 0;
    for _ in 0..config.samples {
        let n = rng.gen_range(1..=9);
        let g = random_rsg(n, 2, 3, rng);
        let c = random_laminar(n, rng);
        let out = construct_two_resource_laminar_eq(&g, &c).map_err(|e| fail_on(&g, &c, &e.to_string()))?;
        steps += out.steps.len();
        confirm_stable(&g, &out.allocation, &c, "two-resource construction")?;
    }
    Ok(format!(
        "two-resource construction stable on {0}/{0} random laminar instances (n <= 9, {steps} rewiring steps)",
        config.samples
    ))
}

fn round_robin_cell(col: Column, laminar: bool, config: &ReproduceConfig, rng: &mut ChaCha8Rng) -> Result<String> {
    for _ in 0..config.samples {
        let n = rng.gen_range(1..=8);
        let g = random_game(col, n, rng);
        let (c, path) = if laminar {
            let c = random_laminar(n, rng);
            let p = laminar_to_path(&c)?;
            (c, p)
        } else {
            random_contiguous(n, rng)
        };
        let a = algorithm1_round_robin(&g, &path)?;
        confirm_stable(&g, &a, &c, "round robin")?;
    }
    let kind = if laminar { "laminar" } else { "contiguous" };
    Ok(format!("round robin stable on {0}/{0} random {kind} instances (n <= 8)", config.samples))
}

fn certificate_evidence(f: &Fixture, budget: Budget) -> Result<String> {
    if let Some(p) = &f.path {
        p.check(&f.structure)?;
    }
    if let Some(w) = &f.embedding {
        check_embedding(&f.structure, w)?;
    }
    match verify_no_equilibrium(&f.game, &f.structure, budget)? {
        SearchOutcome::None(cert) => {
            cert.check(&f.game, &f.structure)?;
            Ok(format!("{}: all {} allocations refuted ({})", f.name, cert.entries.len(), f.claim.label()))
        }
        SearchOutcome::Found(a) => Err(Error::Refutation(format!("{}: allocation {a} is stable", f.name))),
    }
}

fn example2_cell(config: &ReproduceConfig, rng: &mut ChaCha8Rng) -> Result<String> {
    let f = example2();
    let facts = check_example2(&f)?;
    let d = &facts.derived;
    let mut allocations = vec![construct_nash_with(&f.game, d)];
    for k in 0..config.refute_samples {
        allocations.push(if k % 2 == 0 { sample_nash_uniform(d, rng) } else { sample_nash_block_regime(d, rng) });
    }
    for a in &allocations {
        let r = refute_example2(&f, d, a)?;
        if !is_profitable(&r.witness) || !f.structure.contains(r.coalition()) {
            return Err(Error::Refutation("refuter returned an invalid deviation".into()));
        }
    }
    Ok(format!(
        "example2: constraints verified, {} Nash allocations refuted ({})",
        allocations.len(),
        f.claim.label()
    ))
}
