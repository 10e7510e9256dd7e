use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rsg_core::embedding::{check_embedding, contiguous_to_embedding};
use rsg_core::fixtures::{check_example2, example1, example2, theorem8, theorem9, Fixture};
use rsg_core::hierarchy::{hierarchy_demo, memberships};
use rsg_core::instance::Instance;
use rsg_core::refute::{refute_example2, sample_nash_block_regime, sample_nash_uniform};
use rsg_core::reproduce::{reproduce, CellId, ReproduceConfig};
use rsg_core::rsg::allocation_costs;
use rsg_core::search::{verify_no_equilibrium, Budget, SearchOutcome};
use rsg_core::solve::{solve, structure_for, Notion, Solution};
use rsg_core::stability::{is_structure_stable_budgeted, DEFAULT_BUDGET};
use rsg_core::structure::{find_contiguous_path, first_crossing_pair, PathWitness};
use rsg_core::Allocation;

/// Coalition-restricted equilibria in resource selection games.
#[derive(Parser)]
#[command(name = "rsg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Work limit: allocations for searches, deviation patterns per coalition for checks.
    #[arg(long)]
    budget: Option<u64>,
    /// Seed for every random choice; printed in the report header.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Report which structure classes the instance's coalitions belong to.
    Classify {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether an allocation is stable; exit 0 stable, 1 unstable, 2 error.
    Check {
        instance: PathBuf,
        /// Structure to check against; defaults to the instance's coalitions.
        #[arg(long)]
        notion: Option<Notion>,
        /// Allocation as agent lists per resource, e.g. "1,2;3;". Overrides the file.
        #[arg(long)]
        allocation: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Find a stable allocation or certify that none exists; exit 0 found, 1 none, 2 error or budget.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        notion: Notion,
        #[command(flatten)]
        common: Common,
    },
    /// Refute every allocation of a built-in non-existence instance.
    Refute {
        /// example1, example2, theorem8 or theorem9.
        #[arg(default_value = "example2")]
        fixture: String,
        /// Random Nash allocations to refute (example2 only).
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Rerun the evidence for every cell of the existence table.
    Reproduce {
        /// Restrict to cells such as laminar:general; repeatable.
        #[arg(long = "cell")]
        cells: Vec<CellId>,
        /// Random instances per constructive cell.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Random Nash allocations for the laminar:general cell.
        #[arg(long, default_value_t = 1000)]
        refute_samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check the strict inclusions between structure classes.
    HierarchyDemo {
        /// Agent counts to check.
        #[arg(default_values_t = vec![2usize, 3, 4])]
        agents: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Write a built-in instance in the instance file format.
    Fixture {
        /// example1, example2, theorem8 or theorem9.
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(common: &Common, command: &str, body: &str) -> Result<()> {
    let text = format!("command: {command}\nseed: {}\n{body}", common.seed);
    let text = if text.ends_with('\n') { text } else { text + "\n" };
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn budget(common: &Common) -> Budget {
    match common.budget {
        Some(b) => Budget { allocations: b, deviations: b },
        None => Budget::default(),
    }
}

fn load(path: &Path) -> Result<Instance> {
    Ok(Instance::read(path)?)
}

fn fixture_by_name(name: &str) -> Result<Fixture> {
    Ok(match name {
        "example1" => example1(),
        "example2" => example2(),
        "theorem8" => theorem8(),
        "theorem9" => theorem9(),
        other => bail!("unknown fixture \"{other}\" (expected example1, example2, theorem8 or theorem9)"),
    })
}

fn path_text(p: &PathWitness) -> String {
    p.order.iter().map(|j| j.to_string()).collect::<Vec<_>>().join("-")
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Classify { instance, common } => {
            let inst = load(&instance)?;
            emit(&common, "classify", &classify(&inst)?)?;
            Ok(0)
        }
        Command::Check { instance, notion, allocation, common } => {
            let inst = load(&instance)?;
            let structure = match notion {
                Some(n) => structure_for(&inst, n)?,
                None => inst.structure.clone(),
            };
            let a = match (allocation, &inst.allocation) {
                (Some(text), _) => parse_allocation(&text, inst.game.n_agents(), inst.game.n_resources())?,
                (None, Some(a)) => a.clone(),
                (None, None) => bail!("no allocation: pass --allocation or add `allocation` to the instance"),
            };
            a.check_against(&inst.game)?;
            let deviations = common.budget.unwrap_or(DEFAULT_BUDGET);
            let report = is_structure_stable_budgeted(&inst.game, &a, &structure, deviations)?;
            let mut body = String::new();
            writeln!(body, "structure: {}", notion.map_or("instance".to_string(), |n| n.to_string()))?;
            writeln!(body, "coalitions: {}", structure.len())?;
            writeln!(body, "allocation: {a}")?;
            let costs = allocation_costs(&inst.game, &a);
            let costs: Vec<String> = costs.iter().enumerate().map(|(k, c)| format!("{}:{c}", k + 1)).collect();
            writeln!(body, "costs: {}", costs.join(" "))?;
            match &report.witness {
                None => writeln!(body, "verdict: stable")?,
                Some(w) => {
                    writeln!(body, "verdict: unstable")?;
                    writeln!(body, "coalition: {}", w.deviation.coalition)?;
                    let moves: Vec<String> =
                        w.deviation.moves.iter().map(|m| format!("r{}>r{}:{}", m.from + 1, m.to + 1, m.count)).collect();
                    writeln!(body, "deviation: {}", moves.join(" "))?;
                    writeln!(body, "matrix (row = origin, column = target):")?;
                    for (r, row) in w.deviation.count_matrix(&a).iter().enumerate() {
                        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                        writeln!(body, "  r{}: {}", r + 1, cells.join(" "))?;
                    }
                    writeln!(body, "members:")?;
                    for o in &w.outcomes {
                        writeln!(
                            body,
                            "  agent {} r{}>r{} cost {} -> {} (delta {})",
                            o.agent,
                            o.from + 1,
                            o.to + 1,
                            o.before,
                            o.after,
                            o.after - o.before
                        )?;
                    }
                }
            }
            emit(&common, "check", &body)?;
            Ok(if report.stable { 0 } else { 1 })
        }
        Command::Solve { instance, notion, common } => {
            let inst = load(&instance)?;
            let report = solve(&inst, notion, budget(&common))?;
            let mut body = String::new();
            writeln!(body, "notion: {notion}")?;
            writeln!(body, "coalitions: {}", report.structure.len())?;
            writeln!(body, "method: {}", report.method)?;
            let code = match &report.solution {
                Solution::Found { allocation, coalitions_checked } => {
                    writeln!(body, "result: found")?;
                    writeln!(body, "allocation: {allocation}")?;
                    writeln!(
                        body,
                        "certificate: stable against all {coalitions_checked} coalitions by the exact deviation oracle"
                    )?;
                    0
                }
                Solution::None(cert) => {
                    writeln!(body, "result: none")?;
                    writeln!(body, "certificate:")?;
                    body.push_str(&cert.to_text());
                    1
                }
            };
            emit(&common, "solve", &body)?;
            Ok(code)
        }
        Command::Refute { fixture, samples, common } => {
            let f = fixture_by_name(&fixture)?;
            let body = if f.name == "example2" { refute_large(&f, samples, common.seed)? } else { refute_small(&f, budget(&common))? };
            emit(&common, "refute", &body)?;
            Ok(0)
        }
        Command::Reproduce { cells, samples, refute_samples, common } => {
            let config = ReproduceConfig { seed: common.seed, samples, refute_samples, budget: budget(&common), cells };
            let report = reproduce(&config);
            // The report already carries the seed line.
            let body = report.to_string();
            let body = body.split_once('\n').map_or(body.as_str(), |(_, rest)| rest).to_string();
            emit(&common, "reproduce", &body)?;
            Ok(if report.all_consistent() { 0 } else { 1 })
        }
        Command::HierarchyDemo { agents, common } => {
            let mut body = String::new();
            let mut ok = true;
            for n in agents {
                if n == 0 {
                    bail!("agent counts must be at least 1");
                }
                let r = hierarchy_demo(n);
                ok &= r.all_hold();
                body.push_str(&r.to_string());
            }
            emit(&common, "hierarchy-demo", &body)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Fixture { name, common } => {
            let f = fixture_by_name(&name)?;
            let text = Instance::from_fixture(&f).to_json_string() + "\n";
            match &common.out {
                Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn classify(inst: &Instance) -> Result<String> {
    let c = &inst.structure;
    let mut body = String::new();
    writeln!(body, "agents: {}", c.n_agents())?;
    writeln!(body, "resources: {}", inst.game.n_resources())?;
    writeln!(body, "coalitions: {}", c.len())?;
    let yes = |b: bool| if b { "yes" } else { "no" };
    for (class, member) in memberships(c) {
        match class.name() {
            "laminar" if !member => {
                let (p, q) = first_crossing_pair(c).expect("not laminar");
                writeln!(body, "laminar: no ({p} and {q} cross)")?;
            }
            "contiguous" => {
                let path = match &inst.path {
                    Some(p) => {
                        p.check(c).context("supplied path")?;
                        Some((p.clone(), "supplied"))
                    }
                    None => find_contiguous_path(c).map(|p| (p, "found")),
                };
                match path {
                    Some((p, how)) => writeln!(body, "contiguous: yes ({how} path {})", path_text(&p))?,
                    None => writeln!(body, "contiguous: no")?,
                }
            }
            name => writeln!(body, "{name}: {}", yes(member))?,
        }
    }
    let centralized = match &inst.embedding {
        Some(w) => match check_embedding(c, w) {
            Ok(()) => "yes (supplied embedding verified)".to_string(),
            Err(e) => format!("unknown (supplied embedding rejected: {e})"),
        },
        None => match find_contiguous_path(c) {
            Some(p) => {
                contiguous_to_embedding(c, &p)?;
                "yes (embedding built from the path)".to_string()
            }
            None => "unknown (no embedding supplied)".to_string(),
        },
    };
    writeln!(body, "centralized: {centralized}")?;
    Ok(body)
}

fn parse_allocation(text: &str, n: usize, m: usize) -> Result<Allocation> {
    let mut sets: Vec<Vec<usize>> = text
        .split(';')
        .map(|part| {
            part.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().with_context(|| format!("bad agent id \"{t}\" in --allocation")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    if sets.len() > m {
        bail!("--allocation lists {} resources, the game has {m}", sets.len());
    }
    sets.resize(m, Vec::new());
    Ok(Allocation::from_sets(n, &sets)?)
}

fn refute_small(f: &Fixture, budget: Budget) -> Result<String> {
    let mut body = String::new();
    writeln!(body, "fixture: {} ({})", f.name, f.claim.label())?;
    match verify_no_equilibrium(&f.game, &f.structure, budget)? {
        SearchOutcome::None(cert) => {
            cert.check(&f.game, &f.structure)?;
            writeln!(body, "refuted: {}/{}", cert.entries.len(), cert.entries.len())?;
            writeln!(body, "certificate:")?;
            body.push_str(&cert.to_text());
        }
        SearchOutcome::Found(a) => bail!("allocation {a} is stable"),
    }
    Ok(body)
}

fn refute_large(f: &Fixture, samples: usize, seed: u64) -> Result<String> {
    let facts = check_example2(f)?;
    let d = &facts.derived;
    let mut body = String::new();
    writeln!(body, "fixture: {} ({})", f.name, f.claim.label())?;
    writeln!(
        body,
        "constraints: alpha {} beta x/y/z {}/{}/{} > f_x(51) {}; low resources {}",
        d.alpha, facts.beta_x, facts.beta_y, facts.beta_z, facts.fx_below_beta, facts.low_count
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = std::collections::BTreeMap::new();
    let first = rsg_core::construction::construct_nash_with(&f.game, d);
    let r = refute_example2(f, d, &first)?;
    writeln!(body, "quota fill: {:?} by coalition of size {}", r.step, r.coalition().len())?;
    for k in 0..samples {
        let a = if k % 2 == 0 { sample_nash_uniform(d, &mut rng) } else { sample_nash_block_regime(d, &mut rng) };
        let r = refute_example2(f, d, &a)?;
        *counts.entry(format!("{:?}", r.step)).or_insert(0usize) += 1;
    }
    writeln!(body, "random Nash allocations refuted: {samples}/{samples}")?;
    for (step, count) in counts {
        writeln!(body, "  {step}: {count}")?;
    }
    Ok(body)
}
