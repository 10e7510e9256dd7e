//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p rsg-core --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    all_allocations, beta, brute_deviation, brute_structure_stable, consecutive, embedding_matches, gamma,
    independent_witness_check, loads, nash_by_single_moves,
};
use rsg_core::combinatorics::for_each_subset;
use rsg_core::construction::{algorithm1_round_robin, construct_nash_with, construct_two_resource_laminar_eq, TwoResourceCase};
use rsg_core::embedding::{contiguous_to_embedding, verify_embedding};
use rsg_core::fixtures::{check_example2, example1, example2, ex2_kind, theorem8, theorem9, Ex2Kind, Fixture, EX2_AGENTS};
use rsg_core::hierarchy::{hierarchy_demo, square_structure};
use rsg_core::refute::{refute_example2, sample_nash_block_regime, sample_nash_uniform};
use rsg_core::reproduce::{reproduce, ReproduceConfig};
use rsg_core::rsg::{classify_low_high, derive_rsg};
use rsg_core::sample::{random_contiguous, random_identical_rsg, random_laminar, random_rsg, random_subset};
use rsg_core::search::{verify_no_equilibrium, Budget, Certificate, SearchOutcome};
use rsg_core::stability::{is_c_stable_rsg, is_structure_stable, lemma_c123_check};
use rsg_core::structure::{laminar_to_path, PathWitness};
use rsg_core::two_color::two_color;
use rsg_core::{Coalition, CoalitionStructure, Cost, Rsg};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

/// Refutes every allocation with a certificate, then re-derives each refutation independently.
fn exhaustive_refutation(f: &Fixture, expected: usize) -> Result<Certificate, String> {
    let cert = match verify_no_equilibrium(&f.game, &f.structure, Budget::default()).map_err(|e| e.to_string())? {
        SearchOutcome::None(cert) => cert,
        SearchOutcome::Found(a) => return Err(format!("{}: {a} reported stable", f.name)),
    };
    ensure(cert.entries.len() == expected, || format!("{}: {} entries", f.name, cert.entries.len()))?;
    cert.check(&f.game, &f.structure).map_err(|e| e.to_string())?;
    let n = f.game.n_agents();
    let m = f.game.n_resources();
    let all = all_allocations(n, m);
    ensure(all.len() == expected, || "allocation space size".into())?;
    for (entry, a) in cert.entries.iter().zip(&all) {
        ensure(entry.allocation.assignment() == a.assignment(), || "certificate order differs".into())?;
        ensure(f.structure.contains(&entry.witness.deviation.coalition), || "coalition outside structure".into())?;
        independent_witness_check(&f.game, a, &entry.witness)?;
    }
    for a in &all {
        ensure(!brute_structure_stable(&f.game, a, &f.structure), || format!("brute force finds {a} stable"))?;
    }
    Ok(cert)
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let f = example1();
    ensure(f.structure.len() == 7, || "structure is not all nonempty coalitions".into())?;
    exhaustive_refutation(&f, 8)?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("8/8 allocations refuted in {:.2?}", start.elapsed()))
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let f8 = theorem8();
    ensure(consecutive(&f8.structure, &PathWitness::identity(6)), || "theorem8 fixture: identity path".into())?;
    exhaustive_refutation(&f8, 64)?;
    within(Duration::from_secs(1), start)?;
    let t8 = start.elapsed();

    let start = Instant::now();
    let f9 = theorem9();
    let w = f9.embedding.as_ref().ok_or("theorem9 fixture has no embedding")?;
    ensure(embedding_matches(&f9.structure, w) && verify_embedding(&f9.structure, w), || "theorem9 fixture embedding".into())?;
    exhaustive_refutation(&f9, 32)?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("64/64 refuted in {t8:.2?}; embedding verified and 32/32 refuted in {:.2?}", start.elapsed()))
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let f = example2();
    let facts = check_example2(&f).map_err(|e| e.to_string())?;
    // Re-derive the constraints straight from the tables.
    let g = &f.game;
    let alpha = Cost::from_integer(100);
    let mut quota_sum = 0;
    for r in 0..g.n_resources() {
        let t = g.table(r);
        ensure(t.windows(2).all(|w| w[0] < w[1]) && t[0] > Cost::from_integer(0), || format!("table {r}"))?;
        let q = t.iter().take_while(|&&v| v <= alpha).count();
        ensure(t[q - 1] == alpha, || format!("resource {r} is not Type 1"))?;
        let want = match ex2_kind(r) {
            Ex2Kind::X => (53, 98),
            Ex2Kind::Y => (8, 97),
            Ex2Kind::Z => (7, 96),
        };
        ensure((q, t[q - 2]) == (want.0, Cost::from_integer(want.1)), || format!("resource {r} quota/beta"))?;
        quota_sum += q;
    }
    ensure(g.table(0)[50] == Cost::from_integer(51), || "f_x(51)".into())?;
    ensure(quota_sum - EX2_AGENTS == 1001 && facts.low_count == 1001, || "low count".into())?;
    // Some resource must be at quota: sum of quota - 1 is below n.
    ensure(quota_sum - g.n_resources() < EX2_AGENTS, || "alpha feasibility".into())?;
    ensure(derive_rsg(g).alpha == alpha, || "alpha".into())?;

    let d = &facts.derived;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut allocations = vec![construct_nash_with(g, d)];
    for k in 0..1000 {
        allocations.push(if k % 2 == 0 { sample_nash_uniform(d, &mut rng) } else { sample_nash_block_regime(d, &mut rng) });
    }
    let mut failures = 0;
    for a in &allocations {
        let l = loads(g.n_resources(), a.assignment());
        let low = (0..g.n_resources()).filter(|&r| l[r] + 1 == d.quota[r]).count();
        ensure(low == 1001, || format!("sampled allocation has {low} low resources"))?;
        let ok = match refute_example2(&f, d, a) {
            Ok(r) => f.structure.contains(r.coalition()) && independent_witness_check(g, a, &r.witness).is_ok(),
            Err(_) => false,
        };
        failures += usize::from(!ok);
    }
    ensure(failures == 0, || format!("{failures} refutation failures"))?;
    within(Duration::from_secs(60), start)?;
    Ok(format!("constraints verified; {} Nash allocations refuted, 0 failures, {:.2?}", allocations.len(), start.elapsed()))
}

fn criterion4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for sample in 0..500 {
        let n = rng.gen_range(1..=10);
        let m = rng.gen_range(1..=4);
        let g = random_identical_rsg(n, m, 3, &mut rng);
        let (c, path) = random_contiguous(n, &mut rng);
        let a = algorithm1_round_robin(&g, &path).map_err(|e| e.to_string())?;
        let fail = |what: &str| format!("sample {sample}: {what} (n={n}, m={m}, C={c}, a={a})");
        ensure(nash_by_single_moves(&g, &a), || fail("not Nash"))?;
        ensure(is_structure_stable(&g, &a, &c).map_err(|e| e.to_string())?.stable, || fail("not C-stable"))?;
        if n <= 7 {
            ensure(brute_structure_stable(&g, &a, &c), || fail("brute force finds a deviation"))?;
        }
        // Identical resources: quota is the balanced load.
        let q = n.div_ceil(m);
        let l = loads(m, a.assignment());
        let high: Vec<usize> = (0..m).filter(|&r| l[r] == q).collect();
        let low: Vec<usize> = (0..m).filter(|&r| l[r] + 1 == q).collect();
        ensure(high.len() + low.len() == m, || fail("loads not balanced"))?;
        let lh = classify_low_high(&g, &derive_rsg(&g), &a).map_err(|e| e.to_string())?;
        ensure(lh.low == low && lh.high == high, || fail("low/high classification differs"))?;
        for k in c.coalitions() {
            let on = |r: usize| k.members().iter().filter(|&&j| a.resource_of(j) == r).count();
            for &h in &high {
                for &lo in &low {
                    ensure(on(h) <= on(lo) + 1, || fail(&format!("coalition {k} unbalanced on r{} vs r{}", h + 1, lo + 1)))?;
                }
            }
        }
    }
    Ok("500/500 round-robin outputs Nash, C-stable and balanced".into())
}

/// `f(k) = k` below `q - 1`, then `beta`, then `alpha` at the quota, then
/// one more per extra agent.
fn quota_table(n: usize, q: usize, beta: i64, alpha: i64) -> Vec<Cost> {
    (1..=n)
        .map(|k| {
            let v = if k + 1 < q {
                k as i64
            } else if k + 1 == q {
                beta
            } else {
                alpha + (k - q) as i64
            };
            Cost::from_integer(v)
        })
        .collect()
}

/// Two Type 1 resources with one low slot and distinct beta values, so the
/// rewiring phase is exercised.
fn two_type1_game<R: Rng>(n: usize, rng: &mut R) -> Rsg {
    let alpha = 3 * n as i64 + 3;
    let q1 = rng.gen_range(1..=n);
    let q2 = n + 1 - q1;
    let pick = |q: usize, rng: &mut R| if q == 1 { 0 } else { rng.gen_range(q as i64 - 1..alpha) };
    let b1 = pick(q1, rng);
    let mut b2 = pick(q2, rng);
    if b1 == b2 && q2 > 1 {
        b2 = if b2 + 1 < alpha { b2 + 1 } else { b2 - 1 };
    }
    Rsg::new(n, vec![quota_table(n, q1, b1, alpha), quota_table(n, q2, b2, alpha)]).unwrap()
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut case3 = 0;
    let mut steps = 0;
    for sample in 0..500 {
        let n = rng.gen_range(1..=9);
        let g = if sample % 2 == 0 { two_type1_game(n, &mut rng) } else { random_rsg(n, 2, 3, &mut rng) };
        let c = random_laminar(n, &mut rng);
        let out = construct_two_resource_laminar_eq(&g, &c).map_err(|e| format!("sample {sample}: {e}"))?;
        let fail = |what: &str| format!("sample {sample}: {what} (C={c}, a={})", out.allocation);
        if out.case == TwoResourceCase::Case3 {
            case3 += 1;
            let mut prev = out.start.clone();
            ensure(nash_by_single_moves(&g, &prev), || fail("start is not Nash"))?;
            for s in &out.steps {
                let (g0, b0) = (gamma(&prev, &c), beta(&g, &prev));
                let (g1, b1) = (gamma(&s.allocation, &c), beta(&g, &s.allocation));
                ensure(g1 > g0 || (g1 == g0 && b1 < b0), || fail("step does not dominate"))?;
                ensure((s.gamma, s.beta) == (g1, b1), || fail("reported gamma/beta differ"))?;
                ensure(nash_by_single_moves(&g, &s.allocation), || fail("intermediate allocation is not Nash"))?;
                prev = s.allocation.clone();
                steps += 1;
            }
            ensure(prev == out.allocation, || fail("last step is not the output"))?;
        }
        ensure(is_structure_stable(&g, &out.allocation, &c).map_err(|e| e.to_string())?.stable, || fail("not C-stable"))?;
        if n <= 7 {
            ensure(brute_structure_stable(&g, &out.allocation, &c), || fail("brute force finds a deviation"))?;
        }
    }
    ensure(steps > 0, || "no rewiring step was exercised".into())?;
    Ok(format!("500/500 C-stable; {case3} runs in the rewiring case with {steps} dominating steps"))
}

fn criterion6() -> Outcome {
    let mut compared = 0u64;
    let mut disagreements = 0u64;
    for n in 1..=7usize {
        let alpha = n as i64 + 4;
        for q1 in 1..=n {
            let q2 = n + 1 - q1;
            let betas = |q: usize| -> Vec<i64> { if q == 1 { vec![0] } else { (q as i64 - 1..=q as i64 + 2).collect() } };
            for &b1 in &betas(q1) {
                for &b2 in &betas(q2) {
                    let g = Rsg::new(n, vec![quota_table(n, q1, b1, alpha), quota_table(n, q2, b2, alpha)]).unwrap();
                    let d = derive_rsg(&g);
                    if d.quota != vec![q1, q2] || d.type2().next().is_some() {
                        return Err(format!("table construction broke quotas for n={n}"));
                    }
                    for a in all_allocations(n, 2) {
                        let l = loads(2, a.assignment());
                        if l != [q1, q2 - 1] && l != [q1 - 1, q2] {
                            continue;
                        }
                        ensure(nash_by_single_moves(&g, &a), || format!("{a} should be Nash"))?;
                        for bits in 1u32..(1 << n) {
                            let members: Vec<usize> = (1..=n).filter(|j| bits >> (j - 1) & 1 == 1).collect();
                            let c = Coalition::new(members).unwrap();
                            let lemma = lemma_c123_check(&g, &d, &a, &c).map_err(|e| e.to_string())?;
                            let oracle = is_c_stable_rsg(&g, &a, &c).map_err(|e| e.to_string())?.stable;
                            let brute = brute_deviation(&g, &a, &c).is_none();
                            compared += 1;
                            disagreements += u64::from(lemma != oracle || oracle != brute);
                        }
                    }
                }
            }
        }
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements out of {compared}"))?;
    Ok(format!("{compared} (table, allocation, coalition) triples, 0 disagreements"))
}

fn balanced(black: &[usize], subset: &[usize], c: &CoalitionStructure) -> bool {
    c.coalitions().iter().all(|k| {
        let b = black.iter().filter(|&&j| k.contains(j)).count() as i64;
        let w = subset.iter().filter(|&&j| k.contains(j) && !black.contains(&j)).count() as i64;
        (b - w).abs() <= 1
    })
}

fn criterion7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cross = 0;
    for sample in 0..1000 {
        let n = rng.gen_range(1..=9);
        let c = random_laminar(n, &mut rng);
        let subset = random_subset(n, &mut rng);
        let coloring = two_color(&subset, &c).map_err(|e| e.to_string())?;
        let k = subset.len().div_ceil(2);
        let fail = |what: &str| format!("sample {sample}: {what} (N'={subset:?}, C={c})");
        let mut all: Vec<usize> = coloring.black.iter().chain(&coloring.white).copied().collect();
        all.sort_unstable();
        ensure(all == subset, || fail("colors do not partition N'"))?;
        ensure(coloring.black.len() == k, || fail("wrong number of black agents"))?;
        ensure(balanced(&coloring.black, &subset, &c), || fail("unbalanced coalition"))?;
        if n <= 7 {
            let mut valid = Vec::new();
            for_each_subset(&subset, k, |black| {
                if balanced(black, &subset, &c) {
                    valid.push(black.to_vec());
                }
                true
            });
            let mut ours = coloring.black.clone();
            ours.sort_unstable();
            ensure(valid.contains(&ours), || fail("exhaustive enumeration disagrees"))?;
            cross += 1;
        }
    }
    Ok(format!("1000/1000 colorings valid; {cross} cross-checked by subset enumeration"))
}

fn criterion8() -> Outcome {
    for n in [2, 3, 4] {
        let r = hierarchy_demo(n);
        ensure(r.all_hold(), || format!("hierarchy demo fails for n={n}:\n{r}"))?;
    }
    // Independent re-checks of the key witnesses.
    let chain = CoalitionStructure::from_lists(3, &[vec![1, 2], vec![2, 3]]).unwrap();
    ensure(consecutive(&chain, &PathWitness::identity(3)), || "path 1-2-3".into())?;
    let (square, w) = square_structure(4);
    ensure(embedding_matches(&square, &w), || "unit square embedding".into())?;
    let mut order = vec![1, 2, 3, 4];
    let mut any = false;
    loop {
        any |= consecutive(&square, &PathWitness { order: order.clone() });
        if !rsg_core::combinatorics::next_permutation(&mut order) {
            break;
        }
    }
    ensure(!any, || "square structure has a path".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for sample in 0..500 {
        let n = rng.gen_range(1..=9);
        let c = random_laminar(n, &mut rng);
        let p = laminar_to_path(&c).map_err(|e| e.to_string())?;
        ensure(consecutive(&c, &p), || format!("sample {sample}: path invalid for {c}"))?;
        let w = contiguous_to_embedding(&c, &p).map_err(|e| e.to_string())?;
        ensure(embedding_matches(&c, &w), || format!("sample {sample}: embedding invalid for {c}"))?;
    }
    Ok("hierarchy witnesses hold for n = 2, 3, 4; 500/500 laminar -> path -> embedding chains verify".into())
}

fn criterion9() -> Outcome {
    let start = Instant::now();
    let report = reproduce(&ReproduceConfig::default());
    ensure(report.cells.len() == 16, || "expected 16 cells".into())?;
    ensure(report.all_consistent(), || format!("{report}"))?;
    within(Duration::from_secs(300), start)?;
    Ok(format!("16/16 cells consistent in {:.2?}", start.elapsed()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("example 1: no super-strong equilibrium", criterion1),
        ("contiguous and centralized non-existence certificates", criterion2),
        ("laminar non-existence refuter", criterion3),
        ("round robin on identical resources", criterion4),
        ("two-resource laminar construction", criterion5),
        ("two-resource stability characterization", criterion6),
        ("two-color theorem", criterion7),
        ("structure class hierarchy", criterion8),
        ("existence table reproduction", criterion9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{took:.2?}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{took:.2?}]", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

