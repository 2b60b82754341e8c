//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed. Run with `--nocapture` to see the lines.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;

use carmen_core::entropy::posterior_table;
use carmen_core::game::{exact_game_complexity, strategy_complexity, suspect_set};
use carmen_core::hypercube::{min_max_degree, verify_theorem1, KSet, SearchMode};
use carmen_core::query::{hard_distribution_exact, hard_distribution_sample, ratio, theorem2_harness, Node, RandomizedAlgorithm};
use carmen_core::{BobStrategy, Caps, ClueString, Permutation};
use common::*;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ENTROPY_TOL: f64 = 1e-12;
const RANDOM_K_N4: usize = 1000;
const STRATEGIES_PER_N: usize = 100;
const MIXTURES_WITH_PREMISE: usize = 200;
const MAX_MIXTURE_DRAWS: u64 = 50_000;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn majority_sets(n: usize) -> Vec<KSet> {
    (0..1u64 << (1 << n))
        .map(|m| KSet::from_small_mask(n, m).unwrap())
        .filter(|k| k.is_majority())
        .collect()
}

fn check_halving_set(k: &KSet, caps: &Caps) -> Result<(), String> {
    let r = verify_theorem1(k, caps).map_err(|e| e.to_string())?;
    let hex = k.to_hex();
    ensure(r.passed(), || format!("K={hex}: {r:?}"))?;
    let oracle = oracle_halving(k);
    let d = oracle_max_degree(k);
    ensure(r.max_degree == d, || format!("K={hex}: degree {} vs oracle {d}", r.max_degree))?;
    let c = oracle.complexity();
    ensure(r.complexity.value == c, || format!("K={hex}: complexity {} vs oracle {c}", r.complexity.value))?;
    ensure(c <= d, || format!("K={hex}: oracle complexity {c} above degree {d}"))?;
    for (pi, _, b) in oracle.outcomes() {
        let y = bits_to_u32(&b);
        ensure(k.contains(y), || format!("K={hex}: clue {} not in K", bits_to_string(&b)))?;
        let last = pi[k.n() - 1];
        ensure(oracle.grouped_suspects()[&b].iter().all(|&s| s == last || k.contains(y ^ 1 << s)), || {
            format!("K={hex}: suspect outside the K-neighbourhood of {}", bits_to_string(&b))
        })?;
    }
    Ok(())
}

fn halving_bound(caps: &Caps) -> Check {
    let mut count = 0;
    for n in [2, 3] {
        let sets = majority_sets(n);
        let expected = if n == 2 { 5 } else { 93 };
        ensure(sets.len() == expected, || format!("n={n}: {} majority sets, expected {expected}", sets.len()))?;
        for k in &sets {
            check_halving_set(k, caps)?;
        }
        count += sets.len();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4b);
    for _ in 0..RANDOM_K_N4 {
        check_halving_set(&random_majority_kset(4, &mut rng), caps)?;
    }
    Ok(format!("{count} exhaustive sets at n=2,3 and {RANDOM_K_N4} random sets at n=4"))
}

fn small_values(caps: &Caps) -> Check {
    let v2 = exact_game_complexity(2, caps).map_err(|e| e.to_string())?;
    let v3 = exact_game_complexity(3, caps).map_err(|e| e.to_string())?;
    ensure(v2.value == 2 && v2.strategies_examined == 4, || format!("n=2: {v2:?}"))?;
    ensure(v3.value == 2 && v3.strategy_index == 5 && v3.strategies_examined == 512, || {
        format!("n=3: value {} index {}", v3.value, v3.strategy_index)
    })?;
    // Independent minimisation over all prefix maps.
    for n in [2, 3] {
        let prefixes = all_prefixes(n);
        let best = (0..1u32 << prefixes.len())
            .map(|mask| {
                let map = prefixes.iter().enumerate().map(|(i, p)| (p.clone(), mask >> i & 1 == 1)).collect();
                OracleStrategy { n, map }.complexity()
            })
            .min()
            .unwrap();
        ensure(best == 2, || format!("oracle game value at n={n} is {best}"))?;
    }
    let w = strategy_complexity(&v3.strategy.clone().into(), caps).map_err(|e| e.to_string())?;
    ensure(w.value == 2, || format!("witness strategy has complexity {}", w.value))?;
    let mut degrees = Vec::new();
    for (n, value, hex, examined) in [(2, 2, "7", 5), (3, 2, "3d", 93), (4, 2, "", 26333)] {
        let m = min_max_degree(n, None, SearchMode::Exhaustive, caps).map_err(|e| e.to_string())?;
        ensure(m.value == value && m.examined == examined, || format!("min max degree n={n}: {m:?}"))?;
        ensure(hex.is_empty() || m.witness.to_hex() == hex, || format!("n={n} witness {}", m.witness.to_hex()))?;
        let oracle = majority_sets(n.min(3));
        if n <= 3 {
            let best = oracle.iter().map(oracle_max_degree).min().unwrap();
            ensure(best == value, || format!("oracle min max degree at n={n} is {best}"))?;
        }
        ensure(oracle_max_degree(&m.witness) == value, || format!("n={n} witness degree mismatch"))?;
        degrees.push(m.value);
    }
    Ok(format!("game values 2,2 (n=3 witness index 5); min max degree {degrees:?} for n=2..4"))
}

fn suspect_sets(caps: &Caps) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e);
    for n in 2..=5 {
        for _ in 0..STRATEGIES_PER_N {
            let oracle = OracleStrategy::random(n, &mut rng);
            let s: BobStrategy = oracle.to_table().into();
            let grouped = oracle.grouped_suspects();
            for y in 0..1u32 << n {
                let b = ClueString::new(n, y).unwrap();
                let got = suspect_set(&s, &b, caps).map_err(|e| e.to_string())?;
                let want = grouped.iter().find(|(k, _)| bits_to_u32(k) == y).map(|(_, v)| v.clone()).unwrap_or_default();
                ensure(got == want, || format!("n={n} b={b}: {got:?} vs oracle {want:?}"))?;
            }
            let c = strategy_complexity(&s, caps).map_err(|e| e.to_string())?.value;
            ensure(c == oracle.complexity(), || format!("n={n}: complexity {c} vs oracle {}", oracle.complexity()))?;
        }
    }
    Ok(format!("{STRATEGIES_PER_N} random strategies per n=2..5, every clue string"))
}

fn entropy(caps: &Caps) -> Check {
    let const0 = OracleStrategy::from_fn(2, |_| false);
    let h0 = posterior_table(&const0.to_table().into(), caps).map_err(|e| e.to_string())?.conditional_entropy();
    ensure(h0 == 0.5, || format!("constant-0 strategy at n=2 gives {h0}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xe7);
    let mut worst = 0f64;
    for n in 2..=6 {
        for _ in 0..STRATEGIES_PER_N {
            let oracle = OracleStrategy::random(n, &mut rng);
            let table = oracle.to_table();
            let t = posterior_table(&table.clone().into(), caps).map_err(|e| e.to_string())?;
            ensure(t.is_normalized(), || format!("n={n}: table not normalised"))?;
            let h = t.conditional_entropy();
            ensure(h >= 0.0 && h <= (n as f64).log2() + ENTROPY_TOL, || format!("n={n}: H={h} out of range"))?;
            let diff = (h - oracle.entropy_direct()).abs();
            worst = worst.max(diff);
            ensure(diff <= ENTROPY_TOL, || format!("n={n}: posterior and joint paths differ by {diff}"))?;
            let sigma = Permutation::random(n, &mut rng).unwrap();
            let relabelled = table.relabel(&sigma).map_err(|e| e.to_string())?;
            let after = posterior_table(&relabelled.into(), caps).map_err(|e| e.to_string())?;
            ensure(t.relabel(&sigma).map_err(|e| e.to_string())? == after, || format!("n={n}: relabelled table differs"))?;
            let hr = after.conditional_entropy();
            ensure(hr == h, || format!("n={n}: relabelling changed H from {h} to {hr}"))?;
        }
    }
    Ok(format!("H=0.5 for constant-0 at n=2; {STRATEGIES_PER_N} strategies per n=2..6, max path gap {worst:.1e}"))
}

/// Probability that the algorithm reads the hideout when Bob plays `oracle`,
/// over uniform itineraries, the free final bit and the mixture.
fn oracle_search_success(alg: &RandomizedAlgorithm, oracle: &OracleStrategy) -> BigRational {
    fn reads(node: &Node, b: &[bool], target: usize) -> bool {
        match node {
            Node::Leaf(_) => false,
            Node::Query { index, .. } if *index == target => true,
            Node::Query { index, if0, if1 } => reads(if b[*index] { if1 } else { if0 }, b, target),
        }
    }
    let outcomes = oracle.outcomes();
    let total = outcomes.len() as u64;
    let mut sum = ratio(0, 1);
    for (pi, _, b) in &outcomes {
        for (tree, p) in alg.atoms() {
            if reads(tree.root(), b, pi[oracle.n - 1]) {
                sum += p * ratio(1, total);
            }
        }
    }
    sum
}

fn reduction(caps: &Caps) -> Check {
    let mut per_n: BTreeMap<usize, usize> = BTreeMap::new();
    let mut min_success: Option<BigRational> = None;
    let mut draws = 0u64;
    let mut seed = 0u64;
    while per_n.values().sum::<usize>() < MIXTURES_WITH_PREMISE {
        ensure(draws < MAX_MIXTURE_DRAWS, || format!("only {per_n:?} mixtures met the premise"))?;
        draws += 1;
        seed += 1;
        let n = 3 + (seed % 4) as usize;
        if per_n.get(&n).copied().unwrap_or(0) >= MIXTURES_WITH_PREMISE / 4 {
            continue;
        }
        let alg = random_algorithm(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let probs = oracle_parity_probs(&alg);
        let k = KSet::from_fn(n, |y| probs[&y] >= ratio(2, 3)).unwrap();
        let r = theorem2_harness(&alg, caps).map_err(|e| e.to_string())?;
        ensure(r.premise == k.is_majority(), || format!("seed {seed}: premise disagrees with oracle"))?;
        if !r.premise {
            continue;
        }
        ensure(r.passed(), || format!("seed {seed}: {r:?}"))?;
        let success = r.search_success.clone().unwrap();
        let want = oracle_search_success(&alg, &oracle_halving(&k));
        ensure(success == want, || format!("seed {seed}: search success {success} vs oracle {want}"))?;
        ensure(success >= ratio(1, 3), || format!("seed {seed}: search success {success} below 1/3"))?;
        let dist = hard_distribution_exact(&k, caps).map_err(|e| e.to_string())?;
        ensure(dist.keys().all(|b| k.contains(b.bits())), || format!("seed {seed}: hard distribution leaves K"))?;
        ensure(dist.values().sum::<num_rational::Ratio<u64>>() == 1.into(), || format!("seed {seed}: mass != 1"))?;
        let sample = hard_distribution_sample(&k, seed, 64).map_err(|e| e.to_string())?;
        ensure(sample.iter().all(|b| k.contains(b.bits())), || format!("seed {seed}: sampled clue outside K"))?;
        *per_n.entry(n).or_default() += 1;
        if min_success.as_ref().is_none_or(|m| &success < m) {
            min_success = Some(success);
        }
    }
    Ok(format!(
        "{per_n:?} mixtures with premise out of {draws} draws; min search success {}",
        min_success.unwrap()
    ))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn carmen(args: &[&str]) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_carmen"))
        .args(args)
        .env_remove("CARMEN_CAP_SUSPECT")
        .env_remove("CARMEN_CAP_EXACT_MIN")
        .env_remove("CARMEN_CAP_ENTROPY")
        .env_remove("CARMEN_CAP_SUBSET")
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn determinism() -> Check {
    let halving = fixture("halving_k5of8.json");
    let k5 = fixture("k5of8.json");
    let parity = fixture("parity_full.json");
    let const0 = fixture("const0.json");
    let (halving, k5, parity) = (halving.to_str().unwrap(), k5.to_str().unwrap(), parity.to_str().unwrap());
    let const0 = const0.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["play", "--strategy", halving, "--pi", "3,1,2", "--z", "0"],
        vec!["complexity", "--n", "2", "--strategy", const0],
        vec!["degree", "--kset", k5],
        vec!["entropy", "--strategy", const0],
        vec!["hard-dist", "--kset", k5],
        vec!["search", "--alg", parity, "--strategy", halving],
        vec!["search-min", "--n", "3"],
        vec!["complexity", "--strategy", halving],
        vec!["verify-t1", "--kset", k5],
        vec!["entropy", "--strategy", halving, "--format", "csv"],
        vec!["reduce", "--alg", parity],
        vec!["degree", "--n", "4"],
        vec!["degree", "--n", "5", "--mode", "sampled", "--seed", "11", "--samples", "300"],
        vec!["hard-dist", "--kset", k5, "--mode", "sampled", "--seed", "3", "--count", "50"],
        vec!["search", "--alg", parity, "--strategy", halving, "--mode", "sampled", "--seed", "5", "--samples", "5000"],
    ];
    for args in &runs {
        let first = carmen(args)?;
        ensure(first.1 == 0 && !first.0.is_empty(), || format!("{args:?} exited {}", first.1))?;
        ensure(carmen(args)? == first, || format!("{args:?} differs between runs"))?;
        for w in ["1", "8"] {
            let mut with = args.clone();
            with.extend(["--workers", w]);
            ensure(carmen(&with)? == first, || format!("{args:?} differs with --workers {w}"))?;
        }
    }
    Ok(format!("{} commands byte-identical across reruns and --workers 1/8", runs.len()))
}

#[test]
fn acceptance() {
    let caps = Caps::default();
    let criteria: Vec<Criterion> = vec![
        ("halving strategy meets the induced-degree bound", Box::new(|| halving_bound(&caps))),
        ("small exact values", Box::new(|| small_values(&caps))),
        ("suspect sets match the grouping oracle", Box::new(|| suspect_sets(&caps))),
        ("conditional entropy", Box::new(|| entropy(&caps))),
        ("parity-to-search reduction", Box::new(|| reduction(&caps))),
        ("deterministic CLI reports", Box::new(determinism)),
    ];
    let mut failed = BTreeSet::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL [{}] {name}: {detail}", i + 1);
                failed.insert(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
