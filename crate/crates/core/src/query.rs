//! Query-bounded Alice: she reads at most `t` clue bits through a randomized
//! decision tree and succeeds if one of her reads lands on Carmen's hideout.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::caps::Caps;
use crate::clue::ClueString;
use crate::error::{Error, Result};
use crate::game::{clue_string, par_branches};
use crate::hypercube::{KHalvingStrategy, KSet};
use crate::perm::{check_n, factorial, Permutation};
use crate::strategy::BobStrategy;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(bool),
    /// Reads coordinate `index` (0-based) and continues in `if0` or `if1`.
    Query { index: usize, if0: Box<Node>, if1: Box<Node> },
}

impl Node {
    pub fn query(index: usize, if0: Node, if1: Node) -> Node {
        Node::Query { index, if0: Box::new(if0), if1: Box::new(if1) }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Query { if0, if1, .. } => 1 + if0.depth().max(if1.depth()),
        }
    }
}

/// A deterministic query strategy on `n` input bits with depth at most `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecisionTree {
    n: usize,
    t: usize,
    root: Node,
}

impl DecisionTree {
    /// Validates query indices, the depth bound and that no path repeats a query.
    pub fn new(n: usize, t: usize, root: Node) -> Result<Self> {
        check_n(n)?;
        if t > n {
            return Err(Error::InvalidTree(format!("depth bound t = {t} exceeds n = {n}")));
        }
        fn check(node: &Node, n: usize, seen: u64) -> Result<()> {
            match node {
                Node::Leaf(_) => Ok(()),
                Node::Query { index, if0, if1 } => {
                    if *index >= n {
                        return Err(Error::InvalidTree(format!("query {} out of range for n = {n}", index + 1)));
                    }
                    if seen >> index & 1 == 1 {
                        return Err(Error::InvalidTree(format!("query {} repeated on a path", index + 1)));
                    }
                    check(if0, n, seen | 1 << index)?;
                    check(if1, n, seen | 1 << index)
                }
            }
        }
        check(&root, n, 0)?;
        let depth = root.depth();
        if depth > t {
            return Err(Error::InvalidTree(format!("depth {depth} exceeds bound t = {t}")));
        }
        Ok(DecisionTree { n, t, root })
    }

    pub fn leaf(n: usize, bit: bool) -> Result<Self> {
        DecisionTree::new(n, 0, Node::Leaf(bit))
    }

    /// Reads every coordinate in order and outputs the parity.
    pub fn full_parity(n: usize) -> Result<Self> {
        fn build(i: usize, n: usize, acc: bool) -> Node {
            if i == n {
                Node::Leaf(acc)
            } else {
                Node::query(i, build(i + 1, n, acc), build(i + 1, n, !acc))
            }
        }
        DecisionTree::new(n, n, build(0, n, false))
    }

    /// Reads `index` and outputs what it saw.
    pub fn echo(n: usize, index: usize) -> Result<Self> {
        DecisionTree::new(n, 1, Node::query(index, Node::Leaf(false), Node::Leaf(true)))
    }

    /// Reads the coordinates of `queries` in order regardless of the answers and
    /// outputs the parity of what it read.
    pub fn nonadaptive_parity(n: usize, queries: &[usize]) -> Result<Self> {
        fn build(q: &[usize], acc: bool) -> Node {
            match q.split_first() {
                None => Node::Leaf(acc),
                Some((&i, rest)) => Node::query(i, build(rest, acc), build(rest, !acc)),
            }
        }
        DecisionTree::new(n, queries.len(), build(queries, false))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Returns `(queried coordinates as a mask, output)` on packed input `b`.
    #[inline]
    pub(crate) fn eval(&self, b: u32) -> (u32, bool) {
        let mut node = &self.root;
        let mut visits = 0u32;
        loop {
            match node {
                Node::Leaf(out) => return (visits, *out),
                Node::Query { index, if0, if1 } => {
                    visits |= 1 << index;
                    node = if b >> index & 1 == 1 { if1 } else { if0 };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace<'a> {
    pub tree: &'a DecisionTree,
    pub input: ClueString,
    /// Queried coordinates in query order.
    pub visits: Vec<usize>,
    pub output: bool,
}

pub fn run_tree<'a>(tree: &'a DecisionTree, b: &ClueString) -> Result<ExecutionTrace<'a>> {
    if tree.n != b.n() {
        return Err(Error::DimensionMismatch { expected: tree.n, found: b.n() });
    }
    let mut node = &tree.root;
    let mut visits = Vec::new();
    let output = loop {
        match node {
            Node::Leaf(out) => break *out,
            Node::Query { index, if0, if1 } => {
                visits.push(*index);
                node = if b.get(*index) { if1 } else { if0 };
            }
        }
    };
    Ok(ExecutionTrace { tree, input: *b, visits, output })
}

/// A finite mixture of decision trees with exact positive weights summing to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomizedAlgorithm {
    n: usize,
    t: usize,
    atoms: Vec<(DecisionTree, BigRational)>,
}

impl RandomizedAlgorithm {
    pub fn new(atoms: Vec<(DecisionTree, BigRational)>) -> Result<Self> {
        let n = atoms.first().ok_or_else(|| Error::InvalidAlgorithm("no atoms".into()))?.0.n;
        let mut total = BigRational::zero();
        for (tree, p) in &atoms {
            if tree.n != n {
                return Err(Error::InvalidAlgorithm(format!("atoms disagree on n ({} vs {n})", tree.n)));
            }
            if *p <= BigRational::zero() {
                return Err(Error::InvalidAlgorithm(format!("non-positive weight {p}")));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidAlgorithm(format!("weights sum to {total}, not 1")));
        }
        let t = atoms.iter().map(|(tree, _)| tree.t).max().unwrap_or(0);
        Ok(RandomizedAlgorithm { n, t, atoms })
    }

    pub fn deterministic(tree: DecisionTree) -> Self {
        RandomizedAlgorithm { n: tree.n, t: tree.t, atoms: vec![(tree, BigRational::one())] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest depth bound among the atoms.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn atoms(&self) -> &[(DecisionTree, BigRational)] {
        &self.atoms
    }
}

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn outcome_total(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(2 * factorial(n)))
}

/// Per-atom counts of successful executions over all `n! · 2` outcomes.
fn success_counts(alg: &RandomizedAlgorithm, strategy: &BobStrategy) -> Vec<u64> {
    alg.atoms
        .par_iter()
        .map(|(tree, _)| {
            par_branches(
                strategy,
                || 0u64,
                |acc, perm, bits| {
                    let last = *perm.last().unwrap();
                    for z in [0, 1u32] {
                        let (visits, _) = tree.eval(bits | z << last);
                        *acc += (visits >> last & 1) as u64;
                    }
                },
            )
            .into_iter()
            .sum()
        })
        .collect()
}

/// Exact `Pr[π(n) ∈ VISITS]` over uniform `(π, z)` and the algorithm's coins.
pub fn search_success_probability(
    alg: &RandomizedAlgorithm,
    strategy: &BobStrategy,
    caps: &Caps,
) -> Result<BigRational> {
    if alg.n != strategy.n() {
        return Err(Error::DimensionMismatch { expected: strategy.n(), found: alg.n });
    }
    Caps::check("search_success_probability", alg.n, caps.suspect)?;
    let counts = success_counts(alg, strategy);
    let total = outcome_total(alg.n);
    Ok(alg
        .atoms
        .iter()
        .zip(counts)
        .map(|((_, p), c)| p * BigRational::from_integer(BigInt::from(c)) / &total)
        .sum())
}

/// Monte Carlo estimate with a 95% normal-approximation half-width.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub half_width_95: f64,
    pub samples: u64,
}

/// Samples per independent random stream; stream `c` covers samples
/// `c * CHUNK .. (c + 1) * CHUNK`, so the estimate does not depend on the
/// number of worker threads.
const CHUNK: u64 = 4096;

pub fn search_success_estimate(
    alg: &RandomizedAlgorithm,
    strategy: &BobStrategy,
    seed: u64,
    samples: u64,
) -> Result<Estimate> {
    let n = strategy.n();
    if alg.n != n {
        return Err(Error::DimensionMismatch { expected: n, found: alg.n });
    }
    if samples == 0 {
        return Err(Error::Premise("Monte Carlo needs at least one sample".into()));
    }
    let weights: Vec<f64> = alg.atoms.iter().map(|(_, p)| p.to_f64().unwrap_or(0.0)).collect();
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len)
                .map(|_| {
                    let pi = Permutation::random(n, &mut rng).expect("n checked");
                    let z: bool = rng.gen();
                    let b = clue_string(strategy, &pi, z).expect("same n");
                    let mut x: f64 = rng.gen();
                    let atom = weights
                        .iter()
                        .position(|w| {
                            x -= w;
                            x < 0.0
                        })
                        .unwrap_or(weights.len() - 1);
                    let (visits, _) = alg.atoms[atom].0.eval(b.bits());
                    (visits >> pi.final_city() & 1) as u64
                })
                .sum::<u64>()
        })
        .sum();
    let mean = hits as f64 / samples as f64;
    let std_error = (mean * (1.0 - mean) / samples as f64).sqrt();
    Ok(Estimate { mean, std_error, half_width_95: 1.96 * std_error, samples })
}

/// `Pr[alg(y) = PAR(y)]` for every input `y`, indexed by packed value.
pub fn parity_success_probabilities(alg: &RandomizedAlgorithm) -> Result<Vec<BigRational>> {
    KSet::empty(alg.n)?;
    Ok((0..1u32 << alg.n)
        .into_par_iter()
        .map(|y| {
            let parity = y.count_ones() % 2 == 1;
            alg.atoms.iter().filter(|(tree, _)| tree.eval(y).1 == parity).map(|(_, p)| p.clone()).sum()
        })
        .collect())
}

/// `K = { y : Pr[alg(y) = PAR(y)] >= 2/3 }`.
pub fn parity_success_set(alg: &RandomizedAlgorithm) -> Result<KSet> {
    let probs = parity_success_probabilities(alg)?;
    let threshold = ratio(2, 3);
    KSet::from_fn(alg.n, |y| probs[y as usize] >= threshold)
}

/// First outcome violating one of the pointwise checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Theorem2Violation {
    pub check: &'static str,
    /// 0-based atom index.
    pub atom: usize,
    pub pi: Permutation,
    pub z: bool,
    pub b: ClueString,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem2Report {
    pub n: usize,
    pub t: usize,
    pub k_size: usize,
    /// `|K| > 2^(n-1)`; when false nothing else was evaluated.
    pub premise: bool,
    /// `Pr[search-successful on b]` under the halving strategy for `K`.
    pub search_success: Option<BigRational>,
    /// `Pr[alg(b) = PAR(b)]`.
    pub parity_correct: Option<BigRational>,
    /// Correctness on `b` and on `b'` (hideout bit flipped) have equal probability, per atom.
    pub eq1_ok: bool,
    /// `1[correct on b] + 1[correct on b'] <= 1 + 1[search-successful on b]` everywhere.
    pub eq2_ok: bool,
    /// Unsuccessful runs on `b` and `b'` read the same bits and answer alike.
    pub view_ok: bool,
    /// Every clue string lies in `K`.
    pub support_ok: bool,
    /// `search_success >= 1/3` and `parity_correct <= (1 + search_success) / 2`.
    pub bound_ok: bool,
    pub violation: Option<Theorem2Violation>,
}

impl Theorem2Report {
    pub fn passed(&self) -> bool {
        self.premise && self.eq1_ok && self.eq2_ok && self.view_ok && self.support_ok && self.bound_ok
    }
}

#[derive(Default)]
struct PairTally {
    success: u64,
    correct_b: u64,
    correct_flipped: u64,
    violation: Option<(&'static str, Vec<u8>, bool, u32)>,
}

/// Runs the parity-to-search reduction on `alg`: builds the halving strategy
/// for its parity success set and checks every ingredient exactly.
pub fn theorem2_harness(alg: &RandomizedAlgorithm, caps: &Caps) -> Result<Theorem2Report> {
    let n = alg.n;
    let kset = parity_success_set(alg)?;
    let mut report = Theorem2Report {
        n,
        t: alg.t,
        k_size: kset.size(),
        premise: kset.is_majority(),
        search_success: None,
        parity_correct: None,
        eq1_ok: false,
        eq2_ok: false,
        view_ok: false,
        support_ok: false,
        bound_ok: false,
        violation: None,
    };
    if !report.premise {
        return Ok(report);
    }
    Caps::check("theorem2_harness", n, caps.suspect)?;
    let strategy = BobStrategy::KHalving(KHalvingStrategy::new(kset.clone())?);

    let tallies: Vec<PairTally> = alg
        .atoms
        .par_iter()
        .map(|(tree, _)| {
            par_branches(&strategy, PairTally::default, |acc, perm, bits| {
                let last = *perm.last().unwrap();
                for z in [false, true] {
                    let b = bits | (z as u32) << last;
                    let flipped = b ^ 1 << last;
                    let (vis_b, out_b) = tree.eval(b);
                    let (vis_f, out_f) = tree.eval(flipped);
                    let success = vis_b >> last & 1 == 1;
                    let ok_b = out_b == (b.count_ones() % 2 == 1);
                    let ok_f = out_f == (flipped.count_ones() % 2 == 1);
                    acc.success += success as u64;
                    acc.correct_b += ok_b as u64;
                    acc.correct_flipped += ok_f as u64;
                    if acc.violation.is_some() {
                        continue;
                    }
                    let check = if !kset.contains(b) {
                        Some("support")
                    } else if success != (vis_f >> last & 1 == 1) || (!success && (vis_b != vis_f || out_b != out_f)) {
                        Some("view")
                    } else if ok_b as u8 + ok_f as u8 > 1 + success as u8 {
                        Some("eq2")
                    } else {
                        None
                    };
                    if let Some(check) = check {
                        acc.violation = Some((check, perm.to_vec(), z, b));
                    }
                }
            })
            .into_iter()
            .reduce(|mut a, b| {
                a.success += b.success;
                a.correct_b += b.correct_b;
                a.correct_flipped += b.correct_flipped;
                a.violation = a.violation.or(b.violation);
                a
            })
            .expect("n >= 2 branches")
        })
        .collect();

    let total = outcome_total(n);
    let weigh = |f: &dyn Fn(&PairTally) -> u64| -> BigRational {
        alg.atoms
            .iter()
            .zip(&tallies)
            .map(|((_, p), tally)| p * BigRational::from_integer(BigInt::from(f(tally))) / &total)
            .sum()
    };
    let success = weigh(&|t| t.success);
    let correct = weigh(&|t| t.correct_b);

    report.violation = tallies.iter().enumerate().find_map(|(atom, t)| {
        t.violation.as_ref().map(|(check, perm, z, b)| Theorem2Violation {
            check,
            atom,
            pi: Permutation::from_raw(perm.clone()),
            z: *z,
            b: ClueString::from_raw(n, *b),
        })
    });
    let failed = |c: &str| report.violation.as_ref().is_some_and(|v| v.check == c);
    report.support_ok = !failed("support");
    report.view_ok = !failed("view") && !failed("support");
    report.eq2_ok = report.view_ok && !failed("eq2");
    report.eq1_ok = tallies.iter().all(|t| t.correct_b == t.correct_flipped);
    let half = ratio(1, 2);
    report.bound_ok = success >= ratio(1, 3) && correct <= &half * (BigRational::one() + &success);
    report.search_success = Some(success);
    report.parity_correct = Some(correct);
    Ok(report)
}

/// Draws `count` clue strings `b(π, z)` under the halving strategy for `K`,
/// with `(π, z)` uniform. Sample `i` uses its own stream derived from `seed`.
pub fn hard_distribution_sample(kset: &KSet, seed: u64, count: usize) -> Result<Vec<ClueString>> {
    let strategy = BobStrategy::KHalving(KHalvingStrategy::new(kset.clone())?);
    let n = strategy.n();
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let pi = Permutation::random(n, &mut rng)?;
            clue_string(&strategy, &pi, rng.gen())
        })
        .collect()
}

/// Exact law of `b(π, z)` under the halving strategy for `K`.
pub fn hard_distribution_exact(kset: &KSet, caps: &Caps) -> Result<BTreeMap<ClueString, Ratio<u64>>> {
    let strategy = BobStrategy::KHalving(KHalvingStrategy::new(kset.clone())?);
    let n = strategy.n();
    Caps::check("hard_distribution_exact", n, caps.suspect)?;
    let mut counts = BTreeMap::new();
    crate::game::for_each_outcome(&strategy, caps, |perm, b| {
        let last = *perm.last().unwrap() as usize;
        *counts.entry(b).or_insert(0u64) += 1;
        *counts.entry(b.flipped(last)).or_insert(0u64) += 1;
    })?;
    let total = 2 * factorial(n);
    Ok(counts.into_iter().map(|(b, c)| (b, Ratio::new(c, total))).collect())
}
