//! Brute-force reference implementations written straight from the game's
//! definitions. They share no code paths with the library kernels.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use carmen_core::hypercube::KSet;
use carmen_core::query::{ratio, DecisionTree, Node, RandomizedAlgorithm};
use carmen_core::TableStrategy;
use rand::Rng;

/// A Bob-strategy as a plain map from ordered prefix to bit (0-based cities).
#[derive(Debug, Clone)]
pub struct OracleStrategy {
    pub n: usize,
    pub map: HashMap<Vec<usize>, bool>,
}

pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..n {
            if !cur.contains(&c) {
                cur.push(c);
                rec(n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

/// Every ordered prefix of length `1..n`.
pub fn all_prefixes(n: usize) -> Vec<Vec<usize>> {
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for p in all_perms(n) {
        for t in 1..n {
            out.insert(p[..t].to_vec());
        }
    }
    out.into_iter().collect()
}

impl OracleStrategy {
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        OracleStrategy { n, map: all_prefixes(n).into_iter().map(|p| (p, rng.gen())).collect() }
    }

    pub fn from_fn(n: usize, f: impl Fn(&[usize]) -> bool) -> Self {
        OracleStrategy { n, map: all_prefixes(n).into_iter().map(|p| { let b = f(&p); (p, b) }).collect() }
    }

    pub fn to_table(&self) -> TableStrategy {
        TableStrategy::from_entries(self.n, self.map.iter().map(|(p, &b)| (p.clone(), b))).unwrap()
    }

    /// `b(π, z)` as a vector of bits, coordinate `j` at index `j`.
    pub fn clue(&self, pi: &[usize], z: bool) -> Vec<bool> {
        let mut b = vec![false; self.n];
        for t in 1..self.n {
            b[pi[t - 1]] = self.map[&pi[..t].to_vec()];
        }
        b[pi[self.n - 1]] = z;
        b
    }

    /// All `(π, z, b)` triples.
    pub fn outcomes(&self) -> Vec<(Vec<usize>, bool, Vec<bool>)> {
        let mut out = Vec::new();
        for pi in all_perms(self.n) {
            for z in [false, true] {
                let b = self.clue(&pi, z);
                out.push((pi.clone(), z, b));
            }
        }
        out
    }

    /// Suspect sets obtained by grouping the full outcome table by clue string.
    pub fn grouped_suspects(&self) -> HashMap<Vec<bool>, BTreeSet<usize>> {
        let mut g: HashMap<Vec<bool>, BTreeSet<usize>> = HashMap::new();
        for (pi, _, b) in self.outcomes() {
            g.entry(b).or_default().insert(pi[self.n - 1]);
        }
        g
    }

    pub fn complexity(&self) -> usize {
        self.grouped_suspects().values().map(|s| s.len()).max().unwrap()
    }

    /// `H(π(n) | b)` as `H(π(n), b) - H(b)` from raw outcome counts.
    pub fn entropy_direct(&self) -> f64 {
        let mut joint: HashMap<(Vec<bool>, usize), f64> = HashMap::new();
        let mut marg: HashMap<Vec<bool>, f64> = HashMap::new();
        let outcomes = self.outcomes();
        let total = outcomes.len() as f64;
        for (pi, _, b) in outcomes {
            *joint.entry((b.clone(), pi[self.n - 1])).or_default() += 1.0;
            *marg.entry(b).or_default() += 1.0;
        }
        let h = |m: &mut dyn Iterator<Item = f64>| -> f64 { m.map(|c| { let p = c / total; -p * p.log2() }).sum() };
        h(&mut joint.values().copied()) - h(&mut marg.values().copied())
    }
}

pub fn bits_to_string(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

pub fn bits_to_u32(b: &[bool]) -> u32 {
    b.iter().enumerate().fold(0, |acc, (i, &x)| acc | (x as u32) << i)
}

/// Members of `K` agreeing with the partial assignment (`None` = free).
pub fn oracle_restriction(k: &KSet, w: &[Option<bool>]) -> usize {
    (0..1u32 << k.n())
        .filter(|&y| k.contains(y))
        .filter(|&y| w.iter().enumerate().all(|(i, c)| c.is_none_or(|v| (y >> i & 1 == 1) == v)))
        .count()
}

/// Majority-halving strategy built by recounting `K` from scratch at every prefix.
pub fn oracle_halving(k: &KSet) -> OracleStrategy {
    let n = k.n();
    OracleStrategy::from_fn(n, |prefix| {
        let mut w = vec![None; n];
        let mut bit = false;
        for &c in prefix {
            let mut w0 = w.clone();
            w0[c] = Some(false);
            let mut w1 = w.clone();
            w1[c] = Some(true);
            bit = oracle_restriction(k, &w1) > oracle_restriction(k, &w0);
            w[c] = Some(bit);
        }
        bit
    })
}

pub fn oracle_degree(k: &KSet, y: u32) -> usize {
    (0..k.n()).filter(|&i| k.contains(y ^ 1 << i)).count()
}

pub fn oracle_max_degree(k: &KSet) -> usize {
    (0..1u32 << k.n()).filter(|&y| k.contains(y)).map(|y| oracle_degree(k, y)).max().unwrap()
}

/// Uniformly random `K` with `|K| > 2^(n-1)`, rejection-sampled from all subsets.
pub fn random_majority_kset<R: Rng>(n: usize, rng: &mut R) -> KSet {
    loop {
        let k = KSet::from_fn(n, |_| rng.gen()).unwrap();
        if k.is_majority() {
            return k;
        }
    }
}

/// Random tree of depth at most `depth` whose leaves output the parity of the
/// bits read on the path, each leaf flipped with probability `noise`.
pub fn random_tree<R: Rng>(n: usize, depth: usize, noise: f64, rng: &mut R) -> DecisionTree {
    fn build<R: Rng>(n: usize, left: usize, used: u64, acc: bool, noise: f64, rng: &mut R) -> Node {
        if left == 0 || rng.gen_bool(0.1) {
            return Node::Leaf(acc ^ rng.gen_bool(noise));
        }
        let free: Vec<usize> = (0..n).filter(|i| used >> i & 1 == 0).collect();
        let i = free[rng.gen_range(0..free.len())];
        Node::query(
            i,
            build(n, left - 1, used | 1 << i, acc, noise, rng),
            build(n, left - 1, used | 1 << i, !acc, noise, rng),
        )
    }
    DecisionTree::new(n, depth, build(n, depth, 0, false, noise, rng)).unwrap()
}

/// Random finite mixture of 1..=4 trees with small-denominator weights.
pub fn random_algorithm<R: Rng>(n: usize, rng: &mut R) -> RandomizedAlgorithm {
    let atoms = rng.gen_range(1..=4usize);
    let mut weights: Vec<u64> = (0..atoms).map(|_| rng.gen_range(1..=6)).collect();
    if rng.gen_bool(0.5) {
        weights[0] *= 4;
    }
    let total: u64 = weights.iter().sum();
    RandomizedAlgorithm::new(
        weights
            .into_iter()
            .map(|w| {
                let depth = rng.gen_range(1..=n);
                let noise = [0.0, 0.05, 0.2][rng.gen_range(0..3)];
                (random_tree(n, depth, noise, rng), ratio(w, total))
            })
            .collect(),
    )
    .unwrap()
}

/// Exact success probabilities of plain decision-tree evaluation, per input.
pub fn oracle_parity_probs(alg: &RandomizedAlgorithm) -> BTreeMap<u32, num_rational::BigRational> {
    fn eval(node: &Node, y: u32) -> bool {
        match node {
            Node::Leaf(b) => *b,
            Node::Query { index, if0, if1 } => eval(if y >> index & 1 == 1 { if1 } else { if0 }, y),
        }
    }
    (0..1u32 << alg.n())
        .map(|y| {
            let par = y.count_ones() % 2 == 1;
            let p = alg
                .atoms()
                .iter()
                .filter(|(t, _)| eval(t.root(), y) == par)
                .map(|(_, p)| p.clone())
                .sum();
            (y, p)
        })
        .collect()
}
