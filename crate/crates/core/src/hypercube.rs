//! Subsets of the hypercube `{0,1}^n`, the majority-halving Bob-strategy built
//! from a subset `K` with `|K| > 2^(n-1)`, and the induced-degree bound it obeys.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::clue::{ClueString, PartialClue};
use crate::error::{Error, Result};
use crate::game::{complexity_from_index, par_branches, Complexity, OutcomeIndex};
use crate::perm::{check_n, Permutation};
use crate::strategy::{BobStrategy, MemorylessStrategy};

/// Largest dimension a [`KSet`] mask may have.
pub const MAX_KSET_N: usize = 24;

/// `K ⊆ {0,1}^n` as a `2^n`-bit characteristic mask. String `y` sits at index
/// `Σ y_i 2^(i-1)`, so coordinate 1 is the least significant bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KSet {
    n: usize,
    words: Vec<u64>,
}

impl KSet {
    pub fn empty(n: usize) -> Result<Self> {
        if !(1..=MAX_KSET_N).contains(&n) {
            return Err(Error::InvalidKSet(format!("n = {n} outside 1..={MAX_KSET_N}")));
        }
        Ok(KSet { n, words: vec![0; (1usize << n).div_ceil(64)] })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::from_fn(n, |_| true)
    }

    pub fn from_fn(n: usize, mut member: impl FnMut(u32) -> bool) -> Result<Self> {
        let mut k = Self::empty(n)?;
        for y in 0..1u32 << n {
            if member(y) {
                k.insert(y);
            }
        }
        Ok(k)
    }

    /// Strings with an even number of ones.
    pub fn even_parity(n: usize) -> Result<Self> {
        Self::from_fn(n, |y| y.count_ones() % 2 == 0)
    }

    /// Builds from bit strings written `y_1 .. y_n`.
    pub fn from_strings<S: AsRef<str>>(n: usize, members: &[S]) -> Result<Self> {
        let mut k = Self::empty(n)?;
        for m in members {
            let y: ClueString = m.as_ref().parse().map_err(|e| Error::InvalidKSet(format!("{e}")))?;
            if y.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: y.n() });
            }
            k.insert(y.bits());
        }
        Ok(k)
    }

    /// Low `2^n` bits of `mask` (for `n <= 6`).
    pub fn from_small_mask(n: usize, mask: u64) -> Result<Self> {
        let mut k = Self::empty(n)?;
        if n > 6 || (n < 6 && mask >> (1 << n) != 0) {
            return Err(Error::InvalidKSet(format!("mask {mask:#x} does not fit n = {n}")));
        }
        k.words[0] = mask;
        Ok(k)
    }

    /// Uniformly random subset of the given size.
    pub fn random_of_size<R: rand::Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Self> {
        let mut k = Self::empty(n)?;
        if size > 1 << n {
            return Err(Error::InvalidKSet(format!("size {size} exceeds 2^{n}")));
        }
        for y in sample(rng, 1 << n, size) {
            k.insert(y as u32);
        }
        Ok(k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn insert(&mut self, y: u32) {
        self.words[y as usize / 64] |= 1 << (y % 64);
    }

    pub fn contains(&self, y: u32) -> bool {
        (y as usize) < 1 << self.n && self.words[y as usize / 64] >> (y % 64) & 1 == 1
    }

    pub fn contains_string(&self, y: &ClueString) -> bool {
        y.n() == self.n && self.contains(y.bits())
    }

    pub fn size(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|K| > 2^(n-1)`.
    pub fn is_majority(&self) -> bool {
        self.size() > 1 << (self.n - 1)
    }

    /// Members in increasing index order.
    pub fn members(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros();
                    w &= w - 1;
                    i as u32 * 64 + b
                })
            })
        })
    }

    /// Big-endian hex of the mask, zero-padded to `2^n / 4` digits (at least one).
    pub fn to_hex(&self) -> String {
        let digits = ((1usize << self.n) / 4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = self.words[d * 4 / 64] >> (d * 4 % 64) & 0xf;
                char::from_digit(nibble as u32, 16).unwrap()
            })
            .collect()
    }

    /// Parses [`KSet::to_hex`] output. Leading zeros may be omitted; set bits
    /// beyond index `2^n - 1` are rejected.
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let mut k = Self::empty(n)?;
        let hex = hex.trim();
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        if hex.is_empty() {
            return Err(Error::InvalidKSet("empty hex mask".into()));
        }
        for (d, ch) in hex.chars().rev().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(|| Error::InvalidKSet(format!("bad hex digit {ch:?}")))? as u64;
            for bit in 0..4 {
                if nibble >> bit & 1 == 1 {
                    let y = d * 4 + bit;
                    if y >= 1 << n {
                        return Err(Error::InvalidKSet(format!("mask sets index {y} beyond 2^{n}")));
                    }
                    k.insert(y as u32);
                }
            }
        }
        Ok(k)
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KSet(n={}, {{", self.n)?;
        for (i, y) in self.members().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", ClueString::from_raw(self.n, y))?;
        }
        write!(f, "}})")
    }
}

fn same_n(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `|K(w)|`: members agreeing with every placed clue of `w`.
pub fn restriction_count(kset: &KSet, w: &PartialClue) -> Result<usize> {
    same_n(kset.n, w.n())?;
    let free = !w.assigned() & ((1u64 << kset.n) - 1) as u32;
    if 1usize << free.count_ones() <= kset.size() {
        // Walk the subcube through the submasks of the free coordinates.
        let mut count = 0;
        let mut sub = free;
        loop {
            count += kset.contains(w.values() | sub) as usize;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
        Ok(count)
    } else {
        Ok(kset.members().filter(|&y| w.agrees(y)).count())
    }
}

/// `K(w)` kept as an explicit member list, so that each further clue only
/// scans the members that still agree.
#[derive(Debug, Clone)]
pub struct Restriction {
    w: PartialClue,
    members: Vec<u32>,
}

impl Restriction {
    pub fn new(kset: &KSet) -> Self {
        Restriction { w: PartialClue::from_raw(kset.n, 0, 0), members: kset.members().collect() }
    }

    pub fn clue(&self) -> &PartialClue {
        &self.w
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// `(|K(w[i<-0])|, |K(w[i<-1])|)`.
    pub fn split(&self, i: usize) -> (usize, usize) {
        let ones = self.members.iter().filter(|&&y| y >> i & 1 == 1).count();
        (self.members.len() - ones, ones)
    }

    /// Fixes coordinate `i` to `u`.
    pub fn refine(&mut self, i: usize, u: bool) {
        self.members.retain(|&y| (y >> i & 1 == 1) == u);
        self.w = self.w.set(i, u);
    }

    /// Places the clue keeping more members (ties to 0) and returns it.
    pub fn place_majority(&mut self, i: usize) -> bool {
        let (zeros, ones) = self.split(i);
        let u = ones > zeros;
        self.refine(i, u);
        u
    }
}

/// Bob's clue at each step keeps as many members of `K` as possible consistent
/// with the clues placed so far; ties go to 0.
#[derive(Debug, Clone)]
pub struct KHalvingStrategy {
    kset: Arc<KSet>,
    members: Arc<Vec<u32>>,
}

impl KHalvingStrategy {
    /// Requires `|K| > 2^(n-1)` and `n >= 2`.
    pub fn new(kset: KSet) -> Result<Self> {
        check_n(kset.n)?;
        if !kset.is_majority() {
            return Err(Error::Premise(format!(
                "|K| = {} is not more than 2^(n-1) = {}",
                kset.size(),
                1 << (kset.n - 1)
            )));
        }
        let members = kset.members().collect();
        Ok(KHalvingStrategy { kset: Arc::new(kset), members: Arc::new(members) })
    }

    pub fn n(&self) -> usize {
        self.kset.n
    }

    pub fn kset(&self) -> &KSet {
        &self.kset
    }

    pub(crate) fn start(&self) -> Restriction {
        Restriction { w: PartialClue::from_raw(self.n(), 0, 0), members: self.members.to_vec() }
    }

    /// The clue placed at `city` given the clues `w` already placed.
    pub fn decide(&self, w: &PartialClue, city: usize) -> Result<bool> {
        let zeros = restriction_count(&self.kset, &w.with(city, false)?)?;
        let ones = restriction_count(&self.kset, &w.with(city, true)?)?;
        Ok(ones > zeros)
    }

    pub fn to_memoryless(&self) -> Result<MemorylessStrategy> {
        MemorylessStrategy::from_fn(self.n(), |w, city| self.decide(w, city).expect("free coordinate"))
    }
}

/// `|{i : y ⊕ e_i ∈ K}|` for a member `y`.
pub fn induced_degree(kset: &KSet, y: &ClueString) -> Result<usize> {
    same_n(kset.n, y.n())?;
    if !kset.contains(y.bits()) {
        return Err(Error::NotMember(y.to_string()));
    }
    Ok(degree_of(kset, y.bits()))
}

fn degree_of(kset: &KSet, y: u32) -> usize {
    (0..kset.n).filter(|&i| kset.contains(y ^ 1 << i)).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub n: usize,
    pub size: usize,
    pub degrees: BTreeMap<u32, usize>,
    pub max_degree: usize,
    /// First member (in index order) attaining the maximum.
    pub witness: ClueString,
    pub histogram: BTreeMap<usize, usize>,
}

pub fn max_induced_degree(kset: &KSet) -> Result<DegreeReport> {
    let members: Vec<u32> = kset.members().collect();
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    let degrees: Vec<usize> = members.par_iter().map(|&y| degree_of(kset, y)).collect();
    let mut histogram = BTreeMap::new();
    let mut best = (0, members[0]);
    for (&y, &d) in members.iter().zip(&degrees) {
        *histogram.entry(d).or_insert(0) += 1;
        if d > best.0 {
            best = (d, y);
        }
    }
    Ok(DegreeReport {
        n: kset.n,
        size: members.len(),
        degrees: members.into_iter().zip(degrees).collect(),
        max_degree: best.0,
        witness: ClueString::from_raw(kset.n, best.1),
        histogram,
    })
}

/// First failing check found by [`verify_theorem1`], with the play that exposed it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub check: &'static str,
    pub pi: Permutation,
    pub z: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem1Report {
    pub n: usize,
    pub k_size: usize,
    pub max_degree: usize,
    pub complexity: Complexity,
    /// Halving strategy complexity is at most the max induced degree.
    pub bound_ok: bool,
    /// `|K(w^t)| > 2^(n-1-t)` along every play.
    pub halving_ok: bool,
    /// `|K(w^(n-1))| = 2` along every play.
    pub endgame_ok: bool,
    /// Every final clue string lies in `K`.
    pub member_ok: bool,
    /// Every suspect `l` of `b` gives a neighbour `b ⊕ e_l` inside `K`.
    pub neighbor_ok: bool,
    pub counterexample: Option<Counterexample>,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.bound_ok && self.halving_ok && self.endgame_ok && self.member_ok && self.neighbor_ok
    }
}

/// Builds the halving strategy for `K`, evaluates it exactly and checks the
/// degree bound together with every step of the argument behind it.
pub fn verify_theorem1(kset: &KSet, caps: &Caps) -> Result<Theorem1Report> {
    let halving = KHalvingStrategy::new(kset.clone())?;
    let n = halving.n();
    Caps::check("verify_theorem1", n, caps.suspect)?;
    let strategy = BobStrategy::KHalving(halving);
    let index = OutcomeIndex::build(&strategy, caps)?;
    let complexity = complexity_from_index(&strategy, &index);
    let degrees = max_induced_degree(kset)?;

    // Independent replay: recount |K(w^t)| from the mask along every play.
    let branches = par_branches(
        &strategy,
        || None,
        |found: &mut Option<Counterexample>, perm, bits| {
            if found.is_none() {
                *found = check_play(kset, &index, perm, bits);
            }
        },
    );
    let counterexample = branches.into_iter().flatten().next();
    let failed = |check: &str| counterexample.as_ref().is_some_and(|c| c.check == check);

    let mut report = Theorem1Report {
        n,
        k_size: kset.size(),
        max_degree: degrees.max_degree,
        bound_ok: complexity.value <= degrees.max_degree,
        complexity,
        halving_ok: !failed("halving"),
        endgame_ok: !failed("endgame"),
        member_ok: !failed("member"),
        neighbor_ok: !failed("neighbor"),
        counterexample,
    };
    if !report.bound_ok && report.counterexample.is_none() {
        report.counterexample = Some(Counterexample {
            check: "bound",
            pi: report.complexity.witness_pi.clone(),
            z: Some(report.complexity.witness_z),
            detail: format!("cost {} exceeds max degree {}", report.complexity.value, report.max_degree),
        });
    }
    Ok(report)
}

fn check_play(kset: &KSet, index: &OutcomeIndex, perm: &[u8], bits: u32) -> Option<Counterexample> {
    let n = kset.n;
    let fail = |check, z, detail| Some(Counterexample { check, pi: Permutation::from_raw(perm.to_vec()), z, detail });
    let mut w = PartialClue::from_raw(n, 0, 0);
    for t in 1..n {
        let city = perm[t - 1] as usize;
        w = w.set(city, bits >> city & 1 == 1);
        let count = restriction_count(kset, &w).expect("same dimension");
        if count <= 1 << (n - 1 - t) {
            return fail("halving", None, format!("|K({w})| = {count} after step {t}"));
        }
        if t == n - 1 && count != 2 {
            return fail("endgame", None, format!("|K({w})| = {count} after step {t}"));
        }
    }
    let last = perm[n - 1] as usize;
    for z in [false, true] {
        let b = ClueString::from_raw(n, bits | (z as u32) << last);
        if !kset.contains(b.bits()) {
            return fail("member", Some(z), format!("b = {b} is not in K"));
        }
        let suspects = index.suspect_mask(&b);
        if let Some(l) = (0..n).find(|&l| suspects >> l & 1 == 1 && !kset.contains(b.bits() ^ 1 << l)) {
            return fail("neighbor", Some(z), format!("suspect {} of b = {b} has no neighbour in K", l + 1));
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Every subset above the threshold.
    Exhaustive,
    /// `samples` uniform subsets of size `threshold + 1`; the result is an upper bound.
    Sampled { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinMaxDegree {
    pub n: usize,
    /// Sets must have strictly more members than this.
    pub threshold: usize,
    pub value: usize,
    pub witness: KSet,
    pub exact: bool,
    pub examined: u64,
}

/// Minimum over `K` with `|K| > threshold` of the largest induced degree.
/// `threshold` defaults to `2^(n-1)`.
pub fn min_max_degree(n: usize, threshold: Option<usize>, mode: SearchMode, caps: &Caps) -> Result<MinMaxDegree> {
    KSet::empty(n)?;
    let threshold = threshold.unwrap_or(1 << (n - 1));
    if threshold >= 1 << n {
        return Err(Error::Premise(format!("no subset of H_{n} has more than {threshold} members")));
    }
    match mode {
        SearchMode::Exhaustive => {
            Caps::check("min_max_degree (exhaustive)", n, caps.subset.min(5))?;
            let total = 1u64 << (1 << n);
            let (value, mask, examined) = (0..total)
                .into_par_iter()
                .filter(|m| m.count_ones() as usize > threshold)
                .map(|m| (small_max_degree(n, m), m, 1u64))
                .reduce(
                    || (usize::MAX, u64::MAX, 0),
                    |a, b| {
                        let best = if (b.0, b.1) < (a.0, a.1) { (b.0, b.1) } else { (a.0, a.1) };
                        (best.0, best.1, a.2 + b.2)
                    },
                );
            Ok(MinMaxDegree { n, threshold, value, witness: KSet::from_small_mask(n, mask)?, exact: true, examined })
        }
        SearchMode::Sampled { seed, samples } => {
            if samples == 0 {
                return Err(Error::Premise("sampled search needs at least one sample".into()));
            }
            let (value, s) = (0..samples)
                .into_par_iter()
                .map(|s| {
                    let k = sampled_set(n, threshold + 1, seed, s);
                    (max_induced_degree(&k).expect("non-empty").max_degree, s)
                })
                .min()
                .expect("at least one sample");
            Ok(MinMaxDegree {
                n,
                threshold,
                value,
                witness: sampled_set(n, threshold + 1, seed, s),
                exact: false,
                examined: samples,
            })
        }
    }
}

fn sampled_set(n: usize, size: usize, seed: u64, stream: u64) -> KSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    KSet::random_of_size(n, size, &mut rng).expect("size checked")
}

fn small_max_degree(n: usize, mask: u64) -> usize {
    let mut best = 0;
    let mut rest = mask;
    while rest != 0 {
        let y = rest.trailing_zeros();
        rest &= rest - 1;
        let d = (0..n).filter(|i| mask >> (y ^ 1 << i) & 1 == 1).count();
        best = best.max(d);
    }
    best
}
