//! Bob-strategies.
//!
//! A strategy is a family `F_1 .. F_{n-1}`; `F_t` sees only the first `t` cities
//! of the itinerary. The canonical form is [`TableStrategy`], one bit per
//! ordered prefix. [`MemorylessStrategy`] keys decisions by the clues already
//! placed plus the current city and is converted to a table for evaluation.
//! The majority-halving strategy ([`KHalvingStrategy`]) is evaluated directly.

use std::collections::BTreeMap;

use rand::Rng;

use crate::clue::PartialClue;
use crate::error::{Error, Result};
use crate::hypercube::{KHalvingStrategy, Restriction};
use crate::perm::{check_n, falling, prefix_rank, prefix_unrank, Permutation};

/// One lookup table per step; `tables[t - 1]` is indexed by the lexicographic
/// rank of the prefix `(π(1), .., π(t))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableStrategy {
    n: usize,
    tables: Vec<Vec<bool>>,
}

impl TableStrategy {
    /// Builds the table by evaluating `rule(t, prefix)` on every prefix of
    /// length `t` (0-based cities, `t` from 1).
    pub fn from_fn(n: usize, mut rule: impl FnMut(usize, &[u8]) -> bool) -> Result<Self> {
        check_n(n)?;
        let tables = (1..n)
            .map(|t| (0..falling(n, t)).map(|r| rule(t, &prefix_unrank(n, t, r))).collect())
            .collect();
        Ok(TableStrategy { n, tables })
    }

    pub fn constant(n: usize, bit: bool) -> Result<Self> {
        Self::from_fn(n, |_, _| bit)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::from_fn(n, |_, _| rng.gen())
    }

    /// Total number of table entries, `Σ_{t<n} n!/(n-t)!`.
    pub fn entry_count(n: usize) -> usize {
        (1..n).map(|t| falling(n, t)).sum()
    }

    /// The strategy whose entries, read in table order (step 1 first, prefixes
    /// lexicographic within a step), spell `index` in binary with the first
    /// entry as the most significant bit. Increasing `index` therefore walks
    /// strategies in lexicographic order.
    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        check_n(n)?;
        let total = Self::entry_count(n);
        if total > 63 || index >> total != 0 {
            return Err(Error::InvalidStrategy(format!("index {index} out of range for n = {n}")));
        }
        let mut k = 0;
        Self::from_fn(n, |_, _| {
            k += 1;
            index >> (total - k) & 1 == 1
        })
    }

    /// Builds from explicit `(prefix, bit)` entries with 0-based cities.
    /// Every prefix of every length `1..n` must appear exactly once.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (Vec<usize>, bool)>) -> Result<Self> {
        check_n(n)?;
        let mut tables: Vec<Vec<Option<bool>>> = (1..n).map(|t| vec![None; falling(n, t)]).collect();
        for (prefix, bit) in entries {
            let t = prefix.len();
            if t == 0 || t >= n {
                return Err(Error::InvalidStrategy(format!("prefix length {t} outside 1..{n}")));
            }
            let bytes = validate_prefix(n, &prefix)?;
            let slot = &mut tables[t - 1][prefix_rank(n, &bytes)];
            if slot.replace(bit).is_some() {
                return Err(Error::InvalidStrategy(format!("duplicate entry for prefix {}", one_based(&bytes))));
            }
        }
        let tables = tables
            .into_iter()
            .enumerate()
            .map(|(i, table)| {
                table
                    .into_iter()
                    .enumerate()
                    .map(|(r, bit)| {
                        bit.ok_or_else(|| {
                            Error::InvalidStrategy(format!(
                                "missing entry for prefix {}",
                                one_based(&prefix_unrank(n, i + 1, r))
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TableStrategy { n, tables })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `F_t` on a prefix of length `t` (0-based cities).
    pub fn bit(&self, prefix: &[usize]) -> Result<bool> {
        let t = prefix.len();
        if t == 0 || t >= self.n {
            return Err(Error::InvalidStrategy(format!("no rule for step {t}")));
        }
        let bytes = validate_prefix(self.n, prefix)?;
        Ok(self.tables[t - 1][prefix_rank(self.n, &bytes)])
    }

    pub(crate) fn bit_at(&self, t: usize, rank: usize) -> bool {
        self.tables[t - 1][rank]
    }

    /// All entries in table order as `(prefix, bit)` with 0-based cities.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u8>, bool)> + '_ {
        self.tables.iter().enumerate().flat_map(move |(i, table)| {
            table.iter().enumerate().map(move |(r, &bit)| (prefix_unrank(self.n, i + 1, r), bit))
        })
    }

    /// Renames every city `c` to `sigma(c)`. The relabelled strategy produces
    /// on `sigma ∘ π` the clues this one produces on `π`, moved along `sigma`.
    pub fn relabel(&self, sigma: &Permutation) -> Result<TableStrategy> {
        if sigma.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: sigma.n() });
        }
        let inv = sigma.inverse();
        TableStrategy::from_fn(self.n, |t, prefix| {
            let orig: Vec<u8> = prefix.iter().map(|&c| inv.city(c as usize) as u8).collect();
            self.tables[t - 1][prefix_rank(self.n, &orig)]
        })
    }
}

fn validate_prefix(n: usize, prefix: &[usize]) -> Result<Vec<u8>> {
    let mut seen = 0u64;
    prefix
        .iter()
        .map(|&c| {
            if c >= n || seen & (1 << c) != 0 {
                return Err(Error::InvalidStrategy(format!("bad prefix {:?}", prefix.iter().map(|c| c + 1).collect::<Vec<_>>())));
            }
            seen |= 1 << c;
            Ok(c as u8)
        })
        .collect()
}

fn one_based(prefix: &[u8]) -> String {
    format!("{:?}", prefix.iter().map(|&c| c as usize + 1).collect::<Vec<_>>())
}

/// A strategy whose step-`t` clue depends only on the placed clues `w^(t-1)`
/// and the city `π(t)` being visited.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MemorylessStrategy {
    n: usize,
    rules: BTreeMap<(PartialClue, u8), bool>,
}

impl MemorylessStrategy {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(MemorylessStrategy { n, rules: BTreeMap::new() })
    }

    /// Records every decision of `rule` reachable from the empty clue vector.
    pub fn from_fn(n: usize, mut rule: impl FnMut(&PartialClue, usize) -> bool) -> Result<Self> {
        let mut out = MemorylessStrategy::new(n)?;
        let mut stack = vec![PartialClue::empty(n)?];
        while let Some(w) = stack.pop() {
            if w.placed() + 1 >= n {
                continue;
            }
            for city in (0..n).filter(|&c| w.get(c).is_none()) {
                if out.rules.contains_key(&(w, city as u8)) {
                    continue;
                }
                let bit = rule(&w, city);
                out.rules.insert((w, city as u8), bit);
                stack.push(w.set(city, bit));
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, w: PartialClue, city: usize, bit: bool) -> Result<()> {
        if w.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: w.n() });
        }
        if city >= self.n || w.get(city).is_some() || w.placed() + 1 >= self.n {
            return Err(Error::InvalidStrategy(format!("no decision can be made at ({w}, city {})", city + 1)));
        }
        self.rules.insert((w, city as u8), bit);
        Ok(())
    }

    pub fn decide(&self, w: &PartialClue, city: usize) -> Result<bool> {
        self.rules
            .get(&(*w, city as u8))
            .copied()
            .ok_or_else(|| Error::InvalidStrategy(format!("no rule for state {w} at city {}", city + 1)))
    }

    pub fn rules(&self) -> impl Iterator<Item = (&PartialClue, usize, bool)> {
        self.rules.iter().map(|((w, c), &b)| (w, *c as usize, b))
    }

    /// Equivalent table strategy; fails if a reachable state has no rule.
    pub fn to_table(&self) -> Result<TableStrategy> {
        let n = self.n;
        let mut tables: Vec<Vec<bool>> = (1..n).map(|t| vec![false; falling(n, t)]).collect();
        let mut prefix = Vec::with_capacity(n);
        self.fill(&mut tables, &mut prefix, PartialClue::empty(n)?, 0)?;
        Ok(TableStrategy { n, tables })
    }

    fn fill(&self, tables: &mut [Vec<bool>], prefix: &mut Vec<u8>, w: PartialClue, rank: usize) -> Result<()> {
        let t = prefix.len() + 1;
        if t >= self.n {
            return Ok(());
        }
        let mut digit = 0;
        for city in 0..self.n {
            if w.get(city).is_some() {
                continue;
            }
            let bit = self.decide(&w, city)?;
            let r = rank * (self.n - t + 1) + digit;
            tables[t - 1][r] = bit;
            prefix.push(city as u8);
            self.fill(tables, prefix, w.set(city, bit), r)?;
            prefix.pop();
            digit += 1;
        }
        Ok(())
    }
}

/// Any Bob-strategy the game engine can evaluate.
#[derive(Debug, Clone)]
pub enum BobStrategy {
    Table(TableStrategy),
    KHalving(KHalvingStrategy),
}

impl From<TableStrategy> for BobStrategy {
    fn from(t: TableStrategy) -> Self {
        BobStrategy::Table(t)
    }
}

impl From<KHalvingStrategy> for BobStrategy {
    fn from(k: KHalvingStrategy) -> Self {
        BobStrategy::KHalving(k)
    }
}

/// Evaluation state carried along an itinerary prefix.
#[derive(Debug, Clone)]
pub(crate) enum StepState {
    Rank(usize),
    Halving(Restriction),
}

impl BobStrategy {
    pub fn n(&self) -> usize {
        match self {
            BobStrategy::Table(t) => t.n(),
            BobStrategy::KHalving(k) => k.n(),
        }
    }

    pub(crate) fn start(&self) -> StepState {
        match self {
            BobStrategy::Table(_) => StepState::Rank(0),
            BobStrategy::KHalving(k) => StepState::Halving(k.start()),
        }
    }

    /// Bob's clue at step `t` (1-based) for `city`, advancing `state`.
    /// `digit` is the number of not-yet-visited cities below `city`.
    #[inline]
    pub(crate) fn step(&self, state: &mut StepState, t: usize, city: usize, digit: usize) -> bool {
        match (self, state) {
            (BobStrategy::Table(table), StepState::Rank(rank)) => {
                *rank = *rank * (table.n() - t + 1) + digit;
                table.bit_at(t, *rank)
            }
            (BobStrategy::KHalving(_), StepState::Halving(r)) => r.place_majority(city),
            _ => unreachable!("step state does not match strategy kind"),
        }
    }

    /// `F_t(π)`, evaluated from the first `t` cities of `pi` only.
    pub fn rule(&self, t: usize, pi: &Permutation) -> Result<bool> {
        if pi.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: pi.n() });
        }
        if t == 0 || t >= self.n() {
            return Err(Error::InvalidStrategy(format!("no rule for step {t}")));
        }
        let mut state = self.start();
        let mut used = 0u64;
        let mut bit = false;
        for s in 1..=t {
            let city = pi.city(s - 1);
            let digit = city - (used & ((1u64 << city) - 1)).count_ones() as usize;
            bit = self.step(&mut state, s, city, digit);
            used |= 1 << city;
        }
        Ok(bit)
    }

    /// Table form of the strategy.
    pub fn to_table(&self) -> Result<TableStrategy> {
        match self {
            BobStrategy::Table(t) => Ok(t.clone()),
            BobStrategy::KHalving(k) => k.to_memoryless()?.to_table(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    #[test]
    fn index_order_matches_entry_order() {
        assert_eq!(TableStrategy::entry_count(3), 9);
        let s = TableStrategy::from_index(3, 0b100_000_001).unwrap();
        let bits: Vec<bool> = s.entries().map(|(_, b)| b).collect();
        assert!(bits[0] && bits[8] && bits[1..8].iter().all(|b| !b));
        let first: Vec<_> = s.entries().next().unwrap().0;
        assert_eq!(first, vec![0]);
        assert!(TableStrategy::from_index(3, 512).is_err());
    }

    #[test]
    fn entries_roundtrip_and_missing_prefix() {
        let s = TableStrategy::from_index(3, 0b101_100_110).unwrap();
        let entries: Vec<_> = s.entries().map(|(p, b)| (p.iter().map(|&c| c as usize).collect(), b)).collect();
        assert_eq!(TableStrategy::from_entries(3, entries.clone()).unwrap(), s);
        let err = TableStrategy::from_entries(3, entries[1..].to_vec()).unwrap_err();
        assert!(err.to_string().contains("missing entry for prefix [1]"), "{err}");
        let mut dup = entries.clone();
        dup.push(entries[0].clone());
        assert!(TableStrategy::from_entries(3, dup).is_err());
    }

    #[test]
    fn rule_reads_only_the_prefix() {
        let s: BobStrategy = TableStrategy::from_index(3, 0b011_010_111).unwrap().into();
        let perms: Vec<_> = Permutation::all(3).unwrap().collect();
        for t in 1..3 {
            for a in &perms {
                for b in &perms {
                    if a.as_bytes()[..t] == b.as_bytes()[..t] {
                        assert_eq!(s.rule(t, a).unwrap(), s.rule(t, b).unwrap());
                    }
                }
            }
        }
        let BobStrategy::Table(table) = &s else { unreachable!() };
        assert_eq!(s.rule(2, &perms[3]).unwrap(), table.bit(&[1, 2]).unwrap());
    }

    #[test]
    fn memoryless_converts_to_table() {
        // Clue = 1 exactly when an odd number of 1-clues is already placed.
        let m = MemorylessStrategy::from_fn(4, |w, _| w.values().count_ones() % 2 == 1).unwrap();
        let table = m.to_table().unwrap();
        let direct = TableStrategy::from_fn(4, |_, _| false).unwrap();
        assert_eq!(table, direct);

        let m = MemorylessStrategy::from_fn(4, |w, c| (w.placed() + c) % 2 == 0).unwrap();
        let table = m.to_table().unwrap();
        for (prefix, bit) in table.entries() {
            let c = *prefix.last().unwrap() as usize;
            assert_eq!(bit, (prefix.len() - 1 + c).is_multiple_of(2));
        }
        let empty = MemorylessStrategy::new(3).unwrap();
        assert!(empty.to_table().is_err());
    }

    #[test]
    fn relabel_by_identity_is_noop() {
        let s = TableStrategy::from_index(3, 0b110_011_010).unwrap();
        assert_eq!(s.relabel(&Permutation::identity(3).unwrap()).unwrap(), s);
    }
}
