//! Exact semantics of the game: clue strings, suspect sets, cost and complexity.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::clue::ClueString;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::strategy::{BobStrategy, StepState, TableStrategy};

fn same_n(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `b(π, z)`: city `π(t)` carries `F_t(π)` for `t < n`, the hideout `π(n)` carries `z`.
pub fn clue_string(strategy: &BobStrategy, pi: &Permutation, z: bool) -> Result<ClueString> {
    let n = strategy.n();
    same_n(n, pi.n())?;
    let mut state = strategy.start();
    let mut used = 0u64;
    let mut bits = 0u32;
    for t in 1..n {
        let city = pi.city(t - 1);
        let digit = city - (used & ((1u64 << city) - 1)).count_ones() as usize;
        bits |= (strategy.step(&mut state, t, city, digit) as u32) << city;
        used |= 1 << city;
    }
    bits |= (z as u32) << pi.final_city();
    Ok(ClueString::from_raw(n, bits))
}

/// Depth-first walk over every itinerary starting at `first`, in lexicographic
/// order. `visit` receives the itinerary and Bob's clue bits (hideout bit 0).
fn walk_from(strategy: &BobStrategy, first: usize, visit: &mut impl FnMut(&[u8], u32)) {
    let n = strategy.n();
    let mut state = strategy.start();
    let bit = strategy.step(&mut state, 1, first, first);
    let mut perm = Vec::with_capacity(n);
    perm.push(first as u8);
    descend(strategy, &state, 2, 1 << first, &mut perm, (bit as u32) << first, visit);
}

fn descend(
    strategy: &BobStrategy,
    state: &StepState,
    t: usize,
    used: u64,
    perm: &mut Vec<u8>,
    bits: u32,
    visit: &mut impl FnMut(&[u8], u32),
) {
    let n = strategy.n();
    if t == n {
        let last = (!used).trailing_zeros() as u8;
        perm.push(last);
        visit(perm, bits);
        perm.pop();
        return;
    }
    let mut digit = 0;
    for city in 0..n {
        if used >> city & 1 == 1 {
            continue;
        }
        let mut next = state.clone();
        let bit = strategy.step(&mut next, t, city, digit);
        perm.push(city as u8);
        descend(strategy, &next, t + 1, used | 1 << city, perm, bits | (bit as u32) << city, visit);
        perm.pop();
        digit += 1;
    }
}

/// Calls `visit(π, b(π, 0))` for every itinerary, in lexicographic order.
/// `b(π, 1)` is `b(π, 0)` with the hideout bit flipped.
pub fn for_each_outcome(strategy: &BobStrategy, caps: &Caps, mut visit: impl FnMut(&[u8], ClueString)) -> Result<()> {
    let n = strategy.n();
    Caps::check("outcome enumeration", n, caps.suspect)?;
    for first in 0..n {
        walk_from(strategy, first, &mut |perm, bits| visit(perm, ClueString::from_raw(n, bits)));
    }
    Ok(())
}

/// Runs `fold` over the itineraries of each first city in parallel and
/// returns the per-branch results in city order.
pub(crate) fn par_branches<T: Send>(
    strategy: &BobStrategy,
    init: impl Fn() -> T + Sync,
    fold: impl Fn(&mut T, &[u8], u32) + Sync,
) -> Vec<T> {
    (0..strategy.n())
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            walk_from(strategy, first, &mut |perm, bits| fold(&mut acc, perm, bits));
            acc
        })
        .collect()
}

fn mask_to_set(mask: u32) -> BTreeSet<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// `S(b)`: hideouts `i` for which some `(ρ, u)` with `ρ(n) = i` yields `b`.
/// Brute force over all `n! · 2` pairs; empty for unreachable strings.
pub fn suspect_set(strategy: &BobStrategy, b: &ClueString, caps: &Caps) -> Result<BTreeSet<usize>> {
    same_n(strategy.n(), b.n())?;
    Caps::check("suspect_set", b.n(), caps.suspect)?;
    let target = b.bits();
    let masks = par_branches(
        strategy,
        || 0u32,
        |acc, perm, bits| {
            let last = *perm.last().unwrap();
            if (bits ^ target) & !(1 << last) == 0 {
                *acc |= 1 << last;
            }
        },
    );
    Ok(mask_to_set(masks.into_iter().fold(0, |a, m| a | m)))
}

/// The lexicographically first `(ρ, u)` with `ρ(n) = city` and `b(ρ, u) = b`.
pub fn suspect_witness(
    strategy: &BobStrategy,
    b: &ClueString,
    city: usize,
    caps: &Caps,
) -> Result<Option<(Permutation, bool)>> {
    same_n(strategy.n(), b.n())?;
    Caps::check("suspect_witness", b.n(), caps.suspect)?;
    let target = b.bits();
    let found = par_branches(
        strategy,
        || None,
        |acc: &mut Option<Vec<u8>>, perm, bits| {
            let last = *perm.last().unwrap() as usize;
            if acc.is_none() && last == city && (bits ^ target) & !(1 << last) == 0 {
                *acc = Some(perm.to_vec());
            }
        },
    );
    Ok(found
        .into_iter()
        .flatten()
        .next()
        .map(|perm| (Permutation::from_raw(perm), b.get(city))))
}

/// Suspect sets of every reachable clue string, built from one pass over all
/// outcomes.
#[derive(Debug, Clone)]
pub struct OutcomeIndex {
    n: usize,
    suspects: Vec<u32>,
}

impl OutcomeIndex {
    pub fn build(strategy: &BobStrategy, caps: &Caps) -> Result<Self> {
        let n = strategy.n();
        Caps::check("outcome enumeration", n, caps.suspect)?;
        let branches = par_branches(
            strategy,
            || vec![0u32; 1 << n],
            |acc, perm, bits| {
                let last = *perm.last().unwrap() as u32;
                acc[bits as usize] |= 1 << last;
                acc[(bits | 1 << last) as usize] |= 1 << last;
            },
        );
        let mut suspects = vec![0u32; 1 << n];
        for branch in branches {
            for (s, m) in suspects.iter_mut().zip(branch) {
                *s |= m;
            }
        }
        Ok(OutcomeIndex { n, suspects })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Bitmask of suspects of `b` (bit `i` = city `i`).
    pub fn suspect_mask(&self, b: &ClueString) -> u32 {
        self.suspects[b.bits() as usize]
    }

    pub fn suspects(&self, b: &ClueString) -> BTreeSet<usize> {
        mask_to_set(self.suspect_mask(b))
    }

    pub fn is_reachable(&self, b: &ClueString) -> bool {
        self.suspect_mask(b) != 0
    }

    /// Cost `|S(b)|`; 0 for unreachable strings.
    pub fn cost(&self, b: &ClueString) -> usize {
        self.suspect_mask(b).count_ones() as usize
    }

    /// Reachable clue strings in increasing packed order.
    pub fn reachable(&self) -> impl Iterator<Item = ClueString> + '_ {
        self.suspects
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(move |(b, _)| ClueString::from_raw(self.n, b as u32))
    }
}

/// Worst-case cost of a strategy and the lexicographically first `(π, z)` attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Complexity {
    pub value: usize,
    pub witness_pi: Permutation,
    pub witness_z: bool,
}

pub fn strategy_complexity(strategy: &BobStrategy, caps: &Caps) -> Result<Complexity> {
    let index = OutcomeIndex::build(strategy, caps)?;
    Ok(complexity_from_index(strategy, &index))
}

pub(crate) fn complexity_from_index(strategy: &BobStrategy, index: &OutcomeIndex) -> Complexity {
    let best = par_branches(
        strategy,
        || None,
        |acc: &mut Option<(usize, Vec<u8>, bool)>, perm, bits| {
            let last = *perm.last().unwrap();
            for z in [false, true] {
                let b = bits | (z as u32) << last;
                let cost = index.suspects[b as usize].count_ones() as usize;
                if acc.as_ref().is_none_or(|(c, _, _)| cost > *c) {
                    *acc = Some((cost, perm.to_vec(), z));
                }
            }
        },
    );
    let (value, perm, z) = best
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one itinerary");
    Complexity { value, witness_pi: Permutation::from_raw(perm), witness_z: z }
}

/// Exact game value: the least complexity over every table strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameValue {
    pub n: usize,
    pub value: usize,
    /// Lexicographically first optimal strategy (see [`TableStrategy::from_index`]).
    pub strategy: TableStrategy,
    pub strategy_index: u64,
    pub strategies_examined: u64,
}

pub fn exact_game_complexity(n: usize, caps: &Caps) -> Result<GameValue> {
    crate::perm::check_n(n)?;
    Caps::check("exact_game_complexity", n, caps.exact_min)?;
    let entries = TableStrategy::entry_count(n);
    if entries >= 64 {
        return Err(Error::CapExceeded { what: "exact_game_complexity", n, cap: n - 1 });
    }
    let total = 1u64 << entries;
    let (value, index) = (0..total)
        .into_par_iter()
        .map(|index| {
            let strategy = BobStrategy::Table(TableStrategy::from_index(n, index).expect("index in range"));
            let idx = OutcomeIndex::build(&strategy, caps).expect("n within cap");
            let worst = idx.reachable().map(|b| idx.cost(&b)).max().unwrap_or(0);
            (worst, index)
        })
        .min()
        .expect("at least one strategy");
    Ok(GameValue {
        n,
        value,
        strategy: TableStrategy::from_index(n, index)?,
        strategy_index: index,
        strategies_examined: total,
    })
}

/// One complete play: clues, the suspect list Alice derives, and its size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameOutcome {
    pub pi: Permutation,
    pub z: bool,
    pub b: ClueString,
    pub suspects: BTreeSet<usize>,
    pub cost: usize,
}

pub fn run_game(strategy: &BobStrategy, pi: &Permutation, z: bool, caps: &Caps) -> Result<GameOutcome> {
    let b = clue_string(strategy, pi, z)?;
    let suspects = suspect_set(strategy, &b, caps)?;
    debug_assert!(suspects.contains(&pi.final_city()));
    Ok(GameOutcome { pi: pi.clone(), z, cost: suspects.len(), b, suspects })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn const0(n: usize) -> BobStrategy {
        TableStrategy::constant(n, false).unwrap().into()
    }

    fn perm(p: &[usize]) -> Permutation {
        Permutation::from_one_based(p).unwrap()
    }

    #[test]
    fn constant_zero_clue_strings() {
        let s = const0(2);
        assert_eq!(clue_string(&s, &perm(&[1, 2]), true).unwrap().to_string(), "01");
        assert_eq!(clue_string(&s, &perm(&[2, 1]), true).unwrap().to_string(), "10");
        assert!(matches!(
            clue_string(&s, &perm(&[1, 2, 3]), true),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn constant_zero_suspects_and_complexity() {
        let s = const0(2);
        let caps = Caps::default();
        assert_eq!(suspect_set(&s, &"00".parse().unwrap(), &caps).unwrap(), BTreeSet::from([0, 1]));
        assert!(suspect_set(&s, &"11".parse().unwrap(), &caps).unwrap().is_empty());
        let c = strategy_complexity(&s, &caps).unwrap();
        assert_eq!(c.value, 2);
        assert_eq!((c.witness_pi.to_one_based(), c.witness_z), (vec![1, 2], false));
    }

    #[test]
    fn run_game_bundles_outcome() {
        let out = run_game(&const0(2), &perm(&[1, 2]), false, &Caps::default()).unwrap();
        assert_eq!(out.b.to_string(), "00");
        assert_eq!(out.suspects, BTreeSet::from([0, 1]));
        assert_eq!(out.cost, 2);
    }

    #[test]
    fn caps_are_enforced() {
        let caps = Caps { suspect: 3, ..Caps::default() };
        let s = const0(4);
        let err = suspect_set(&s, &"0000".parse().unwrap(), &caps).unwrap_err();
        assert!(err.is_precondition());
        assert!(exact_game_complexity(4, &Caps::default()).unwrap_err().is_precondition());
    }

    #[test]
    fn witnesses_are_sound() {
        let caps = Caps::default();
        let s: BobStrategy = TableStrategy::from_index(3, 0b010_110_001).unwrap().into();
        for b in 0..8u32 {
            let b = ClueString::new(3, b).unwrap();
            for city in suspect_set(&s, &b, &caps).unwrap() {
                let (rho, u) = suspect_witness(&s, &b, city, &caps).unwrap().unwrap();
                assert_eq!(rho.final_city(), city);
                assert_eq!(clue_string(&s, &rho, u).unwrap(), b);
            }
        }
    }

    #[test]
    fn exact_value_for_two_cities() {
        let v = exact_game_complexity(2, &Caps::default()).unwrap();
        assert_eq!(v.value, 2);
        assert_eq!(v.strategies_examined, 4);
        assert_eq!(v.strategy_index, 0);
    }
}
