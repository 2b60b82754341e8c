//! Itineraries and ordered prefixes of itineraries.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::MAX_N;

/// Carmen's itinerary: `order[s]` is the city visited at step `s` (both 0-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    order: Vec<u8>,
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if (2..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidSize(n))
    }
}

impl Permutation {
    /// Builds from 0-based city indices.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        check_n(n)?;
        let mut seen = 0u64;
        for &c in &order {
            if c >= n {
                return Err(Error::InvalidPermutation(format!("city {} out of range for n = {n}", c + 1)));
            }
            if seen & (1 << c) != 0 {
                return Err(Error::InvalidPermutation(format!("city {} repeated", c + 1)));
            }
            seen |= 1 << c;
        }
        Ok(Permutation { order: order.into_iter().map(|c| c as u8).collect() })
    }

    /// Builds from 1-based city indices, as used in every file format.
    pub fn from_one_based(order: &[usize]) -> Result<Self> {
        let zero = order
            .iter()
            .map(|&c| c.checked_sub(1).ok_or_else(|| Error::InvalidPermutation("city index 0".into())))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(zero)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Permutation::new((0..n).collect())
    }

    pub(crate) fn from_raw(order: Vec<u8>) -> Self {
        Permutation { order }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_n(n)?;
        let mut order: Vec<u8> = (0..n as u8).collect();
        order.shuffle(rng);
        Ok(Permutation { order })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// City visited at 0-based step `step`.
    pub fn city(&self, step: usize) -> usize {
        self.order[step] as usize
    }

    /// Carmen's hideout, the last city on the itinerary.
    pub fn final_city(&self) -> usize {
        *self.order.last().expect("permutations are non-empty") as usize
    }

    pub fn cities(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.order.iter().map(|&c| c as usize)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.order
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.cities().map(|c| c + 1).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.n()];
        for (step, &c) in self.order.iter().enumerate() {
            inv[c as usize] = step as u8;
        }
        Permutation { order: inv }
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> Result<LexPermutations> {
        check_n(n)?;
        Ok(LexPermutations { next: Some((0..n as u8).collect()) })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.cities().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c + 1)?;
        }
        write!(f, ")")
    }
}

impl serde::Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

/// Lexicographic permutation iterator.
pub struct LexPermutations {
    next: Option<Vec<u8>>,
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lex(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { order: current })
    }
}

fn next_lex(a: &mut [u8]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a.iter().rposition(|&x| x > a[i]).expect("pivot has a larger successor");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of ordered selections of `k` distinct items out of `m`.
pub fn falling(m: usize, k: usize) -> usize {
    (0..k).map(|i| m - i).product()
}

/// Lexicographic rank of an ordered prefix of distinct cities among all
/// prefixes of the same length.
pub fn prefix_rank(n: usize, prefix: &[u8]) -> usize {
    let mut used = 0u64;
    let mut rank = 0usize;
    for (j, &c) in prefix.iter().enumerate() {
        let digit = (0..c).filter(|&d| used & (1 << d) == 0).count();
        rank = rank * (n - j) + digit;
        used |= 1 << c;
    }
    rank
}

/// Inverse of [`prefix_rank`].
pub fn prefix_unrank(n: usize, len: usize, mut rank: usize) -> Vec<u8> {
    let mut digits = vec![0usize; len];
    for j in (0..len).rev() {
        let radix = n - j;
        digits[j] = rank % radix;
        rank /= radix;
    }
    let mut free: Vec<u8> = (0..n as u8).collect();
    digits.into_iter().map(|d| free.remove(d)).collect()
}
