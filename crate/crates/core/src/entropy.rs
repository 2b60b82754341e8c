//! Remaining uncertainty about Carmen's hideout when itinerary and final bit
//! are uniform: `H(π(n) | b)` computed from exact posterior tables.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::caps::Caps;
use crate::clue::ClueString;
use crate::error::{Error, Result};
use crate::game::par_branches;
use crate::perm::{factorial, Permutation};
use crate::strategy::BobStrategy;

/// Exact probabilities; every denominator divides `2 · n!`.
pub type Prob = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosteriorRow {
    /// `P(b)`.
    pub p: Prob,
    /// `P(π(n) = city | b)` over cities with non-zero mass (0-based keys).
    pub posterior: BTreeMap<usize, Prob>,
}

/// Joint law of the clue string and the hideout under uniform `(π, z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosteriorTable {
    pub n: usize,
    pub rows: BTreeMap<ClueString, PosteriorRow>,
}

pub fn posterior_table(strategy: &BobStrategy, caps: &Caps) -> Result<PosteriorTable> {
    let n = strategy.n();
    Caps::check("posterior_table", n, caps.entropy)?;
    let branches = par_branches(
        strategy,
        || vec![0u64; n << n],
        |acc, perm, bits| {
            let last = *perm.last().unwrap() as usize;
            acc[(bits as usize) * n + last] += 1;
            acc[((bits | 1 << last) as usize) * n + last] += 1;
        },
    );
    let mut counts = vec![0u64; n << n];
    for branch in branches {
        for (c, x) in counts.iter_mut().zip(branch) {
            *c += x;
        }
    }
    let total = 2 * factorial(n);
    let mut rows = BTreeMap::new();
    for (b, per_city) in counts.chunks(n).enumerate() {
        let row_total: u64 = per_city.iter().sum();
        if row_total == 0 {
            continue;
        }
        let posterior = per_city
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(city, &c)| (city, Ratio::new(c, row_total)))
            .collect();
        rows.insert(ClueString::from_raw(n, b as u32), PosteriorRow { p: Ratio::new(row_total, total), posterior });
    }
    Ok(PosteriorTable { n, rows })
}

fn plogp_bits(p: &Prob) -> f64 {
    let x = p.to_f64().unwrap_or(0.0);
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

fn sorted_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut terms: Vec<f64> = terms.collect();
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

impl PosteriorTable {
    /// `Σ_b P(b) · H(π(n) | b = b)` in bits. Terms are added in sorted order,
    /// so tables that agree up to relabelling give bit-identical results.
    pub fn conditional_entropy(&self) -> f64 {
        sorted_sum(self.rows.values().map(|row| {
            row.p.to_f64().unwrap() * sorted_sum(row.posterior.values().map(plogp_bits))
        }))
    }

    /// The table obtained by renaming every city `c` to `sigma(c)`.
    pub fn relabel(&self, sigma: &Permutation) -> Result<PosteriorTable> {
        if sigma.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: sigma.n() });
        }
        let rows = self
            .rows
            .iter()
            .map(|(b, row)| {
                let bits = (0..self.n).filter(|&j| b.get(j)).fold(0u32, |acc, j| acc | 1 << sigma.city(j));
                let posterior = row.posterior.iter().map(|(&c, q)| (sigma.city(c), *q)).collect();
                (ClueString::from_raw(self.n, bits), PosteriorRow { p: row.p, posterior })
            })
            .collect();
        Ok(PosteriorTable { n: self.n, rows })
    }

    /// Checks that row masses and each posterior sum to exactly 1.
    pub fn is_normalized(&self) -> bool {
        let one = Prob::from_integer(1);
        let mass = self.rows.values().fold(Prob::zero(), |acc, r| acc + r.p);
        mass == one && self.rows.values().all(|r| r.posterior.values().fold(Prob::zero(), |a, q| a + q) == one)
    }
}

/// `H(π(n) | b)` in bits.
pub fn conditional_entropy(strategy: &BobStrategy, caps: &Caps) -> Result<f64> {
    Ok(posterior_table(strategy, caps)?.conditional_entropy())
}
