//! Clue vectors, partial (`{0,1,*}^n`) and complete (`{0,1}^n`).
//!
//! Coordinate `i` (0-based) is stored in bit `i`, so a complete clue string's
//! packed value is also its index in a [`crate::hypercube::KSet`] mask.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::check_n;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClueString {
    n: u8,
    bits: u32,
}

impl ClueString {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        check_n(n)?;
        if n < 32 && bits >> n != 0 {
            return Err(Error::InvalidClue(format!("value {bits:#x} has bits beyond n = {n}")));
        }
        Ok(ClueString { n: n as u8, bits })
    }

    pub(crate) fn from_raw(n: usize, bits: u32) -> Self {
        ClueString { n: n as u8, bits }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Packed value; bit `i` holds coordinate `i`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    /// The string with coordinate `i` flipped.
    pub fn flipped(&self, i: usize) -> ClueString {
        ClueString { n: self.n, bits: self.bits ^ (1 << i) }
    }

    pub fn parity(&self) -> bool {
        self.bits.count_ones() % 2 == 1
    }
}

impl fmt::Display for ClueString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ClueString {
    type Err = Error;

    /// Parses `b_1 b_2 ... b_n` written left to right.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u32;
        let mut n = 0;
        for (i, ch) in s.trim().chars().enumerate() {
            match ch {
                '0' => {}
                '1' if i < 32 => bits |= 1 << i,
                _ => return Err(Error::InvalidClue(format!("bad character {ch:?} in {s:?}"))),
            }
            n += 1;
        }
        ClueString::new(n, bits)
    }
}

impl Serialize for ClueString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClueString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A partially filled clue vector `w ∈ {0,1,*}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialClue {
    n: u8,
    assigned: u32,
    values: u32,
}

impl PartialClue {
    /// The all-`*` vector.
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(PartialClue { n: n as u8, assigned: 0, values: 0 })
    }

    pub(crate) fn from_raw(n: usize, assigned: u32, values: u32) -> Self {
        PartialClue { n: n as u8, assigned, values: values & assigned }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Mask of coordinates holding a bit.
    pub fn assigned(&self) -> u32 {
        self.assigned
    }

    /// Bits of the assigned coordinates; free coordinates read as 0.
    pub fn values(&self) -> u32 {
        self.values
    }

    pub fn placed(&self) -> usize {
        self.assigned.count_ones() as usize
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (self.assigned >> i & 1 == 1).then(|| self.values >> i & 1 == 1)
    }

    /// `w[i <- u]`; coordinate `i` must still be free.
    pub fn with(&self, i: usize, u: bool) -> Result<PartialClue> {
        if i >= self.n() {
            return Err(Error::InvalidClue(format!("coordinate {} out of range", i + 1)));
        }
        if self.get(i).is_some() {
            return Err(Error::InvalidClue(format!("coordinate {} already holds a clue", i + 1)));
        }
        Ok(self.set(i, u))
    }

    pub(crate) fn set(&self, i: usize, u: bool) -> PartialClue {
        PartialClue {
            n: self.n,
            assigned: self.assigned | 1 << i,
            values: self.values | (u as u32) << i,
        }
    }

    /// Whether the complete string `y` agrees with every placed clue.
    pub fn agrees(&self, y: u32) -> bool {
        y & self.assigned == self.values
    }

    /// The complete string, if every coordinate is placed.
    pub fn complete(&self) -> Option<ClueString> {
        (self.placed() == self.n()).then(|| ClueString::from_raw(self.n(), self.values))
    }
}

impl fmt::Display for PartialClue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            f.write_str(match self.get(i) {
                None => "*",
                Some(false) => "0",
                Some(true) => "1",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PartialClue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut w = PartialClue::empty(s.chars().count())?;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '*' => {}
                '0' => w = w.set(i, false),
                '1' => w = w.set(i, true),
                _ => return Err(Error::InvalidClue(format!("bad character {ch:?} in {s:?}"))),
            }
        }
        Ok(w)
    }
}
