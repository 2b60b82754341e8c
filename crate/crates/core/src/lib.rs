//! Exact workbench for the Carmen Sandiego clue game.
//!
//! Bob trails Carmen through `n` cities and leaves one clue bit in each city
//! he visits; Carmen plants the bit in her final hideout herself. Alice sees the
//! whole clue string and lists the cities where Carmen could be hiding.
//!
//! The crate evaluates Bob-strategies exactly ([`game`]), builds the
//! majority-halving strategy from a large hypercube subset and checks its
//! degree bound ([`hypercube`]), measures how much uncertainty Alice has left on
//! average ([`entropy`]) and runs the query-bounded variant in which Alice reads
//! only a few clue bits ([`query`]).
//!
//! Cities and itinerary steps are 0-based inside the crate. Every file format
//! and report in [`formats`] is 1-based.

pub mod caps;
pub mod clue;
pub mod entropy;
pub mod error;
pub mod formats;
pub mod game;
pub mod hypercube;
pub mod perm;
pub mod query;
pub mod strategy;

pub use caps::Caps;
pub use clue::{ClueString, PartialClue};
pub use error::{Error, Result};
pub use perm::Permutation;
pub use strategy::{BobStrategy, MemorylessStrategy, TableStrategy};

/// Largest number of cities any instance may have; clue strings are packed in a `u32`.
pub const MAX_N: usize = 32;
