//! Size limits for the exhaustive enumerations.

use std::env;

use crate::error::{Error, Result};

/// Largest `n` each exhaustive routine accepts.
///
/// Defaults can be overridden through `CARMEN_CAP_SUSPECT`,
/// `CARMEN_CAP_EXACT_MIN`, `CARMEN_CAP_ENTROPY` and `CARMEN_CAP_SUBSET`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Outcome enumeration over all `n! * 2` itinerary/bit pairs.
    pub suspect: usize,
    /// Minimisation over every table strategy.
    pub exact_min: usize,
    /// Exact posterior tables.
    pub entropy: usize,
    /// Exhaustive search over subsets of the hypercube.
    pub subset: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { suspect: 10, exact_min: 3, entropy: 9, subset: 4 }
    }
}

impl Caps {
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        for (var, slot) in [
            ("CARMEN_CAP_SUSPECT", &mut caps.suspect),
            ("CARMEN_CAP_EXACT_MIN", &mut caps.exact_min),
            ("CARMEN_CAP_ENTROPY", &mut caps.entropy),
            ("CARMEN_CAP_SUBSET", &mut caps.subset),
        ] {
            if let Ok(raw) = env::var(var) {
                *slot = raw
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidCap(format!("{var}={raw:?} is not a non-negative integer")))?;
            }
        }
        Ok(caps)
    }

    pub(crate) fn check(what: &'static str, n: usize, cap: usize) -> Result<()> {
        if n > cap {
            Err(Error::CapExceeded { what, n, cap })
        } else {
            Ok(())
        }
    }
}
