//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export takes plain values and returns a JSON string. The `*_json`
//! functions are the same operations as ordinary Rust, for native tests.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use carmen_core::formats::{DegreeJson, GameOutcomeJson, HardDistributionJson, Theorem1Json};
use carmen_core::game::run_game;
use carmen_core::hypercube::{max_induced_degree, verify_theorem1, KHalvingStrategy, KSet, Restriction};
use carmen_core::query::hard_distribution_exact;
use carmen_core::{BobStrategy, Caps, Error, Permutation, Result};

/// Largest dimension the page offers; keeps every report instant.
pub const DEMO_MAX_N: usize = 6;

fn demo_caps() -> Caps {
    Caps { suspect: DEMO_MAX_N, exact_min: 0, entropy: DEMO_MAX_N, subset: 0 }
}

fn kset(n: usize, k_hex: &str) -> Result<KSet> {
    if n > DEMO_MAX_N {
        return Err(Error::CapExceeded { what: "the demo", n, cap: DEMO_MAX_N });
    }
    KSet::from_hex(n, k_hex)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

#[derive(Serialize)]
struct Analysis {
    degree: DegreeJson,
    halving: Option<Theorem1Json>,
    entropy_bits: Option<f64>,
}

/// Degree report for `K`, plus the halving-strategy check and its entropy
/// when `K` holds more than half of the cube.
pub fn analyze_kset_json(n: usize, k_hex: &str) -> Result<String> {
    let k = kset(n, k_hex)?;
    let degree = DegreeJson::from(&max_induced_degree(&k)?);
    if !k.is_majority() {
        return Ok(to_json(&Analysis { degree, halving: None, entropy_bits: None }));
    }
    let caps = demo_caps();
    let report = verify_theorem1(&k, &caps)?;
    let s: BobStrategy = KHalvingStrategy::new(k)?.into();
    let h = carmen_core::entropy::conditional_entropy(&s, &caps)?;
    Ok(to_json(&Analysis { degree, halving: Some(Theorem1Json::from(&report)), entropy_bits: Some(h) }))
}

#[derive(Serialize)]
struct Step {
    t: usize,
    city: usize,
    bit: u8,
    clue: String,
    remaining: usize,
    floor: usize,
}

#[derive(Serialize)]
struct Play {
    steps: Vec<Step>,
    outcome: GameOutcomeJson,
}

/// Plays the halving strategy of `K` along `pi` (1-based, comma separated)
/// and records how many members of `K` survive each clue.
pub fn play_halving_json(n: usize, k_hex: &str, pi: &str, z: bool) -> Result<String> {
    let k = kset(n, k_hex)?;
    let cities = pi
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|_| Error::InvalidPermutation(format!("bad city {c:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let pi = Permutation::from_one_based(&cities)?;
    if pi.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: pi.n() });
    }
    let strategy: BobStrategy = KHalvingStrategy::new(k.clone())?.into();
    let mut w = Restriction::new(&k);
    let mut steps = Vec::with_capacity(n - 1);
    for t in 1..n {
        let city = pi.city(t - 1);
        let bit = w.place_majority(city);
        steps.push(Step {
            t,
            city: city + 1,
            bit: bit as u8,
            clue: w.clue().to_string(),
            remaining: w.count(),
            floor: 1 << (n - 1 - t),
        });
    }
    let outcome = GameOutcomeJson::from(&run_game(&strategy, &pi, z, &demo_caps())?);
    Ok(to_json(&Play { steps, outcome }))
}

/// Exact law of the clue string under the halving strategy of `K`.
pub fn clue_distribution_json(n: usize, k_hex: &str) -> Result<String> {
    let k = kset(n, k_hex)?;
    let dist = hard_distribution_exact(&k, &demo_caps())?;
    Ok(to_json(&HardDistributionJson::exact(&k, &dist)))
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn analyze_kset(n: usize, k_hex: &str) -> std::result::Result<String, JsError> {
    js(analyze_kset_json(n, k_hex))
}

#[wasm_bindgen]
pub fn play_halving(n: usize, k_hex: &str, pi: &str, z: bool) -> std::result::Result<String, JsError> {
    js(play_halving_json(n, k_hex, pi, z))
}

#[wasm_bindgen]
pub fn clue_distribution(n: usize, k_hex: &str) -> std::result::Result<String, JsError> {
    js(clue_distribution_json(n, k_hex))
}
