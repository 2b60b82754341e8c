//! Prints the exact game values and min-max induced degrees reachable by brute force.

use carmen_core::game::exact_game_complexity;
use carmen_core::hypercube::{min_max_degree, SearchMode};
use carmen_core::formats::StrategyFile;
use carmen_core::Caps;

fn main() -> Result<(), carmen_core::Error> {
    let caps = Caps::default();
    for n in 2..=3 {
        let v = exact_game_complexity(n, &caps)?;
        println!(
            "compl(G_CS,{n}) = {} (first optimal strategy #{} of {}): {}",
            v.value,
            v.strategy_index,
            v.strategies_examined,
            serde_json::to_string(&StrategyFile::from_table(&v.strategy)).unwrap()
        );
    }
    for n in 2..=4 {
        let r = min_max_degree(n, None, SearchMode::Exhaustive, &caps)?;
        println!("min max degree, n = {n}: {} (witness {:?}, {} sets)", r.value, r.witness, r.examined);
    }
    Ok(())
}
