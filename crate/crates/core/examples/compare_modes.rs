//! Plain and extended k-induction on the same system, side by side.
//!
//! The extended run meets inductive counterexamples halfway, so on a chain
//! of depth 11 it stops at k=7 where plain mode needs k=12.

use std::error::Error;

use kindmc::engine::{compare, EngineConfig};
use kindmc::frontend::parse_file;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/systems/chain11.kts");
    let sys = parse_file(path.as_ref())?;
    let c = compare(&sys, &EngineConfig::default())?;

    for r in [&c.plain, &c.extended] {
        println!(
            "{:<9} {} at k={:<3} witness {:?} states, {} solver calls, {} targets",
            r.config.mode.to_string(),
            r.outcome,
            r.final_k,
            r.witness_len(),
            r.solver_calls(),
            r.targets_added()
        );
    }
    println!("k saved: {}", c.k_delta());
    assert_eq!((c.plain.final_k, c.extended.final_k), (12, 7));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
