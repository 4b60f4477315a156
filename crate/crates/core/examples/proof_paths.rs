//! The two ways a run ends in `correct`.
//!
//! `safe_sat` is closed by the inductive step at k=2: no two-state path that
//! satisfies the property can step out of it. `halt_sink` never becomes
//! inductive (every non-halting value is a fresh inductive
//! counterexample), but once k=8 every execution has halted, so the forward
//! condition finishes the proof.

use std::error::Error;

use kindmc::engine::{run, EngineConfig};
use kindmc::frontend::parse_file;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for name in ["safe_sat", "halt_sink"] {
        let path = format!("{}/systems/{name}.kts", env!("CARGO_MANIFEST_DIR"));
        let sys = parse_file(path.as_ref())?;
        let r = run(&sys, &EngineConfig::extended())?;
        let via = r.proof_source.map_or("-".to_string(), |p| p.to_string());
        println!(
            "{name:<10} {} at k={} via {via}, {} spurious targets",
            r.outcome, r.final_k, r.targets
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
