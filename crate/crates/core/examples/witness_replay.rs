//! Where an extended-mode witness comes from.
//!
//! The run harvests the first state of each inductive counterexample as a
//! target. When a forward path reaches one, the reported witness is that
//! path stitched to the target's stored suffix. Replaying it against the
//! system checks init, every transition and the final violation.

use std::error::Error;

use kindmc::engine::{run, EngineConfig, WitnessSource};
use kindmc::frontend::parse_file;
use kindmc::ir::replay_trace;
use kindmc::oracle::{reachable, DEFAULT_STATE_CAP};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = parse_file(concat!(env!("CARGO_MANIFEST_DIR"), "/systems/chain11.kts").as_ref())?;
    let report = run(&sys, &EngineConfig::extended())?;

    for t in &report.harvested {
        let live = reachable(&sys, &t.first_state, DEFAULT_STATE_CAP)?;
        println!(
            "target {} from k={}: {}, suffix length {}, reachable: {live}",
            t.id,
            t.born_at_k,
            t.first_state,
            t.suffix.len()
        );
    }
    let witness = report.witness.as_ref().ok_or("expected a bug")?;
    if let Some(WitnessSource::Target { target, depth, .. }) = report.witness_source {
        println!("forward path of {depth} states met target {target}");
    }
    print!("{}", witness.render(&sys));
    println!("replay: {:?}", replay_trace(&sys, witness));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
