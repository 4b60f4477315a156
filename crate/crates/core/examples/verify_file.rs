//! Parse a `.kts` file and check it with bidirectional k-induction.
//!
//! ```bash
//! cargo run --example verify_file
//! cargo run --example verify_file -- path/to/system.kts
//! ```

use std::error::Error;
use std::path::PathBuf;

use kindmc::engine::{run, EngineConfig, Outcome};
use kindmc::frontend::parse_file;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = std::env::args()
        .nth(1)
        .filter(|a| a.ends_with(".kts"))
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("systems/chain5.kts"));
    let sys = parse_file(&path)?;
    let report = run(&sys, &EngineConfig::extended())?;

    println!("{}: {} at k={}", path.display(), report.outcome, report.final_k);
    match report.outcome {
        Outcome::BugFound => {
            let witness = report.witness.as_ref().expect("bugs carry a witness");
            print!("{}", witness.render(&sys));
        }
        Outcome::Correct => println!("proved by {}", report.proof_source.expect("proofs name their source")),
        Outcome::BoundExhausted => println!("no verdict within {} iterations", report.config.max_k),
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
