//! Same engine, different backend: queries go to an SMT-LIB2 solver
//! subprocess named by `KINDMC_SOLVER` (for example `z3 -in`). Without it
//! the example falls back to the built-in enumerator.

use std::error::Error;

use kindmc::engine::{run, EngineConfig};
use kindmc::frontend::parse_file;
use kindmc::solver::{SolverConfig, SOLVER_ENV};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = parse_file(concat!(env!("CARGO_MANIFEST_DIR"), "/systems/diamond.kts").as_ref())?;
    let solver = match SolverConfig::from_env() {
        Some(cfg) => cfg?,
        None => {
            println!("{SOLVER_ENV} is not set; using the enumerator");
            SolverConfig::enumerator()
        }
    };
    let mut solver = solver;
    solver.timeout_ms = 10_000;
    let cfg = EngineConfig {
        solver,
        ..EngineConfig::extended()
    };
    let report = run(&sys, &cfg)?;
    println!(
        "solver {}: {} at k={} after {} queries",
        cfg.solver.backend,
        report.outcome,
        report.final_k,
        report.solver_calls()
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
