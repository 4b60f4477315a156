//! Explicit-state breadth-first search, the independent reference the
//! symbolic engine is tested against.

use std::error::Error;

use kindmc::frontend::parse_file;
use kindmc::oracle::{bfs_check, reachable_states, DEFAULT_STATE_CAP};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/systems");

    let diamond = parse_file(format!("{dir}/diamond.kts").as_ref())?;
    let r = bfs_check(&diamond, DEFAULT_STATE_CAP)?;
    let cex = r.shortest().expect("diamond is unsafe");
    println!("diamond: shortest counterexample has {} states", cex.len());
    print!("{}", cex.render(&diamond));

    let safe = parse_file(format!("{dir}/safe_sat.kts").as_ref())?;
    let r = bfs_check(&safe, DEFAULT_STATE_CAP)?;
    assert!(r.shortest().is_none());
    let states = reachable_states(&safe, DEFAULT_STATE_CAP)?;
    println!(
        "safe_sat: safe, {} reachable states, BFS depth {}",
        states.len(),
        r.depth
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
