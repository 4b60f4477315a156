//! Encodes the three k-induction queries for a small counter and prints
//! them as SMT-LIB2 scripts, ready to pipe into any QF_BV solver.

use std::error::Error;

use kindmc::encoder::{encode_base_case, encode_forward_condition, encode_inductive_step, serialize_smtlib};
use kindmc::frontend::parse_file;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = parse_file(concat!(env!("CARGO_MANIFEST_DIR"), "/systems/chain5.kts").as_ref())?;
    let k = 2;
    for q in [
        encode_base_case(&sys, k),
        encode_forward_condition(&sys, k),
        encode_inductive_step(&sys, k),
    ] {
        println!("{}", serialize_smtlib(&q));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
