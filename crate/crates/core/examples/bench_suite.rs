//! Runs the `smoke` benchmark suite in both modes and prints the markdown
//! comparison table. Pass `paper-analogues` for the larger suite.

use std::error::Error;

use kindmc::cli::{peak_rss_kb, render_markdown, run_suite, suite};
use kindmc::engine::EngineConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let name = std::env::args()
        .nth(1)
        .filter(|a| suite(a).is_some())
        .unwrap_or_else(|| "smoke".into());
    let specs = suite(&name).expect("checked above");
    let records = run_suite(&specs, &EngineConfig::default())?;
    print!("{}", render_markdown(&records, peak_rss_kb()));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
