use std::fmt::Write;

use rayon::prelude::*;
use thiserror::Error;

use super::RunRecord;
use crate::engine::{run, EngineConfig, EngineError, Mode, Outcome};
use crate::frontend::{generate_benchmark, BenchmarkSpec};

pub const SUITES: &[&str] = &["paper-analogues", "smoke"];

/// Benchmarks of a named suite.
pub fn suite(name: &str) -> Option<Vec<BenchmarkSpec>> {
    let specs = match name {
        "paper-analogues" => {
            let mut v: Vec<BenchmarkSpec> = [4, 6, 9, 11, 20].into_iter().map(BenchmarkSpec::chain_bug).collect();
            v.extend([9, 25].map(BenchmarkSpec::diamond_parity));
            v.extend([16, 64].map(BenchmarkSpec::const_check));
            v.push(BenchmarkSpec::accumulator(8, false));
            v.push(BenchmarkSpec::accumulator(8, true));
            v
        }
        "smoke" => vec![
            BenchmarkSpec::chain_bug(4),
            BenchmarkSpec::diamond_parity(5),
            BenchmarkSpec::const_check(8),
            BenchmarkSpec::accumulator(4, false),
            BenchmarkSpec::accumulator(4, true),
        ],
        _ => return None,
    };
    Some(specs)
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("{benchmark}: {source}")]
    Engine { benchmark: String, source: EngineError },
    #[error("{benchmark}: plain mode says {plain}, extended mode says {extended}")]
    Discrepancy {
        benchmark: String,
        plain: Outcome,
        extended: Outcome,
    },
}

/// Runs every benchmark in both modes, concurrently, and returns the records
/// sorted by benchmark name, plain before extended.
pub fn run_suite(specs: &[BenchmarkSpec], base: &EngineConfig) -> Result<Vec<RunRecord>, SuiteError> {
    let jobs: Vec<(BenchmarkSpec, Mode)> = specs
        .iter()
        .flat_map(|s| [(*s, Mode::Plain), (*s, Mode::Extended)])
        .collect();
    let mut records = jobs
        .par_iter()
        .map(|(spec, mode)| {
            let failed = |source| SuiteError::Engine {
                benchmark: spec.name(),
                source,
            };
            let sys = generate_benchmark(spec).map_err(|e| failed(EngineError::Config(e.to_string())))?;
            let report = run(&sys, &base.with_mode(*mode)).map_err(failed)?;
            Ok(RunRecord::from_report(&spec.name(), &report))
        })
        .collect::<Result<Vec<_>, SuiteError>>()?;
    records.sort_by(|a, b| (&a.benchmark, a.mode as u8).cmp(&(&b.benchmark, b.mode as u8)));
    for pair in records.chunks(2) {
        if let [p, e] = pair {
            let conflict = matches!(
                (p.outcome, e.outcome),
                (Outcome::BugFound, Outcome::Correct) | (Outcome::Correct, Outcome::BugFound)
            );
            if conflict {
                return Err(SuiteError::Discrepancy {
                    benchmark: p.benchmark.clone(),
                    plain: p.outcome,
                    extended: e.outcome,
                });
            }
        }
    }
    Ok(records)
}

/// Peak resident set size of this process in KiB, where the OS reports it.
pub fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Markdown comparison table with average and total rows.
pub fn render_markdown(records: &[RunRecord], peak_rss_kb: Option<u64>) -> String {
    let mut out = String::new();
    out.push_str("| benchmark | outcome | k plain | k ext | floor(k/2)+1 | witness plain | witness ext | ms plain | ms ext | calls plain | calls ext |\n");
    out.push_str("|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n");
    let mut rows = 0u64;
    let (mut kp, mut ke, mut tp, mut te) = (0u64, 0u64, 0u64, 0u64);
    let len = |w: Option<u64>| w.map_or("-".to_string(), |n| n.to_string());
    for pair in records.chunks(2) {
        let [p, e] = pair else { continue };
        let outcome = if p.outcome == e.outcome {
            p.outcome.to_string()
        } else {
            format!("{} / {}", p.outcome, e.outcome)
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            p.benchmark,
            outcome,
            p.k,
            e.k,
            p.k / 2 + 1,
            len(p.witness_len),
            len(e.witness_len),
            p.time_ms,
            e.time_ms,
            p.solver_calls,
            e.solver_calls
        );
        rows += 1;
        kp += p.k as u64;
        ke += e.k as u64;
        tp += p.time_ms;
        te += e.time_ms;
    }
    if rows > 0 {
        let avg = |x: u64| format!("{:.1}", x as f64 / rows as f64);
        let _ = writeln!(
            out,
            "| **average** | | {} | {} | | | | {} | {} | | |",
            avg(kp),
            avg(ke),
            avg(tp),
            avg(te)
        );
        let _ = writeln!(out, "| **total** | | {kp} | {ke} | | | | {tp} | {te} | | |");
    }
    out.push_str("\n`accumulator_*` are scalar stand-ins for array-summing loops.\n");
    if let Some(kb) = peak_rss_kb {
        let _ = writeln!(out, "Peak RSS: {:.1} MB.", kb as f64 / 1024.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_known() {
        assert_eq!(suite("paper-analogues").unwrap().len(), 11);
        assert!(suite("nope").is_none());
    }

    #[test]
    fn smoke_suite_records_are_sorted_pairs() {
        let recs = run_suite(&suite("smoke").unwrap(), &EngineConfig::default()).unwrap();
        assert_eq!(recs.len(), 10);
        for pair in recs.chunks(2) {
            assert_eq!(pair[0].benchmark, pair[1].benchmark);
            assert_eq!((pair[0].mode, pair[1].mode), (Mode::Plain, Mode::Extended));
        }
        let md = render_markdown(&recs, Some(2048));
        assert!(md.contains("| chain_bug_4 | bug | 5 | 3 | 3 |"), "{md}");
        assert!(md.contains("**total**"));
    }
}
