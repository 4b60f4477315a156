//! The k-induction driver and its bidirectional extension.
//!
//! Both modes iterate `k = 1, 2, …` and check, in order, a base case, the
//! forward condition and the inductive step. The extended mode additionally
//! keeps the first states of inductive-step models as *targets*: reaching
//! one of them from an initial state proves the bug, so the forward search
//! and the backward search each only need to cover about half of the
//! counterexample.

mod compare;
mod run;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::QueryKind;
use crate::ir::{states_equal, IrError, State, Trace};
use crate::solver::{SatStatus, SolverConfig, SolverError};

pub use compare::{compare, compare_with, Comparison};
pub use run::{run, run_extended, run_plain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plain,
    Extended,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Extended => "extended",
        })
    }
}

/// When a freshly harvested target is first looked for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetRecheck {
    /// Immediately, with an extra target-only query at the same depth.
    SameIteration,
    /// Only as part of the next iteration's extended base case.
    NextIteration,
}

impl fmt::Display for TargetRecheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetRecheck::SameIteration => "same",
            TargetRecheck::NextIteration => "next",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: Mode,
    pub max_k: u32,
    pub target_recheck: TargetRecheck,
    pub solver: SolverConfig,
    /// Replay every reported witness and fail loudly if it does not hold up.
    pub validate_witness: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Extended,
            max_k: 100,
            target_recheck: TargetRecheck::SameIteration,
            solver: SolverConfig::enumerator(),
            validate_witness: true,
        }
    }
}

impl EngineConfig {
    pub fn plain() -> Self {
        EngineConfig {
            mode: Mode::Plain,
            ..EngineConfig::default()
        }
    }

    pub fn extended() -> Self {
        EngineConfig::default()
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        EngineConfig { mode, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_k == 0 {
            return Err(EngineError::Config("max_k must be at least 1".into()));
        }
        self.solver.validate()?;
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            mode: self.mode,
            max_k: self.max_k,
            target_recheck: self.target_recheck.to_string(),
            solver: self.solver.backend.to_string(),
            timeout_ms: self.solver.timeout_ms,
            enum_bit_cap: self.solver.enum_bit_cap,
            validate_witness: self.validate_witness,
        }
    }
}

/// Serializable summary of an [`EngineConfig`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: Mode,
    pub max_k: u32,
    pub target_recheck: String,
    pub solver: String,
    pub timeout_ms: u64,
    pub enum_bit_cap: u32,
    pub validate_witness: bool,
}

/// A state known to lead to a property violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub id: u32,
    pub first_state: State,
    /// Path `[first_state, …, ξ]` ending in a violating state.
    pub suffix: Trace,
    /// Iteration whose inductive step produced this target.
    pub born_at_k: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "bug")]
    BugFound,
    #[serde(rename = "correct")]
    Correct,
    #[serde(rename = "bound-exhausted")]
    BoundExhausted,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::BugFound => "bug",
            Outcome::Correct => "correct",
            Outcome::BoundExhausted => "bound-exhausted",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProofSource {
    #[serde(rename = "forward-condition")]
    ForwardCondition,
    #[serde(rename = "inductive-step")]
    InductiveStep,
}

impl fmt::Display for ProofSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofSource::ForwardCondition => "forward-condition",
            ProofSource::InductiveStep => "inductive-step",
        })
    }
}

/// How the reported witness was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "via", rename_all = "kebab-case")]
pub enum WitnessSource {
    /// The base case reached a violation directly.
    Direct,
    /// A forward path met target `target` at depth `depth`.
    Target { target: u32, depth: u32, born_at_k: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryStat {
    #[serde(serialize_with = "kind_text")]
    pub kind: QueryKind,
    /// True for the target-only recheck query.
    pub targets_only: bool,
    pub status: SatStatus,
    pub time_ms: f64,
}

fn kind_text<S: serde::Serializer>(k: &QueryKind, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(k)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationStats {
    pub k: u32,
    pub queries: Vec<QueryStat>,
    pub targets_added: u32,
    pub time_ms: f64,
}

impl IterationStats {
    pub fn solver_calls(&self) -> u64 {
        self.queries.len() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub outcome: Outcome,
    pub final_k: u32,
    pub witness: Option<Trace>,
    pub witness_source: Option<WitnessSource>,
    pub proof_source: Option<ProofSource>,
    pub iterations: Vec<IterationStats>,
    /// Targets alive at the end of the run (extended mode).
    pub targets: u32,
    #[serde(skip)]
    pub harvested: Vec<Target>,
    pub warnings: Vec<String>,
    pub config: ConfigEcho,
    pub time_ms: f64,
}

impl VerificationReport {
    pub fn solver_calls(&self) -> u64 {
        self.iterations.iter().map(|i| i.solver_calls()).sum()
    }

    pub fn targets_added(&self) -> u32 {
        self.iterations.iter().map(|i| i.targets_added).sum()
    }

    pub fn witness_len(&self) -> Option<usize> {
        self.witness.as_ref().map(|w| w.len())
    }
}

#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("witness failed replay: {0}")]
    InvalidWitness(String),
    #[error("plain mode says {plain}, extended mode says {extended}")]
    Discrepancy {
        plain: Outcome,
        extended: Outcome,
        reports: Box<(VerificationReport, VerificationReport)>,
    },
    #[error(transparent)]
    Internal(#[from] IrError),
}

/// Joins a forward path ending in `t.first_state` with the target's suffix.
pub fn stitch(prefix: &Trace, t: &Target) -> Result<Trace, EngineError> {
    let last = prefix
        .last()
        .ok_or_else(|| IrError::Internal("empty forward prefix".into()))?;
    if !states_equal(last, &t.first_state)? {
        return Err(IrError::Internal(format!(
            "prefix ends in {last}, target {} starts at {}",
            t.id, t.first_state
        ))
        .into());
    }
    let mut states = prefix.states.clone();
    states.extend(t.suffix.states.iter().skip(1).cloned());
    let mut inputs = prefix.inputs.clone();
    inputs.extend(t.suffix.inputs.iter().cloned());
    Ok(Trace::new(states, inputs, t.suffix.violated_prop.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Valuation, Value};

    fn path(xs: &[u64]) -> Trace {
        let states = xs
            .iter()
            .map(|&x| [("x", Value::bv(3, x))].into_iter().collect())
            .collect();
        let inputs = vec![Valuation::new(); xs.len().saturating_sub(1)];
        Trace::new(states, inputs, None)
    }

    fn target(xs: &[u64]) -> Target {
        let mut suffix = path(xs);
        suffix.violated_prop = Some("p".into());
        Target {
            id: 0,
            first_state: suffix.states[0].clone(),
            suffix,
            born_at_k: xs.len() as u32,
        }
    }

    #[test]
    fn stitch_shares_one_state() {
        let t = stitch(&path(&[0, 1, 2, 3]), &target(&[3, 4, 5])).unwrap();
        assert_eq!(
            t,
            Trace {
                violated_prop: Some("p".into()),
                ..path(&[0, 1, 2, 3, 4, 5])
            }
        );
        let one = stitch(&path(&[5]), &target(&[5])).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.inputs.len(), 0);
    }

    #[test]
    fn stitch_rejects_mismatched_join() {
        assert!(matches!(
            stitch(&path(&[0, 1]), &target(&[3, 4])),
            Err(EngineError::Internal(_))
        ));
    }

    #[test]
    fn config_rejects_zero_bound() {
        let cfg = EngineConfig {
            max_k: 0,
            ..EngineConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
