//! Satisfiability checking of encoded queries.
//!
//! Two backends share one interface: an external SMT-LIB2 process (one
//! process per query) and the built-in [`enumerate`] search, which is
//! complete and deterministic for small per-step state spaces.

mod decode;
mod enumerator;
mod external;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::encoder::Query;
use crate::ir::Value;

pub use decode::{decode_model, Decoded};
pub use enumerator::enumerate;
pub use external::{run_external, SOLVER_ENV};

/// Assignment from declared names (timed variables and selectors) to values.
pub type Model = IndexMap<String, Value>;

/// Largest per-step bit count the enumerator accepts.
pub const MAX_ENUM_CAP: u32 = 30;
pub const DEFAULT_ENUM_CAP: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for SatStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SatStatus::Sat => "sat",
            SatStatus::Unsat => "unsat",
            SatStatus::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverVerdict {
    pub status: SatStatus,
    /// Present exactly when `status` is `Sat`.
    pub model: Option<Model>,
    /// Why the answer is `Unknown`, if it is.
    pub diagnostic: Option<String>,
}

impl SolverVerdict {
    pub fn unsat() -> Self {
        SolverVerdict {
            status: SatStatus::Unsat,
            model: None,
            diagnostic: None,
        }
    }

    pub fn unknown(why: impl Into<String>) -> Self {
        SolverVerdict {
            status: SatStatus::Unknown,
            model: None,
            diagnostic: Some(why.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    Enumerator,
    /// Program and arguments; the script is written to its standard input.
    External(Vec<String>),
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Enumerator => f.write_str("enum"),
            Backend::External(cmd) => write!(f, "external:{}", cmd.join(" ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub backend: Backend,
    /// Per-query limit for the external backend; 0 means none.
    pub timeout_ms: u64,
    /// Largest number of variable bits in one unrolling step the enumerator
    /// will search.
    pub enum_bit_cap: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::enumerator()
    }
}

impl SolverConfig {
    pub fn enumerator() -> Self {
        SolverConfig {
            backend: Backend::Enumerator,
            timeout_ms: 0,
            enum_bit_cap: DEFAULT_ENUM_CAP,
        }
    }

    /// External backend from a whitespace-separated command line.
    pub fn external(command: &str) -> Result<Self, SolverError> {
        let cfg = SolverConfig {
            backend: Backend::External(command.split_whitespace().map(String::from).collect()),
            ..SolverConfig::enumerator()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// External backend taken from `KINDMC_SOLVER`, if set and nonempty.
    pub fn from_env() -> Option<Result<Self, SolverError>> {
        let cmd = std::env::var(SOLVER_ENV).ok()?;
        (!cmd.trim().is_empty()).then(|| SolverConfig::external(&cmd))
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if let Backend::External(cmd) = &self.backend {
            if cmd.is_empty() {
                return Err(SolverError::Config("external solver command is empty".into()));
            }
        }
        if self.enum_bit_cap > MAX_ENUM_CAP {
            return Err(SolverError::Config(format!(
                "enumerator bit cap {} exceeds {MAX_ENUM_CAP}",
                self.enum_bit_cap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("solver configuration: {0}")]
    Config(String),
    #[error("query needs {bits} bits in one step, enumerator cap is {cap}")]
    CapExceeded { bits: u32, cap: u32 },
    #[error("cannot start solver `{command}`: {reason}")]
    Spawn { command: String, reason: String },
    #[error("solver protocol violation: {0}")]
    Protocol(String),
}

/// A solver session owned by one verification task.
#[derive(Debug)]
pub struct Solver {
    cfg: SolverConfig,
    calls: u64,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self, SolverError> {
        cfg.validate()?;
        Ok(Solver { cfg, calls: 0 })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Number of queries checked so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn check(&mut self, q: &Query) -> Result<SolverVerdict, SolverError> {
        self.calls += 1;
        match &self.cfg.backend {
            Backend::Enumerator => enumerate(q, self.cfg.enum_bit_cap),
            Backend::External(cmd) => run_external(q, cmd, self.cfg.timeout_ms),
        }
    }
}

/// One-off check with a fresh session.
pub fn check(q: &Query, cfg: &SolverConfig) -> Result<SolverVerdict, SolverError> {
    Solver::new(cfg.clone())?.check(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::external("  ").is_err());
        let cfg = SolverConfig {
            enum_bit_cap: 31,
            ..SolverConfig::enumerator()
        };
        assert!(matches!(cfg.validate(), Err(SolverError::Config(_))));
        let ext = SolverConfig::external("z3 -in").unwrap();
        assert_eq!(ext.backend, Backend::External(vec!["z3".into(), "-in".into()]));
        assert_eq!(ext.backend.to_string(), "external:z3 -in");
    }

    #[test]
    fn session_counts_calls() {
        let q = Query {
            kind: crate::encoder::QueryKind::BaseCase,
            k: 1,
            decls: vec![],
            markers: vec![],
            assertion: crate::ir::Expr::bool(true),
        };
        let mut s = Solver::new(SolverConfig::enumerator()).unwrap();
        assert_eq!(s.check(&q).unwrap().status, SatStatus::Sat);
        s.check(&q).unwrap();
        assert_eq!(s.calls(), 2);
    }
}
