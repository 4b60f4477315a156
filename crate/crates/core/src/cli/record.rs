use serde::{Deserialize, Serialize};

use crate::engine::{ConfigEcho, Mode, Outcome, ProofSource, VerificationReport};

/// Which check closed a correctness proof, in report-file spelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordProof {
    Forward,
    Inductive,
}

impl From<ProofSource> for RecordProof {
    fn from(p: ProofSource) -> Self {
        match p {
            ProofSource::ForwardCondition => RecordProof::Forward,
            ProofSource::InductiveStep => RecordProof::Inductive,
        }
    }
}

/// Query statuses of one iteration, e.g. `["base:unsat", "forward:sat"]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: u32,
    pub checks: Vec<String>,
    pub targets_added: u32,
}

/// One benchmark run in one mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub benchmark: String,
    pub mode: Mode,
    pub outcome: Outcome,
    pub k: u32,
    pub witness_len: Option<u64>,
    pub time_ms: u64,
    pub solver_calls: u64,
    pub targets_added: u32,
    pub proof_source: Option<RecordProof>,
    pub timestamp: String,
    pub config: ConfigEcho,
    pub iterations: Vec<IterationRecord>,
}

impl RunRecord {
    pub fn from_report(benchmark: &str, report: &VerificationReport) -> Self {
        RunRecord {
            benchmark: benchmark.to_string(),
            mode: report.config.mode,
            outcome: report.outcome,
            k: report.final_k,
            witness_len: report.witness_len().map(|n| n as u64),
            time_ms: report.time_ms.round() as u64,
            solver_calls: report.solver_calls(),
            targets_added: report.targets_added(),
            proof_source: report.proof_source.map(RecordProof::from),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            config: report.config.clone(),
            iterations: report
                .iterations
                .iter()
                .map(|it| IterationRecord {
                    k: it.k,
                    checks: it
                        .queries
                        .iter()
                        .map(|q| {
                            let kind = if q.targets_only {
                                "targets".to_string()
                            } else {
                                q.kind.to_string()
                            };
                            format!("{kind}:{}", q.status)
                        })
                        .collect(),
                    targets_added: it.targets_added,
                })
                .collect(),
        }
    }
}
