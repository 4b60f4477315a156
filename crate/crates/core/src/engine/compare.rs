use super::{run, EngineConfig, EngineError, Mode, Outcome, VerificationReport};
use crate::ir::TransitionSystem;

/// Plain and extended runs of the same system side by side.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub plain: VerificationReport,
    pub extended: VerificationReport,
}

impl Comparison {
    /// `k_plain - k_ext`.
    pub fn k_delta(&self) -> i64 {
        self.plain.final_k as i64 - self.extended.final_k as i64
    }

    /// Extended wall time over plain wall time.
    pub fn time_ratio(&self) -> f64 {
        self.extended.time_ms / self.plain.time_ms.max(1e-9)
    }

    pub fn solver_calls(&self) -> (u64, u64) {
        (self.plain.solver_calls(), self.extended.solver_calls())
    }
}

/// Runs both modes (concurrently) with the solver settings of `base`.
pub fn compare(sys: &TransitionSystem, base: &EngineConfig) -> Result<Comparison, EngineError> {
    compare_with(sys, base, run)
}

/// [`compare`] with an injectable engine, so the agreement check itself can
/// be exercised.
pub fn compare_with<F>(sys: &TransitionSystem, base: &EngineConfig, engine: F) -> Result<Comparison, EngineError>
where
    F: Fn(&TransitionSystem, &EngineConfig) -> Result<VerificationReport, EngineError> + Sync,
{
    let plain_cfg = base.with_mode(Mode::Plain);
    let ext_cfg = base.with_mode(Mode::Extended);
    let (plain, extended) = rayon::join(|| engine(sys, &plain_cfg), || engine(sys, &ext_cfg));
    let (plain, extended) = (plain?, extended?);
    let conflict = matches!(
        (plain.outcome, extended.outcome),
        (Outcome::BugFound, Outcome::Correct) | (Outcome::Correct, Outcome::BugFound)
    );
    if conflict {
        return Err(EngineError::Discrepancy {
            plain: plain.outcome,
            extended: extended.outcome,
            reports: Box::new((plain, extended)),
        });
    }
    Ok(Comparison { plain, extended })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ProofSource;
    use crate::frontend::{generate_benchmark, BenchmarkSpec};

    #[test]
    fn chain11_halves() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(11)).unwrap();
        let c = compare(&sys, &EngineConfig::default()).unwrap();
        assert_eq!(c.plain.final_k, 12);
        assert_eq!(c.extended.final_k, 7);
        assert_eq!(c.k_delta(), 5);
    }

    #[test]
    fn safe_accumulator_agrees() {
        let sys = generate_benchmark(&BenchmarkSpec::accumulator(4, false)).unwrap();
        let c = compare(&sys, &EngineConfig::default()).unwrap();
        assert_eq!(c.plain.outcome, Outcome::Correct);
        assert_eq!(c.extended.outcome, Outcome::Correct);
        assert_eq!(c.k_delta(), 0);
        assert_eq!(c.plain.proof_source, Some(ProofSource::InductiveStep));
    }

    #[test]
    fn injected_disagreement_is_an_error() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(3)).unwrap();
        let liar = |s: &TransitionSystem, cfg: &EngineConfig| {
            let mut r = run(s, cfg)?;
            if cfg.mode == Mode::Extended {
                r.outcome = Outcome::Correct;
            }
            Ok(r)
        };
        let err = compare_with(&sys, &EngineConfig::default(), liar).unwrap_err();
        assert!(matches!(
            err,
            EngineError::Discrepancy {
                plain: Outcome::BugFound,
                extended: Outcome::Correct,
                ..
            }
        ));
    }
}
