use std::time::Instant;

use super::{
    stitch, EngineConfig, EngineError, IterationStats, Mode, Outcome, ProofSource, QueryStat, Target, TargetRecheck,
    VerificationReport, WitnessSource,
};
use crate::encoder::{
    encode_base_case, encode_extended_base_case, encode_forward_condition, encode_inductive_step, encode_target_reach,
    MarkerTag, Query,
};
use crate::ir::{replay_path, replay_trace, states_equal, Trace, TransitionSystem};
use crate::solver::{decode_model, Decoded, SatStatus, Solver, SolverVerdict};

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Mutable state of one verification run.
struct Run<'a> {
    sys: &'a TransitionSystem,
    cfg: &'a EngineConfig,
    solver: Solver,
    started: Instant,
    iterations: Vec<IterationStats>,
    warnings: Vec<String>,
    targets: Vec<Target>,
    /// Set once F or I returned unknown; no proof may be claimed after that.
    tainted: bool,
}

enum Step {
    Continue,
    Done(Outcome, Option<ProofSource>, Option<(Trace, WitnessSource)>),
}

impl<'a> Run<'a> {
    fn new(sys: &'a TransitionSystem, cfg: &'a EngineConfig) -> Result<Self, EngineError> {
        cfg.validate()?;
        Ok(Run {
            sys,
            cfg,
            solver: Solver::new(cfg.solver.clone())?,
            started: Instant::now(),
            iterations: Vec::new(),
            warnings: Vec::new(),
            targets: Vec::new(),
            tainted: false,
        })
    }

    fn check(&mut self, q: &Query, targets_only: bool) -> Result<SolverVerdict, EngineError> {
        let t = Instant::now();
        let verdict = self.solver.check(q)?;
        let stats = self.iterations.last_mut().expect("an iteration is open");
        stats.queries.push(QueryStat {
            kind: q.kind,
            targets_only,
            status: verdict.status,
            time_ms: ms_since(t),
        });
        if verdict.status == SatStatus::Unknown {
            let why = verdict.diagnostic.as_deref().unwrap_or("no reason given");
            self.warnings
                .push(format!("k={}: {} query inconclusive ({why})", q.k, q.kind));
        }
        Ok(verdict)
    }

    fn decode(&self, q: &Query, v: &SolverVerdict) -> Result<Decoded, EngineError> {
        let model = v.model.as_ref().expect("sat verdicts carry a model");
        Ok(decode_model(self.sys, q, model)?)
    }

    fn validated(&self, witness: Trace) -> Result<Trace, EngineError> {
        if self.cfg.validate_witness {
            let verdict = replay_trace(self.sys, &witness);
            if !verdict.is_valid() {
                return Err(EngineError::InvalidWitness(verdict.to_string()));
            }
        }
        Ok(witness)
    }

    /// Turns a satisfied base-case model into a reported witness.
    fn bug(&self, q: &Query, v: &SolverVerdict) -> Result<Step, EngineError> {
        let d = self.decode(q, v)?;
        let (trace, source) = match d.fired {
            Some(MarkerTag::TargetMatch { depth, target }) => {
                let t = self
                    .targets
                    .iter()
                    .find(|t| t.id == target)
                    .ok_or_else(|| EngineError::Config(format!("model names unknown target {target}")))?;
                let src = WitnessSource::Target {
                    target,
                    depth,
                    born_at_k: t.born_at_k,
                };
                (stitch(&d.trace, t)?, src)
            }
            _ => (d.trace, WitnessSource::Direct),
        };
        Ok(Step::Done(
            Outcome::BugFound,
            None,
            Some((self.validated(trace)?, source)),
        ))
    }

    fn proof(&self, source: ProofSource, no_claim: bool) -> Step {
        if no_claim || self.tainted {
            Step::Continue
        } else {
            Step::Done(Outcome::Correct, Some(source), None)
        }
    }

    /// Forward condition then inductive step; `no_claim` suppresses a
    /// correctness verdict for this iteration.
    fn closing_checks(&mut self, k: u32, no_claim: bool) -> Result<(Step, Option<SolverVerdict>, Query), EngineError> {
        let fq = encode_forward_condition(self.sys, k);
        match self.check(&fq, false)?.status {
            SatStatus::Unsat => {
                if let Step::Done(o, p, w) = self.proof(ProofSource::ForwardCondition, no_claim) {
                    return Ok((Step::Done(o, p, w), None, fq));
                }
            }
            SatStatus::Unknown => self.tainted = true,
            SatStatus::Sat => {}
        }
        let iq = encode_inductive_step(self.sys, k);
        let v = self.check(&iq, false)?;
        match v.status {
            SatStatus::Unsat => Ok((self.proof(ProofSource::InductiveStep, no_claim), None, iq)),
            SatStatus::Unknown => {
                self.tainted = true;
                Ok((Step::Continue, None, iq))
            }
            SatStatus::Sat => Ok((Step::Continue, Some(v), iq)),
        }
    }

    fn plain_iteration(&mut self, k: u32) -> Result<Step, EngineError> {
        let bq = encode_base_case(self.sys, k);
        let bv = self.check(&bq, false)?;
        if bv.status == SatStatus::Sat {
            return self.bug(&bq, &bv);
        }
        let (step, _, _) = self.closing_checks(k, bv.status == SatStatus::Unknown)?;
        Ok(step)
    }

    fn extended_iteration(&mut self, k: u32) -> Result<Step, EngineError> {
        let bq = encode_extended_base_case(self.sys, k, &self.targets);
        let bv = self.check(&bq, false)?;
        if bv.status == SatStatus::Sat {
            return self.bug(&bq, &bv);
        }
        let (step, model, iq) = self.closing_checks(k, bv.status == SatStatus::Unknown)?;
        let Some(iv) = model else { return Ok(step) };

        let suffix = self.decode(&iq, &iv)?.trace;
        if self.cfg.validate_witness {
            let verdict = replay_path(self.sys, &suffix);
            if !verdict.is_valid() {
                return Err(EngineError::InvalidWitness(format!("inductive suffix: {verdict}")));
            }
        }
        let first = suffix.states[0].clone();
        for t in &self.targets {
            if states_equal(&t.first_state, &first)? {
                return Ok(Step::Continue);
            }
        }
        let target = Target {
            id: self.targets.len() as u32,
            first_state: first,
            suffix,
            born_at_k: k,
        };
        self.iterations.last_mut().expect("open iteration").targets_added += 1;
        self.targets.push(target);

        if self.cfg.target_recheck == TargetRecheck::SameIteration {
            let fresh = std::slice::from_ref(self.targets.last().expect("just pushed"));
            let rq = encode_target_reach(self.sys, k, fresh);
            let rv = self.check(&rq, true)?;
            if rv.status == SatStatus::Sat {
                return self.bug(&rq, &rv);
            }
        }
        Ok(Step::Continue)
    }

    fn finish(
        self,
        outcome: Outcome,
        final_k: u32,
        proof_source: Option<ProofSource>,
        witness: Option<(Trace, WitnessSource)>,
    ) -> VerificationReport {
        let (witness, witness_source) = match witness {
            Some((t, s)) => (Some(t), Some(s)),
            None => (None, None),
        };
        VerificationReport {
            outcome,
            final_k,
            witness,
            witness_source,
            proof_source,
            iterations: self.iterations,
            targets: self.targets.len() as u32,
            harvested: self.targets,
            warnings: self.warnings,
            config: self.cfg.echo(),
            time_ms: ms_since(self.started),
        }
    }
}

fn drive(sys: &TransitionSystem, cfg: &EngineConfig, mode: Mode) -> Result<VerificationReport, EngineError> {
    let mut run = Run::new(sys, cfg)?;
    for k in 1..=cfg.max_k {
        let t = Instant::now();
        run.iterations.push(IterationStats {
            k,
            ..IterationStats::default()
        });
        let step = match mode {
            Mode::Plain => run.plain_iteration(k)?,
            Mode::Extended => run.extended_iteration(k)?,
        };
        run.iterations.last_mut().expect("open iteration").time_ms = ms_since(t);
        if let Step::Done(outcome, proof, witness) = step {
            return Ok(run.finish(outcome, k, proof, witness));
        }
    }
    Ok(run.finish(Outcome::BoundExhausted, cfg.max_k, None, None))
}

/// Classic k-induction: `B(k)`, then `F(k)`, then `I(k)` for growing `k`.
pub fn run_plain(sys: &TransitionSystem, cfg: &EngineConfig) -> Result<VerificationReport, EngineError> {
    drive(sys, cfg, Mode::Plain)
}

/// k-induction with inductive counterexamples recycled as forward targets.
pub fn run_extended(sys: &TransitionSystem, cfg: &EngineConfig) -> Result<VerificationReport, EngineError> {
    drive(sys, cfg, Mode::Extended)
}

/// Runs the mode selected in `cfg`.
pub fn run(sys: &TransitionSystem, cfg: &EngineConfig) -> Result<VerificationReport, EngineError> {
    drive(sys, cfg, cfg.mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{generate_benchmark, parse, BenchmarkSpec};

    fn xs(t: &Trace) -> Vec<u64> {
        t.states.iter().map(|s| s.get("x").unwrap().raw()).collect()
    }

    #[test]
    fn chain5_in_both_modes() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(5)).unwrap();
        let plain = run_plain(&sys, &EngineConfig::plain()).unwrap();
        assert_eq!((plain.outcome, plain.final_k), (Outcome::BugFound, 6));
        assert_eq!(xs(plain.witness.as_ref().unwrap()), [0, 1, 2, 3, 4, 5]);

        let ext = run_extended(&sys, &EngineConfig::extended()).unwrap();
        assert_eq!((ext.outcome, ext.final_k), (Outcome::BugFound, 4));
        assert_eq!(xs(ext.witness.as_ref().unwrap()), [0, 1, 2, 3, 4, 5]);
        assert!(matches!(
            ext.witness_source,
            Some(WitnessSource::Target { depth: 4, .. })
        ));
    }

    #[test]
    fn next_iteration_recheck_is_never_faster() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(8)).unwrap();
        let same = run_extended(&sys, &EngineConfig::extended()).unwrap();
        let next = run_extended(
            &sys,
            &EngineConfig {
                target_recheck: TargetRecheck::NextIteration,
                ..EngineConfig::extended()
            },
        )
        .unwrap();
        assert_eq!(next.outcome, Outcome::BugFound);
        assert!(next.final_k >= same.final_k);
    }

    #[test]
    fn saturating_counter_is_inductive_at_two() {
        let src = "(system (var x (bv 4)) (init (= x 0)) (trans (= (next x) (ite (bvuge x 7) x (bvadd x 1)))) (prop p (bvule x 7)) (halt false))";
        let sys = parse(src).unwrap();
        for cfg in [EngineConfig::plain(), EngineConfig::extended()] {
            let r = run(&sys, &cfg).unwrap();
            assert_eq!(r.outcome, Outcome::Correct);
            assert_eq!(r.final_k, 2);
            assert_eq!(r.proof_source, Some(ProofSource::InductiveStep));
        }
    }

    #[test]
    fn bound_exhaustion() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(9)).unwrap();
        let cfg = EngineConfig {
            max_k: 3,
            ..EngineConfig::plain()
        };
        let r = run(&sys, &cfg).unwrap();
        assert_eq!((r.outcome, r.final_k), (Outcome::BoundExhausted, 3));
        assert_eq!(r.iterations.len(), 3);
        assert_eq!(r.solver_calls(), 9);
    }
}
