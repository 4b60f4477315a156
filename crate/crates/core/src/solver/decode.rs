use super::{Model, SolverError};
use crate::encoder::{timed_name, MarkerTag, Query, QueryKind};
use crate::ir::{first_violated, State, Trace, TransitionSystem, Valuation};

/// A model read back as a path through the system.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    /// The selector that explains the model, for base-case kinds.
    pub fired: Option<MarkerTag>,
    /// States `s_1..s_i` up to the fired depth, or all `k` states otherwise.
    pub trace: Trace,
}

fn missing(name: &str) -> SolverError {
    SolverError::Protocol(format!("model has no binding for {name}"))
}

/// Decodes `model` of `q` by name lookup only.
///
/// When several selectors are true the shallowest wins; at equal depth a
/// property violation is preferred over a target match, and lower target
/// ids over higher ones.
pub fn decode_model(sys: &TransitionSystem, q: &Query, model: &Model) -> Result<Decoded, SolverError> {
    let fired = match q.kind {
        QueryKind::BaseCase | QueryKind::ExtendedBaseCase => {
            let mut best: Option<(u32, u8, u32, MarkerTag)> = None;
            for m in &q.markers {
                let on = model.get(&m.name).ok_or_else(|| missing(&m.name))?;
                if on.as_bool() != Some(true) {
                    continue;
                }
                let key = match m.tag {
                    MarkerTag::Violation { depth } => (depth, 0, 0, m.tag),
                    MarkerTag::TargetMatch { depth, target } => (depth, 1, target, m.tag),
                };
                if best.is_none_or(|b| (key.0, key.1, key.2) < (b.0, b.1, b.2)) {
                    best = Some(key);
                }
            }
            let tag = best
                .map(|b| b.3)
                .ok_or_else(|| SolverError::Protocol("no selector is true in a base-case model".into()))?;
            Some(tag)
        }
        QueryKind::ForwardCondition | QueryKind::InductiveStep => None,
    };
    let len = fired.map_or(q.k, |t| t.depth());

    let lookup = |base: &str, step: u32| {
        let name = timed_name(base, step);
        model.get(&name).copied().ok_or_else(|| missing(&name))
    };
    let mut states = Vec::with_capacity(len as usize);
    let mut inputs = Vec::with_capacity(len.saturating_sub(1) as usize);
    for step in 1..=len {
        let mut s = State::new();
        for v in sys.state_vars() {
            s.insert(v.name.to_string(), lookup(&v.name, step)?);
        }
        states.push(s);
        if step < len {
            let mut inp = Valuation::new();
            for v in sys.input_vars() {
                inp.insert(v.name.to_string(), lookup(&v.name, step)?);
            }
            inputs.push(inp);
        }
    }

    let violated = match (q.kind, fired) {
        (_, Some(MarkerTag::TargetMatch { .. })) | (QueryKind::ForwardCondition, _) => None,
        _ => {
            let last = states.last().expect("traces have at least one state");
            Some(
                first_violated(sys, last)
                    .ok_or_else(|| SolverError::Protocol("decoded final state satisfies every property".into()))?,
            )
        }
    };
    Ok(Decoded {
        fired,
        trace: Trace::new(states, inputs, violated),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{encode_base_case, encode_inductive_step};
    use crate::frontend::{generate_benchmark, BenchmarkSpec};
    use crate::ir::Value;
    use crate::solver::enumerate;

    fn xs(t: &Trace) -> Vec<u64> {
        t.states.iter().map(|s| s.get("x").unwrap().raw()).collect()
    }

    #[test]
    fn base_case_decodes_shortest_witness() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(5)).unwrap();
        let q = encode_base_case(&sys, 6);
        let model = enumerate(&q, 24).unwrap().model.unwrap();
        let d = decode_model(&sys, &q, &model).unwrap();
        assert_eq!(d.fired, Some(MarkerTag::Violation { depth: 6 }));
        assert_eq!(xs(&d.trace), [0, 1, 2, 3, 4, 5]);
        assert_eq!(d.trace.violated_prop.as_deref(), Some("never_d"));
    }

    #[test]
    fn inductive_model_is_a_suffix() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(5)).unwrap();
        let q = encode_inductive_step(&sys, 2);
        let model = enumerate(&q, 24).unwrap().model.unwrap();
        let d = decode_model(&sys, &q, &model).unwrap();
        assert_eq!(d.fired, None);
        assert_eq!(xs(&d.trace), [4, 5]);
    }

    #[test]
    fn missing_binding_is_reported() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(5)).unwrap();
        let q = encode_base_case(&sys, 1);
        let mut model = Model::new();
        model.insert("viol%1".into(), Value::Bool(true));
        assert!(matches!(decode_model(&sys, &q, &model), Err(SolverError::Protocol(_))));
    }
}
