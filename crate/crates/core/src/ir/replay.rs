use std::fmt;

use super::eval::{eval_bool, StepEnv};
use super::state::{State, Trace, Valuation};
use super::system::{Role, TransitionSystem};

/// Which obligation a trace failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplayClause {
    Structure,
    Init,
    Trans,
    Property,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayVerdict {
    Valid,
    Invalid {
        /// State index (for `Trans`, the source state of the failing step).
        index: usize,
        clause: ReplayClause,
        reason: String,
    },
}

impl ReplayVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ReplayVerdict::Valid)
    }
}

impl fmt::Display for ReplayVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayVerdict::Valid => f.write_str("valid"),
            ReplayVerdict::Invalid { index, clause, reason } => write!(f, "invalid at {index} ({clause:?}): {reason}"),
        }
    }
}

/// Replays a trace from the initial states: init at the first state, every
/// step through `trans`, and the recorded property violated at the end.
pub fn replay_trace(sys: &TransitionSystem, t: &Trace) -> ReplayVerdict {
    replay(sys, t, true)
}

/// Like [`replay_trace`] but without the init obligation; used for the
/// backward paths produced by the inductive step.
pub fn replay_path(sys: &TransitionSystem, t: &Trace) -> ReplayVerdict {
    replay(sys, t, false)
}

fn invalid(index: usize, clause: ReplayClause, reason: impl Into<String>) -> ReplayVerdict {
    ReplayVerdict::Invalid {
        index,
        clause,
        reason: reason.into(),
    }
}

fn check_bindings(sys: &TransitionSystem, v: &Valuation, role: Role) -> Result<(), String> {
    let decls: Vec<_> = sys.vars().iter().filter(|d| d.role == role).collect();
    if v.len() != decls.len() {
        return Err(format!("expected {} bindings, found {}", decls.len(), v.len()));
    }
    for d in decls {
        match v.get(&d.name) {
            Some(val) if val.fits(d.sort) => {}
            Some(val) => return Err(format!("{} = {val} does not fit {}", d.name, d.sort)),
            None => return Err(format!("{} is unbound", d.name)),
        }
    }
    Ok(())
}

fn replay(sys: &TransitionSystem, t: &Trace, check_init: bool) -> ReplayVerdict {
    if t.states.is_empty() {
        return invalid(0, ReplayClause::Structure, "empty trace");
    }
    if t.inputs.len() + 1 != t.states.len() {
        return invalid(
            0,
            ReplayClause::Structure,
            format!(
                "{} states need {} input steps, found {}",
                t.states.len(),
                t.states.len() - 1,
                t.inputs.len()
            ),
        );
    }
    for (i, s) in t.states.iter().enumerate() {
        if let Err(e) = check_bindings(sys, s, Role::StateVar) {
            return invalid(i, ReplayClause::Structure, e);
        }
    }
    for (i, inp) in t.inputs.iter().enumerate() {
        if let Err(e) = check_bindings(sys, inp, Role::InputVar) {
            return invalid(i, ReplayClause::Structure, e);
        }
    }
    let no_inputs = Valuation::new();
    fn env<'a>(s: &'a State, no_inputs: &'a Valuation) -> StepEnv<'a> {
        StepEnv {
            state: s,
            inputs: no_inputs,
            next: None,
        }
    }
    if check_init {
        match eval_bool(sys.init(), &env(&t.states[0], &no_inputs)) {
            Ok(true) => {}
            Ok(false) => return invalid(0, ReplayClause::Init, "init does not hold"),
            Err(e) => return invalid(0, ReplayClause::Init, e.to_string()),
        }
    }
    for j in 0..t.inputs.len() {
        let step = StepEnv {
            state: &t.states[j],
            inputs: &t.inputs[j],
            next: Some(&t.states[j + 1]),
        };
        match eval_bool(sys.trans(), &step) {
            Ok(true) => {}
            Ok(false) => return invalid(j, ReplayClause::Trans, "transition does not hold"),
            Err(e) => return invalid(j, ReplayClause::Trans, e.to_string()),
        }
    }
    if let Some(name) = &t.violated_prop {
        let last = t.states.len() - 1;
        let Some(prop) = sys.props().iter().find(|p| &*p.name == name.as_str()) else {
            return invalid(last, ReplayClause::Property, format!("unknown property {name}"));
        };
        match eval_bool(&prop.expr, &env(&t.states[last], &no_inputs)) {
            Ok(false) => {}
            Ok(true) => return invalid(last, ReplayClause::Property, format!("{name} holds at the final state")),
            Err(e) => return invalid(last, ReplayClause::Property, e.to_string()),
        }
    }
    ReplayVerdict::Valid
}

/// Name of the first property (in declaration order) false at `s`.
pub fn first_violated(sys: &TransitionSystem, s: &State) -> Option<String> {
    let no_inputs = Valuation::new();
    let env = StepEnv {
        state: s,
        inputs: &no_inputs,
        next: None,
    };
    sys.props()
        .iter()
        .find(|p| matches!(eval_bool(&p.expr, &env), Ok(false)))
        .map(|p| p.name.to_string())
}
