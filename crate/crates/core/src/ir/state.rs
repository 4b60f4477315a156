use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use super::sort::Value;
use super::system::TransitionSystem;
use super::IrError;

/// Concrete binding of variable names to values, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Valuation(IndexMap<String, Value>);

/// Valuation of the state variables of a system.
pub type State = Valuation;

impl Valuation {
    pub fn new() -> Self {
        Valuation(IndexMap::new())
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.0.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(|k| k.as_str())
    }
}

impl FromIterator<(String, Value)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<(&'a str, Value)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (&'a str, Value)>>(iter: I) -> Self {
        Valuation(iter.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// State identity: same state variables bound to the same values.
///
/// Both states must bind the same variable set.
pub fn states_equal(a: &State, b: &State) -> Result<bool, IrError> {
    if a.len() != b.len() || a.names().any(|n| b.get(n).is_none()) {
        return Err(IrError::Internal(format!(
            "comparing states over different variables: {a} vs {b}"
        )));
    }
    Ok(a.iter().all(|(n, v)| b.get(n) == Some(v)))
}

/// Finite path through a system: states plus the inputs chosen between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub states: Vec<State>,
    pub inputs: Vec<Valuation>,
    pub violated_prop: Option<String>,
}

impl Trace {
    pub fn new(states: Vec<State>, inputs: Vec<Valuation>, violated_prop: Option<String>) -> Self {
        Trace {
            states,
            inputs,
            violated_prop,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> Option<&State> {
        self.states.first()
    }

    pub fn last(&self) -> Option<&State> {
        self.states.last()
    }

    /// Renders the trace one state per line, with inputs interleaved.
    pub fn render(&self, sys: &TransitionSystem) -> String {
        let mut out = String::new();
        let has_inputs = sys.input_vars().next().is_some();
        for (i, s) in self.states.iter().enumerate() {
            out.push_str(&format!("  [{i}] {s}\n"));
            if has_inputs {
                if let Some(inp) = self.inputs.get(i) {
                    out.push_str(&format!("       input {inp}\n"));
                }
            }
        }
        if let Some(p) = &self.violated_prop {
            out.push_str(&format!("  violates {p}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(pairs: &[(&str, Value)]) -> State {
        pairs.iter().map(|(k, v)| (*k, *v)).collect()
    }

    #[test]
    fn equality_examples() {
        let a = st(&[("x", Value::bv(3, 5))]);
        let b = st(&[("x", Value::bv(3, 4))]);
        assert!(states_equal(&a, &a).unwrap());
        assert!(!states_equal(&a, &b).unwrap());
        let c = st(&[("x", Value::bv(3, 5)), ("b", Value::Bool(true))]);
        let d = st(&[("x", Value::bv(3, 5)), ("b", Value::Bool(false))]);
        assert!(!states_equal(&c, &d).unwrap());
    }

    #[test]
    fn equality_ignores_binding_order() {
        let a = st(&[("x", Value::bv(3, 5)), ("b", Value::Bool(true))]);
        let b = st(&[("b", Value::Bool(true)), ("x", Value::bv(3, 5))]);
        assert!(states_equal(&a, &b).unwrap());
    }

    #[test]
    fn differing_variable_sets_are_an_error() {
        let a = st(&[("x", Value::bv(3, 5))]);
        let b = st(&[("y", Value::bv(3, 5))]);
        assert!(states_equal(&a, &b).is_err());
    }
}
