mod common;

use kindmc::frontend::{parse, print_system};
use kindmc::ir::{states_equal, State, Value};
use proptest::prelude::*;

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<bool>().prop_map(Value::Bool),
        (1u8..=4, any::<u64>()).prop_map(|(w, b)| Value::bv(w, b)),
    ]
}

/// States over a fixed set of names, drawn from a small value pool so that
/// equal pairs come up often.
fn state() -> impl Strategy<Value = State> {
    prop::collection::vec(
        prop::sample::select(vec![Value::Bool(false), Value::bv(2, 1), Value::bv(2, 2)]),
        2,
    )
    .prop_map(|vals| {
        vals.into_iter()
            .enumerate()
            .map(|(i, v)| (format!("v{i}"), v))
            .collect()
    })
}

proptest! {
    #[test]
    fn states_equal_is_reflexive(s in state()) {
        prop_assert!(states_equal(&s, &s).unwrap());
    }

    #[test]
    fn states_equal_is_symmetric(a in state(), b in state()) {
        prop_assert_eq!(states_equal(&a, &b).unwrap(), states_equal(&b, &a).unwrap());
    }

    #[test]
    fn states_equal_is_transitive(a in state(), b in state(), c in state()) {
        if states_equal(&a, &b).unwrap() && states_equal(&b, &c).unwrap() {
            prop_assert!(states_equal(&a, &c).unwrap());
        }
    }

    #[test]
    fn bit_vectors_are_masked(v in value()) {
        prop_assert!(v.fits(v.sort()));
    }

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let sys = common::random_system(seed);
        let text = print_system(&sys);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &sys);
        prop_assert_eq!(print_system(&back), text);
    }
}

#[test]
fn differing_names_are_an_error_not_inequality() {
    let a: State = [("x", Value::Bool(true))].into_iter().collect();
    let b: State = [("y", Value::Bool(true))].into_iter().collect();
    assert!(states_equal(&a, &b).is_err());
}
