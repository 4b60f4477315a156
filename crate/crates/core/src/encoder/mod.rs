//! Unrolling of a transition system into timed formulas.
//!
//! State variable `x` at step `i` becomes `x@i`; an input `u` read on the
//! transition from step `i` to `i + 1` becomes `u@i`. Steps are 1-based.
//!
//! | query | assertion |
//! |-------|-----------|
//! | base case `B(k)` | `I(s1) ∧ ∨_{i≤k} [path_i ∧ ¬φ(s_i)]` |
//! | forward condition `F(k)` | `I(s1) ∧ path_k ∧ ¬ψ(s_k)` |
//! | inductive step `I(k)` | `path_k ∧ ∧_{i<k} φ(s_i) ∧ ¬φ(s_k)` |
//! | extended base case `B'(k)` | `I(s1) ∧ ∨_{i≤k} [path_i ∧ (¬φ(s_i) ∨ ∨_t s_i = t)]` |
//!
//! where `path_i = ∧_{j<i} T(s_j, s_{j+1})` and `φ` is the conjunction of
//! all properties. Each disjunct of the base cases is named by a boolean
//! selector (see [`MarkerTag`]) so a single model tells which depth fired.

mod query;
mod smtlib;

use crate::engine::Target;
use crate::ir::{Expr, ExprKind, Role, TransitionSystem};

pub use query::{timed_name, Marker, MarkerTag, Query, QueryKind, TimedVar};
pub use smtlib::{expr_to_smtlib, serialize_smtlib};

/// Instantiates `e` at `step`: current-state and input variables map to
/// `step`, `next` references to `step + 1`.
pub fn at_step(e: &Expr, step: u32) -> Expr {
    e.map_leaves(&mut |leaf| match leaf {
        ExprKind::Var(n) => Some(Expr::var(timed_name(n, step))),
        ExprKind::Next(n) => Some(Expr::var(timed_name(n, step + 1))),
        _ => None,
    })
}

/// Cached per-step instances of the system formulas for one unrolling depth.
struct Unrolling<'a> {
    sys: &'a TransitionSystem,
    k: u32,
    /// `paths[i]` is the conjunction of the first `i` transitions.
    paths: Vec<Expr>,
}

impl<'a> Unrolling<'a> {
    fn new(sys: &'a TransitionSystem, k: u32) -> Self {
        assert!(k >= 1, "unrolling depth starts at 1");
        let mut paths = vec![Expr::bool(true)];
        for j in 1..k {
            let t = at_step(sys.trans(), j);
            let next = if j == 1 {
                t
            } else {
                Expr::conj([paths[j as usize - 1].clone(), t])
            };
            paths.push(next);
        }
        Unrolling { sys, k, paths }
    }

    /// Transitions `s_1 → … → s_i`.
    fn path(&self, i: u32) -> Expr {
        self.paths[i as usize - 1].clone()
    }

    fn with_path(&self, i: u32, tail: Expr) -> Expr {
        if i == 1 {
            tail
        } else {
            Expr::conj([self.path(i), tail])
        }
    }

    fn decls(&self) -> Vec<TimedVar> {
        let mut out = Vec::new();
        for step in 1..=self.k {
            for v in self.sys.state_vars() {
                out.push(TimedVar {
                    base: v.name.clone(),
                    step,
                    sort: v.sort,
                    role: Role::StateVar,
                });
            }
            if step < self.k {
                for v in self.sys.input_vars() {
                    out.push(TimedVar {
                        base: v.name.clone(),
                        step,
                        sort: v.sort,
                        role: Role::InputVar,
                    });
                }
            }
        }
        out
    }

    fn init(&self) -> Expr {
        at_step(self.sys.init(), 1)
    }

    fn prop_holds(&self, i: u32) -> Expr {
        Expr::conj(self.sys.props().iter().map(|p| at_step(&p.expr, i)))
    }

    fn prop_fails(&self, i: u32) -> Expr {
        Expr::disj(self.sys.props().iter().map(|p| Expr::not(at_step(&p.expr, i))))
    }

    fn matches(&self, i: u32, target: &Target) -> Expr {
        Expr::conj(self.sys.state_vars().map(|v| {
            let value = target
                .first_state
                .get(&v.name)
                .expect("targets bind every state variable");
            Expr::eq(Expr::var(timed_name(&v.name, i)), Expr::constant(value))
        }))
    }

    fn marker(&self, tag: MarkerTag, body: Expr) -> Marker {
        Marker {
            name: tag.selector_name(),
            tag,
            def: self.with_path(tag.depth(), body),
        }
    }

    fn selected(&self, kind: QueryKind, markers: Vec<Marker>) -> Query {
        let any = Expr::disj(markers.iter().map(|m| Expr::var(m.name.as_str())));
        Query {
            kind,
            k: self.k,
            decls: self.decls(),
            assertion: Expr::conj([self.init(), any]),
            markers,
        }
    }
}

/// `B(k)`: a counterexample of at most `k` states exists.
pub fn encode_base_case(sys: &TransitionSystem, k: u32) -> Query {
    let u = Unrolling::new(sys, k);
    let markers = (1..=k)
        .map(|depth| u.marker(MarkerTag::Violation { depth }, u.prop_fails(depth)))
        .collect();
    u.selected(QueryKind::BaseCase, markers)
}

/// `F(k)`: some execution of `k` states has not reached a halt state.
pub fn encode_forward_condition(sys: &TransitionSystem, k: u32) -> Query {
    let u = Unrolling::new(sys, k);
    let not_halted = Expr::not(at_step(sys.halt(), k));
    Query {
        kind: QueryKind::ForwardCondition,
        k,
        decls: u.decls(),
        markers: Vec::new(),
        assertion: Expr::conj([u.init(), u.with_path(k, not_halted)]),
    }
}

/// `I(k)`: a path of `k` states, with the properties holding on all but the
/// last. No initial-state constraint. `I(1)` is just `¬φ(s_1)`.
pub fn encode_inductive_step(sys: &TransitionSystem, k: u32) -> Query {
    let u = Unrolling::new(sys, k);
    let mut parts = Vec::new();
    if k > 1 {
        parts.push(u.path(k));
    }
    parts.extend((1..k).map(|i| u.prop_holds(i)));
    parts.push(u.prop_fails(k));
    Query {
        kind: QueryKind::InductiveStep,
        k,
        decls: u.decls(),
        markers: Vec::new(),
        assertion: Expr::conj(parts),
    }
}

/// `B'(k)`: like `B(k)` but a path reaching any target state also counts.
pub fn encode_extended_base_case(sys: &TransitionSystem, k: u32, targets: &[Target]) -> Query {
    extended(sys, k, targets, true)
}

/// `B'(k)` restricted to the target-match disjuncts of `targets`.
pub fn encode_target_reach(sys: &TransitionSystem, k: u32, targets: &[Target]) -> Query {
    extended(sys, k, targets, false)
}

fn extended(sys: &TransitionSystem, k: u32, targets: &[Target], violations: bool) -> Query {
    let u = Unrolling::new(sys, k);
    let mut markers = Vec::new();
    for depth in 1..=k {
        if violations {
            markers.push(u.marker(MarkerTag::Violation { depth }, u.prop_fails(depth)));
        }
        for t in targets {
            let tag = MarkerTag::TargetMatch { depth, target: t.id };
            markers.push(u.marker(tag, u.matches(depth, t)));
        }
    }
    u.selected(QueryKind::ExtendedBaseCase, markers)
}

/// Two-step query satisfiable iff some halt state has a non-halt successor.
pub fn encode_halt_sink_check(sys: &TransitionSystem) -> Query {
    let u = Unrolling::new(sys, 2);
    Query {
        kind: QueryKind::ForwardCondition,
        k: 2,
        decls: u.decls(),
        markers: Vec::new(),
        assertion: Expr::conj([at_step(sys.halt(), 1), u.path(2), Expr::not(at_step(sys.halt(), 2))]),
    }
}
