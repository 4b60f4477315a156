#![allow(dead_code)]

use std::path::PathBuf;

use kindmc::frontend::{generate_benchmark, parse_file, BenchmarkSpec};
use kindmc::ir::{Expr, Op, Property, Sort, TransitionSystem, VarDecl};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_STATE_BITS: u32 = 12;
pub const MAX_INPUT_BITS: u32 = 4;

pub fn systems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("systems")
}

/// The `.kts` files shipped with the crate, by file stem.
pub fn shipped_systems() -> Vec<(String, TransitionSystem)> {
    let mut paths: Vec<_> = std::fs::read_dir(systems_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "kts"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, parse_file(&p).unwrap())
        })
        .collect()
}

/// Every benchmark the suites use, plus a few smaller sizes.
pub fn generated_benchmarks() -> Vec<(String, TransitionSystem)> {
    let mut specs: Vec<BenchmarkSpec> = (3..=12).map(BenchmarkSpec::chain_bug).collect();
    specs.extend([20].map(BenchmarkSpec::chain_bug));
    specs.extend([3, 5, 9, 25].map(BenchmarkSpec::diamond_parity));
    specs.extend([4, 8, 16].map(BenchmarkSpec::const_check));
    for d in [2, 4, 8] {
        specs.push(BenchmarkSpec::accumulator(d, false));
        specs.push(BenchmarkSpec::accumulator(d, true));
    }
    specs
        .into_iter()
        .map(|s| (s.name(), generate_benchmark(&s).unwrap()))
        .collect()
}

struct Scope {
    states: Vec<(String, Sort)>,
    inputs: Vec<(String, Sort)>,
}

impl Scope {
    fn leaves(&self, sort: Sort, inputs: bool) -> Vec<Expr> {
        let mut out: Vec<Expr> = self
            .states
            .iter()
            .filter(|(_, s)| *s == sort)
            .map(|(n, _)| Expr::var(n.as_str()))
            .collect();
        if inputs {
            out.extend(
                self.inputs
                    .iter()
                    .filter(|(_, s)| *s == sort)
                    .map(|(n, _)| Expr::var(n.as_str())),
            );
        }
        out
    }
}

fn constant(rng: &mut ChaCha8Rng, sort: Sort) -> Expr {
    match sort {
        Sort::Bool => Expr::bool(rng.gen()),
        Sort::BitVec(w) => Expr::bv(w, rng.gen_range(0..=sort.max_raw())),
    }
}

fn leaf(rng: &mut ChaCha8Rng, scope: &Scope, sort: Sort, inputs: bool) -> Expr {
    let leaves = scope.leaves(sort, inputs);
    if leaves.is_empty() || rng.gen_bool(0.25) {
        constant(rng, sort)
    } else {
        leaves.choose(rng).unwrap().clone()
    }
}

fn bv_width(rng: &mut ChaCha8Rng, scope: &Scope) -> u8 {
    let widths: Vec<u8> = scope
        .states
        .iter()
        .filter_map(|(_, s)| match s {
            Sort::BitVec(w) => Some(*w),
            Sort::Bool => None,
        })
        .collect();
    widths.choose(rng).copied().unwrap_or_else(|| rng.gen_range(1..=3))
}

fn term(rng: &mut ChaCha8Rng, scope: &Scope, sort: Sort, depth: u32, inputs: bool) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, scope, sort, inputs);
    }
    let d = depth - 1;
    match sort {
        Sort::Bool => match rng.gen_range(0..5) {
            0 => Expr::not(term(rng, scope, Sort::Bool, d, inputs)),
            1 => Expr::app(
                *[Op::And, Op::Or, Op::Iff].choose(rng).unwrap(),
                vec![term(rng, scope, sort, d, inputs), term(rng, scope, sort, d, inputs)],
            ),
            2 => Expr::ite(
                term(rng, scope, Sort::Bool, d, inputs),
                term(rng, scope, sort, d, inputs),
                term(rng, scope, sort, d, inputs),
            ),
            _ => {
                let s = Sort::BitVec(bv_width(rng, scope));
                let op = *[Op::Eq, Op::BvUle, Op::BvUlt, Op::BvUge, Op::BvUgt]
                    .choose(rng)
                    .unwrap();
                Expr::binary(op, term(rng, scope, s, d, inputs), term(rng, scope, s, d, inputs))
            }
        },
        Sort::BitVec(_) => match rng.gen_range(0..4) {
            0 => Expr::app(Op::BvNot, vec![term(rng, scope, sort, d, inputs)]),
            1 => Expr::ite(
                term(rng, scope, Sort::Bool, d, inputs),
                term(rng, scope, sort, d, inputs),
                term(rng, scope, sort, d, inputs),
            ),
            _ => {
                let op = *[Op::BvAdd, Op::BvSub, Op::BvMul, Op::BvAnd, Op::BvOr, Op::BvXor]
                    .choose(rng)
                    .unwrap();
                Expr::binary(op, term(rng, scope, sort, d, inputs), term(rng, scope, sort, d, inputs))
            }
        },
    }
}

fn sort(rng: &mut ChaCha8Rng, max_width: u8) -> Sort {
    if rng.gen_bool(0.3) {
        Sort::Bool
    } else {
        Sort::BitVec(rng.gen_range(1..=max_width))
    }
}

/// A random well-sorted system with at most 12 state bits and 4 input bits.
///
/// Initial states are a single point or a small box, the transition mixes
/// deterministic updates, input-driven updates and unconstrained next
/// values, and properties are simple tests on state variables, so a good
/// share of instances is unsafe within a few steps.
pub fn random_system(seed: u64) -> TransitionSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars = Vec::new();
    let mut scope = Scope {
        states: Vec::new(),
        inputs: Vec::new(),
    };
    let mut bits = 0;
    for i in 0..rng.gen_range(1..=3) {
        let s = sort(&mut rng, 4);
        if bits + s.bits() > MAX_STATE_BITS {
            break;
        }
        bits += s.bits();
        let name = format!("s{i}");
        vars.push(VarDecl::state(&name, s));
        scope.states.push((name, s));
    }
    let mut ibits = 0;
    for i in 0..rng.gen_range(0..=2) {
        let s = sort(&mut rng, 2);
        if ibits + s.bits() > MAX_INPUT_BITS {
            break;
        }
        ibits += s.bits();
        let name = format!("u{i}");
        vars.push(VarDecl::input(&name, s));
        scope.inputs.push((name, s));
    }

    let init = Expr::conj(scope.states.iter().map(|(n, s)| {
        let v = Expr::var(n.as_str());
        match (*s, rng.gen_range(0..4)) {
            (Sort::BitVec(w), 0) => Expr::binary(Op::BvUle, v, Expr::bv(w, rng.gen_range(0..=s.max_raw()))),
            (_, 1) => Expr::bool(true),
            _ => Expr::eq(v, constant(&mut rng, *s)),
        }
    }));
    let trans = Expr::conj(scope.states.iter().map(|(n, s)| {
        let next = Expr::next(n.as_str());
        match rng.gen_range(0..8) {
            0 => Expr::bool(true),
            1 => Expr::eq(next, Expr::var(n.as_str())),
            2 if matches!(s, Sort::BitVec(_)) => {
                let Sort::BitVec(w) = *s else { unreachable!() };
                let cur = Expr::var(n.as_str());
                let guard = term(&mut rng, &scope, Sort::Bool, 1, true);
                Expr::eq(
                    next,
                    Expr::ite(guard, Expr::binary(Op::BvAdd, cur.clone(), Expr::bv(w, 1)), cur),
                )
            }
            _ => Expr::eq(next, term(&mut rng, &scope, *s, 2, true)),
        }
    }));
    let props: Vec<Property> = (0..rng.gen_range(1..=2))
        .map(|i| {
            let (n, s) = scope.states.choose(&mut rng).unwrap().clone();
            let v = Expr::var(n.as_str());
            let expr = match (s, rng.gen_range(0..3)) {
                (Sort::BitVec(w), 0) => Expr::binary(Op::BvUle, v, Expr::bv(w, rng.gen_range(0..=s.max_raw()))),
                (_, 1) => term(&mut rng, &scope, Sort::Bool, 2, false),
                _ => Expr::not(Expr::eq(v, constant(&mut rng, s))),
            };
            Property {
                name: format!("p{i}").into(),
                expr,
            }
        })
        .collect();
    // Forward-condition proofs assume halting states are sinks, so a
    // non-trivial halt predicate freezes the state once it holds.
    let (halt, trans) = if rng.gen_bool(0.2) {
        let halt = term(&mut rng, &scope, Sort::Bool, 1, false);
        let stutter = Expr::conj(
            scope
                .states
                .iter()
                .map(|(n, _)| Expr::eq(Expr::next(n.as_str()), Expr::var(n.as_str()))),
        );
        (halt.clone(), Expr::ite(halt, stutter, trans))
    } else {
        (Expr::bool(false), trans)
    };
    TransitionSystem::new(vars, init, trans, props, halt).expect("generator builds well-sorted systems")
}

/// Counter families whose every inductive counterexample starts in an
/// unreachable state. Parameters vary width, start value and the guarded
/// region so that no two instances are the same system.
pub fn spurious_systems() -> Vec<(String, TransitionSystem)> {
    let mut out = Vec::new();
    // x is constant; the bad value differs from the start value.
    for (w, start, bad) in [
        (2, 0, 3),
        (3, 0, 1),
        (3, 2, 5),
        (4, 7, 8),
        (5, 0, 31),
        (6, 12, 13),
        (8, 0, 200),
    ] {
        out.push((
            format!("frozen_w{w}_{start}_{bad}"),
            TransitionSystem::new(
                vec![VarDecl::state("x", Sort::BitVec(w))],
                Expr::eq(Expr::var("x"), Expr::bv(w, start)),
                Expr::eq(Expr::next("x"), Expr::var("x")),
                vec![Property {
                    name: "not_bad".into(),
                    expr: Expr::not(Expr::eq(Expr::var("x"), Expr::bv(w, bad))),
                }],
                Expr::bool(false),
            )
            .unwrap(),
        ));
    }
    // x steps by two from an even start, so odd values are unreachable.
    for (w, start, step) in [(3, 0, 2), (4, 2, 2), (4, 0, 6), (5, 4, 2), (6, 0, 10), (7, 8, 14)] {
        let x = || Expr::var("x");
        out.push((
            format!("even_w{w}_{start}_{step}"),
            TransitionSystem::new(
                vec![VarDecl::state("x", Sort::BitVec(w))],
                Expr::eq(x(), Expr::bv(w, start)),
                Expr::eq(Expr::next("x"), Expr::binary(Op::BvAdd, x(), Expr::bv(w, step))),
                vec![Property {
                    name: "even".into(),
                    expr: Expr::eq(Expr::binary(Op::BvAnd, x(), Expr::bv(w, 1)), Expr::bv(w, 0)),
                }],
                Expr::bool(false),
            )
            .unwrap(),
        ));
    }
    // x cycles below m; values at or above m are unreachable fixpoints.
    for (w, m, bad) in [(3, 4, 6), (4, 5, 9), (4, 10, 15), (5, 7, 20), (5, 16, 17), (6, 3, 40)] {
        let x = || Expr::var("x");
        let below = Expr::binary(Op::BvUlt, x(), Expr::bv(w, m));
        let wrap = Expr::ite(
            Expr::eq(x(), Expr::bv(w, m - 1)),
            Expr::bv(w, 0),
            Expr::binary(Op::BvAdd, x(), Expr::bv(w, 1)),
        );
        out.push((
            format!("cycle_w{w}_{m}_{bad}"),
            TransitionSystem::new(
                vec![VarDecl::state("x", Sort::BitVec(w))],
                Expr::eq(x(), Expr::bv(w, 0)),
                Expr::eq(Expr::next("x"), Expr::ite(below, wrap, x())),
                vec![Property {
                    name: "not_bad".into(),
                    expr: Expr::not(Expr::eq(x(), Expr::bv(w, bad))),
                }],
                Expr::bool(false),
            )
            .unwrap(),
        ));
    }
    // A frozen flag guards a free-running counter: the bad state needs the
    // flag set, which never happens.
    for (w, bad) in [(2, 1), (3, 6), (4, 9)] {
        let y = || Expr::var("y");
        out.push((
            format!("flagged_w{w}_{bad}"),
            TransitionSystem::new(
                vec![
                    VarDecl::state("f", Sort::Bool),
                    VarDecl::state("y", Sort::BitVec(w)),
                    VarDecl::input("u", Sort::Bool),
                ],
                Expr::conj([Expr::not(Expr::var("f")), Expr::eq(y(), Expr::bv(w, 0))]),
                Expr::conj([
                    Expr::eq(Expr::next("f"), Expr::var("f")),
                    Expr::eq(
                        Expr::next("y"),
                        Expr::ite(Expr::var("u"), Expr::binary(Op::BvAdd, y(), Expr::bv(w, 1)), y()),
                    ),
                ]),
                vec![Property {
                    name: "guarded".into(),
                    expr: Expr::implies(Expr::var("f"), Expr::not(Expr::eq(y(), Expr::bv(w, bad)))),
                }],
                Expr::bool(false),
            )
            .unwrap(),
        ));
    }
    out
}
