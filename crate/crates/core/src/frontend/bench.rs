//! Parameterised benchmark families with a known counterexample depth.
//!
//! | family            | shortest counterexample (states) |
//! |-------------------|----------------------------------|
//! | `chain_bug(d)`     | `d + 1`                          |
//! | `diamond_parity(d)`| `d + 1`                          |
//! | `const_check(d)`   | `d + 2`                          |
//! | `accumulator(d)` buggy | `d + 2`                      |
//! | `accumulator(d)` safe  | none                         |

use std::fmt;

use thiserror::Error;

use crate::ir::{Expr, Op, Property, Sort, TransitionSystem, VarDecl};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Deterministic counter from 0 whose property forbids the value `d`.
    ChainBug,
    /// Loop of `d` iterations adding 1 or 2 to a counter, nondeterministically;
    /// asserts the counter is even on exit.
    DiamondParity,
    /// A constant carried through a `d`-iteration loop, checked against the
    /// wrong value after the loop.
    ConstCheck,
    /// Running sum `sn += 2` over a loop with a nondeterministic bound `n`;
    /// the buggy variant stops adding once `i` reaches `d`.
    Accumulator { buggy: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BenchmarkSpec {
    pub family: Family,
    pub depth: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchmarkError {
    #[error("depth must be positive")]
    ZeroDepth,
    #[error("depth {0} needs more than 64 bits")]
    Overflow(u64),
}

impl BenchmarkSpec {
    pub fn chain_bug(depth: u64) -> Self {
        BenchmarkSpec {
            family: Family::ChainBug,
            depth,
        }
    }

    pub fn diamond_parity(depth: u64) -> Self {
        BenchmarkSpec {
            family: Family::DiamondParity,
            depth,
        }
    }

    pub fn const_check(depth: u64) -> Self {
        BenchmarkSpec {
            family: Family::ConstCheck,
            depth,
        }
    }

    pub fn accumulator(depth: u64, buggy: bool) -> Self {
        BenchmarkSpec {
            family: Family::Accumulator { buggy },
            depth,
        }
    }

    pub fn name(&self) -> String {
        let d = self.depth;
        match self.family {
            Family::ChainBug => format!("chain_bug_{d}"),
            Family::DiamondParity => format!("diamond_parity_{d}"),
            Family::ConstCheck => format!("const_check_{d}"),
            Family::Accumulator { buggy: true } => format!("accumulator_buggy_{d}"),
            Family::Accumulator { buggy: false } => format!("accumulator_safe_{d}"),
        }
    }

    /// Documented length (in states) of the shortest counterexample, or
    /// `None` for safe instances.
    pub fn expected_shortest_cex(&self) -> Option<u64> {
        match self.family {
            Family::ChainBug | Family::DiamondParity => Some(self.depth + 1),
            Family::ConstCheck | Family::Accumulator { buggy: true } => Some(self.depth + 2),
            Family::Accumulator { buggy: false } => None,
        }
    }
}

impl fmt::Display for BenchmarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Bits needed to represent `n` (at least one).
fn bits_for(n: u64) -> u32 {
    (64 - n.leading_zeros()).max(1)
}

fn width(bits: u32, depth: u64) -> Result<u8, BenchmarkError> {
    if bits > 64 {
        Err(BenchmarkError::Overflow(depth))
    } else {
        Ok(bits as u8)
    }
}

fn v(name: &str) -> Expr {
    Expr::var(name)
}

fn n(name: &str) -> Expr {
    Expr::next(name)
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::binary(Op::BvAdd, a, b)
}

fn ult(a: Expr, b: Expr) -> Expr {
    Expr::binary(Op::BvUlt, a, b)
}

fn prop(name: &str, expr: Expr) -> Property {
    Property {
        name: name.into(),
        expr,
    }
}

pub fn generate_benchmark(spec: &BenchmarkSpec) -> Result<TransitionSystem, BenchmarkError> {
    let d = spec.depth;
    if d == 0 {
        return Err(BenchmarkError::ZeroDepth);
    }
    let d1 = || d.checked_add(1).ok_or(BenchmarkError::Overflow(d));
    let sys = match spec.family {
        Family::ChainBug => {
            let w = width(bits_for(d), d)?;
            TransitionSystem::new(
                vec![VarDecl::state("x", Sort::BitVec(w))],
                Expr::eq(v("x"), Expr::bv(w, 0)),
                Expr::eq(n("x"), add(v("x"), Expr::bv(w, 1))),
                vec![prop("never_d", Expr::not(Expr::eq(v("x"), Expr::bv(w, d))))],
                Expr::bool(false),
            )
        }
        Family::DiamondParity => {
            let w = width(bits_for(d), d)?;
            let running = ult(v("i"), Expr::bv(w, d));
            let step = Expr::ite(v("b"), Expr::bv(2, 2), Expr::bv(2, 1));
            TransitionSystem::new(
                vec![
                    VarDecl::state("i", Sort::BitVec(w)),
                    VarDecl::state("x", Sort::BitVec(2)),
                    VarDecl::input("b", Sort::Bool),
                ],
                Expr::conj([Expr::eq(v("i"), Expr::bv(w, 0)), Expr::eq(v("x"), Expr::bv(2, 0))]),
                Expr::conj([
                    Expr::eq(n("i"), Expr::ite(running.clone(), add(v("i"), Expr::bv(w, 1)), v("i"))),
                    Expr::eq(n("x"), Expr::ite(running, add(v("x"), step), v("x"))),
                ]),
                vec![prop(
                    "even_on_exit",
                    Expr::implies(
                        Expr::eq(v("i"), Expr::bv(w, d)),
                        Expr::eq(Expr::binary(Op::BvAnd, v("x"), Expr::bv(2, 1)), Expr::bv(2, 0)),
                    ),
                )],
                Expr::eq(v("i"), Expr::bv(w, d)),
            )
        }
        Family::ConstCheck => {
            let d1 = d1()?;
            let w = width(bits_for(d1), d)?;
            TransitionSystem::new(
                vec![VarDecl::state("i", Sort::BitVec(w)), VarDecl::state("c", Sort::Bool)],
                Expr::conj([Expr::eq(v("i"), Expr::bv(w, 0)), Expr::not(v("c"))]),
                Expr::conj([
                    Expr::eq(
                        n("i"),
                        Expr::ite(
                            Expr::binary(Op::BvUle, v("i"), Expr::bv(w, d)),
                            add(v("i"), Expr::bv(w, 1)),
                            v("i"),
                        ),
                    ),
                    Expr::eq(n("c"), v("c")),
                ]),
                vec![prop(
                    "const_after_loop",
                    Expr::implies(Expr::eq(v("i"), Expr::bv(w, d1)), v("c")),
                )],
                Expr::eq(v("i"), Expr::bv(w, d1)),
            )
        }
        Family::Accumulator { buggy } => {
            let d1 = d1()?;
            let w = width(bits_for(d1) + 1, d)?;
            let inc = if buggy {
                Expr::ite(ult(v("i"), Expr::bv(w, d)), Expr::bv(w, 2), Expr::bv(w, 0))
            } else {
                Expr::bv(w, 2)
            };
            let looping = ult(v("i"), v("n"));
            TransitionSystem::new(
                vec![
                    VarDecl::state("i", Sort::BitVec(w)),
                    VarDecl::state("sn", Sort::BitVec(w)),
                    VarDecl::state("n", Sort::BitVec(w)),
                ],
                Expr::conj([
                    Expr::eq(v("i"), Expr::bv(w, 0)),
                    Expr::eq(v("sn"), Expr::bv(w, 0)),
                    Expr::binary(Op::BvUle, v("n"), Expr::bv(w, d1)),
                ]),
                Expr::conj([
                    Expr::eq(n("n"), v("n")),
                    Expr::ite(
                        looping.clone(),
                        Expr::conj([
                            Expr::eq(n("i"), add(v("i"), Expr::bv(w, 1))),
                            Expr::eq(n("sn"), add(v("sn"), inc)),
                        ]),
                        Expr::conj([Expr::eq(n("i"), v("i")), Expr::eq(n("sn"), v("sn"))]),
                    ),
                ]),
                vec![prop("sum_matches", Expr::eq(v("sn"), add(v("i"), v("i"))))],
                Expr::not(looping),
            )
        }
    };
    Ok(sys.expect("generated benchmarks are well-formed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_follow_depth() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(5)).unwrap();
        assert_eq!(sys.state_bits(), 3);
        let sys = generate_benchmark(&BenchmarkSpec::const_check(64)).unwrap();
        assert_eq!(sys.decl("i").unwrap().sort, Sort::BitVec(7));
        let sys = generate_benchmark(&BenchmarkSpec::accumulator(4, false)).unwrap();
        assert_eq!(sys.decl("sn").unwrap().sort, Sort::BitVec(4));
    }

    #[test]
    fn rejects_zero_and_overflowing_depths() {
        assert_eq!(
            generate_benchmark(&BenchmarkSpec::chain_bug(0)),
            Err(BenchmarkError::ZeroDepth)
        );
        assert!(matches!(
            generate_benchmark(&BenchmarkSpec::const_check(u64::MAX)),
            Err(BenchmarkError::Overflow(_))
        ));
        assert!(matches!(
            generate_benchmark(&BenchmarkSpec::accumulator(u64::MAX / 2, true)),
            Err(BenchmarkError::Overflow(_))
        ));
        assert!(generate_benchmark(&BenchmarkSpec::chain_bug(u64::MAX)).is_ok());
    }

    #[test]
    fn names() {
        assert_eq!(BenchmarkSpec::accumulator(4, false).name(), "accumulator_safe_4");
        assert_eq!(BenchmarkSpec::const_check(64).expected_shortest_cex(), Some(66));
    }
}
