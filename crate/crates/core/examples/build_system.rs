//! Builds a transition system in code rather than parsing one: a traffic
//! light controller whose `walk` signal must never overlap a green light.
//! The bug needs a pedestrian press at the wrong moment, so the witness
//! carries input values.

use std::error::Error;

use kindmc::engine::{run, EngineConfig};
use kindmc::frontend::print_system;
use kindmc::ir::{Expr, Op, Property, Sort, TransitionSystem, VarDecl};

const GREEN: u64 = 0;
const YELLOW: u64 = 1;
const RED: u64 = 2;

pub fn traffic_light() -> TransitionSystem {
    let light = || Expr::var("light");
    let is = |c: u64| Expr::eq(light(), Expr::bv(2, c));
    let next_light = Expr::ite(
        is(GREEN),
        Expr::bv(2, YELLOW),
        Expr::ite(is(YELLOW), Expr::bv(2, RED), Expr::bv(2, GREEN)),
    );
    // Buggy: a press during red latches `walk` on the same step the light
    // turns green.
    let next_walk = Expr::binary(
        Op::Or,
        Expr::binary(Op::And, Expr::var("press"), Expr::not(is(GREEN))),
        Expr::binary(Op::And, Expr::var("walk"), Expr::not(is(RED))),
    );
    TransitionSystem::new(
        vec![
            VarDecl::state("light", Sort::BitVec(2)),
            VarDecl::state("walk", Sort::Bool),
            VarDecl::input("press", Sort::Bool),
        ],
        Expr::conj([is(RED), Expr::not(Expr::var("walk"))]),
        Expr::conj([
            Expr::eq(Expr::next("light"), next_light),
            Expr::eq(Expr::next("walk"), next_walk),
        ]),
        vec![Property {
            name: "no_walk_on_green".into(),
            expr: Expr::implies(is(GREEN), Expr::not(Expr::var("walk"))),
        }],
        Expr::bool(false),
    )
    .expect("well-sorted")
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = traffic_light();
    println!("{}", print_system(&sys));
    let report = run(&sys, &EngineConfig::extended())?;
    println!("{} at k={}", report.outcome, report.final_k);
    if let Some(w) = &report.witness {
        print!("{}", w.render(&sys));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
