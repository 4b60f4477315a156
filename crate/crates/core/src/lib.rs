//! k-induction model checking for finite transition systems, with a
//! bidirectional mode that turns inductive-step counterexamples into
//! forward reachability targets.
//!
//! ```
//! use kindmc::engine::{run, EngineConfig, Outcome};
//! use kindmc::frontend::parse;
//!
//! let sys = parse(
//!     "(system (var x (bv 3)) (init (= x 0)) (trans (= (next x) (bvadd x 1)))
//!      (prop p1 (not (= x 5))) (halt false))",
//! )
//! .unwrap();
//! let report = run(&sys, &EngineConfig::extended()).unwrap();
//! assert_eq!(report.outcome, Outcome::BugFound);
//! assert_eq!(report.final_k, 4);
//! assert_eq!(report.witness.unwrap().len(), 6);
//! ```

pub mod cli;
pub mod encoder;
pub mod engine;
pub mod frontend;
pub mod ir;
pub mod oracle;
pub mod sexp;
pub mod solver;
