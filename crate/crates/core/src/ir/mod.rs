//! Transition-system intermediate representation.
//!
//! Expressions are sorted over booleans and unsigned bit-vectors of up to 64
//! bits with wrap-around arithmetic. A [`TransitionSystem`] bundles state and
//! input declarations with the init, transition, property and halt formulas.

mod eval;
mod expr;
mod replay;
mod sort;
mod state;
mod system;

use thiserror::Error;

pub use eval::{apply, eval, eval_bool, eval_expr, eval_partial, Env, StepEnv};
pub use expr::{Expr, ExprKind, Name, Op};
pub use replay::{first_violated, replay_path, replay_trace, ReplayClause, ReplayVerdict};
pub use sort::{mask, Sort, Value, MAX_WIDTH};
pub use state::{states_equal, State, Trace, Valuation};
pub use system::{is_identifier, Property, Role, Section, TransitionSystem, VarDecl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("bit-vector width {0} outside 1..=64")]
    BadWidth(u32),
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDecl(String),
    #[error("undeclared variable `{0}`")]
    Undeclared(String),
    #[error("`(next {name})` is only allowed in trans, found in {section}")]
    NextOutsideTrans { name: String, section: &'static str },
    #[error("`(next {0})` refers to an input variable")]
    NextOfInput(String),
    #[error("input variable `{name}` is only allowed in trans, found in {section}")]
    InputOutsideTrans { name: String, section: &'static str },
    #[error("sort error in `{expr}`: expected {expected}, found {found}")]
    SortMismatch { expr: String, expected: Sort, found: Sort },
    #[error("sort error in `{expr}`: `{op}` cannot take ({args})")]
    IllSorted {
        expr: String,
        op: &'static str,
        args: String,
    },
    #[error("system declares no properties")]
    NoProperties,
    #[error("unbound variable `{0}` during evaluation")]
    Unbound(String),
    #[error("internal error: {0}")]
    Internal(String),
}
