//! `.kts` text format and benchmark generators.
//!
//! ```text
//! (system
//!   (var <name> (bv <w>) | bool)*
//!   (input <name> (bv <w>) | bool)*
//!   (init <bool-expr>)
//!   (trans <bool-expr>)
//!   (prop <name> <bool-expr>)+
//!   (halt <bool-expr>))
//! ```
//!
//! Decimal numerals take their width from the surrounding expression;
//! `#x`/`#b` literals carry their own width.

mod bench;
mod parse;
mod print;

use std::fmt;

use thiserror::Error;

use crate::ir::IrError;
use crate::sexp::Span;

pub use bench::{generate_benchmark, BenchmarkError, BenchmarkSpec, Family};
pub use parse::{parse, parse_file};
pub use print::print_system;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    FileNotFound(String),
    Io(String),
    Syntax(String),
    UnknownOperator(String),
    BadIdentifier(String),
    Duplicate(String),
    Undeclared(String),
    /// Scoping rule violation: `next` or an input outside `trans`.
    Scope(String),
    Sort {
        expr: String,
        expected: String,
        found: String,
    },
    AmbiguousWidth(String),
    LiteralOverflow {
        literal: String,
        width: u8,
    },
    MissingSection(String),
    Invalid(IrError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: Option<Span>,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = self.span {
            write!(f, "{span}: ")?;
        }
        match &self.kind {
            ParseErrorKind::FileNotFound(p) => write!(f, "file not found: {p}"),
            ParseErrorKind::Io(m) => write!(f, "read error: {m}"),
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownOperator(op) => write!(f, "unknown operator `{op}`"),
            ParseErrorKind::BadIdentifier(id) => write!(f, "invalid identifier `{id}`"),
            ParseErrorKind::Duplicate(n) => write!(f, "duplicate declaration of `{n}`"),
            ParseErrorKind::Undeclared(n) => write!(f, "undeclared variable `{n}`"),
            ParseErrorKind::Scope(m) => write!(f, "{m}"),
            ParseErrorKind::Sort { expr, expected, found } => {
                write!(f, "sort error in `{expr}`: expected {expected}, found {found}")
            }
            ParseErrorKind::AmbiguousWidth(e) => {
                write!(
                    f,
                    "cannot infer the bit width of `{e}`; use a sized literal (#x.. or #b..)"
                )
            }
            ParseErrorKind::LiteralOverflow { literal, width } => {
                write!(f, "literal {literal} does not fit in {width} bits")
            }
            ParseErrorKind::MissingSection(s) => write!(f, "missing section `({s} ...)`"),
            ParseErrorKind::Invalid(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Sort, Value};

    const COUNTER: &str =
        "(system (var x (bv 3)) (init (= x 0)) (trans (= (next x) (bvadd x 1))) (prop p1 (not (= x 5))) (halt false))";

    #[test]
    fn parses_minimal_counter() {
        let sys = parse(COUNTER).unwrap();
        assert_eq!(sys.vars().len(), 1);
        assert_eq!(sys.decl("x").unwrap().sort, Sort::BitVec(3));
        assert_eq!(sys.init().to_string(), "(= x #b000)");
        assert_eq!(sys.trans().to_string(), "(= (next x) (bvadd x #b001))");
        assert_eq!(sys.props()[0].expr.to_string(), "(not (= x #b101))");
        assert_eq!(sys.halt().as_const(), Some(Value::Bool(false)));
    }

    #[test]
    fn next_outside_trans_is_rejected() {
        let src = "(system (var x (bv 3)) (init (= x 0)) (trans true) (prop p (= (next x) 0)) (halt false))";
        let err = parse(src).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Scope(_)), "{err}");
        assert!(err.to_string().contains("next"));
        assert_eq!(err.span.unwrap().col, 63);
    }

    #[test]
    fn bool_vs_bitvector_names_both_sorts() {
        let src = "(system (var x (bv 3)) (var b bool) (init (= x b)) (trans true) (prop p true) (halt false))";
        let err = parse(src).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bool") && msg.contains("(bv 3)"), "{msg}");
    }

    #[test]
    fn literal_rules() {
        let ambiguous = "(system (var x (bv 3)) (init (= 1 1)) (trans true) (prop p true) (halt false))";
        assert!(matches!(
            parse(ambiguous).unwrap_err().kind,
            ParseErrorKind::AmbiguousWidth(_)
        ));
        let overflow = "(system (var x (bv 3)) (init (= x 8)) (trans true) (prop p true) (halt false))";
        assert!(matches!(
            parse(overflow).unwrap_err().kind,
            ParseErrorKind::LiteralOverflow { .. }
        ));
        let sized = "(system (var x (bv 8)) (init (= x #x0f)) (trans true) (prop p true) (halt false))";
        assert!(parse(sized).is_ok());
        let mismatch = "(system (var x (bv 3)) (init (= x #x0f)) (trans true) (prop p true) (halt false))";
        assert!(matches!(parse(mismatch).unwrap_err().kind, ParseErrorKind::Sort { .. }));
        let nested = "(system (var x (bv 4)) (init (= (bvadd 1 2) x)) (trans true) (prop p true) (halt false))";
        assert!(parse(nested).is_ok());
    }

    #[test]
    fn structural_errors() {
        let missing = "(system (var x bool) (init x) (trans true) (halt false))";
        assert_eq!(
            parse(missing).unwrap_err().kind,
            ParseErrorKind::MissingSection("prop".into())
        );
        let dup = "(system (var x bool) (input x bool) (init x) (trans true) (prop p x) (halt false))";
        assert_eq!(parse(dup).unwrap_err().kind, ParseErrorKind::Duplicate("x".into()));
        let undeclared = "(system (var x bool) (init y) (trans true) (prop p x) (halt false))";
        assert_eq!(
            parse(undeclared).unwrap_err().kind,
            ParseErrorKind::Undeclared("y".into())
        );
        let unclosed = "(system (var x bool)";
        let err = parse(unclosed).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert!(err.to_string().starts_with("1:1:"));
        let input_in_prop = "(system (var x bool) (input u bool) (init x) (trans true) (prop p u) (halt false))";
        assert!(matches!(
            parse(input_in_prop).unwrap_err().kind,
            ParseErrorKind::Scope(_)
        ));
    }

    #[test]
    fn print_then_parse_is_identity() {
        let sys = parse(COUNTER).unwrap();
        assert_eq!(parse(&print_system(&sys)).unwrap(), sys);
    }
}
