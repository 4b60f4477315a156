use std::fmt::Write;

use super::Query;
use crate::ir::{Expr, ExprKind, Op, Sort, Value};

fn sort_text(s: Sort) -> String {
    match s {
        Sort::Bool => "Bool".to_string(),
        Sort::BitVec(w) => format!("(_ BitVec {w})"),
    }
}

fn write_value(out: &mut String, v: Value) {
    match v {
        Value::Bool(b) => out.push_str(if b { "true" } else { "false" }),
        Value::Bv { width, bits } => {
            let _ = write!(out, "#b{:0w$b}", bits, w = width as usize);
        }
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e.kind() {
        ExprKind::Const(v) => write_value(out, *v),
        ExprKind::Var(n) => out.push_str(n),
        ExprKind::Next(n) => panic!("next({n}) must be unrolled before serialization"),
        ExprKind::App(op, args) => {
            match (op, args.len()) {
                (Op::And, 0) => return out.push_str("true"),
                (Op::Or, 0) => return out.push_str("false"),
                (Op::And | Op::Or, 1) => return write_expr(out, &args[0]),
                _ => {}
            }
            let name = match op {
                Op::Implies => "=>",
                Op::Iff => "=",
                other => other.name(),
            };
            // Left-associate n-ary bit-vector operators into binary applications.
            if op.is_bv_arith() && args.len() > 2 {
                for _ in 0..args.len() - 1 {
                    let _ = write!(out, "({name} ");
                }
                write_expr(out, &args[0]);
                for a in &args[1..] {
                    out.push(' ');
                    write_expr(out, a);
                    out.push(')');
                }
                return;
            }
            let _ = write!(out, "({name}");
            for a in args {
                out.push(' ');
                write_expr(out, a);
            }
            out.push(')');
        }
    }
}

/// Renders a term in SMT-LIB2 syntax.
pub fn expr_to_smtlib(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

/// Renders a query as a self-contained SMT-LIB2 script (QF_BV).
pub fn serialize_smtlib(q: &Query) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "; {} k={}", q.kind, q.k);
    out.push_str("(set-option :produce-models true)\n");
    out.push_str("(set-logic QF_BV)\n");
    for d in &q.decls {
        let _ = writeln!(out, "(declare-const {} {})", d.name(), sort_text(d.sort));
    }
    for m in &q.markers {
        let _ = writeln!(out, "(declare-const {} Bool)", m.name);
    }
    for m in &q.markers {
        let _ = write!(out, "(assert (= {} ", m.name);
        write_expr(&mut out, &m.def);
        out.push_str("))\n");
    }
    out.push_str("(assert ");
    write_expr(&mut out, &q.assertion);
    out.push_str(")\n(check-sat)\n");
    let names: Vec<String> = q
        .decls
        .iter()
        .map(|d| d.name())
        .chain(q.markers.iter().map(|m| m.name.clone()))
        .collect();
    if !names.is_empty() {
        let _ = writeln!(out, "(get-value ({}))", names.join(" "));
    }
    out.push_str("(exit)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectives_and_literals() {
        let e = Expr::implies(
            Expr::app(Op::Iff, vec![Expr::var("a"), Expr::bool(true)]),
            Expr::eq(Expr::var("x@1"), Expr::bv(3, 5)),
        );
        assert_eq!(expr_to_smtlib(&e), "(=> (= a true) (= x@1 #b101))");
        assert_eq!(expr_to_smtlib(&Expr::app(Op::And, vec![])), "true");
        assert_eq!(expr_to_smtlib(&Expr::app(Op::Or, vec![Expr::var("p")])), "p");
    }

    #[test]
    fn nary_bitvector_ops_are_binarised() {
        let e = Expr::app(Op::BvAdd, vec![Expr::var("a"), Expr::var("b"), Expr::var("c")]);
        assert_eq!(expr_to_smtlib(&e), "(bvadd (bvadd a b) c)");
    }
}
