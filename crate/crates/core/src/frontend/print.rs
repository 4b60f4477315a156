use std::fmt::Write;

use crate::ir::{Role, Sort, TransitionSystem};

fn sort_text(s: Sort) -> String {
    match s {
        Sort::Bool => "bool".to_string(),
        Sort::BitVec(w) => format!("(bv {w})"),
    }
}

/// Renders a system as a `.kts` document that parses back to the same IR.
pub fn print_system(sys: &TransitionSystem) -> String {
    let mut out = String::from("(system\n");
    for v in sys.vars() {
        let kw = match v.role {
            Role::StateVar => "var",
            Role::InputVar => "input",
        };
        let _ = writeln!(out, "  ({kw} {} {})", v.name, sort_text(v.sort));
    }
    let _ = writeln!(out, "  (init {})", sys.init());
    let _ = writeln!(out, "  (trans {})", sys.trans());
    for p in sys.props() {
        let _ = writeln!(out, "  (prop {} {})", p.name, p.expr);
    }
    let _ = writeln!(out, "  (halt {}))", sys.halt());
    out
}
