use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::sort::{Sort, Value};

/// Interned identifier.
pub type Name = Arc<str>;

/// Operators of the expression language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Not,
    And,
    Or,
    Implies,
    Iff,
    Ite,
    Eq,
    BvAdd,
    BvSub,
    BvMul,
    BvAnd,
    BvOr,
    BvXor,
    BvNot,
    BvUle,
    BvUlt,
    BvUge,
    BvUgt,
}

impl Op {
    pub const ALL: [Op; 18] = [
        Op::Not,
        Op::And,
        Op::Or,
        Op::Implies,
        Op::Iff,
        Op::Ite,
        Op::Eq,
        Op::BvAdd,
        Op::BvSub,
        Op::BvMul,
        Op::BvAnd,
        Op::BvOr,
        Op::BvXor,
        Op::BvNot,
        Op::BvUle,
        Op::BvUlt,
        Op::BvUge,
        Op::BvUgt,
    ];

    /// Surface name used by the `.kts` format.
    pub fn name(self) -> &'static str {
        match self {
            Op::Not => "not",
            Op::And => "and",
            Op::Or => "or",
            Op::Implies => "implies",
            Op::Iff => "iff",
            Op::Ite => "ite",
            Op::Eq => "=",
            Op::BvAdd => "bvadd",
            Op::BvSub => "bvsub",
            Op::BvMul => "bvmul",
            Op::BvAnd => "bvand",
            Op::BvOr => "bvor",
            Op::BvXor => "bvxor",
            Op::BvNot => "bvnot",
            Op::BvUle => "bvule",
            Op::BvUlt => "bvult",
            Op::BvUge => "bvuge",
            Op::BvUgt => "bvugt",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        if name == "=>" {
            return Some(Op::Implies);
        }
        Op::ALL.iter().copied().find(|op| op.name() == name)
    }

    pub fn is_bv_arith(self) -> bool {
        matches!(
            self,
            Op::BvAdd | Op::BvSub | Op::BvMul | Op::BvAnd | Op::BvOr | Op::BvXor
        )
    }

    pub fn is_bv_cmp(self) -> bool {
        matches!(self, Op::BvUle | Op::BvUlt | Op::BvUge | Op::BvUgt)
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Const(Value),
    /// Current-state or input variable.
    Var(Name),
    /// Next-state reference; only valid inside `trans`.
    Next(Name),
    App(Op, Vec<Expr>),
}

/// Immutable, cheaply clonable expression. Subterms may be shared.
#[derive(Clone)]
pub struct Expr(Arc<ExprKind>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr(Arc::new(kind))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0
    }

    /// Address of the shared node; stable while any clone is alive.
    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(v: Value) -> Self {
        Expr::new(ExprKind::Const(v))
    }

    pub fn bool(b: bool) -> Self {
        Expr::constant(Value::Bool(b))
    }

    pub fn bv(width: u8, bits: u64) -> Self {
        Expr::constant(Value::bv(width, bits))
    }

    pub fn var(name: impl Into<Name>) -> Self {
        Expr::new(ExprKind::Var(name.into()))
    }

    pub fn next(name: impl Into<Name>) -> Self {
        Expr::new(ExprKind::Next(name.into()))
    }

    pub fn app(op: Op, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::App(op, args))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Expr::app(Op::Not, vec![e])
    }

    pub fn eq(a: Expr, b: Expr) -> Self {
        Expr::app(Op::Eq, vec![a, b])
    }

    pub fn implies(a: Expr, b: Expr) -> Self {
        Expr::app(Op::Implies, vec![a, b])
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Self {
        Expr::app(Op::Ite, vec![c, t, e])
    }

    pub fn binary(op: Op, a: Expr, b: Expr) -> Self {
        Expr::app(op, vec![a, b])
    }

    /// Conjunction that collapses the empty and singleton cases.
    pub fn conj(items: impl IntoIterator<Item = Expr>) -> Self {
        let mut items: Vec<Expr> = items.into_iter().collect();
        match items.len() {
            0 => Expr::bool(true),
            1 => items.pop().unwrap(),
            _ => Expr::app(Op::And, items),
        }
    }

    /// Disjunction that collapses the empty and singleton cases.
    pub fn disj(items: impl IntoIterator<Item = Expr>) -> Self {
        let mut items: Vec<Expr> = items.into_iter().collect();
        match items.len() {
            0 => Expr::bool(false),
            1 => items.pop().unwrap(),
            _ => Expr::app(Op::Or, items),
        }
    }

    pub fn as_const(&self) -> Option<Value> {
        match self.kind() {
            ExprKind::Const(v) => Some(*v),
            _ => None,
        }
    }

    /// Visits every distinct shared node once, children before parents.
    pub fn visit_dag(&self, f: &mut dyn FnMut(&Expr)) {
        fn go(e: &Expr, seen: &mut std::collections::HashSet<usize>, f: &mut dyn FnMut(&Expr)) {
            if !seen.insert(e.ptr_id()) {
                return;
            }
            if let ExprKind::App(_, args) = e.kind() {
                for a in args {
                    go(a, seen, f);
                }
            }
            f(e);
        }
        let mut seen = std::collections::HashSet::new();
        go(self, &mut seen, f);
    }

    pub fn contains_next(&self) -> bool {
        let mut found = false;
        self.visit_dag(&mut |e| found |= matches!(e.kind(), ExprKind::Next(_)));
        found
    }

    /// Names referenced by `Var` nodes.
    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit_dag(&mut |e| {
            if let ExprKind::Var(n) = e.kind() {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        });
        out
    }

    /// Rewrites leaves, preserving sharing of interior nodes.
    pub fn map_leaves(&self, f: &mut dyn FnMut(&ExprKind) -> Option<Expr>) -> Expr {
        fn go(e: &Expr, memo: &mut HashMap<usize, Expr>, f: &mut dyn FnMut(&ExprKind) -> Option<Expr>) -> Expr {
            if let Some(done) = memo.get(&e.ptr_id()) {
                return done.clone();
            }
            let out = match e.kind() {
                ExprKind::App(op, args) => {
                    let new_args: Vec<Expr> = args.iter().map(|a| go(a, memo, f)).collect();
                    if new_args.iter().zip(args).all(|(n, o)| Arc::ptr_eq(&n.0, &o.0)) {
                        e.clone()
                    } else {
                        Expr::app(*op, new_args)
                    }
                }
                leaf => f(leaf).unwrap_or_else(|| e.clone()),
            };
            memo.insert(e.ptr_id(), out.clone());
            out
        }
        let mut memo = HashMap::new();
        go(self, &mut memo, f)
    }

    /// Infers the sort given variable sorts; `None` on any ill-sortedness.
    pub fn sort_with(&self, lookup: &dyn Fn(&str) -> Option<Sort>) -> Option<Sort> {
        match self.kind() {
            ExprKind::Const(v) => Some(v.sort()),
            ExprKind::Var(n) | ExprKind::Next(n) => lookup(n),
            ExprKind::App(op, args) => {
                let sorts: Option<Vec<Sort>> = args.iter().map(|a| a.sort_with(lookup)).collect();
                op.result_sort(&sorts?)
            }
        }
    }
}

impl Op {
    /// Result sort for argument sorts, or `None` when the application is ill-sorted.
    pub fn result_sort(self, args: &[Sort]) -> Option<Sort> {
        let all_bool = args.iter().all(|s| s.is_bool());
        let same = args.windows(2).all(|w| w[0] == w[1]);
        match self {
            Op::Not if args.len() == 1 && all_bool => Some(Sort::Bool),
            Op::And | Op::Or if all_bool => Some(Sort::Bool),
            Op::Implies | Op::Iff if args.len() == 2 && all_bool => Some(Sort::Bool),
            Op::Ite if args.len() == 3 && args[0].is_bool() && args[1] == args[2] => Some(args[1]),
            Op::Eq if args.len() == 2 && same => Some(Sort::Bool),
            Op::BvNot if args.len() == 1 && !args[0].is_bool() => Some(args[0]),
            Op::BvSub if args.len() == 2 && same && !args[0].is_bool() => Some(args[0]),
            op if op.is_bv_arith() && args.len() >= 2 && same && !args[0].is_bool() => Some(args[0]),
            op if op.is_bv_cmp() && args.len() == 2 && same && !args[0].is_bool() => Some(Sort::Bool),
            _ => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ExprKind::Const(Value::Bool(b)) => write!(f, "{b}"),
            ExprKind::Const(Value::Bv { width, bits }) => {
                if width % 4 == 0 {
                    write!(f, "#x{:0w$x}", bits, w = (*width / 4) as usize)
                } else {
                    write!(f, "#b{:0w$b}", bits, w = *width as usize)
                }
            }
            ExprKind::Var(n) => f.write_str(n),
            ExprKind::Next(n) => write!(f, "(next {n})"),
            ExprKind::App(op, args) => {
                write!(f, "({}", op.name())?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_names_round_trip() {
        for op in Op::ALL {
            assert_eq!(Op::from_name(op.name()), Some(op));
        }
        assert_eq!(Op::from_name("=>"), Some(Op::Implies));
        assert_eq!(Op::from_name("bvsdiv"), None);
    }

    #[test]
    fn display_uses_sized_literals() {
        let e = Expr::eq(Expr::var("x"), Expr::bv(3, 5));
        assert_eq!(e.to_string(), "(= x #b101)");
        assert_eq!(Expr::bv(8, 10).to_string(), "#x0a");
    }

    #[test]
    fn map_leaves_keeps_untouched_nodes_shared() {
        let shared = Expr::not(Expr::var("a"));
        let e = Expr::conj([shared.clone(), Expr::var("b")]);
        let out = e.map_leaves(&mut |k| match k {
            ExprKind::Var(n) if &**n == "b" => Some(Expr::var("c")),
            _ => None,
        });
        match out.kind() {
            ExprKind::App(Op::And, args) => assert_eq!(args[0].ptr_id(), shared.ptr_id()),
            _ => panic!("shape changed"),
        }
        assert_eq!(out.to_string(), "(and (not a) c)");
    }

    #[test]
    fn result_sorts() {
        let bv3 = Sort::BitVec(3);
        assert_eq!(Op::BvAdd.result_sort(&[bv3, bv3]), Some(bv3));
        assert_eq!(Op::BvAdd.result_sort(&[bv3, Sort::BitVec(4)]), None);
        assert_eq!(Op::Eq.result_sort(&[Sort::Bool, bv3]), None);
        assert_eq!(Op::Ite.result_sort(&[Sort::Bool, bv3, bv3]), Some(bv3));
        assert_eq!(Op::BvUlt.result_sort(&[bv3, bv3]), Some(Sort::Bool));
        assert_eq!(Op::And.result_sort(&[Sort::Bool, bv3]), None);
    }
}
