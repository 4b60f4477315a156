use std::collections::HashMap;

use super::expr::{Expr, ExprKind, Name, Op};
use super::sort::Sort;
use super::IrError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    StateVar,
    InputVar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: Name,
    pub sort: Sort,
    pub role: Role,
}

impl VarDecl {
    pub fn state(name: &str, sort: Sort) -> Self {
        VarDecl {
            name: name.into(),
            sort,
            role: Role::StateVar,
        }
    }

    pub fn input(name: &str, sort: Sort) -> Self {
        VarDecl {
            name: name.into(),
            sort,
            role: Role::InputVar,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Property {
    pub name: Name,
    pub expr: Expr,
}

/// Which formula of a system an expression belongs to; decides what it may reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Init,
    Trans,
    Prop,
    Halt,
}

impl Section {
    pub fn name(self) -> &'static str {
        match self {
            Section::Init => "init",
            Section::Trans => "trans",
            Section::Prop => "prop",
            Section::Halt => "halt",
        }
    }

    pub fn allows_inputs(self) -> bool {
        self == Section::Trans
    }

    pub fn allows_next(self) -> bool {
        self == Section::Trans
    }
}

/// A validated symbolic transition system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    vars: Vec<VarDecl>,
    init: Expr,
    trans: Expr,
    props: Vec<Property>,
    halt: Expr,
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TransitionSystem {
    pub fn new(vars: Vec<VarDecl>, init: Expr, trans: Expr, props: Vec<Property>, halt: Expr) -> Result<Self, IrError> {
        let sys = TransitionSystem {
            vars,
            init,
            trans,
            props,
            halt,
        };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<(), IrError> {
        let mut seen: HashMap<&str, ()> = HashMap::new();
        for v in &self.vars {
            if !is_identifier(&v.name) {
                return Err(IrError::BadIdentifier(v.name.to_string()));
            }
            if seen.insert(&v.name, ()).is_some() {
                return Err(IrError::DuplicateDecl(v.name.to_string()));
            }
            if let Sort::BitVec(w) = v.sort {
                Sort::bitvec(w as u32)?;
            }
        }
        if self.props.is_empty() {
            return Err(IrError::NoProperties);
        }
        let mut prop_names: HashMap<&str, ()> = HashMap::new();
        for p in &self.props {
            if prop_names.insert(&p.name, ()).is_some() {
                return Err(IrError::DuplicateDecl(p.name.to_string()));
            }
        }
        self.check_formula(&self.init, Section::Init)?;
        self.check_formula(&self.trans, Section::Trans)?;
        for p in &self.props {
            self.check_formula(&p.expr, Section::Prop)?;
        }
        self.check_formula(&self.halt, Section::Halt)?;
        Ok(())
    }

    /// Checks scoping and sorts of a boolean formula placed in `section`.
    pub fn check_formula(&self, e: &Expr, section: Section) -> Result<(), IrError> {
        let sort = self.sort_of(e, section)?;
        if sort != Sort::Bool {
            return Err(IrError::SortMismatch {
                expr: e.to_string(),
                expected: Sort::Bool,
                found: sort,
            });
        }
        Ok(())
    }

    /// Sort of `e` in `section`, with a precise error on the first offending subterm.
    pub fn sort_of(&self, e: &Expr, section: Section) -> Result<Sort, IrError> {
        match e.kind() {
            ExprKind::Const(v) => Ok(v.sort()),
            ExprKind::Var(n) => {
                let d = self.decl(n).ok_or_else(|| IrError::Undeclared(n.to_string()))?;
                if d.role == Role::InputVar && !section.allows_inputs() {
                    return Err(IrError::InputOutsideTrans {
                        name: n.to_string(),
                        section: section.name(),
                    });
                }
                Ok(d.sort)
            }
            ExprKind::Next(n) => {
                if !section.allows_next() {
                    return Err(IrError::NextOutsideTrans {
                        name: n.to_string(),
                        section: section.name(),
                    });
                }
                let d = self.decl(n).ok_or_else(|| IrError::Undeclared(n.to_string()))?;
                if d.role != Role::StateVar {
                    return Err(IrError::NextOfInput(n.to_string()));
                }
                Ok(d.sort)
            }
            ExprKind::App(op, args) => {
                let sorts = args
                    .iter()
                    .map(|a| self.sort_of(a, section))
                    .collect::<Result<Vec<_>, _>>()?;
                op.result_sort(&sorts).ok_or_else(|| ill_sorted(e, *op, &sorts))
            }
        }
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.vars.iter().find(|v| &*v.name == name)
    }

    pub fn state_vars(&self) -> impl Iterator<Item = &VarDecl> {
        self.vars.iter().filter(|v| v.role == Role::StateVar)
    }

    pub fn input_vars(&self) -> impl Iterator<Item = &VarDecl> {
        self.vars.iter().filter(|v| v.role == Role::InputVar)
    }

    pub fn state_bits(&self) -> u32 {
        self.state_vars().map(|v| v.sort.bits()).sum()
    }

    pub fn input_bits(&self) -> u32 {
        self.input_vars().map(|v| v.sort.bits()).sum()
    }

    pub fn init(&self) -> &Expr {
        &self.init
    }

    pub fn trans(&self) -> &Expr {
        &self.trans
    }

    pub fn props(&self) -> &[Property] {
        &self.props
    }

    pub fn halt(&self) -> &Expr {
        &self.halt
    }
}

fn ill_sorted(e: &Expr, op: Op, sorts: &[Sort]) -> IrError {
    let expected = match op {
        Op::Not | Op::And | Op::Or | Op::Implies | Op::Iff => Some(Sort::Bool),
        Op::Ite => sorts.first().copied().filter(|s| !s.is_bool()).map(|_| Sort::Bool),
        _ => None,
    };
    match expected {
        Some(exp) => {
            let found = sorts.iter().copied().find(|s| *s != exp).unwrap_or(Sort::Bool);
            IrError::SortMismatch {
                expr: e.to_string(),
                expected: exp,
                found,
            }
        }
        None => IrError::IllSorted {
            expr: e.to_string(),
            op: op.name(),
            args: sorts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counter(trans: Expr, prop: Expr) -> Result<TransitionSystem, IrError> {
        TransitionSystem::new(
            vec![VarDecl::state("x", Sort::BitVec(3)), VarDecl::input("u", Sort::Bool)],
            Expr::eq(Expr::var("x"), Expr::bv(3, 0)),
            trans,
            vec![Property {
                name: "p".into(),
                expr: prop,
            }],
            Expr::bool(false),
        )
    }

    #[test]
    fn accepts_well_formed_system() {
        let sys = counter(
            Expr::eq(Expr::next("x"), Expr::binary(Op::BvAdd, Expr::var("x"), Expr::bv(3, 1))),
            Expr::not(Expr::eq(Expr::var("x"), Expr::bv(3, 5))),
        )
        .unwrap();
        assert_eq!(sys.state_bits(), 3);
        assert_eq!(sys.input_bits(), 1);
    }

    #[test]
    fn rejects_next_in_property() {
        let err = counter(Expr::bool(true), Expr::eq(Expr::next("x"), Expr::bv(3, 0))).unwrap_err();
        assert!(matches!(err, IrError::NextOutsideTrans { .. }));
    }

    #[test]
    fn rejects_input_in_property() {
        let err = counter(Expr::bool(true), Expr::var("u")).unwrap_err();
        assert!(matches!(err, IrError::InputOutsideTrans { .. }));
    }

    #[test]
    fn rejects_sort_mismatch() {
        let err = counter(Expr::eq(Expr::var("u"), Expr::var("x")), Expr::bool(true)).unwrap_err();
        assert!(matches!(err, IrError::IllSorted { .. }), "{err:?}");
    }

    #[test]
    fn rejects_duplicate_and_bad_names() {
        let dup = TransitionSystem::new(
            vec![VarDecl::state("x", Sort::Bool), VarDecl::input("x", Sort::Bool)],
            Expr::bool(true),
            Expr::bool(true),
            vec![Property {
                name: "p".into(),
                expr: Expr::bool(true),
            }],
            Expr::bool(false),
        );
        assert!(matches!(dup, Err(IrError::DuplicateDecl(_))));
        assert!(!is_identifier("x@1"));
        assert!(!is_identifier("1x"));
        assert!(is_identifier("_tmp9"));
    }
}
