use std::collections::HashMap;
use std::path::Path;

use super::{ParseError, ParseErrorKind};
use crate::ir::{is_identifier, Expr, Name, Op, Property, Role, Section, Sort, TransitionSystem, Value, VarDecl};
use crate::sexp::{parse_all, Sexp, SexpKind, Span};

/// Reads and parses a `.kts` file.
pub fn parse_file(path: &Path) -> Result<TransitionSystem, ParseError> {
    let src = std::fs::read_to_string(path).map_err(|e| ParseError {
        span: None,
        kind: if e.kind() == std::io::ErrorKind::NotFound {
            ParseErrorKind::FileNotFound(path.display().to_string())
        } else {
            ParseErrorKind::Io(format!("{}: {e}", path.display()))
        },
    })?;
    parse(&src)
}

/// Parses a `.kts` document into a validated transition system.
pub fn parse(src: &str) -> Result<TransitionSystem, ParseError> {
    let top = parse_all(src).map_err(|e| ParseError {
        span: Some(e.span),
        kind: ParseErrorKind::Syntax(e.message),
    })?;
    let doc = match top.as_slice() {
        [doc] => doc,
        [] => {
            return Err(syntax(
                Span { line: 1, col: 1 },
                "expected `(system ...)`, found end of input",
            ))
        }
        [_, extra, ..] => return Err(syntax(extra.span, "expected end of input after `(system ...)`")),
    };
    let items = match doc.list() {
        Some(items) if doc.head() == Some("system") => &items[1..],
        _ => return Err(syntax(doc.span, format!("expected `(system ...)`, found `{doc}`"))),
    };

    let mut decls: Vec<VarDecl> = Vec::new();
    let mut spans: HashMap<Name, Span> = HashMap::new();
    // Declarations first, so formulas may reference variables declared later.
    for item in items {
        let Some(head) = item.head() else {
            return Err(syntax(item.span, format!("expected a section, found `{item}`")));
        };
        let role = match head {
            "var" => Role::StateVar,
            "input" => Role::InputVar,
            _ => continue,
        };
        let parts = item.list().unwrap();
        if parts.len() != 3 {
            return Err(syntax(item.span, format!("expected `({head} <name> <sort>)`")));
        }
        let name = parts[1].atom().filter(|n| is_identifier(n)).ok_or_else(|| ParseError {
            span: Some(parts[1].span),
            kind: ParseErrorKind::BadIdentifier(parts[1].to_string()),
        })?;
        if spans.contains_key(name) {
            return Err(ParseError {
                span: Some(parts[1].span),
                kind: ParseErrorKind::Duplicate(name.to_string()),
            });
        }
        let sort = parse_sort(&parts[2])?;
        spans.insert(name.into(), parts[1].span);
        decls.push(VarDecl {
            name: name.into(),
            sort,
            role,
        });
    }

    let scope: HashMap<Name, (Sort, Role)> = decls.iter().map(|d| (d.name.clone(), (d.sort, d.role))).collect();
    let mut init = None;
    let mut trans = None;
    let mut halt = None;
    let mut props: Vec<Property> = Vec::new();
    let mut prop_names: HashMap<String, Span> = HashMap::new();

    for item in items {
        let head = item.head().unwrap();
        let parts = item.list().unwrap();
        let single = |section: Section, slot: &mut Option<Expr>| -> Result<(), ParseError> {
            if slot.is_some() {
                return Err(ParseError {
                    span: Some(item.span),
                    kind: ParseErrorKind::Duplicate(section.name().to_string()),
                });
            }
            if parts.len() != 2 {
                return Err(syntax(
                    item.span,
                    format!("expected `({} <bool-expr>)`", section.name()),
                ));
            }
            let e = Elaborator { scope: &scope, section }.expect(&parts[1], Sort::Bool)?;
            *slot = Some(e);
            Ok(())
        };
        match head {
            "var" | "input" => {}
            "init" => single(Section::Init, &mut init)?,
            "trans" => single(Section::Trans, &mut trans)?,
            "halt" => single(Section::Halt, &mut halt)?,
            "prop" => {
                if parts.len() != 3 {
                    return Err(syntax(item.span, "expected `(prop <name> <bool-expr>)`"));
                }
                let name = parts[1].atom().filter(|n| is_identifier(n)).ok_or_else(|| ParseError {
                    span: Some(parts[1].span),
                    kind: ParseErrorKind::BadIdentifier(parts[1].to_string()),
                })?;
                if prop_names.insert(name.to_string(), parts[1].span).is_some() {
                    return Err(ParseError {
                        span: Some(parts[1].span),
                        kind: ParseErrorKind::Duplicate(name.to_string()),
                    });
                }
                let expr = Elaborator {
                    scope: &scope,
                    section: Section::Prop,
                }
                .expect(&parts[2], Sort::Bool)?;
                props.push(Property {
                    name: name.into(),
                    expr,
                });
            }
            other => {
                return Err(syntax(
                    item.span,
                    format!("unknown section `{other}`; expected var, input, init, trans, prop or halt"),
                ))
            }
        }
    }

    let missing = |what: &str| ParseError {
        span: Some(doc.span),
        kind: ParseErrorKind::MissingSection(what.to_string()),
    };
    let init = init.ok_or_else(|| missing("init"))?;
    let trans = trans.ok_or_else(|| missing("trans"))?;
    let halt = halt.ok_or_else(|| missing("halt"))?;
    if props.is_empty() {
        return Err(missing("prop"));
    }
    TransitionSystem::new(decls, init, trans, props, halt).map_err(|e| ParseError {
        span: Some(doc.span),
        kind: ParseErrorKind::Invalid(e),
    })
}

fn syntax(span: Span, msg: impl Into<String>) -> ParseError {
    ParseError {
        span: Some(span),
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

fn parse_sort(s: &Sexp) -> Result<Sort, ParseError> {
    if s.atom() == Some("bool") {
        return Ok(Sort::Bool);
    }
    if let Some([head, w]) = s.list() {
        if head.atom() == Some("bv") {
            let width: u32 = w
                .atom()
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| syntax(w.span, format!("expected a bit width, found `{w}`")))?;
            return Sort::bitvec(width).map_err(|e| ParseError {
                span: Some(w.span),
                kind: ParseErrorKind::Invalid(e),
            });
        }
    }
    Err(syntax(
        s.span,
        format!("expected `bool` or `(bv <width>)`, found `{s}`"),
    ))
}

struct Elaborator<'a> {
    scope: &'a HashMap<Name, (Sort, Role)>,
    section: Section,
}

impl Elaborator<'_> {
    fn sort_error(&self, s: &Sexp, expected: Sort, found: Sort) -> ParseError {
        ParseError {
            span: Some(s.span),
            kind: ParseErrorKind::Sort {
                expr: s.to_string(),
                expected: expected.to_string(),
                found: found.to_string(),
            },
        }
    }

    fn expect(&self, s: &Sexp, expected: Sort) -> Result<Expr, ParseError> {
        let (e, found) = self.elaborate(s, Some(expected))?;
        if found != expected {
            return Err(self.sort_error(s, expected, found));
        }
        Ok(e)
    }

    /// Sort of `s` when it can be determined without context; `None` for
    /// unsized literals and terms built only from them.
    fn probe(&self, s: &Sexp) -> Result<Option<Sort>, ParseError> {
        match &s.kind {
            SexpKind::Atom(a) => {
                if a == "true" || a == "false" {
                    Ok(Some(Sort::Bool))
                } else if a.starts_with(|c: char| c.is_ascii_digit()) {
                    Ok(None)
                } else if a.starts_with('#') {
                    Ok(Some(sized_literal(s, a)?.sort()))
                } else {
                    Ok(self.scope.get(a.as_str()).map(|(sort, _)| *sort))
                }
            }
            SexpKind::Str(_) => Ok(None),
            SexpKind::List(items) => {
                let Some(head) = s.head() else { return Ok(None) };
                if head == "next" {
                    return Ok(items
                        .get(1)
                        .and_then(|n| n.atom())
                        .and_then(|n| self.scope.get(n))
                        .map(|(sort, _)| *sort));
                }
                match Op::from_name(head) {
                    Some(op) if op.is_bv_arith() || op == Op::BvNot => {
                        for a in &items[1..] {
                            if let Some(so) = self.probe(a)? {
                                return Ok(Some(so));
                            }
                        }
                        Ok(None)
                    }
                    Some(Op::Ite) => {
                        for a in items.iter().skip(2) {
                            if let Some(so) = self.probe(a)? {
                                return Ok(Some(so));
                            }
                        }
                        Ok(None)
                    }
                    Some(_) => Ok(Some(Sort::Bool)),
                    None => Ok(None),
                }
            }
        }
    }

    /// Sort shared by a group of operands; the first operand with a
    /// self-determined sort fixes it, falling back to `context`.
    fn unify(&self, operands: &[Sexp], context: Option<Sort>, whole: &Sexp) -> Result<Sort, ParseError> {
        for a in operands {
            if let Some(s) = self.probe(a)? {
                return Ok(s);
            }
        }
        context.ok_or_else(|| ParseError {
            span: Some(whole.span),
            kind: ParseErrorKind::AmbiguousWidth(whole.to_string()),
        })
    }

    fn elaborate(&self, s: &Sexp, context: Option<Sort>) -> Result<(Expr, Sort), ParseError> {
        match &s.kind {
            SexpKind::Str(_) => Err(syntax(s.span, format!("unexpected string literal `{s}`"))),
            SexpKind::Atom(a) => self.atom(s, a, context),
            SexpKind::List(items) => {
                let Some(head) = s.head() else {
                    return Err(syntax(s.span, format!("expected an operator application, found `{s}`")));
                };
                let args = &items[1..];
                if head == "next" {
                    return self.next_ref(s, args);
                }
                let op = Op::from_name(head).ok_or_else(|| ParseError {
                    span: Some(items[0].span),
                    kind: ParseErrorKind::UnknownOperator(head.to_string()),
                })?;
                self.application(s, op, args, context)
            }
        }
    }

    fn atom(&self, s: &Sexp, a: &str, context: Option<Sort>) -> Result<(Expr, Sort), ParseError> {
        match a {
            "true" => return Ok((Expr::bool(true), Sort::Bool)),
            "false" => return Ok((Expr::bool(false), Sort::Bool)),
            _ => {}
        }
        if a.starts_with('#') {
            let v = sized_literal(s, a)?;
            return Ok((Expr::constant(v), v.sort()));
        }
        if a.starts_with(|c: char| c.is_ascii_digit()) {
            let n: u64 = a
                .parse()
                .map_err(|_| syntax(s.span, format!("malformed numeral `{a}`")))?;
            return match context {
                Some(Sort::BitVec(w)) => {
                    let v = Value::bv(w, n);
                    if v.raw() != n {
                        return Err(ParseError {
                            span: Some(s.span),
                            kind: ParseErrorKind::LiteralOverflow {
                                literal: a.to_string(),
                                width: w,
                            },
                        });
                    }
                    Ok((Expr::constant(v), Sort::BitVec(w)))
                }
                Some(Sort::Bool) => Err(ParseError {
                    span: Some(s.span),
                    kind: ParseErrorKind::Sort {
                        expr: a.to_string(),
                        expected: Sort::Bool.to_string(),
                        found: "numeral".to_string(),
                    },
                }),
                None => Err(ParseError {
                    span: Some(s.span),
                    kind: ParseErrorKind::AmbiguousWidth(a.to_string()),
                }),
            };
        }
        let (sort, role) = self.scope.get(a).copied().ok_or_else(|| ParseError {
            span: Some(s.span),
            kind: ParseErrorKind::Undeclared(a.to_string()),
        })?;
        if role == Role::InputVar && !self.section.allows_inputs() {
            return Err(ParseError {
                span: Some(s.span),
                kind: ParseErrorKind::Scope(format!(
                    "input variable `{a}` used in {}; inputs are only allowed in trans",
                    self.section.name()
                )),
            });
        }
        Ok((Expr::var(a), sort))
    }

    fn next_ref(&self, s: &Sexp, args: &[Sexp]) -> Result<(Expr, Sort), ParseError> {
        if !self.section.allows_next() {
            return Err(ParseError {
                span: Some(s.span),
                kind: ParseErrorKind::Scope(format!(
                    "`{s}` used in {}; next(·) is only allowed in trans",
                    self.section.name()
                )),
            });
        }
        let [target] = args else {
            return Err(syntax(s.span, "expected `(next <state-var>)`"));
        };
        let name = target
            .atom()
            .ok_or_else(|| syntax(target.span, "expected a state variable name"))?;
        match self.scope.get(name) {
            None => Err(ParseError {
                span: Some(target.span),
                kind: ParseErrorKind::Undeclared(name.to_string()),
            }),
            Some((_, Role::InputVar)) => Err(ParseError {
                span: Some(s.span),
                kind: ParseErrorKind::Scope(format!(
                    "`{s}` refers to input `{name}`; next(·) takes a state variable"
                )),
            }),
            Some((sort, Role::StateVar)) => Ok((Expr::next(name), *sort)),
        }
    }

    fn arity(&self, s: &Sexp, op: Op, args: &[Sexp], ok: bool) -> Result<(), ParseError> {
        if ok {
            Ok(())
        } else {
            Err(syntax(
                s.span,
                format!("wrong number of operands for `{}`: {}", op.name(), args.len()),
            ))
        }
    }

    fn application(&self, s: &Sexp, op: Op, args: &[Sexp], context: Option<Sort>) -> Result<(Expr, Sort), ParseError> {
        let n = args.len();
        match op {
            Op::Not | Op::And | Op::Or | Op::Implies | Op::Iff => {
                let ok = match op {
                    Op::Not => n == 1,
                    Op::Implies | Op::Iff => n == 2,
                    _ => true,
                };
                self.arity(s, op, args, ok)?;
                let es = args
                    .iter()
                    .map(|a| self.expect(a, Sort::Bool))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((Expr::app(op, es), Sort::Bool))
            }
            Op::Ite => {
                self.arity(s, op, args, n == 3)?;
                let c = self.expect(&args[0], Sort::Bool)?;
                let sort = self.unify(&args[1..], context, s)?;
                let t = self.expect(&args[1], sort)?;
                let e = self.expect(&args[2], sort)?;
                Ok((Expr::ite(c, t, e), sort))
            }
            Op::Eq => {
                self.arity(s, op, args, n == 2)?;
                let sort = self.unify(args, None, s)?;
                let a = self.expect(&args[0], sort)?;
                let b = self.expect(&args[1], sort)?;
                Ok((Expr::eq(a, b), Sort::Bool))
            }
            Op::BvNot | Op::BvSub | Op::BvAdd | Op::BvMul | Op::BvAnd | Op::BvOr | Op::BvXor => {
                let ok = match op {
                    Op::BvNot => n == 1,
                    Op::BvSub => n == 2,
                    _ => n >= 2,
                };
                self.arity(s, op, args, ok)?;
                let context = context.filter(|c| !c.is_bool());
                let sort = self.unify(args, context, s)?;
                if sort.is_bool() {
                    return Err(self.sort_error(s, Sort::BitVec(1), sort).with_bv_expected());
                }
                let es = args
                    .iter()
                    .map(|a| self.expect(a, sort))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((Expr::app(op, es), sort))
            }
            Op::BvUle | Op::BvUlt | Op::BvUge | Op::BvUgt => {
                self.arity(s, op, args, n == 2)?;
                let sort = self.unify(args, None, s)?;
                if sort.is_bool() {
                    return Err(self.sort_error(s, Sort::BitVec(1), sort).with_bv_expected());
                }
                let a = self.expect(&args[0], sort)?;
                let b = self.expect(&args[1], sort)?;
                Ok((Expr::app(op, vec![a, b]), Sort::Bool))
            }
        }
    }
}

impl ParseError {
    fn with_bv_expected(mut self) -> Self {
        if let ParseErrorKind::Sort { expected, .. } = &mut self.kind {
            *expected = "(bv _)".to_string();
        }
        self
    }
}

/// `#x..` (4 bits per digit) or `#b..` (1 bit per digit).
fn sized_literal(s: &Sexp, a: &str) -> Result<Value, ParseError> {
    let (radix, digits, per_digit) = if let Some(d) = a.strip_prefix("#x") {
        (16, d, 4)
    } else if let Some(d) = a.strip_prefix("#b") {
        (2, d, 1)
    } else {
        return Err(syntax(
            s.span,
            format!("malformed literal `{a}`; expected #x.. or #b.."),
        ));
    };
    let width = digits.len() as u32 * per_digit;
    if digits.is_empty() || width > 64 {
        return Err(syntax(s.span, format!("literal `{a}` must have 1..=64 bits")));
    }
    let bits = u64::from_str_radix(digits, radix).map_err(|_| syntax(s.span, format!("malformed literal `{a}`")))?;
    Ok(Value::bv(width as u8, bits))
}
