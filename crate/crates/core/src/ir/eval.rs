//! Concrete and three-valued evaluation of expressions.

use super::expr::{Expr, ExprKind, Op};
use super::sort::{mask, Value};
use super::state::{State, Valuation};
use super::IrError;

/// Variable lookup for evaluation.
pub trait Env {
    fn current(&self, name: &str) -> Option<Value>;
    fn next(&self, name: &str) -> Option<Value>;
}

/// Lookup over one step: current state, the inputs of that step, and optionally the successor.
pub struct StepEnv<'a> {
    pub state: &'a State,
    pub inputs: &'a Valuation,
    pub next: Option<&'a State>,
}

impl Env for StepEnv<'_> {
    fn current(&self, name: &str) -> Option<Value> {
        self.state.get(name).or_else(|| self.inputs.get(name))
    }

    fn next(&self, name: &str) -> Option<Value> {
        self.next.and_then(|n| n.get(name))
    }
}

impl<F: Fn(&str) -> Option<Value>> Env for F {
    fn current(&self, name: &str) -> Option<Value> {
        self(name)
    }

    fn next(&self, _name: &str) -> Option<Value> {
        None
    }
}

/// Evaluates `e` over a state, its step inputs and an optional successor state.
pub fn eval_expr(e: &Expr, state: &State, inputs: &Valuation, next_state: Option<&State>) -> Result<Value, IrError> {
    eval(
        e,
        &StepEnv {
            state,
            inputs,
            next: next_state,
        },
    )
}

/// Total evaluation; an unbound variable is an internal error.
pub fn eval(e: &Expr, env: &dyn Env) -> Result<Value, IrError> {
    eval_rec(e, env, true).map(|v| v.expect("strict evaluation is total"))
}

pub fn eval_bool(e: &Expr, env: &dyn Env) -> Result<bool, IrError> {
    eval(e, env)?
        .as_bool()
        .ok_or_else(|| IrError::Internal(format!("expected boolean value for {e}")))
}

/// Three-valued evaluation: unbound variables are unknown, and the result is
/// `None` unless the known bindings already determine it.
pub fn eval_partial(e: &Expr, env: &dyn Env) -> Result<Option<Value>, IrError> {
    eval_rec(e, env, false)
}

fn eval_rec(e: &Expr, env: &dyn Env, strict: bool) -> Result<Option<Value>, IrError> {
    let lookup = |v: Option<Value>, n: &str| -> Result<Option<Value>, IrError> {
        match v {
            Some(v) => Ok(Some(v)),
            None if strict => Err(IrError::Unbound(n.to_string())),
            None => Ok(None),
        }
    };
    match e.kind() {
        ExprKind::Const(v) => Ok(Some(*v)),
        ExprKind::Var(n) => lookup(env.current(n), n),
        ExprKind::Next(n) => lookup(env.next(n), n),
        ExprKind::App(op, args) => {
            // Short-circuiting connectives decide on partial information.
            match op {
                Op::And | Op::Or => {
                    let decisive = *op == Op::Or;
                    let mut unknown = false;
                    for a in args {
                        match eval_rec(a, env, strict)? {
                            Some(v) if as_bool(v, e)? == decisive => return Ok(Some(Value::Bool(decisive))),
                            Some(_) => {}
                            None => unknown = true,
                        }
                    }
                    return Ok((!unknown).then_some(Value::Bool(!decisive)));
                }
                Op::Implies => {
                    let a = eval_rec(&args[0], env, strict)?;
                    if a.map(|v| as_bool(v, e)).transpose()? == Some(false) {
                        return Ok(Some(Value::Bool(true)));
                    }
                    let b = eval_rec(&args[1], env, strict)?;
                    return match (a, b) {
                        (_, Some(b)) if as_bool(b, e)? => Ok(Some(Value::Bool(true))),
                        (Some(_), Some(_)) => Ok(Some(Value::Bool(false))),
                        _ => Ok(None),
                    };
                }
                Op::Ite => {
                    let c = eval_rec(&args[0], env, strict)?;
                    return match c {
                        Some(c) => {
                            let branch = if as_bool(c, e)? { &args[1] } else { &args[2] };
                            eval_rec(branch, env, strict)
                        }
                        None => {
                            let t = eval_rec(&args[1], env, strict)?;
                            let f = eval_rec(&args[2], env, strict)?;
                            Ok(if t.is_some() && t == f { t } else { None })
                        }
                    };
                }
                _ => {}
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                match eval_rec(a, env, strict)? {
                    Some(v) => vals.push(v),
                    None => return Ok(None),
                }
            }
            apply(*op, &vals)
                .map(Some)
                .ok_or_else(|| IrError::Internal(format!("ill-sorted operands while evaluating {e}")))
        }
    }
}

fn as_bool(v: Value, ctx: &Expr) -> Result<bool, IrError> {
    v.as_bool()
        .ok_or_else(|| IrError::Internal(format!("expected boolean operand in {ctx}")))
}

/// Applies an operator to fully known operands. `None` on sort mismatch.
pub fn apply(op: Op, vals: &[Value]) -> Option<Value> {
    let bools = || vals.iter().map(|v| v.as_bool()).collect::<Option<Vec<bool>>>();
    let bvs = || -> Option<(u8, Vec<u64>)> {
        let width = match vals.first()? {
            Value::Bv { width, .. } => *width,
            Value::Bool(_) => return None,
        };
        let bits = vals
            .iter()
            .map(|v| match v {
                Value::Bv { width: w, bits } if *w == width => Some(*bits),
                _ => None,
            })
            .collect::<Option<Vec<u64>>>()?;
        Some((width, bits))
    };
    let fold = |f: fn(u64, u64) -> u64| -> Option<Value> {
        let (w, bits) = bvs()?;
        let acc = bits.iter().skip(1).fold(bits[0], |acc, b| f(acc, *b));
        Some(Value::bv(w, acc & mask(w)))
    };
    let cmp = |f: fn(u64, u64) -> bool| -> Option<Value> {
        let (_, bits) = bvs()?;
        (bits.len() == 2).then(|| Value::Bool(f(bits[0], bits[1])))
    };
    match op {
        Op::Not => Some(Value::Bool(!*bools()?.first()?)),
        Op::And => Some(Value::Bool(bools()?.iter().all(|b| *b))),
        Op::Or => Some(Value::Bool(bools()?.iter().any(|b| *b))),
        Op::Implies => {
            let b = bools()?;
            Some(Value::Bool(!b[0] || b[1]))
        }
        Op::Iff => {
            let b = bools()?;
            Some(Value::Bool(b[0] == b[1]))
        }
        Op::Ite => {
            let c = vals.first()?.as_bool()?;
            Some(if c { vals[1] } else { vals[2] })
        }
        Op::Eq => (vals.len() == 2 && vals[0].sort() == vals[1].sort()).then(|| Value::Bool(vals[0] == vals[1])),
        Op::BvAdd => fold(u64::wrapping_add),
        Op::BvSub => fold(u64::wrapping_sub),
        Op::BvMul => fold(u64::wrapping_mul),
        Op::BvAnd => fold(|a, b| a & b),
        Op::BvOr => fold(|a, b| a | b),
        Op::BvXor => fold(|a, b| a ^ b),
        Op::BvNot => {
            let (w, bits) = bvs()?;
            Some(Value::bv(w, !bits[0]))
        }
        Op::BvUle => cmp(|a, b| a <= b),
        Op::BvUlt => cmp(|a, b| a < b),
        Op::BvUge => cmp(|a, b| a >= b),
        Op::BvUgt => cmp(|a, b| a > b),
    }
}
