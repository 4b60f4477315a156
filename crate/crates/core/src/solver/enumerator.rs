//! Exhaustive model search over the timed variables of a query.
//!
//! Variables are assigned in declaration order, each trying values in
//! ascending order, so the first model found is the lexicographically least
//! one. Two things keep the search tractable on long unrollings:
//!
//! * incremental three-valued propagation: assigning a variable updates only
//!   the nodes that become known, and a branch is cut as soon as the
//!   assertion is known false;
//! * failure memoisation: after assigning the `p`-th variable, the rest of the
//!   search depends only on the values of the already-determined nodes that
//!   feed not-yet-determined ones (the "cut"). Cuts that already failed are
//!   not explored again. For unrolled transition systems the cut is
//!   essentially the current state, so the search visits each reachable
//!   state once per depth instead of once per path.

use std::collections::{HashMap, HashSet};

use super::{Model, SatStatus, SolverError, SolverVerdict};
use crate::encoder::Query;
use crate::ir::{mask, Expr, ExprKind, Op, Sort, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum NodeOp {
    Const(u64),
    Var(u32),
    Not,
    And,
    Or,
    Implies,
    Eq,
    Ite,
    Bv(Op),
}

struct Graph {
    ops: Vec<NodeOp>,
    args: Vec<Vec<u32>>,
    width: Vec<u8>,
    level: Vec<u32>,
    parents: Vec<Vec<u32>>,
    root: u32,
    var_nodes: Vec<u32>,
    var_sorts: Vec<Sort>,
    marker_nodes: Vec<u32>,
    /// `cuts[p]`: nodes determined once variables `0..=p` are assigned whose
    /// value still feeds an undetermined node.
    cuts: Vec<Vec<u32>>,
}

struct Builder<'q> {
    graph: Graph,
    interned: HashMap<(NodeOp, Vec<u32>, u8), u32>,
    by_ptr: HashMap<usize, u32>,
    vars: HashMap<String, u32>,
    markers: HashMap<&'q str, &'q Expr>,
    marker_ids: HashMap<&'q str, u32>,
}

impl<'q> Builder<'q> {
    fn node(&mut self, op: NodeOp, args: Vec<u32>, width: u8, level: u32) -> u32 {
        // Width is part of the key: `#b00` and `false` share a raw value.
        let key = (op, args, width);
        if let Some(&id) = self.interned.get(&key) {
            return id;
        }
        let (op, args, width) = key;
        let id = self.graph.ops.len() as u32;
        for &a in &args {
            self.graph.parents[a as usize].push(id);
        }
        self.graph.ops.push(op);
        self.graph.args.push(args.clone());
        self.graph.width.push(width);
        self.graph.level.push(level);
        self.graph.parents.push(Vec::new());
        self.interned.insert((op, args, width), id);
        id
    }

    fn compile(&mut self, e: &'q Expr) -> Result<u32, SolverError> {
        if let Some(&id) = self.by_ptr.get(&e.ptr_id()) {
            return Ok(id);
        }
        let id = match e.kind() {
            ExprKind::Const(v) => {
                let w = match v.sort() {
                    Sort::Bool => 1,
                    Sort::BitVec(w) => w,
                };
                self.node(NodeOp::Const(v.raw()), vec![], w, 0)
            }
            ExprKind::Var(name) => {
                if let Some(&id) = self.vars.get(&**name) {
                    id
                } else if let Some(&id) = self.marker_ids.get(&**name) {
                    id
                } else if let Some(def) = self.markers.get(&**name).copied() {
                    let id = self.compile(def)?;
                    self.marker_ids
                        .insert(self.markers.get_key_value(&**name).unwrap().0, id);
                    id
                } else {
                    return Err(SolverError::Protocol(format!("undeclared name `{name}` in query")));
                }
            }
            ExprKind::Next(n) => return Err(SolverError::Protocol(format!("unrolled query contains (next {n})"))),
            ExprKind::App(op, args) => {
                let ids = args.iter().map(|a| self.compile(a)).collect::<Result<Vec<u32>, _>>()?;
                let level = ids.iter().map(|&i| self.graph.level[i as usize]).max().unwrap_or(0);
                let arg_width = ids.first().map(|&i| self.graph.width[i as usize]).unwrap_or(1);
                let (nop, width) = match op {
                    Op::Not => (NodeOp::Not, 1),
                    Op::And => (NodeOp::And, 1),
                    Op::Or => (NodeOp::Or, 1),
                    Op::Implies => (NodeOp::Implies, 1),
                    Op::Iff | Op::Eq => (NodeOp::Eq, 1),
                    Op::Ite => (NodeOp::Ite, self.graph.width[ids[1] as usize]),
                    op if op.is_bv_cmp() => (NodeOp::Bv(*op), 1),
                    op => (NodeOp::Bv(*op), arg_width),
                };
                self.node(nop, ids, width, level)
            }
        };
        self.by_ptr.insert(e.ptr_id(), id);
        Ok(id)
    }
}

fn build(q: &Query) -> Result<Graph, SolverError> {
    let mut b = Builder {
        graph: Graph {
            ops: Vec::new(),
            args: Vec::new(),
            width: Vec::new(),
            level: Vec::new(),
            parents: Vec::new(),
            root: 0,
            var_nodes: Vec::new(),
            var_sorts: Vec::new(),
            marker_nodes: Vec::new(),
            cuts: Vec::new(),
        },
        interned: HashMap::new(),
        by_ptr: HashMap::new(),
        vars: HashMap::new(),
        markers: q.markers.iter().map(|m| (m.name.as_str(), &m.def)).collect(),
        marker_ids: HashMap::new(),
    };
    for (i, d) in q.decls.iter().enumerate() {
        let width = match d.sort {
            Sort::Bool => 1,
            Sort::BitVec(w) => w,
        };
        let id = b.node(NodeOp::Var(i as u32), vec![], width, i as u32 + 1);
        if b.vars.insert(d.name(), id).is_some() {
            return Err(SolverError::Protocol(format!("duplicate declaration {}", d.name())));
        }
        b.graph.var_nodes.push(id);
        b.graph.var_sorts.push(d.sort);
    }
    let mut marker_nodes = Vec::with_capacity(q.markers.len());
    for m in &q.markers {
        marker_nodes.push(b.compile(&m.def)?);
    }
    let root = b.compile(&q.assertion)?;
    let mut g = b.graph;
    g.root = root;
    g.marker_nodes = marker_nodes;

    let nvars = g.var_nodes.len();
    g.cuts = vec![Vec::new(); nvars];
    for n in 0..g.ops.len() {
        let lvl = g.level[n] as usize;
        if lvl == 0 {
            continue;
        }
        let top = g.parents[n]
            .iter()
            .map(|&p| g.level[p as usize] as usize)
            .max()
            .unwrap_or(0);
        // Known from cut lvl-1 on; needed until the cut before its last parent.
        for cut in (lvl - 1)..top.saturating_sub(1) {
            g.cuts[cut].push(n as u32);
        }
    }
    Ok(g)
}

enum Undo {
    Known(u32),
    True(u32),
    False(u32),
}

struct Search<'g> {
    g: &'g Graph,
    known: Vec<bool>,
    val: Vec<u64>,
    n_true: Vec<u32>,
    n_false: Vec<u32>,
    trail: Vec<Undo>,
    queue: Vec<u32>,
    failed: Vec<HashSet<Vec<u64>>>,
    visited: u64,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph) -> Self {
        let n = g.ops.len();
        Search {
            g,
            known: vec![false; n],
            val: vec![0; n],
            n_true: vec![0; n],
            n_false: vec![0; n],
            trail: Vec::new(),
            queue: Vec::new(),
            failed: vec![HashSet::new(); g.var_nodes.len()],
            visited: 0,
        }
    }

    fn value(&self, n: u32) -> Option<u64> {
        self.known[n as usize].then(|| self.val[n as usize])
    }

    fn evaluate(&self, n: u32) -> Option<u64> {
        let i = n as usize;
        let args = &self.g.args[i];
        let arity = args.len() as u32;
        match self.g.ops[i] {
            NodeOp::Const(v) => Some(v),
            NodeOp::Var(_) => None,
            NodeOp::And => {
                if self.n_false[i] > 0 {
                    Some(0)
                } else {
                    (self.n_true[i] == arity).then_some(1)
                }
            }
            NodeOp::Or => {
                if self.n_true[i] > 0 {
                    Some(1)
                } else {
                    (self.n_false[i] == arity).then_some(0)
                }
            }
            NodeOp::Not => self.value(args[0]).map(|v| v ^ 1),
            NodeOp::Implies => match (self.value(args[0]), self.value(args[1])) {
                (Some(0), _) | (_, Some(1)) => Some(1),
                (Some(_), Some(_)) => Some(0),
                _ => None,
            },
            NodeOp::Eq => match (self.value(args[0]), self.value(args[1])) {
                (Some(a), Some(b)) => Some((a == b) as u64),
                _ => None,
            },
            NodeOp::Ite => match self.value(args[0]) {
                Some(c) => self.value(if c != 0 { args[1] } else { args[2] }),
                None => match (self.value(args[1]), self.value(args[2])) {
                    (Some(a), Some(b)) if a == b => Some(a),
                    _ => None,
                },
            },
            NodeOp::Bv(op) => {
                let m = mask(self.g.width[i]);
                let vals: Vec<Option<u64>> = args.iter().map(|&a| self.value(a)).collect();
                match op {
                    Op::BvAnd | Op::BvMul if vals.contains(&Some(0)) => return Some(0),
                    Op::BvOr if vals.contains(&Some(m)) => return Some(m),
                    _ => {}
                }
                let vals: Vec<u64> = vals.into_iter().collect::<Option<_>>()?;
                let fold = |f: fn(u64, u64) -> u64| vals[1..].iter().fold(vals[0], |a, &b| f(a, b)) & m;
                Some(match op {
                    Op::BvAdd => fold(u64::wrapping_add),
                    Op::BvSub => fold(u64::wrapping_sub),
                    Op::BvMul => fold(u64::wrapping_mul),
                    Op::BvAnd => fold(|a, b| a & b),
                    Op::BvOr => fold(|a, b| a | b),
                    Op::BvXor => fold(|a, b| a ^ b),
                    Op::BvNot => !vals[0] & m,
                    Op::BvUle => (vals[0] <= vals[1]) as u64,
                    Op::BvUlt => (vals[0] < vals[1]) as u64,
                    Op::BvUge => (vals[0] >= vals[1]) as u64,
                    Op::BvUgt => (vals[0] > vals[1]) as u64,
                    other => unreachable!("{other:?} is not a bit-vector operator"),
                })
            }
        }
    }

    fn set(&mut self, n: u32, v: u64) {
        self.known[n as usize] = true;
        self.val[n as usize] = v;
        self.trail.push(Undo::Known(n));
        self.queue.push(n);
    }

    /// Propagates pending nodes; returns false once the assertion is known false.
    fn propagate(&mut self) -> bool {
        while let Some(n) = self.queue.pop() {
            let v = self.val[n as usize];
            for pi in 0..self.g.parents[n as usize].len() {
                let p = self.g.parents[n as usize][pi];
                let pu = p as usize;
                if self.known[pu] {
                    continue;
                }
                match self.g.ops[pu] {
                    NodeOp::And | NodeOp::Or => {
                        if v != 0 {
                            self.n_true[pu] += 1;
                            self.trail.push(Undo::True(p));
                        } else {
                            self.n_false[pu] += 1;
                            self.trail.push(Undo::False(p));
                        }
                    }
                    _ => {}
                }
                if let Some(pv) = self.evaluate(p) {
                    self.set(p, pv);
                }
            }
        }
        self.value(self.g.root) != Some(0)
    }

    fn undo(&mut self, mark: usize) {
        self.queue.clear();
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::Known(n) => self.known[n as usize] = false,
                Undo::True(n) => self.n_true[n as usize] -= 1,
                Undo::False(n) => self.n_false[n as usize] -= 1,
            }
        }
    }

    fn start(&mut self) -> bool {
        for n in 0..self.g.ops.len() as u32 {
            let leafless = self.g.args[n as usize].is_empty();
            if leafless && !matches!(self.g.ops[n as usize], NodeOp::Var(_)) {
                let v = self.evaluate(n).expect("constants evaluate");
                self.set(n, v);
            }
        }
        self.propagate()
    }

    fn assign(&mut self, p: usize, v: u64) -> bool {
        self.set(self.g.var_nodes[p], v);
        self.propagate()
    }

    fn search(&mut self, p: usize) -> bool {
        let nvars = self.g.var_nodes.len();
        if p == nvars {
            return true;
        }
        if self.value(self.g.root) == Some(1) {
            // Every completion is a model; the least one sets the rest to zero.
            for rest in p..nvars {
                self.assign(rest, 0);
            }
            return true;
        }
        let max = self.g.var_sorts[p].max_raw();
        let (mut v, last) = match self.forced(p) {
            Some(f) => (f, f),
            None => (0, max),
        };
        loop {
            self.visited += 1;
            let mark = self.trail.len();
            if self.assign(p, v) {
                let key: Vec<u64> = self.g.cuts[p].iter().map(|&n| self.val[n as usize]).collect();
                if !self.failed[p].contains(&key) {
                    if self.search(p + 1) {
                        return true;
                    }
                    self.failed[p].insert(key);
                }
            }
            self.undo(mark);
            if v == last {
                return false;
            }
            v += 1;
        }
    }

    /// A value variable `p` must take in every model extending the current
    /// assignment, found by probing its equalities with known terms: if
    /// making `(= var t)` false already falsifies the assertion, the only
    /// candidate is the value of `t`. Skipping the other values keeps the
    /// first model found the least one, since none of them has a model.
    fn forced(&mut self, p: usize) -> Option<u64> {
        let var = self.g.var_nodes[p];
        for &eq in &self.g.parents[var as usize] {
            if self.g.ops[eq as usize] != NodeOp::Eq || self.known[eq as usize] {
                continue;
            }
            let args = &self.g.args[eq as usize];
            let other = if args[0] == var { args[1] } else { args[0] };
            let Some(v) = self.value(other) else { continue };
            let mark = self.trail.len();
            self.set(eq, 0);
            let consistent = self.propagate();
            self.undo(mark);
            if !consistent {
                return Some(v);
            }
        }
        None
    }
}

/// Checks `q` by exhaustive search. `cap` bounds the bits of any single
/// unrolling step.
pub fn enumerate(q: &Query, cap: u32) -> Result<SolverVerdict, SolverError> {
    let step_bits = q.max_step_bits();
    if step_bits > cap {
        return Err(SolverError::CapExceeded { bits: step_bits, cap });
    }
    let g = build(q)?;
    let mut s = Search::new(&g);
    let found = s.start() && s.search(0);
    if !found {
        return Ok(SolverVerdict::unsat());
    }
    let mut model = Model::new();
    for (i, d) in q.decls.iter().enumerate() {
        let raw = s.val[g.var_nodes[i] as usize];
        model.insert(d.name(), d.sort.value_from_raw(raw));
    }
    for (m, &node) in q.markers.iter().zip(&g.marker_nodes) {
        let v = s
            .value(node)
            .ok_or_else(|| SolverError::Protocol(format!("selector {} left undetermined", m.name)))?;
        model.insert(m.name.clone(), Value::Bool(v != 0));
    }
    Ok(SolverVerdict {
        status: SatStatus::Sat,
        model: Some(model),
        diagnostic: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{QueryKind, TimedVar};
    use crate::ir::Role;

    fn query(decls: &[(&str, u32, Sort)], assertion: Expr) -> Query {
        Query {
            kind: QueryKind::BaseCase,
            k: 1,
            decls: decls
                .iter()
                .map(|(b, s, sort)| TimedVar {
                    base: (*b).into(),
                    step: *s,
                    sort: *sort,
                    role: Role::StateVar,
                })
                .collect(),
            markers: vec![],
            assertion,
        }
    }

    #[test]
    fn constant_false_is_unsat() {
        let v = enumerate(&query(&[], Expr::bool(false)), 24).unwrap();
        assert_eq!(v.status, SatStatus::Unsat);
    }

    #[test]
    fn reflexive_equality_is_sat_with_least_model() {
        let q = query(
            &[("x", 1, Sort::BitVec(4))],
            Expr::eq(Expr::var("x@1"), Expr::var("x@1")),
        );
        let v = enumerate(&q, 24).unwrap();
        assert_eq!(v.status, SatStatus::Sat);
        assert_eq!(v.model.unwrap().get("x@1"), Some(&Value::bv(4, 0)));
    }

    #[test]
    fn finds_lexicographically_least_model() {
        // x + y = 5 with x > 2: least (x, y) is (3, 2).
        let q = query(
            &[("x", 1, Sort::BitVec(4)), ("y", 1, Sort::BitVec(4))],
            Expr::conj([
                Expr::eq(
                    Expr::binary(Op::BvAdd, Expr::var("x@1"), Expr::var("y@1")),
                    Expr::bv(4, 5),
                ),
                Expr::binary(Op::BvUgt, Expr::var("x@1"), Expr::bv(4, 2)),
            ]),
        );
        let m = enumerate(&q, 24).unwrap().model.unwrap();
        assert_eq!(m.get("x@1"), Some(&Value::bv(4, 3)));
        assert_eq!(m.get("y@1"), Some(&Value::bv(4, 2)));
    }

    #[test]
    fn constants_of_different_widths_stay_apart() {
        // `false` and `#b00` have the same raw value; bvnot must still see two bits.
        let q = query(
            &[("b", 1, Sort::Bool)],
            Expr::conj([
                Expr::eq(Expr::var("b@1"), Expr::bool(false)),
                Expr::eq(Expr::app(Op::BvNot, vec![Expr::bv(2, 0)]), Expr::bv(2, 3)),
            ]),
        );
        assert_eq!(enumerate(&q, 24).unwrap().status, SatStatus::Sat);
    }

    #[test]
    fn cap_applies_per_step() {
        let decls = [("x", 1, Sort::BitVec(20)), ("y", 1, Sort::BitVec(20))];
        let q = query(&decls, Expr::bool(true));
        assert!(matches!(
            enumerate(&q, 24),
            Err(SolverError::CapExceeded { bits: 40, .. })
        ));
        let decls = [("x", 1, Sort::BitVec(20)), ("x", 2, Sort::BitVec(20))];
        assert!(enumerate(&query(&decls, Expr::bool(true)), 24).is_ok());
    }

    #[test]
    fn undeclared_names_are_reported() {
        let q = query(&[], Expr::var("ghost@1"));
        assert!(matches!(enumerate(&q, 24), Err(SolverError::Protocol(_))));
    }
}
