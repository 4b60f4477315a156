//! Explicit-state breadth-first exploration.
//!
//! This is deliberately independent of the encoder and the solvers: states
//! are enumerated concretely, successor candidates are pruned with
//! three-valued evaluation of the transition formula, and properties are
//! checked as states are discovered, so the first violation found lies at
//! minimal depth.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::ir::{
    eval_bool, eval_partial, Env, Expr, ExprKind, IrError, Op, Sort, State, Trace, TransitionSystem, Valuation, Value,
};

pub const DEFAULT_STATE_CAP: u32 = 20;
pub const MAX_INPUT_BITS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("system has {bits} state bits, oracle cap is {cap}")]
    StateCap { bits: u32, cap: u32 },
    #[error("system has {bits} input bits per step, oracle cap is {MAX_INPUT_BITS}")]
    InputCap { bits: u32 },
    #[error(transparent)]
    Eval(#[from] IrError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// A shortest counterexample.
    Unsafe(Trace),
    SafeWithinExploredSpace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub classification: Classification,
    /// Distinct states discovered.
    pub explored: u64,
    /// Largest BFS level reached (initial states are level 0).
    pub depth: u32,
}

impl OracleResult {
    pub fn shortest(&self) -> Option<&Trace> {
        match &self.classification {
            Classification::Unsafe(t) => Some(t),
            Classification::SafeWithinExploredSpace => None,
        }
    }
}

#[derive(Clone, Copy)]
enum Slot {
    State(usize),
    Input(usize),
}

struct Layout<'s> {
    sys: &'s TransitionSystem,
    states: Vec<(String, Sort)>,
    inputs: Vec<(String, Sort)>,
    slots: HashMap<String, Slot>,
}

impl<'s> Layout<'s> {
    fn new(sys: &'s TransitionSystem, cap: u32) -> Result<Self, OracleError> {
        if sys.state_bits() > cap {
            return Err(OracleError::StateCap {
                bits: sys.state_bits(),
                cap,
            });
        }
        if sys.input_bits() > MAX_INPUT_BITS {
            return Err(OracleError::InputCap { bits: sys.input_bits() });
        }
        let states: Vec<_> = sys.state_vars().map(|v| (v.name.to_string(), v.sort)).collect();
        let inputs: Vec<_> = sys.input_vars().map(|v| (v.name.to_string(), v.sort)).collect();
        let mut slots = HashMap::new();
        for (i, (n, _)) in states.iter().enumerate() {
            slots.insert(n.clone(), Slot::State(i));
        }
        for (i, (n, _)) in inputs.iter().enumerate() {
            slots.insert(n.clone(), Slot::Input(i));
        }
        Ok(Layout {
            sys,
            states,
            inputs,
            slots,
        })
    }

    fn unpack(&self, packed: &[u64]) -> State {
        self.states
            .iter()
            .zip(packed)
            .map(|((n, s), &raw)| (n.as_str(), s.value_from_raw(raw)))
            .collect()
    }

    fn pack(&self, s: &State) -> Option<Vec<u64>> {
        if s.len() != self.states.len() {
            return None;
        }
        self.states.iter().map(|(n, _)| s.get(n).map(Value::raw)).collect()
    }

    fn unpack_inputs(&self, packed: &[u64]) -> Valuation {
        self.inputs
            .iter()
            .zip(packed)
            .map(|((n, s), &raw)| (n.as_str(), s.value_from_raw(raw)))
            .collect()
    }

    fn violates(&self, packed: &[u64]) -> Result<Option<String>, IrError> {
        let cur: Vec<Option<u64>> = packed.iter().map(|&v| Some(v)).collect();
        let env = Frame {
            layout: self,
            cur: &cur,
            inp: &[],
            nxt: &[],
        };
        for p in self.sys.props() {
            if !eval_bool(&p.expr, &env)? {
                return Ok(Some(p.name.to_string()));
            }
        }
        Ok(None)
    }
}

/// Partial valuation of the current state, step inputs and successor.
struct Frame<'a> {
    layout: &'a Layout<'a>,
    cur: &'a [Option<u64>],
    inp: &'a [Option<u64>],
    nxt: &'a [Option<u64>],
}

impl Env for Frame<'_> {
    fn current(&self, name: &str) -> Option<Value> {
        match *self.layout.slots.get(name)? {
            Slot::State(i) => self
                .cur
                .get(i)
                .copied()
                .flatten()
                .map(|r| self.layout.states[i].1.value_from_raw(r)),
            Slot::Input(i) => self
                .inp
                .get(i)
                .copied()
                .flatten()
                .map(|r| self.layout.inputs[i].1.value_from_raw(r)),
        }
    }

    fn next(&self, name: &str) -> Option<Value> {
        match *self.layout.slots.get(name)? {
            Slot::State(i) => self
                .nxt
                .get(i)
                .copied()
                .flatten()
                .map(|r| self.layout.states[i].1.value_from_raw(r)),
            Slot::Input(_) => None,
        }
    }
}

/// A value `(next v)` must take for `e` to hold, if the known bindings fix it.
fn forced_next(e: &Expr, v: &str, env: &dyn Env) -> Result<Option<Value>, IrError> {
    let ExprKind::App(op, args) = e.kind() else {
        return Ok(None);
    };
    match op {
        Op::And => {
            for a in args {
                if let Some(val) = forced_next(a, v, env)? {
                    return Ok(Some(val));
                }
            }
            Ok(None)
        }
        Op::Ite => match eval_partial(&args[0], env)?.and_then(Value::as_bool) {
            Some(c) => forced_next(&args[if c { 1 } else { 2 }], v, env),
            None => Ok(None),
        },
        Op::Eq | Op::Iff => {
            let is_target = |x: &Expr| matches!(x.kind(), ExprKind::Next(n) if &**n == v);
            let other = if is_target(&args[0]) {
                &args[1]
            } else if is_target(&args[1]) {
                &args[0]
            } else {
                return Ok(None);
            };
            eval_partial(other, env)
        }
        _ => Ok(None),
    }
}

struct Search<'a> {
    layout: &'a Layout<'a>,
    formula: &'a Expr,
    cur: Vec<Option<u64>>,
    inp: Vec<Option<u64>>,
    nxt: Vec<Option<u64>>,
    /// Whether we are enumerating initial states (current slots) or
    /// successors (input then next slots).
    init: bool,
}

impl Search<'_> {
    fn frame(&self) -> Frame<'_> {
        Frame {
            layout: self.layout,
            cur: &self.cur,
            inp: &self.inp,
            nxt: &self.nxt,
        }
    }

    fn status(&self) -> Result<Option<bool>, IrError> {
        Ok(eval_partial(self.formula, &self.frame())?.and_then(Value::as_bool))
    }

    fn slot_count(&self) -> usize {
        if self.init {
            self.cur.len()
        } else {
            self.inp.len() + self.nxt.len()
        }
    }

    fn set(&mut self, slot: usize, v: Option<u64>) {
        if self.init {
            self.cur[slot] = v;
        } else if slot < self.inp.len() {
            self.inp[slot] = v;
        } else {
            let n = slot - self.inp.len();
            self.nxt[n] = v;
        }
    }

    fn sort(&self, slot: usize) -> Sort {
        if self.init {
            self.layout.states[slot].1
        } else if slot < self.inp.len() {
            self.layout.inputs[slot].1
        } else {
            self.layout.states[slot - self.inp.len()].1
        }
    }

    /// Calls `emit` for every completion satisfying the formula, in
    /// ascending lexicographic order of the enumerated slots.
    fn each(&mut self, slot: usize, emit: &mut dyn FnMut(&Self) -> Result<(), IrError>) -> Result<(), IrError> {
        match self.status()? {
            Some(false) => return Ok(()),
            _ if slot == self.slot_count() => {
                return if self.status()? == Some(true) {
                    emit(self)
                } else {
                    Ok(())
                };
            }
            _ => {}
        }
        let candidates: Box<dyn Iterator<Item = u64>> = {
            let forced = if !self.init && slot >= self.inp.len() {
                let name = &self.layout.states[slot - self.inp.len()].0;
                forced_next(self.formula, name, &self.frame())?
            } else {
                None
            };
            match forced {
                Some(v) => Box::new(std::iter::once(v.raw())),
                None => Box::new(0..=self.sort(slot).max_raw()),
            }
        };
        for v in candidates {
            self.set(slot, Some(v));
            self.each(slot + 1, emit)?;
        }
        self.set(slot, None);
        Ok(())
    }
}

struct Explored {
    states: Vec<Vec<u64>>,
    /// For each state: predecessor index and the inputs used, or `None` for
    /// initial states.
    parents: Vec<Option<(usize, Vec<u64>)>>,
    depth: Vec<u32>,
}

impl Explored {
    fn trace(&self, layout: &Layout, mut at: usize, violated: Option<String>) -> Trace {
        let mut states = vec![layout.unpack(&self.states[at])];
        let mut inputs = Vec::new();
        while let Some((p, inp)) = &self.parents[at] {
            states.push(layout.unpack(&self.states[*p]));
            inputs.push(layout.unpack_inputs(inp));
            at = *p;
        }
        states.reverse();
        inputs.reverse();
        Trace::new(states, inputs, violated)
    }
}

enum Stop {
    Never,
    AtViolation,
    At(Vec<u64>),
}

/// Index of the state that stopped the search and the property it violates.
type Hit = (usize, Option<String>);

/// Runs BFS; returns the index of the state that stopped it, if any.
fn explore(layout: &Layout, stop: &Stop) -> Result<(Explored, Option<Hit>), OracleError> {
    let sys = layout.sys;
    let mut ex = Explored {
        states: Vec::new(),
        parents: Vec::new(),
        depth: Vec::new(),
    };
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut queue = VecDeque::new();

    let mut discovered = |ex: &mut Explored,
                          queue: &mut VecDeque<usize>,
                          packed: Vec<u64>,
                          parent: Option<(usize, Vec<u64>)>|
     -> Result<Option<(usize, Option<String>)>, IrError> {
        let Entry::Vacant(slot) = index.entry(packed.clone()) else {
            return Ok(None);
        };
        let id = ex.states.len();
        slot.insert(id);
        let depth = parent.as_ref().map_or(0, |(p, _)| ex.depth[*p] + 1);
        ex.states.push(packed);
        ex.parents.push(parent);
        ex.depth.push(depth);
        queue.push_back(id);
        let hit = match stop {
            Stop::Never => None,
            Stop::AtViolation => layout.violates(&ex.states[id])?.map(Some),
            Stop::At(s) => (s == &ex.states[id]).then_some(None),
        };
        Ok(hit.map(|v| (id, v)))
    };

    let n = layout.states.len();
    let mut inits = Vec::new();
    Search {
        layout,
        formula: sys.init(),
        cur: vec![None; n],
        inp: vec![],
        nxt: vec![],
        init: true,
    }
    .each(0, &mut |s| {
        inits.push(s.cur.iter().map(|v| v.expect("complete")).collect::<Vec<u64>>());
        Ok(())
    })?;
    for packed in inits {
        if let Some(hit) = discovered(&mut ex, &mut queue, packed, None)? {
            return Ok((ex, Some(hit)));
        }
    }

    while let Some(id) = queue.pop_front() {
        let mut succs = Vec::new();
        let mut search = Search {
            layout,
            formula: sys.trans(),
            cur: ex.states[id].iter().map(|&v| Some(v)).collect(),
            inp: vec![None; layout.inputs.len()],
            nxt: vec![None; n],
            init: false,
        };
        search.each(0, &mut |s| {
            let inp: Vec<u64> = s.inp.iter().map(|v| v.expect("complete")).collect();
            let nxt: Vec<u64> = s.nxt.iter().map(|v| v.expect("complete")).collect();
            succs.push((nxt, inp));
            Ok(())
        })?;
        for (nxt, inp) in succs {
            if let Some(hit) = discovered(&mut ex, &mut queue, nxt, Some((id, inp)))? {
                return Ok((ex, Some(hit)));
            }
        }
    }
    Ok((ex, None))
}

/// Shortest counterexample by breadth-first search, or exhaustion of the
/// reachable state space. `cap` bounds the total state bits.
pub fn bfs_check(sys: &TransitionSystem, cap: u32) -> Result<OracleResult, OracleError> {
    let layout = Layout::new(sys, cap)?;
    let (ex, hit) = explore(&layout, &Stop::AtViolation)?;
    let depth = ex.depth.iter().copied().max().unwrap_or(0);
    let classification = match hit {
        Some((id, violated)) => Classification::Unsafe(ex.trace(&layout, id, violated)),
        None => Classification::SafeWithinExploredSpace,
    };
    Ok(OracleResult {
        classification,
        explored: ex.states.len() as u64,
        depth,
    })
}

/// Whether `s` is reachable from some initial state.
pub fn reachable(sys: &TransitionSystem, s: &State, cap: u32) -> Result<bool, OracleError> {
    let layout = Layout::new(sys, cap)?;
    let Some(packed) = layout.pack(s) else {
        return Err(IrError::Internal(format!("{s} does not bind exactly the state variables")).into());
    };
    Ok(explore(&layout, &Stop::At(packed))?.1.is_some())
}

/// Every reachable state, in BFS discovery order.
pub fn reachable_states(sys: &TransitionSystem, cap: u32) -> Result<Vec<State>, OracleError> {
    let layout = Layout::new(sys, cap)?;
    let (ex, _) = explore(&layout, &Stop::Never)?;
    Ok(ex.states.iter().map(|p| layout.unpack(p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{generate_benchmark, parse, BenchmarkSpec};
    use crate::ir::replay_trace;

    fn xs(t: &Trace) -> Vec<u64> {
        t.states.iter().map(|s| s.get("x").unwrap().raw()).collect()
    }

    #[test]
    fn chain5_shortest() {
        let sys = generate_benchmark(&BenchmarkSpec::chain_bug(5)).unwrap();
        let r = bfs_check(&sys, DEFAULT_STATE_CAP).unwrap();
        let t = r.shortest().unwrap();
        assert_eq!(xs(t), [0, 1, 2, 3, 4, 5]);
        assert!(replay_trace(&sys, t).is_valid());
    }

    #[test]
    fn initial_violation() {
        let sys =
            parse("(system (var x (bv 2)) (init (= x 0)) (trans (= (next x) x)) (prop p (not (= x 0))) (halt false))")
                .unwrap();
        let r = bfs_check(&sys, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(xs(r.shortest().unwrap()), [0]);
    }

    #[test]
    fn saturating_counter_explores_eight() {
        let sys = parse("(system (var x (bv 4)) (init (= x 0)) (trans (= (next x) (ite (bvuge x 7) x (bvadd x 1)))) (prop p (bvule x 7)) (halt false))").unwrap();
        let r = bfs_check(&sys, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(r.classification, Classification::SafeWithinExploredSpace);
        assert_eq!(r.explored, 8);
        assert_eq!(r.depth, 7);
    }

    #[test]
    fn reachability_queries() {
        let chain = generate_benchmark(&BenchmarkSpec::chain_bug(5)).unwrap();
        let x = |v| -> State { [("x", Value::bv(3, v))].into_iter().collect() };
        assert!(reachable(&chain, &x(3), DEFAULT_STATE_CAP).unwrap());
        assert!(reachable(&chain, &x(0), DEFAULT_STATE_CAP).unwrap());
        let ident =
            parse("(system (var x (bv 3)) (init (= x 0)) (trans (= (next x) x)) (prop p (not (= x 1))) (halt false))")
                .unwrap();
        assert!(!reachable(&ident, &x(1), DEFAULT_STATE_CAP).unwrap());
    }

    #[test]
    fn nondeterministic_inputs_are_explored() {
        let sys = generate_benchmark(&BenchmarkSpec::diamond_parity(4)).unwrap();
        let r = bfs_check(&sys, DEFAULT_STATE_CAP).unwrap();
        let t = r.shortest().unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.inputs.len(), 4);
        assert!(replay_trace(&sys, t).is_valid());
    }

    #[test]
    fn caps_are_enforced() {
        let sys =
            parse("(system (var x (bv 30)) (init (= x 0)) (trans (= (next x) x)) (prop p true) (halt false))").unwrap();
        assert!(matches!(
            bfs_check(&sys, DEFAULT_STATE_CAP),
            Err(OracleError::StateCap { bits: 30, cap: 20 })
        ));
    }
}
