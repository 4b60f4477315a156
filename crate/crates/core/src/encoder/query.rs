use std::fmt;

use crate::ir::{Expr, Name, Role, Sort};

/// A variable instantiated at one unrolling step; rendered `base@step`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimedVar {
    pub base: Name,
    pub step: u32,
    pub sort: Sort,
    pub role: Role,
}

impl TimedVar {
    pub fn name(&self) -> String {
        timed_name(&self.base, self.step)
    }
}

pub fn timed_name(base: &str, step: u32) -> String {
    format!("{base}@{step}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    BaseCase,
    ForwardCondition,
    InductiveStep,
    ExtendedBaseCase,
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryKind::BaseCase => "base",
            QueryKind::ForwardCondition => "forward",
            QueryKind::InductiveStep => "inductive",
            QueryKind::ExtendedBaseCase => "extended-base",
        })
    }
}

/// What a selector records when it is true in a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MarkerTag {
    /// Some property is violated at `depth` after a valid path.
    Violation { depth: u32 },
    /// The state at `depth` equals target `target` after a valid path.
    TargetMatch { depth: u32, target: u32 },
}

impl MarkerTag {
    pub fn depth(&self) -> u32 {
        match self {
            MarkerTag::Violation { depth } | MarkerTag::TargetMatch { depth, .. } => *depth,
        }
    }

    /// Selector name; `%` never occurs in identifiers, so it cannot collide.
    pub fn selector_name(&self) -> String {
        match self {
            MarkerTag::Violation { depth } => format!("viol%{depth}"),
            MarkerTag::TargetMatch { depth, target } => format!("tgt%{depth}%{target}"),
        }
    }
}

/// Boolean selector defined as `name = def`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marker {
    pub name: String,
    pub tag: MarkerTag,
    pub def: Expr,
}

/// A satisfiability question over timed variables.
///
/// `assertion` may reference marker names as boolean variables; each marker
/// is constrained to equal its definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub k: u32,
    pub decls: Vec<TimedVar>,
    pub markers: Vec<Marker>,
    pub assertion: Expr,
}

impl Query {
    pub fn marker(&self, name: &str) -> Option<&Marker> {
        self.markers.iter().find(|m| m.name == name)
    }

    /// Bits of all timed variables sharing the widest step.
    pub fn max_step_bits(&self) -> u32 {
        let mut per_step: std::collections::BTreeMap<u32, u32> = Default::default();
        for d in &self.decls {
            *per_step.entry(d.step).or_default() += d.sort.bits();
        }
        per_step.values().copied().max().unwrap_or(0)
    }

    pub fn total_bits(&self) -> u32 {
        self.decls.iter().map(|d| d.sort.bits()).sum()
    }
}
