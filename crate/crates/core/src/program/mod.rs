//! Leveled oblivious branching programs and k-OBDDs.
//!
//! A [`LeveledProgram`] is a stack of layers, each layer a sequence of
//! levels, each level a row of nodes that all test the level's variable.
//! Levels are numbered globally across layers (layer 0 first), and every
//! edge points either to a node in a later level or to one of the two sinks.
//! The source is node 0 of global level 0.

mod dot;
mod random;
mod serial;
mod table;
mod validate;

use std::fmt;
use std::str::FromStr;

use crate::error::ProgramError;

pub use dot::export_dot;
pub use random::random_kobdd;
pub use serial::{from_json, to_json, FORMAT_VERSION};
pub use table::{TruthTable, DEFAULT_TABLE_LIMIT};
pub use validate::{validate_kobdd, Diagnostics, Violation};

/// A permutation of the variable indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableOrder(Vec<usize>);

impl VariableOrder {
    pub fn new(perm: Vec<usize>) -> Result<Self, ProgramError> {
        let mut seen = vec![false; perm.len()];
        for &v in &perm {
            if v >= perm.len() || seen[v] {
                return Err(ProgramError::Malformed(format!(
                    "order {perm:?} is not a permutation of 0..{}",
                    perm.len()
                )));
            }
            seen[v] = true;
        }
        Ok(VariableOrder(perm))
    }

    pub fn identity(n: usize) -> Self {
        VariableOrder((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of each variable in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }
}

/// What a node does with the level's variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Test {
    Var(usize),
    /// Branch-free node; both edges coincide.
    Pass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Sink(bool),
    /// A node addressed by global level and index within that level.
    Node {
        level: usize,
        index: usize,
    },
}

impl Edge {
    pub fn node(level: usize, index: usize) -> Self {
        Edge::Node { level, index }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub test: Test,
    pub lo: Edge,
    pub hi: Edge,
    /// Free-form annotation; the SAF builder stores its state roles here.
    pub role: Option<String>,
}

impl Node {
    pub fn test(var: usize, lo: Edge, hi: Edge) -> Self {
        Node { test: Test::Var(var), lo, hi, role: None }
    }

    pub fn pass(next: Edge) -> Self {
        Node { test: Test::Pass, lo: next, hi: next, role: None }
    }

    pub fn with_role(mut self, role: impl Into<String>) -> Self {
        self.role = Some(role.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Level {
    pub var: usize,
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layer {
    pub levels: Vec<Level>,
}

/// Location of a level inside the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelRef {
    pub layer: usize,
    pub local: usize,
}

#[derive(Debug, Clone)]
pub struct LeveledProgram {
    n: usize,
    order: VariableOrder,
    layers: Vec<Layer>,
    index: Vec<LevelRef>,
    /// Dense copy of the graph for evaluation, derived from `layers`.
    flat: Vec<FlatNode>,
}

impl PartialEq for LeveledProgram {
    fn eq(&self, other: &Self) -> bool {
        (self.n, &self.order, &self.layers) == (other.n, &other.order, &other.layers)
    }
}

impl Eq for LeveledProgram {}

const SINK0: u32 = u32::MAX - 1;
const SINK1: u32 = u32::MAX;
const NO_VAR: u32 = u32::MAX;

/// Edges are positions in `flat` or one of the two sink codes.
#[derive(Debug, Clone, Copy)]
struct FlatNode {
    var: u32,
    lo: u32,
    hi: u32,
}

fn flatten(layers: &[Layer], index: &[LevelRef]) -> Vec<FlatNode> {
    let level = |g: usize| &layers[index[g].layer].levels[index[g].local];
    let mut offsets = Vec::with_capacity(index.len());
    let mut total = 0usize;
    for g in 0..index.len() {
        offsets.push(total);
        total += level(g).nodes.len();
    }
    let code = |e: Edge| match e {
        Edge::Sink(false) => SINK0,
        Edge::Sink(true) => SINK1,
        Edge::Node { level, index } => (offsets[level] + index) as u32,
    };
    let mut flat: Vec<FlatNode> = (0..index.len())
        .flat_map(|g| level(g).nodes.iter())
        .map(|node| FlatNode {
            var: match node.test {
                Test::Var(v) => v as u32,
                Test::Pass => NO_VAR,
            },
            lo: code(node.lo),
            hi: code(node.hi),
        })
        .collect();
    // Edges only point forward, so a backward sweep sees every target's
    // final form first. Afterwards no edge lands on a pass-through node.
    for i in (0..flat.len()).rev() {
        let skip = |e: u32| if e < SINK0 && flat[e as usize].var == NO_VAR { flat[e as usize].lo } else { e };
        let (lo, hi) = (skip(flat[i].lo), skip(flat[i].hi));
        flat[i].lo = lo;
        flat[i].hi = hi;
    }
    flat
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgramMetrics {
    pub width: usize,
    pub size: usize,
    pub layer_count: usize,
    /// `width * n * layer_count`.
    pub size_ceiling: usize,
    /// Whether `size < width * n * layer_count` holds strictly.
    pub size_bound_holds: bool,
}

/// The nodes visited by one evaluation, source first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<(usize, usize)>,
    pub sink: bool,
}

impl LeveledProgram {
    /// Assembles a program, checking that every reference resolves and that
    /// edges only move forward. The k-OBDD rules themselves are checked by
    /// [`validate_kobdd`].
    pub fn new(n: usize, order: VariableOrder, layers: Vec<Layer>) -> Result<Self, ProgramError> {
        if order.len() != n {
            return Err(ProgramError::Malformed(format!("order has {} entries for {n} variables", order.len())));
        }
        let mut index = Vec::new();
        for (layer, l) in layers.iter().enumerate() {
            for local in 0..l.levels.len() {
                index.push(LevelRef { layer, local });
            }
        }
        let mut program = LeveledProgram { n, order, layers, index, flat: Vec::new() };
        program.check_structure()?;
        if program.size_in_nodes() >= SINK0 as usize {
            return Err(ProgramError::Malformed("program has too many nodes".into()));
        }
        program.flat = flatten(&program.layers, &program.index);
        Ok(program)
    }

    fn check_structure(&self) -> Result<(), ProgramError> {
        let total = self.index.len();
        if total == 0 || self.level(0).nodes.is_empty() {
            return Err(ProgramError::Malformed("program has no source node".into()));
        }
        for g in 0..total {
            let level = self.level(g);
            if level.var >= self.n {
                return Err(ProgramError::Malformed(format!("level {g} tests x{} but n = {}", level.var, self.n)));
            }
            for (i, node) in level.nodes.iter().enumerate() {
                match node.test {
                    Test::Var(v) if v >= self.n => {
                        return Err(ProgramError::Malformed(format!("node ({g}, {i}) tests x{v} but n = {}", self.n)));
                    }
                    Test::Pass if node.lo != node.hi => {
                        return Err(ProgramError::Malformed(format!(
                            "pass-through node ({g}, {i}) has two distinct edges"
                        )));
                    }
                    _ => {}
                }
                for edge in [node.lo, node.hi] {
                    if let Edge::Node { level, index } = edge {
                        if level <= g || level >= total || index >= self.level(level).nodes.len() {
                            return Err(ProgramError::Malformed(format!(
                                "node ({g}, {i}) has dangling or backward edge to ({level}, {index})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &VariableOrder {
        &self.order
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn level_count(&self) -> usize {
        self.index.len()
    }

    pub fn level_ref(&self, global: usize) -> LevelRef {
        self.index[global]
    }

    pub fn level(&self, global: usize) -> &Level {
        let r = self.index[global];
        &self.layers[r.layer].levels[r.local]
    }

    pub fn node(&self, level: usize, index: usize) -> &Node {
        &self.level(level).nodes[index]
    }

    /// Global index of the first level of `layer`.
    pub fn layer_start(&self, layer: usize) -> usize {
        self.layers[..layer].iter().map(|l| l.levels.len()).sum()
    }

    /// Iterates `(global level index, level)` pairs in program order.
    pub fn levels(&self) -> impl Iterator<Item = (usize, &Level)> + '_ {
        (0..self.index.len()).map(move |g| (g, self.level(g)))
    }

    fn size_in_nodes(&self) -> usize {
        self.layers.iter().flat_map(|l| &l.levels).map(|l| l.nodes.len()).sum()
    }

    fn check_arity(&self, input: &Assignment) -> Result<(), ProgramError> {
        if input.len() != self.n {
            return Err(ProgramError::Arity { expected: self.n, got: input.len() });
        }
        Ok(())
    }

    pub fn evaluate(&self, input: &Assignment) -> Result<bool, ProgramError> {
        self.check_arity(input)?;
        let bits = input.bits();
        // Only the source itself can still be a pass-through node.
        let mut at = 0u32;
        loop {
            let node = self.flat[at as usize];
            at = if node.var != NO_VAR && bits[node.var as usize] { node.hi } else { node.lo };
            if at >= SINK0 {
                return Ok(at == SINK1);
            }
        }
    }

    /// Like [`evaluate`](Self::evaluate) but records every visited node.
    pub fn path(&self, input: &Assignment) -> Result<Path, ProgramError> {
        self.check_arity(input)?;
        let bits = input.bits();
        let mut nodes = vec![(0, 0)];
        loop {
            let (level, index) = *nodes.last().unwrap();
            let node = self.node(level, index);
            let edge = match node.test {
                Test::Var(v) if bits[v] => node.hi,
                _ => node.lo,
            };
            match edge {
                Edge::Sink(sink) => return Ok(Path { nodes, sink }),
                Edge::Node { level, index } => nodes.push((level, index)),
            }
        }
    }

    pub fn metrics(&self) -> ProgramMetrics {
        let width = self.levels().map(|(_, l)| l.nodes.len()).max().unwrap_or(0);
        let size = self.levels().map(|(_, l)| l.nodes.len()).sum();
        let layer_count = self.layers.len();
        let size_ceiling = width * self.n * layer_count;
        ProgramMetrics { width, size, layer_count, size_ceiling, size_bound_holds: size < size_ceiling }
    }

    pub fn truth_table(&self) -> Result<TruthTable, ProgramError> {
        self.truth_table_with_limit(DEFAULT_TABLE_LIMIT)
    }

    pub fn truth_table_with_limit(&self, limit: usize) -> Result<TruthTable, ProgramError> {
        if self.n > limit {
            return Err(ProgramError::TooLarge { n: self.n, limit });
        }
        TruthTable::try_from_fn(self.n, |input| self.evaluate(input))
    }
}

/// An input vector; bit `j` is the value of variable `x_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Assignment(vec![true; n])
    }

    /// Binary expansion of `index`: variable `x_j` takes bit `j`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Assignment((0..n).map(|j| (index >> j) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.0[var]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.0[var] = value;
    }

    pub fn flip(&mut self, var: usize) {
        self.0[var] = !self.0[var];
    }
}

impl FromStr for Assignment {
    type Err = ProgramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => {
                    Err(ProgramError::BadAssignment(format!("unexpected character {other:?}; expected '0' or '1'")))
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Assignment)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
