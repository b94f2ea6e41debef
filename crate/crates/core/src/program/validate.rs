use std::fmt;

use super::{Edge, LeveledProgram, Test};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A node tests a variable other than its level's label.
    NonOblivious { level: usize, index: usize, var: usize, level_var: usize },
    /// A layer labels two levels with the same variable.
    RepeatedVariable { layer: usize, var: usize },
    /// A layer's level labels are not a subsequence of the shared order.
    OrderMismatch { layer: usize },
    /// A node-to-node edge skips past the next level. Sinks sit outside the
    /// levels and may be reached from any level.
    SkippedLevel { level: usize, index: usize, target: Edge },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonOblivious { level, index, var, level_var } => {
                write!(f, "non-oblivious level {level}: node {index} tests x{var}, level tests x{level_var}")
            }
            Violation::RepeatedVariable { layer, var } => {
                write!(f, "variable repeated within layer {layer}: x{var}")
            }
            Violation::OrderMismatch { layer } => {
                write!(f, "layer {layer} disagrees with the shared variable order")
            }
            Violation::SkippedLevel { level, index, target } => {
                write!(f, "edge from ({level}, {index}) to {target:?} crosses more than one level")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the k-OBDD rules: obliviousness, read-once per layer, one shared
/// order for all layers, and edges into the next level only.
pub fn validate_kobdd(program: &LeveledProgram) -> Diagnostics {
    let mut violations = Vec::new();
    let positions = program.order().positions();

    for (layer_idx, layer) in program.layers().iter().enumerate() {
        let mut seen = vec![false; program.n()];
        let mut prev_pos: Option<usize> = None;
        let mut in_order = true;
        for level in &layer.levels {
            if seen[level.var] {
                violations.push(Violation::RepeatedVariable { layer: layer_idx, var: level.var });
            }
            seen[level.var] = true;
            let pos = positions[level.var];
            if prev_pos.is_some_and(|p| pos <= p) {
                in_order = false;
            }
            prev_pos = Some(pos);
        }
        // A repeated variable already breaks strict monotonicity; report it once.
        if !in_order
            && !violations.iter().any(|v| matches!(v, Violation::RepeatedVariable { layer, .. } if *layer == layer_idx))
        {
            violations.push(Violation::OrderMismatch { layer: layer_idx });
        }
    }

    for (g, level) in program.levels() {
        for (i, node) in level.nodes.iter().enumerate() {
            if let Test::Var(v) = node.test {
                if v != level.var {
                    violations.push(Violation::NonOblivious { level: g, index: i, var: v, level_var: level.var });
                }
            }
            for target in [node.lo, node.hi] {
                let ok = match target {
                    Edge::Sink(_) => true,
                    Edge::Node { level, .. } => level == g + 1,
                };
                if !ok {
                    violations.push(Violation::SkippedLevel { level: g, index: i, target });
                }
            }
        }
    }
    Diagnostics { violations }
}
