use std::fmt::Write;

use super::{Edge, LeveledProgram, Test};

fn node_name(program: &LeveledProgram, level: usize, index: usize) -> String {
    let r = program.level_ref(level);
    format!("L{}_V{}_N{}", r.layer, r.local, index)
}

fn target_name(program: &LeveledProgram, edge: Edge) -> String {
    match edge {
        Edge::Sink(b) => format!("sink{}", b as u8),
        Edge::Node { level, index } => node_name(program, level, index),
    }
}

/// Renders the program as Graphviz text: one cluster per layer, nodes
/// named `L<layer>_V<level>_N<index>`, 0-edges dashed, 1-edges solid,
/// pass-through nodes with a single unlabeled-branch edge, sinks as boxes.
/// Only sinks that some edge reaches are emitted.
pub fn export_dot(program: &LeveledProgram) -> String {
    let mut out = String::new();
    let mut sinks = [false; 2];
    writeln!(out, "digraph kobdd {{").unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    for (layer_idx, layer) in program.layers().iter().enumerate() {
        let start = program.layer_start(layer_idx);
        writeln!(out, "  subgraph cluster_L{layer_idx} {{").unwrap();
        writeln!(out, "    label=\"layer {layer_idx}\";").unwrap();
        for (local, level) in layer.levels.iter().enumerate() {
            for (i, node) in level.nodes.iter().enumerate() {
                let label = match node.test {
                    Test::Var(v) => format!("x{v}"),
                    Test::Pass => "pass".to_string(),
                };
                let label = match &node.role {
                    Some(role) => format!("{label}\\n{role}"),
                    None => label,
                };
                writeln!(out, "    {} [shape=circle, label=\"{label}\"];", node_name(program, start + local, i))
                    .unwrap();
            }
        }
        writeln!(out, "  }}").unwrap();
    }
    for (g, level) in program.levels() {
        for (i, node) in level.nodes.iter().enumerate() {
            let from = node_name(program, g, i);
            let edges: &[(Edge, &str)] = match node.test {
                Test::Var(_) => &[(node.lo, "0"), (node.hi, "1")],
                Test::Pass => &[(node.lo, "*")],
            };
            for &(edge, label) in edges {
                if let Edge::Sink(b) = edge {
                    sinks[b as usize] = true;
                }
                let style = if label == "0" { "dashed" } else { "solid" };
                writeln!(out, "  {from} -> {} [label=\"{label}\", style={style}];", target_name(program, edge))
                    .unwrap();
            }
        }
    }
    for (b, used) in sinks.iter().enumerate() {
        if *used {
            writeln!(out, "  sink{b} [shape=box, label=\"{b}\"];").unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
