//! JSON program documents.
//!
//! ```text
//! { "version": 1, "n": 2, "order": [0, 1],
//!   "layers": [ [ { "var": 0, "nodes": [ { "var": 0, "lo": "sink0", "hi": [1, 0] } ] }, ... ] ],
//!   "sinks": ["sink0", "sink1"] }
//! ```
//!
//! A node carries either `"var": j` or `"pass": true`, plus an optional
//! `"role"`. Edge references are `[global level, index]` pairs or the
//! strings `"sink0"` / `"sink1"`.

use serde::{Deserialize, Serialize};

use super::{Edge, Layer, Level, LeveledProgram, Node, Test, VariableOrder};
use crate::error::ProgramError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramDoc {
    version: u32,
    n: usize,
    order: Vec<usize>,
    layers: Vec<Vec<LevelDoc>>,
    sinks: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelDoc {
    var: usize,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pass: bool,
    lo: EdgeDoc,
    hi: EdgeDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    role: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeDoc {
    Sink(String),
    Node(usize, usize),
}

impl From<Edge> for EdgeDoc {
    fn from(e: Edge) -> Self {
        match e {
            Edge::Sink(b) => EdgeDoc::Sink(if b { "sink1" } else { "sink0" }.to_string()),
            Edge::Node { level, index } => EdgeDoc::Node(level, index),
        }
    }
}

impl TryFrom<EdgeDoc> for Edge {
    type Error = ProgramError;

    fn try_from(e: EdgeDoc) -> Result<Self, Self::Error> {
        match e {
            EdgeDoc::Sink(s) if s == "sink0" => Ok(Edge::Sink(false)),
            EdgeDoc::Sink(s) if s == "sink1" => Ok(Edge::Sink(true)),
            EdgeDoc::Sink(s) => Err(ProgramError::Serde(format!("unknown sink {s:?}"))),
            EdgeDoc::Node(level, index) => Ok(Edge::Node { level, index }),
        }
    }
}

pub fn to_json(program: &LeveledProgram) -> String {
    let doc = ProgramDoc {
        version: FORMAT_VERSION,
        n: program.n(),
        order: program.order().as_slice().to_vec(),
        layers: program
            .layers()
            .iter()
            .map(|layer| {
                layer
                    .levels
                    .iter()
                    .map(|level| LevelDoc {
                        var: level.var,
                        nodes: level
                            .nodes
                            .iter()
                            .map(|node| NodeDoc {
                                var: match node.test {
                                    Test::Var(v) => Some(v),
                                    Test::Pass => None,
                                },
                                pass: node.test == Test::Pass,
                                lo: node.lo.into(),
                                hi: node.hi.into(),
                                role: node.role.clone(),
                            })
                            .collect(),
                    })
                    .collect()
            })
            .collect(),
        sinks: vec!["sink0".into(), "sink1".into()],
    };
    serde_json::to_string(&doc).expect("program documents always serialize")
}

pub fn from_json(text: &str) -> Result<LeveledProgram, ProgramError> {
    let doc: ProgramDoc = serde_json::from_str(text).map_err(|e| ProgramError::Serde(e.to_string()))?;
    if doc.version != FORMAT_VERSION {
        return Err(ProgramError::Serde(format!(
            "unsupported document version {} (expected {FORMAT_VERSION})",
            doc.version
        )));
    }
    if doc.sinks != ["sink0", "sink1"] {
        return Err(ProgramError::Serde(format!("unexpected sinks {:?}", doc.sinks)));
    }
    let order = VariableOrder::new(doc.order)?;
    let mut layers = Vec::with_capacity(doc.layers.len());
    for layer in doc.layers {
        let mut levels = Vec::with_capacity(layer.len());
        for level in layer {
            let nodes = level
                .nodes
                .into_iter()
                .map(|nd| {
                    let test = match (nd.var, nd.pass) {
                        (Some(v), false) => Test::Var(v),
                        (None, true) => Test::Pass,
                        _ => return Err(ProgramError::Serde("node needs exactly one of \"var\" or \"pass\"".into())),
                    };
                    Ok(Node { test, lo: nd.lo.try_into()?, hi: nd.hi.try_into()?, role: nd.role })
                })
                .collect::<Result<Vec<_>, _>>()?;
            levels.push(Level { var: level.var, nodes });
        }
        layers.push(Layer { levels });
    }
    LeveledProgram::new(doc.n, order, layers)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::random_kobdd;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn and_program_document() {
        let text = to_json(&and2());
        assert!(text.contains("\"hi\":[1,0]"));
        assert!(text.contains("\"lo\":\"sink0\""));
        assert_eq!(from_json(&text).unwrap(), and2());
    }

    #[test]
    fn rejects_bad_documents() {
        let text = to_json(&and2());
        assert!(from_json(&text.replace("\"version\":1", "\"version\":9")).is_err());
        assert!(from_json(&text.replace("sink1", "sink7")).is_err());
        assert!(from_json(&text.replace("[1,0]", "[1,5]")).is_err());
        assert!(from_json("{}").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn round_trip_preserves_function(k in 1usize..4, w in 1usize..4, n in 1usize..=12, seed in any::<u64>()) {
            let p = random_kobdd(k, w, n, seed);
            let q = from_json(&to_json(&p)).unwrap();
            prop_assert_eq!(&p, &q);
            prop_assert_eq!(p.truth_table().unwrap(), q.truth_table().unwrap());
        }
    }
}
