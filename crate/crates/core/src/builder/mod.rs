//! Explicit 2k-OBDD of width at most `3w + 1` for `SAF_{k,w}`.
//!
//! The program uses the natural variable order in all `2k` layers. Layer
//! `2t` computes `Step_1(t)` and layer `2t + 1` computes `Step_2(t)`. A
//! layer enters with the value carried out of the previous layer and scans
//! the blocks in index order:
//!
//! * CHECK states read a block's address bits and track, per carried value,
//!   whether the block still matches the wanted `(t, slot)` address. A
//!   mismatch turns into a dead CHECK that passes over the rest of the
//!   address.
//! * CARRY states pass over the value bits of a block that did not match.
//! * ACCUM states count the value bits of the first matching block mod `w`;
//!   they no longer remember the carried value.
//! * RESULT states hold the layer's answer (or FAIL) and pass through to the
//!   end of the layer. FAIL is carried level by level to sink 0.
//!
//! State names are stored in each node's role tag, so a path through the
//! program can be decoded back into per-layer step values.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{ParamError, ProgramError};
use crate::program::{Assignment, Edge, Layer, Level, LeveledProgram, Node, VariableOrder};
use crate::saf::{BlockLayout, ExtValue, SafParams};

/// Builder state, also the node role tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// Reading an address field for carried value `v`. `live` is the set of
    /// still-possible raw field values (bitmask over the field's targets),
    /// or `None` once the block cannot match.
    Check {
        v: usize,
        live: Option<u8>,
    },
    Accum {
        s: usize,
    },
    Carry {
        v: usize,
    },
    Result(ExtValue),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Check { v, live: Some(m) } => write!(f, "check:v={v}:live={m}"),
            Role::Check { v, live: None } => write!(f, "check:v={v}:dead"),
            Role::Accum { s } => write!(f, "accum:s={s}"),
            Role::Carry { v } => write!(f, "carry:v={v}"),
            Role::Result(r) => write!(f, "result:{r}"),
        }
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("unknown role tag {s:?}");
        let num = |x: &str, prefix: &str| -> Result<usize, String> {
            x.strip_prefix(prefix).and_then(|d| d.parse().ok()).ok_or_else(bad)
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["check", v, "dead"] => Ok(Role::Check { v: num(v, "v=")?, live: None }),
            ["check", v, m] => {
                Ok(Role::Check { v: num(v, "v=")?, live: Some(num(m, "live=")?.try_into().map_err(|_| bad())?) })
            }
            ["accum", x] => Ok(Role::Accum { s: num(x, "s=")? }),
            ["carry", v] => Ok(Role::Carry { v: num(v, "v=")? }),
            ["result", "FAIL"] => Ok(Role::Result(ExtValue::Fail)),
            ["result", r] => Ok(Role::Result(ExtValue::Value(r.parse().map_err(|_| bad())?))),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Next {
    State(Role),
    Sink(bool),
}

/// Raw field values `r < 2^bits` with `r mod modulus == target`.
fn field_targets(bits: usize, modulus: usize, target: usize) -> Vec<usize> {
    (0..1usize << bits).filter(|r| r % modulus == target).collect()
}

fn full_mask(targets: &[usize]) -> u8 {
    ((1u16 << targets.len()) - 1) as u8
}

struct Scheme<'a> {
    layout: &'a BlockLayout,
    layer_count: usize,
}

impl Scheme<'_> {
    fn step_of(&self, layer: usize) -> usize {
        layer / 2
    }

    fn k_targets(&self, layer: usize) -> Vec<usize> {
        let l = self.layout;
        field_targets(l.k_bits, l.k, self.step_of(layer))
    }

    fn w_targets(&self, v: usize) -> Vec<usize> {
        let l = self.layout;
        field_targets(l.w_bits, 2 * l.w, v)
    }

    fn entry(&self, layer: usize, carried: ExtValue) -> Role {
        match carried {
            ExtValue::Fail => Role::Result(ExtValue::Fail),
            ExtValue::Value(v) => Role::Check { v, live: Some(full_mask(&self.k_targets(layer))) },
        }
    }

    /// State after finishing block `p` of `layer`, or the hand-off if the
    /// layer is over.
    fn leave_block(&self, layer: usize, p: usize, role: Role) -> Next {
        if p + 1 < self.layout.block_count {
            return Next::State(role);
        }
        let carried = match role {
            Role::Result(r) => r,
            Role::Check { .. } => ExtValue::Fail,
            other => unreachable!("{other} cannot end a layer"),
        };
        if layer + 1 == self.layer_count {
            Next::Sink(matches!(carried, ExtValue::Value(v) if v > 0))
        } else {
            Next::State(self.entry(layer + 1, carried))
        }
    }

    fn step(&self, layer: usize, local: usize, role: Role, bit: bool) -> Next {
        let l = self.layout;
        let (p, o) = (local / l.a, local % l.a);
        let last_in_block = o + 1 == l.a;
        let within = |r: Role| if last_in_block { self.leave_block(layer, p, r) } else { Next::State(r) };
        match role {
            Role::Check { v, live: Some(mask) } => {
                debug_assert!(o < l.addr_bits);
                let (targets, j, field_end) = if o < l.k_bits {
                    (self.k_targets(layer), o, o + 1 == l.k_bits)
                } else {
                    (self.w_targets(v), o - l.k_bits, o + 1 == l.addr_bits)
                };
                let mut kept = 0u8;
                for (idx, &r) in targets.iter().enumerate() {
                    if mask >> idx & 1 == 1 && ((r >> j) & 1 == 1) == bit {
                        kept |= 1 << idx;
                    }
                }
                if kept == 0 {
                    Next::State(if o + 1 == l.addr_bits { Role::Carry { v } } else { Role::Check { v, live: None } })
                } else if !field_end {
                    Next::State(Role::Check { v, live: Some(kept) })
                } else if o + 1 < l.addr_bits {
                    Next::State(Role::Check { v, live: Some(full_mask(&self.w_targets(v))) })
                } else {
                    Next::State(Role::Accum { s: 0 })
                }
            }
            Role::Check { v, live: None } => Next::State(if o + 1 == l.addr_bits { Role::Carry { v } } else { role }),
            Role::Carry { v } if last_in_block => {
                self.leave_block(layer, p, Role::Check { v, live: Some(full_mask(&self.k_targets(layer))) })
            }
            Role::Carry { .. } => Next::State(role),
            Role::Accum { s } => {
                let s = (s + bit as usize) % l.w;
                if last_in_block {
                    let offset = if layer.is_multiple_of(2) { l.w } else { 0 };
                    self.leave_block(layer, p, Role::Result(ExtValue::Value(s + offset)))
                } else {
                    Next::State(Role::Accum { s })
                }
            }
            Role::Result(_) => within(role),
        }
    }
}

/// Builds the `2k`-layer program for validated parameters.
pub fn build(params: &SafParams) -> Result<LeveledProgram, ParamError> {
    let params = if params.relaxed {
        SafParams::relaxed(params.k, params.w, params.n)?
    } else {
        SafParams::new(params.k, params.w, params.n)?
    };
    let layout = params.layout();
    let n = params.n;
    let scheme = Scheme { layout: &layout, layer_count: 2 * params.k };
    let total = scheme.layer_count * n;

    let mut current = vec![scheme.entry(0, ExtValue::Value(0))];
    let mut layers: Vec<Layer> = Vec::with_capacity(scheme.layer_count);
    for g in 0..total {
        let (layer, local) = (g / n, g % n);
        let moves: Vec<(Next, Next)> = current
            .iter()
            .map(|&r| (scheme.step(layer, local, r, false), scheme.step(layer, local, r, true)))
            .collect();
        let next: Vec<Role> = moves
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter_map(|m| match m {
                Next::State(r) => Some(r),
                Next::Sink(_) => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let edge = |m: Next| match m {
            Next::Sink(b) => Edge::Sink(b),
            Next::State(r) => Edge::node(g + 1, next.binary_search(&r).unwrap()),
        };
        let nodes = current
            .iter()
            .zip(&moves)
            .map(|(role, &(lo, hi))| {
                let node = if lo == hi { Node::pass(edge(lo)) } else { Node::test(local, edge(lo), edge(hi)) };
                node.with_role(role.to_string())
            })
            .collect();
        if local == 0 {
            layers.push(Layer { levels: Vec::with_capacity(n) });
        }
        layers.last_mut().unwrap().levels.push(Level { var: local, nodes });
        current = next;
    }
    Ok(LeveledProgram::new(n, VariableOrder::identity(n), layers).expect("builder emits well-formed programs"))
}

/// Per-layer step values read off the path of `input` through a built
/// program: `[step1(0), step2(0), step1(1), …]`.
pub fn decode_layers(
    program: &LeveledProgram,
    params: &SafParams,
    input: &Assignment,
) -> Result<Vec<ExtValue>, ProgramError> {
    let path = program.path(input)?;
    let n = params.n;
    let layer_count = program.layers().len();
    let role_at = |g: usize| -> Result<Role, ProgramError> {
        let (level, index) = path.nodes[g];
        debug_assert_eq!(level, g);
        let tag = program.node(level, index).role.as_deref().unwrap_or("");
        tag.parse().map_err(ProgramError::Malformed)
    };
    let mut out = Vec::with_capacity(layer_count);
    for layer in 0..layer_count {
        let value = if layer + 1 < layer_count {
            match role_at((layer + 1) * n)? {
                Role::Check { v, .. } => ExtValue::Value(v),
                Role::Result(ExtValue::Fail) => ExtValue::Fail,
                other => return Err(ProgramError::Malformed(format!("unexpected entry role {other}"))),
            }
        } else {
            match role_at(layer_count * n - 1)? {
                Role::Result(r) => r,
                Role::Accum { s } => ExtValue::Value((s + input.get(n - 1) as usize) % params.w),
                Role::Carry { .. } | Role::Check { .. } => ExtValue::Fail,
            }
        };
        out.push(value);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoleCounts {
    pub check: usize,
    pub accum: usize,
    pub carry: usize,
    pub result: usize,
    pub unknown: usize,
}

impl RoleCounts {
    pub fn total(&self) -> usize {
        self.check + self.accum + self.carry + self.result + self.unknown
    }

    fn max(self, o: RoleCounts) -> RoleCounts {
        RoleCounts {
            check: self.check.max(o.check),
            accum: self.accum.max(o.accum),
            carry: self.carry.max(o.carry),
            result: self.result.max(o.result),
            unknown: self.unknown.max(o.unknown),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelReport {
    pub layer: usize,
    pub local: usize,
    pub counts: RoleCounts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplainReport {
    pub levels: Vec<LevelReport>,
    pub max: RoleCounts,
    pub width: usize,
    /// Distinct tags that did not parse as a builder role.
    pub unknown_tags: Vec<String>,
}

/// Counts builder roles per level.
pub fn explain(program: &LeveledProgram) -> ExplainReport {
    let mut levels = Vec::with_capacity(program.level_count());
    let mut max = RoleCounts::default();
    let mut unknown = BTreeSet::new();
    for (g, level) in program.levels() {
        let mut c = RoleCounts::default();
        for node in &level.nodes {
            let tag = node.role.as_deref().unwrap_or("<none>");
            match tag.parse::<Role>() {
                Ok(Role::Check { .. }) => c.check += 1,
                Ok(Role::Accum { .. }) => c.accum += 1,
                Ok(Role::Carry { .. }) => c.carry += 1,
                Ok(Role::Result(_)) => c.result += 1,
                Err(_) => {
                    c.unknown += 1;
                    unknown.insert(tag.to_string());
                }
            }
        }
        max = max.max(c);
        let r = program.level_ref(g);
        levels.push(LevelReport { layer: r.layer, local: r.local, counts: c });
    }
    let width = levels.iter().map(|l| l.counts.total()).max().unwrap_or(0);
    ExplainReport { levels, max, width, unknown_tags: unknown.into_iter().collect() }
}
