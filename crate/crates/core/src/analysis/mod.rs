//! Subfunction counting.
//!
//! For a partition `(X_A, X_B)` of the variables, `N^π(f)` counts the
//! distinct functions of `X_B` obtained by fixing `X_A` in every possible
//! way. `N^θ(f)` is the maximum over prefix cuts of an order and `N(f)` the
//! minimum of that over all orders.

mod bounds;
mod classify;
mod distinguish;

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::AnalysisError;
use crate::program::{Assignment, LeveledProgram, TruthTable, VariableOrder};

pub use bounds::{ak13_bound, check_ak13, hierarchy_gap, saf_lower_bound, Ak13Verdict, HierarchyGap};
pub use classify::{classify_partition, Classification};
pub use distinguish::{
    block_split_partition, designed_pair, distinguish, DistinguishConfig, DistinguishOutcome, Phase,
};

/// Largest arity accepted by [`census_pi`] and [`census_theta`].
pub const CENSUS_LIMIT: usize = 20;
/// Largest arity accepted by [`census_global`].
pub const GLOBAL_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolFunction {
    table: TruthTable,
}

impl BoolFunction {
    pub fn from_table(table: TruthTable) -> Self {
        BoolFunction { table }
    }

    pub fn from_fn(n: usize, f: impl Fn(&Assignment) -> bool + Sync) -> Self {
        BoolFunction { table: TruthTable::from_fn(n, f) }
    }

    pub fn from_program(program: &LeveledProgram) -> Result<Self, AnalysisError> {
        Ok(BoolFunction { table: program.truth_table_with_limit(CENSUS_LIMIT)? })
    }

    pub fn arity(&self) -> usize {
        self.table.arity()
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub fn value(&self, index: usize) -> bool {
        self.table.get(index)
    }
}

/// A prefix cut of an order: `X_A` is the first `cut` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    order: VariableOrder,
    cut: usize,
}

impl Partition {
    pub fn new(order: VariableOrder, cut: usize) -> Result<Self, AnalysisError> {
        let n = order.len();
        if cut == 0 || cut >= n {
            return Err(AnalysisError::BadPartition(format!("cut {cut} is outside 1..={}", n.saturating_sub(1))));
        }
        Ok(Partition { order, cut })
    }

    pub fn order(&self) -> &VariableOrder {
        &self.order
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    /// Variables of `X_A` in increasing index order.
    pub fn x_a(&self) -> Vec<usize> {
        let mut v = self.order.as_slice()[..self.cut].to_vec();
        v.sort_unstable();
        v
    }

    pub fn x_b(&self) -> Vec<usize> {
        let mut v = self.order.as_slice()[self.cut..].to_vec();
        v.sort_unstable();
        v
    }

    /// Membership flags for `X_A`.
    pub fn in_a(&self) -> Vec<bool> {
        let mut flags = vec![false; self.order.len()];
        for &v in &self.order.as_slice()[..self.cut] {
            flags[v] = true;
        }
        flags
    }
}

/// A fixing of some variables: `vars[i]` takes `bits[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Restriction {
    vars: Vec<usize>,
    bits: Vec<bool>,
}

impl Restriction {
    pub fn new(vars: Vec<usize>, bits: Vec<bool>) -> Result<Self, AnalysisError> {
        if vars.len() != bits.len() {
            return Err(AnalysisError::BadRestriction(format!("{} variables but {} bits", vars.len(), bits.len())));
        }
        let mut pairs: Vec<(usize, bool)> = vars.into_iter().zip(bits).collect();
        pairs.sort_unstable_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(AnalysisError::BadRestriction("variable fixed twice".into()));
        }
        let (vars, bits) = pairs.into_iter().unzip();
        Ok(Restriction { vars, bits })
    }

    /// Reads the values of `vars` out of a full input.
    pub fn project(input: &Assignment, vars: &[usize]) -> Self {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        let bits = vars.iter().map(|&v| input.get(v)).collect();
        Restriction { vars, bits }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn apply(&self, input: &mut Assignment) {
        for (&v, &b) in self.vars.iter().zip(&self.bits) {
            input.set(v, b);
        }
    }
}

fn guard(what: &'static str, n: usize, limit: usize) -> Result<(), AnalysisError> {
    if n > limit {
        return Err(AnalysisError::Arity { what, n, limit });
    }
    Ok(())
}

/// Table offsets of every assignment to `vars` (bit `i` of the counter goes to `vars[i]`).
fn scatter(vars: &[usize]) -> Vec<usize> {
    (0..1usize << vars.len())
        .map(|c| vars.iter().enumerate().filter(|(i, _)| c >> i & 1 == 1).map(|(_, &v)| 1 << v).sum())
        .collect()
}

/// Number of distinct subfunctions when the variables in `a_mask` are fixed.
/// Subfunctions are compared as tables over the remaining variables in
/// increasing index order.
pub fn census_set(f: &BoolFunction, a_mask: u64) -> usize {
    let n = f.arity();
    let a_vars: Vec<usize> = (0..n).filter(|&v| a_mask >> v & 1 == 1).collect();
    let b_vars: Vec<usize> = (0..n).filter(|&v| a_mask >> v & 1 == 0).collect();
    let a_off = scatter(&a_vars);
    let b_off = scatter(&b_vars);
    let words = b_off.len().div_ceil(64);
    let subtables: Vec<Vec<u64>> = a_off
        .par_iter()
        .map(|&base| {
            let mut t = vec![0u64; words];
            for (s, &off) in b_off.iter().enumerate() {
                if f.value(base | off) {
                    t[s / 64] |= 1 << (s % 64);
                }
            }
            t
        })
        .collect();
    subtables.into_iter().collect::<HashSet<_>>().len()
}

pub fn census_pi(f: &BoolFunction, pi: &Partition) -> Result<usize, AnalysisError> {
    guard("census", f.arity(), CENSUS_LIMIT)?;
    check_order(f, pi.order())?;
    let mask = pi.x_a().iter().fold(0u64, |m, &v| m | 1 << v);
    Ok(census_set(f, mask))
}

fn check_order(f: &BoolFunction, order: &VariableOrder) -> Result<(), AnalysisError> {
    if order.len() != f.arity() {
        return Err(AnalysisError::BadPartition(format!(
            "order over {} variables for a function of arity {}",
            order.len(),
            f.arity()
        )));
    }
    Ok(())
}

/// Which prefix cuts count as partitions agreeing with an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutRange {
    /// `1 <= u <= n - 1`.
    #[default]
    Inclusive,
    /// `1 < u < n`, excluding single-variable prefixes.
    Strict,
}

impl CutRange {
    fn admits(self, size: usize, n: usize) -> bool {
        let lo = match self {
            CutRange::Inclusive => 1,
            CutRange::Strict => 2,
        };
        size >= lo && size < n
    }
}

/// Maximum of `N^π` over the prefix cuts of `order`; 1 when no cut exists.
pub fn census_theta(f: &BoolFunction, order: &VariableOrder) -> Result<usize, AnalysisError> {
    census_theta_with(f, order, CutRange::Inclusive)
}

pub fn census_theta_with(f: &BoolFunction, order: &VariableOrder, range: CutRange) -> Result<usize, AnalysisError> {
    guard("census", f.arity(), CENSUS_LIMIT)?;
    check_order(f, order)?;
    let n = f.arity();
    let mut mask = 0u64;
    let mut best = 1;
    for (u, &v) in order.as_slice().iter().enumerate() {
        mask |= 1 << v;
        if range.admits(u + 1, n) {
            best = best.max(census_set(f, mask));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    /// `N(f)`.
    pub n_global: usize,
    /// An order achieving the minimum.
    pub order: VariableOrder,
    /// A cut of `order` at which the maximum is reached.
    pub worst_cut: Option<usize>,
}

pub fn census_global(f: &BoolFunction) -> Result<Census, AnalysisError> {
    census_global_with(f, CutRange::Inclusive)
}

/// Minimum over orders of the maximum prefix census, as a bottleneck path
/// through the subset lattice: `N^π` depends only on the set `X_A`, so an
/// order is a chain `∅ ⊂ S_1 ⊂ … ⊂ X` and its cost is the largest census
/// among the admitted interior sets.
pub fn census_global_with(f: &BoolFunction, range: CutRange) -> Result<Census, AnalysisError> {
    let n = f.arity();
    guard("global census", n, GLOBAL_LIMIT)?;
    let full = (1usize << n) - 1;
    let cost: Vec<usize> = (0..=full)
        .map(|s| if range.admits(s.count_ones() as usize, n) { census_set(f, s as u64) } else { 0 })
        .collect();
    let mut best = vec![0usize; full + 1];
    let mut choice = vec![0usize; full + 1];
    for s in 1..=full {
        let (mut b, mut c) = (usize::MAX, 0);
        for v in (0..n).filter(|&v| s >> v & 1 == 1) {
            let cand = best[s & !(1 << v)].max(cost[s]);
            if cand < b {
                b = cand;
                c = v;
            }
        }
        best[s] = b;
        choice[s] = c;
    }
    let mut rev = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s];
        rev.push(v);
        s &= !(1 << v);
    }
    rev.reverse();
    let order = VariableOrder::new(rev).expect("chain visits each variable once");
    let n_global = best[full].max(1);
    let mut mask = 0usize;
    let mut worst_cut = None;
    for (u, &v) in order.as_slice().iter().enumerate() {
        mask |= 1 << v;
        if cost[mask] == n_global && range.admits(u + 1, n) && worst_cut.is_none() {
            worst_cut = Some(u + 1);
        }
    }
    Ok(Census { n_global, order, worst_cut })
}
