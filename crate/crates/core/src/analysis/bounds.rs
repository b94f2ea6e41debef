use num_bigint::BigUint;

use super::{census_global, BoolFunction};
use crate::error::AnalysisError;
use crate::program::{validate_kobdd, LeveledProgram};

fn power(base: usize, exp: usize) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

/// Ceiling on `N(f)` for functions computed by a k-OBDD of width `w`:
/// `w^((k-1)w + 1)`.
pub fn ak13_bound(k: usize, w: usize) -> BigUint {
    assert!(k >= 1, "k-OBDD needs at least one layer");
    power(w, (k - 1) * w + 1)
}

/// Floor on `N(SAF_{k,w})`: `w^((k-1)(w-2))`.
pub fn saf_lower_bound(k: usize, w: usize) -> BigUint {
    assert!(k >= 1 && w >= 2);
    power(w, (k - 1) * (w - 2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ak13Verdict {
    /// Layer count of the program.
    pub k: usize,
    /// Width of the program.
    pub w: usize,
    pub census: usize,
    pub bound: BigUint,
    pub holds: bool,
}

/// Computes `N(f)` for the program's function and compares it with the
/// ceiling for the program's own layer count and width.
pub fn check_ak13(program: &LeveledProgram) -> Result<Ak13Verdict, AnalysisError> {
    let diag = validate_kobdd(program);
    if !diag.is_ok() {
        return Err(AnalysisError::NotKobdd(
            diag.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
        ));
    }
    let f = BoolFunction::from_program(program)?;
    let census = census_global(&f)?.n_global;
    let m = program.metrics();
    let bound = ak13_bound(m.layer_count, m.width);
    let holds = BigUint::from(census) <= bound;
    Ok(Ak13Verdict { k: m.layer_count, w: m.width, census, bound, holds })
}

/// Exact comparison between the subfunction floor of the witness function
/// `SAF_{ceil(k/3), ceil(w/4)}` and the ceiling for k-OBDDs of width
/// `floor(w/16) - 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyGap {
    pub k: usize,
    pub w: usize,
    /// `(ceil(k/3), ceil(w/4))`.
    pub witness: (usize, usize),
    /// `floor(w/16) - 3`.
    pub small_width: usize,
    pub lhs: BigUint,
    pub rhs: BigUint,
    pub separated: bool,
    /// `k >= 2` and `w >= 64`.
    pub in_stated_range: bool,
}

impl HierarchyGap {
    pub fn lhs_exponent(&self) -> usize {
        (self.witness.0 - 1) * (self.witness.1 - 2)
    }

    pub fn rhs_exponent(&self) -> usize {
        (self.k - 1) * self.small_width + 1
    }
}

pub fn hierarchy_gap(k: usize, w: usize) -> Result<HierarchyGap, AnalysisError> {
    if k == 0 || w / 16 < 4 {
        return Err(AnalysisError::OutOfRange(format!(
            "hierarchy comparison needs k >= 1 and floor(w/16) - 3 >= 1 (got k = {k}, w = {w})"
        )));
    }
    let witness = (k.div_ceil(3), w.div_ceil(4));
    let small_width = w / 16 - 3;
    let lhs = saf_lower_bound(witness.0, witness.1);
    let rhs = ak13_bound(k, small_width);
    let separated = lhs > rhs;
    Ok(HierarchyGap { k, w, witness, small_width, lhs, rhs, separated, in_stated_range: k >= 2 && w >= 64 })
}
