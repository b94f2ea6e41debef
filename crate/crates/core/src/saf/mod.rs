//! Reference semantics of the shuffled address function `SAF_{k,w}`.
//!
//! The `n` inputs are cut into `2kw` equal blocks laid out contiguously.
//! Each block starts with `ceil(log k) + ceil(log 2w)` address bits (step
//! number, then slot within the step) followed by `b` value bits. The
//! function alternates two lookups per step: a slot in `0..w` selects a
//! block whose value popcount (mod `w`) plus `w` names a slot in `w..2w`,
//! which selects another block whose popcount (mod `w`) is carried into the
//! next step. A missing block yields FAIL, which absorbs everything after
//! it and forces the output to 0.

mod witness;

use std::fmt;

use crate::error::{ParamError, ProgramError};
use crate::program::Assignment;

pub use witness::{full_chain_input, WitnessBuilder};

/// `ceil(log2 x)`, with `ceil_log2(1) = 0`.
pub fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

/// Left-hand side of the parameter inequality: `2kw(2w + ceil(log k) + ceil(log 2w))`.
pub fn size_bound(k: usize, w: usize) -> usize {
    2 * k * w * (2 * w + ceil_log2(k) + ceil_log2(2 * w))
}

/// Smallest multiple of `2kw` strictly above [`size_bound`].
pub fn min_valid_n(k: usize, w: usize) -> usize {
    let blocks = 2 * k * w;
    (size_bound(k, w) / blocks + 1) * blocks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SafParams {
    pub k: usize,
    pub w: usize,
    pub n: usize,
    /// Set when the size inequality was waived (tiny experiments only).
    pub relaxed: bool,
}

impl SafParams {
    pub fn new(k: usize, w: usize, n: usize) -> Result<Self, ParamError> {
        if k < 2 || w < 2 {
            return Err(ParamError::TooSmall { k, w });
        }
        let bound = size_bound(k, w);
        let blocks = 2 * k * w;
        let suggest = min_valid_n(k, w).max(n.div_ceil(blocks) * blocks);
        if bound >= n {
            return Err(ParamError::Inequality { bound, n, suggest: min_valid_n(k, w) });
        }
        if !n.is_multiple_of(blocks) {
            return Err(ParamError::Divisibility { blocks, n, suggest });
        }
        Ok(SafParams { k, w, n, relaxed: false })
    }

    /// Parameters that skip the size inequality but keep uniform blocks
    /// with at least one value variable each.
    pub fn relaxed(k: usize, w: usize, n: usize) -> Result<Self, ParamError> {
        if k < 2 || w < 2 {
            return Err(ParamError::TooSmall { k, w });
        }
        let blocks = 2 * k * w;
        if !n.is_multiple_of(blocks) {
            return Err(ParamError::Divisibility { blocks, n, suggest: n.div_ceil(blocks) * blocks });
        }
        let addr_bits = ceil_log2(k) + ceil_log2(2 * w);
        if n / blocks <= addr_bits {
            return Err(ParamError::NoValueBits { n, blocks, addr_bits });
        }
        let relaxed = size_bound(k, w) >= n;
        Ok(SafParams { k, w, n, relaxed })
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout::new(self)
    }
}

/// Geometry of the blocks for one parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    pub k: usize,
    pub w: usize,
    pub n: usize,
    pub block_count: usize,
    /// Variables per block.
    pub a: usize,
    /// Address bits for the step number.
    pub k_bits: usize,
    /// Address bits for the slot within a step.
    pub w_bits: usize,
    pub addr_bits: usize,
    /// Value variables per block.
    pub b: usize,
}

impl BlockLayout {
    pub fn new(params: &SafParams) -> Self {
        let block_count = 2 * params.k * params.w;
        let a = params.n / block_count;
        let k_bits = ceil_log2(params.k);
        let w_bits = ceil_log2(2 * params.w);
        BlockLayout {
            k: params.k,
            w: params.w,
            n: params.n,
            block_count,
            a,
            k_bits,
            w_bits,
            addr_bits: k_bits + w_bits,
            b: a - k_bits - w_bits,
        }
    }

    pub fn block_start(&self, p: usize) -> usize {
        p * self.a
    }

    /// Global index of address variable `y^p_j`.
    pub fn addr_var(&self, p: usize, j: usize) -> usize {
        debug_assert!(j < self.addr_bits);
        p * self.a + j
    }

    /// Global index of value variable `x^p_j`.
    pub fn value_var(&self, p: usize, j: usize) -> usize {
        debug_assert!(j < self.b);
        p * self.a + self.addr_bits + j
    }

    pub fn value_vars(&self, p: usize) -> std::ops::Range<usize> {
        let s = p * self.a + self.addr_bits;
        s..s + self.b
    }

    pub fn block_vars(&self, p: usize) -> std::ops::Range<usize> {
        p * self.a..(p + 1) * self.a
    }

    /// Block index and offset within the block of a global variable.
    pub fn locate(&self, var: usize) -> (usize, usize) {
        (var / self.a, var % self.a)
    }

    pub fn is_value_var(&self, var: usize) -> bool {
        var % self.a >= self.addr_bits
    }

    fn weighted(&self, input: &Assignment, p: usize, from: usize, len: usize) -> usize {
        (0..len).filter(|&j| input.get(self.addr_var(p, from + j))).map(|j| 1 << j).sum()
    }

    /// Step number addressed by block `p`.
    pub fn adr_k(&self, input: &Assignment, p: usize) -> usize {
        self.weighted(input, p, 0, self.k_bits) % self.k
    }

    /// Slot within the step addressed by block `p`.
    pub fn adr_w(&self, input: &Assignment, p: usize) -> usize {
        self.weighted(input, p, self.k_bits, self.w_bits) % (2 * self.w)
    }

    /// Smallest block addressed as slot `i` of step `t`.
    pub fn ind(&self, input: &Assignment, i: usize, t: usize) -> Option<usize> {
        (0..self.block_count).find(|&p| self.adr_k(input, p) == t && self.adr_w(input, p) == i)
    }

    /// Popcount of block `p`'s value variables, mod `w`.
    pub fn block_value(&self, input: &Assignment, p: usize) -> usize {
        self.value_vars(p).filter(|&v| input.get(v)).count() % self.w
    }

    pub fn val(&self, input: &Assignment, i: usize, t: usize) -> ExtValue {
        match self.ind(input, i, t) {
            Some(p) => ExtValue::Value(self.block_value(input, p)),
            None => ExtValue::Fail,
        }
    }

    /// Runs the full iteration and records every step.
    pub fn trace(&self, input: &Assignment) -> StepTrace {
        let mut steps = Vec::with_capacity(self.k);
        let mut carried = ExtValue::Value(0);
        for t in 0..self.k {
            let (step1, block1) = match carried {
                ExtValue::Fail => (ExtValue::Fail, None),
                ExtValue::Value(i) => match self.ind(input, i, t) {
                    Some(p) => (ExtValue::Value(self.block_value(input, p) + self.w), Some(p)),
                    None => (ExtValue::Fail, None),
                },
            };
            let (step2, block2) = match step1 {
                ExtValue::Fail => (ExtValue::Fail, None),
                ExtValue::Value(i) => match self.ind(input, i, t) {
                    Some(p) => (ExtValue::Value(self.block_value(input, p)), Some(p)),
                    None => (ExtValue::Fail, None),
                },
            };
            steps.push(StepRecord { step1, step2, block1, block2 });
            carried = step2;
        }
        let output = matches!(carried, ExtValue::Value(v) if v > 0);
        StepTrace { steps, output }
    }

    /// `Step_1(X, t)` for `t >= -1`.
    pub fn step1(&self, input: &Assignment, t: isize) -> ExtValue {
        if t < 0 {
            return ExtValue::Value(0);
        }
        self.trace(input).steps[t as usize].step1
    }

    /// `Step_2(X, t)` for `t >= -1`.
    pub fn step2(&self, input: &Assignment, t: isize) -> ExtValue {
        if t < 0 {
            return ExtValue::Value(0);
        }
        self.trace(input).steps[t as usize].step2
    }
}

/// `{FAIL} ∪ {0, …, 2w-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtValue {
    Fail,
    Value(usize),
}

impl ExtValue {
    pub fn is_fail(self) -> bool {
        self == ExtValue::Fail
    }

    pub fn value(self) -> Option<usize> {
        match self {
            ExtValue::Value(v) => Some(v),
            ExtValue::Fail => None,
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Fail => f.write_str("FAIL"),
            ExtValue::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub step1: ExtValue,
    pub step2: ExtValue,
    pub block1: Option<usize>,
    pub block2: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace {
    pub steps: Vec<StepRecord>,
    pub output: bool,
}

impl StepTrace {
    /// Blocks consulted by the iteration, in order of use.
    pub fn selected_blocks(&self) -> Vec<usize> {
        self.steps.iter().flat_map(|s| [s.block1, s.block2]).flatten().collect()
    }

    /// Layer results in build order: step1(0), step2(0), step1(1), ...
    pub fn layer_values(&self) -> Vec<ExtValue> {
        self.steps.iter().flat_map(|s| [s.step1, s.step2]).collect()
    }
}

/// Evaluates `SAF_{k,w}` on `input`.
pub fn eval_saf(params: &SafParams, input: &Assignment) -> Result<bool, ProgramError> {
    Ok(trace(params, input)?.output)
}

pub fn trace(params: &SafParams, input: &Assignment) -> Result<StepTrace, ProgramError> {
    if input.len() != params.n {
        return Err(ProgramError::Arity { expected: params.n, got: input.len() });
    }
    Ok(params.layout().trace(input))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p22() -> SafParams {
        SafParams::new(2, 2, 64).unwrap()
    }

    fn set_addr(x: &mut Assignment, l: &BlockLayout, p: usize, bits: &[bool]) {
        for (j, &b) in bits.iter().enumerate() {
            x.set(l.addr_var(p, j), b);
        }
    }

    #[test]
    fn parameter_validation() {
        assert_eq!(size_bound(2, 2), 56);
        assert!(SafParams::new(2, 2, 64).is_ok());
        assert_eq!(SafParams::new(2, 2, 56), Err(ParamError::Inequality { bound: 56, n: 56, suggest: 64 }));
        assert_eq!(SafParams::new(2, 2, 60), Err(ParamError::Divisibility { blocks: 8, n: 60, suggest: 64 }));
        assert_eq!(SafParams::new(1, 2, 64), Err(ParamError::TooSmall { k: 1, w: 2 }));
        assert_eq!(SafParams::new(2, 1, 64), Err(ParamError::TooSmall { k: 2, w: 1 }));
    }

    #[test]
    fn minimal_n_for_grid() {
        assert_eq!(min_valid_n(2, 2), 64);
        assert_eq!(min_valid_n(2, 4), 208);
        assert_eq!(min_valid_n(3, 4), 336);
        assert_eq!(min_valid_n(4, 8), 1472);
    }

    #[test]
    fn layout_geometry() {
        let l = p22().layout();
        assert_eq!((l.block_count, l.a, l.addr_bits, l.b), (8, 8, 3, 5));
        assert_eq!(l.value_var(2, 0), 19);
        assert_eq!(l.locate(19), (2, 3));
        assert!(l.is_value_var(19) && !l.is_value_var(18));
    }

    #[test]
    fn address_functions() {
        let l = p22().layout();
        let zero = Assignment::zeros(64);
        assert_eq!((l.adr_k(&zero, 3), l.adr_w(&zero, 3)), (0, 0));
        let mut x = zero.clone();
        set_addr(&mut x, &l, 3, &[true, false, false]);
        assert_eq!(l.adr_k(&x, 3), 1);
        set_addr(&mut x, &l, 3, &[false, true, true]);
        assert_eq!(l.adr_w(&x, 3), 3);
        set_addr(&mut x, &l, 3, &[true, false, true]);
        assert_eq!(l.adr_w(&x, 3), 2);

        let p32 = SafParams::relaxed(3, 2, 12 * 8).unwrap();
        let l3 = p32.layout();
        let mut y = Assignment::zeros(p32.n);
        set_addr(&mut y, &l3, 4, &[true, true]);
        assert_eq!(l3.adr_k(&y, 4), 0);
    }

    #[test]
    fn ind_and_val() {
        let l = p22().layout();
        let zero = Assignment::zeros(64);
        assert_eq!(l.ind(&zero, 0, 0), Some(0));
        assert_eq!(l.ind(&zero, 1, 0), None);
        assert_eq!(l.val(&zero, 0, 0), ExtValue::Value(0));
        assert_eq!(l.val(&zero, 1, 0), ExtValue::Fail);

        // Only block 5 addresses (t, i) = (1, 3).
        let mut x = zero.clone();
        set_addr(&mut x, &l, 5, &[true, true, true]);
        assert_eq!(l.ind(&x, 3, 1), Some(5));

        let mut y = zero.clone();
        for j in 0..3 {
            y.set(l.value_var(0, j), true);
        }
        assert_eq!(l.val(&y, 0, 0), ExtValue::Value(1));
    }

    #[test]
    fn steps_on_zero_input() {
        let l = p22().layout();
        let zero = Assignment::zeros(64);
        assert_eq!(l.step1(&zero, -1), ExtValue::Value(0));
        assert_eq!(l.step2(&zero, -1), ExtValue::Value(0));
        assert_eq!(l.step1(&zero, 0), ExtValue::Value(2));
        assert_eq!(l.step2(&zero, 0), ExtValue::Fail);
        assert_eq!(l.step1(&zero, 1), ExtValue::Fail);
        assert!(!eval_saf(&p22(), &zero).unwrap());
    }

    #[test]
    fn arity_is_checked() {
        assert_eq!(eval_saf(&p22(), &Assignment::zeros(63)), Err(ProgramError::Arity { expected: 64, got: 63 }));
    }

    #[test]
    fn designed_chain_hits_output_one_then_zero() {
        let params = p22();
        let l = params.layout();
        // step1(0): slot 0 -> value 1 -> step1 = 3; step2(0): slot 3 -> 1;
        // step1(1): slot 1 -> 0 -> 2; step2(1): slot 2 -> 1.
        let build = |last: usize| {
            WitnessBuilder::new(&l).block(0, 0, 0, 1).block(1, 0, 3, 1).block(2, 1, 1, 0).block(3, 1, 2, last).finish()
        };
        let x = build(1);
        let tr = l.trace(&x);
        assert_eq!(
            tr.layer_values().iter().map(|v| v.value()).collect::<Vec<_>>(),
            [Some(3), Some(1), Some(2), Some(1)]
        );
        assert!(eval_saf(&params, &x).unwrap());
        assert!(!eval_saf(&params, &build(0)).unwrap());
    }

    fn any_params() -> impl Strategy<Value = SafParams> {
        prop_oneof![
            Just(SafParams::new(2, 2, 64).unwrap()),
            Just(SafParams::new(3, 2, min_valid_n(3, 2)).unwrap()),
            Just(SafParams::new(2, 3, min_valid_n(2, 3)).unwrap()),
        ]
    }

    fn params_and_input() -> impl Strategy<Value = (SafParams, Assignment)> {
        any_params().prop_flat_map(|p| (Just(p), prop::collection::vec(any::<bool>(), p.n).prop_map(Assignment::new)))
    }

    fn params_and_chain_input() -> impl Strategy<Value = (SafParams, Assignment)> {
        use rand::SeedableRng;
        (any_params(), any::<u64>()).prop_map(|(p, seed)| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x = super::witness::full_chain_input(&p.layout(), &mut rng);
            (p, x)
        })
    }

    proptest! {
        #[test]
        fn fail_absorbs_and_ranges_hold((params, x) in params_and_input()) {
            let tr = params.layout().trace(&x);
            let w = params.w;
            let values = tr.layer_values();
            if let Some(first) = values.iter().position(|v| v.is_fail()) {
                prop_assert!(values[first..].iter().all(|v| v.is_fail()));
                prop_assert!(!tr.output);
            }
            for s in &tr.steps {
                if let Some(v) = s.step1.value() { prop_assert!((w..2 * w).contains(&v)); }
                if let Some(v) = s.step2.value() { prop_assert!(v < w); }
            }
        }

        #[test]
        fn unselected_blocks_do_not_matter((params, x) in params_and_chain_input(), flips in prop::collection::vec(any::<prop::sample::Index>(), 1..8)) {
            let l = params.layout();
            let tr = l.trace(&x);
            let used = tr.selected_blocks();
            // Only blocks after the last consulted one are guaranteed not to
            // change which block `ind` picks.
            let frontier = used.iter().max().map_or(0, |m| m + 1);
            // Chain inputs never fail, so every search stopped at or before `frontier`.
            prop_assert!(!tr.layer_values().iter().any(|v| v.is_fail()));
            let mut y = x.clone();
            for f in flips {
                if frontier < l.block_count {
                    let var = l.block_start(frontier) + f.index(params.n - l.block_start(frontier));
                    y.flip(var);
                }
            }
            prop_assert_eq!(l.trace(&y).output, tr.output);
        }

        #[test]
        fn values_of_unselected_blocks_do_not_matter((params, x) in prop_oneof![params_and_input(), params_and_chain_input()], picks in prop::collection::vec(any::<prop::sample::Index>(), 1..8)) {
            let l = params.layout();
            let tr = l.trace(&x);
            let used = tr.selected_blocks();
            let mut y = x.clone();
            for pick in picks {
                let p = pick.index(l.block_count);
                if !used.contains(&p) {
                    y.flip(l.value_var(p, pick.index(l.b)));
                }
            }
            prop_assert_eq!(l.trace(&y), tr);
        }

        #[test]
        fn block_functions_are_local((params, x) in params_and_input(), p in any::<prop::sample::Index>(), f in any::<prop::sample::Index>()) {
            let l = params.layout();
            let p = p.index(l.block_count);
            let var = f.index(params.n);
            prop_assume!(!l.block_vars(p).contains(&var));
            let mut y = x.clone();
            y.flip(var);
            prop_assert_eq!(l.adr_k(&x, p), l.adr_k(&y, p));
            prop_assert_eq!(l.adr_w(&x, p), l.adr_w(&y, p));
            prop_assert_eq!(l.block_value(&x, p), l.block_value(&y, p));
        }
    }

    #[test]
    fn value_part_is_wide_enough() {
        for k in 2..=6 {
            for w in 2..=10 {
                let p = SafParams::new(k, w, min_valid_n(k, w)).unwrap();
                assert!(p.layout().b > w, "k={k} w={w}");
            }
        }
    }
}
