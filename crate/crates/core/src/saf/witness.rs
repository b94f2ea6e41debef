use rand::seq::SliceRandom;
use rand::Rng;

use super::BlockLayout;
use crate::program::Assignment;

/// Builds inputs block by block: set a block's address `(t, i)` and the
/// number of ones among its value variables. Untouched blocks stay zero,
/// which addresses step 0, slot 0.
#[derive(Debug, Clone)]
pub struct WitnessBuilder<'a> {
    layout: &'a BlockLayout,
    input: Assignment,
}

impl<'a> WitnessBuilder<'a> {
    pub fn new(layout: &'a BlockLayout) -> Self {
        WitnessBuilder { layout, input: Assignment::zeros(layout.n) }
    }

    pub fn from_input(layout: &'a BlockLayout, input: Assignment) -> Self {
        WitnessBuilder { layout, input }
    }

    /// Writes the raw address `(t, i)` into block `p`.
    pub fn address(mut self, p: usize, t: usize, i: usize) -> Self {
        let l = self.layout;
        assert!(t < 1 << l.k_bits && i < 1 << l.w_bits, "address ({t}, {i}) does not fit");
        for j in 0..l.k_bits {
            self.input.set(l.addr_var(p, j), (t >> j) & 1 == 1);
        }
        for j in 0..l.w_bits {
            self.input.set(l.addr_var(p, l.k_bits + j), (i >> j) & 1 == 1);
        }
        self
    }

    /// Sets exactly `ones` value variables of block `p` (the first ones).
    pub fn ones(mut self, p: usize, ones: usize) -> Self {
        let l = self.layout;
        assert!(ones <= l.b);
        for (j, var) in l.value_vars(p).enumerate() {
            self.input.set(var, j < ones);
        }
        self
    }

    /// Address `(t, i)` and value popcount `value` for block `p`.
    pub fn block(self, p: usize, t: usize, i: usize, value: usize) -> Self {
        self.address(p, t, i).ones(p, value)
    }

    pub fn finish(self) -> Assignment {
        self.input
    }
}

/// An input in which every address `(t, i)` is held by exactly one block,
/// with a random assignment of addresses to blocks and random value bits.
/// Every step then finds its block, so the iteration never fails.
pub fn full_chain_input(layout: &BlockLayout, rng: &mut impl Rng) -> Assignment {
    let mut addrs: Vec<(usize, usize)> = (0..layout.k).flat_map(|t| (0..2 * layout.w).map(move |i| (t, i))).collect();
    addrs.shuffle(rng);
    let mut b = WitnessBuilder::new(layout);
    for (p, &(t, i)) in addrs.iter().enumerate() {
        b = b.address(p, t, i);
    }
    let mut x = b.finish();
    for p in 0..layout.block_count {
        for v in layout.value_vars(p) {
            x.set(v, rng.gen());
        }
    }
    x
}
