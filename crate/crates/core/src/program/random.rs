use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, Layer, Level, LeveledProgram, Node, VariableOrder};

/// Draws a k-OBDD in the identity order with `k` layers of `n` levels.
///
/// Every level holds `w` nodes except the first level of the first layer,
/// which holds only the source. Edge targets are uniform over the next
/// level, or over the two sinks at the final level.
pub fn random_kobdd(k: usize, w: usize, n: usize, seed: u64) -> LeveledProgram {
    assert!(k >= 1 && w >= 1 && n >= 1, "random_kobdd needs k, w, n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = k * n;
    let mut layers = Vec::with_capacity(k);
    for layer in 0..k {
        let mut levels = Vec::with_capacity(n);
        for var in 0..n {
            let g = layer * n + var;
            let count = if g == 0 { 1 } else { w };
            let draw = |rng: &mut ChaCha8Rng| {
                if g + 1 == total {
                    Edge::Sink(rng.gen())
                } else {
                    Edge::node(g + 1, rng.gen_range(0..w))
                }
            };
            let nodes = (0..count)
                .map(|_| {
                    let lo = draw(&mut rng);
                    let hi = draw(&mut rng);
                    Node::test(var, lo, hi)
                })
                .collect();
            levels.push(Level { var, nodes });
        }
        layers.push(Layer { levels });
    }
    LeveledProgram::new(n, VariableOrder::identity(n), layers).expect("generator emits well-formed programs")
}
