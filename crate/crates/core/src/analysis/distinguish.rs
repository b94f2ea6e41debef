//! Search for an input part `γ` over `X_B` that separates two fixings
//! `σ, σ'` of `X_A`, i.e. a witness that the two subfunctions differ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Partition, Restriction};
use crate::error::AnalysisError;
use crate::program::{Assignment, VariableOrder};
use crate::saf::{BlockLayout, SafParams, WitnessBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistinguishConfig {
    /// Total number of candidate `γ` tried across both phases.
    pub budget: usize,
    pub seed: u64,
}

impl Default for DistinguishConfig {
    fn default() -> Self {
        DistinguishConfig { budget: 100_000, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Structured,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistinguishOutcome {
    Found {
        gamma: Restriction,
        phase: Phase,
        tried: usize,
        relaxed: bool,
    },
    /// Budget exhausted. Inconclusive: the subfunctions may still differ.
    NotFound {
        tried: usize,
        relaxed: bool,
    },
}

impl DistinguishOutcome {
    pub fn gamma(&self) -> Option<&Restriction> {
        match self {
            DistinguishOutcome::Found { gamma, .. } => Some(gamma),
            DistinguishOutcome::NotFound { .. } => None,
        }
    }
}

struct Search<'a> {
    layout: &'a BlockLayout,
    sigma: Assignment,
    sigma_prime: Assignment,
    x_b: Vec<usize>,
    tried: usize,
}

impl Search<'_> {
    /// Tries `gamma`, given as a full input whose `X_B` part is used.
    fn separates(&mut self, gamma: &Assignment) -> bool {
        self.tried += 1;
        let g = Restriction::project(gamma, &self.x_b);
        let mut a = self.sigma.clone();
        let mut b = self.sigma_prime.clone();
        g.apply(&mut a);
        g.apply(&mut b);
        self.layout.trace(&a).output != self.layout.trace(&b).output
    }
}

/// Looks for `γ` with `SAF(σ, γ) ≠ SAF(σ', γ)`.
///
/// The structured phase takes the blocks whose address lies wholly in `X_B`
/// and that keep at least `w - 1` value variables there, gives them the
/// addresses `(t, w..2w)` then `(t, 0..w)` in turn, and walks through their
/// value residues (all of them when they fit in the budget, random ones
/// otherwise). Whatever budget is left goes to uniformly random `γ`.
pub fn distinguish(
    params: &SafParams,
    sigma: &Restriction,
    sigma_prime: &Restriction,
    pi: &Partition,
    config: DistinguishConfig,
) -> Result<DistinguishOutcome, AnalysisError> {
    let layout = params.layout();
    if pi.order().len() != params.n {
        return Err(AnalysisError::BadPartition(format!(
            "partition over {} variables, n = {}",
            pi.order().len(),
            params.n
        )));
    }
    let x_a = pi.x_a();
    for r in [sigma, sigma_prime] {
        if r.vars() != x_a.as_slice() {
            return Err(AnalysisError::BadRestriction("restriction domain differs from X_A".into()));
        }
    }
    if sigma == sigma_prime {
        return Err(AnalysisError::BadRestriction("σ and σ' coincide".into()));
    }
    let x_b = pi.x_b();
    let in_a = pi.in_a();
    let mut base = Assignment::zeros(params.n);
    sigma.apply(&mut base);
    let mut base_prime = Assignment::zeros(params.n);
    sigma_prime.apply(&mut base_prime);
    let mut search = Search { layout: &layout, sigma: base, sigma_prime: base_prime, x_b: x_b.clone(), tried: 0 };
    let relaxed = params.relaxed;
    let found = |gamma: &Assignment, phase, tried| DistinguishOutcome::Found {
        gamma: Restriction::project(gamma, &x_b),
        phase,
        tried,
        relaxed,
    };

    let w = layout.w;
    let controlled: Vec<usize> = (0..layout.block_count)
        .filter(|&p| {
            (0..layout.addr_bits).all(|j| !in_a[layout.addr_var(p, j)])
                && layout.value_vars(p).filter(|&v| !in_a[v]).count() + 1 >= w
        })
        .collect();
    let queries: Vec<(usize, usize)> = (0..layout.k)
        .flat_map(|t| (w..2 * w).map(move |i| (t, i)))
        .chain((0..layout.k).flat_map(|t| (0..w).map(move |i| (t, i))))
        .collect();
    let mut template = WitnessBuilder::new(&layout);
    for (j, &p) in controlled.iter().enumerate() {
        let (t, i) = queries[j % queries.len()];
        template = template.address(p, t, i);
    }
    let template = template.finish();
    let free_values: Vec<Vec<usize>> =
        controlled.iter().map(|&p| layout.value_vars(p).filter(|&v| !in_a[v]).collect()).collect();
    let with_residues = |res: &[usize]| {
        let mut g = template.clone();
        for (vars, &r) in free_values.iter().zip(res) {
            for (j, &v) in vars.iter().enumerate() {
                g.set(v, j < r);
            }
        }
        g
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let structured_budget = config.budget / 2;
    let exhaustive = (w as f64).powi(controlled.len() as i32) <= structured_budget as f64;
    let mut residues = vec![0usize; controlled.len()];
    while search.tried < structured_budget {
        let g = with_residues(&residues);
        if search.separates(&g) {
            return Ok(found(&g, Phase::Structured, search.tried));
        }
        if exhaustive {
            // Mixed-radix increment; stop after the last vector.
            let mut i = 0;
            while i < residues.len() {
                residues[i] += 1;
                if residues[i] < w {
                    break;
                }
                residues[i] = 0;
                i += 1;
            }
            if i == residues.len() {
                break;
            }
        } else {
            for r in residues.iter_mut() {
                *r = rng.gen_range(0..w);
            }
        }
    }

    while search.tried < config.budget {
        let mut g = Assignment::zeros(params.n);
        for &v in &x_b {
            g.set(v, rng.gen());
        }
        if search.separates(&g) {
            return Ok(found(&g, Phase::Random, search.tried));
        }
    }
    Ok(DistinguishOutcome::NotFound { tried: search.tried, relaxed })
}

/// Natural order cut after the first `kw` blocks: `X_A` holds blocks
/// `0..kw` entirely, `X_B` the rest.
pub fn block_split_partition(layout: &BlockLayout) -> Partition {
    Partition::new(VariableOrder::identity(layout.n), layout.k * layout.w * layout.a)
        .expect("kw blocks form a proper prefix")
}

/// Two fixings of the `X_A` side of [`block_split_partition`] that differ
/// only in the value of the block answering slot `z` of step `r`.
///
/// Block `r'w + z'` of `X_A` answers slot `z'` of step `r'`. Steps after
/// `r` use value `z'` for slot `z'`, so distinct carried values stay
/// distinct; steps up to `r` get seeded random values.
pub fn designed_pair(layout: &BlockLayout, r: usize, z: usize, seed: u64) -> (Restriction, Restriction) {
    assert!(r < layout.k && z < layout.w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = WitnessBuilder::new(layout);
    let mut target_value = 0;
    for t in 0..layout.k {
        for slot in 0..layout.w {
            let value = if t > r { slot } else { rng.gen_range(0..layout.w) };
            if (t, slot) == (r, z) {
                target_value = value;
            }
            b = b.block(t * layout.w + slot, t, slot, value);
        }
    }
    let x = b.finish();
    let changed =
        WitnessBuilder::from_input(layout, x.clone()).ones(r * layout.w + z, (target_value + 1) % layout.w).finish();
    let x_a = block_split_partition(layout).x_a();
    (Restriction::project(&x, &x_a), Restriction::project(&changed, &x_a))
}
