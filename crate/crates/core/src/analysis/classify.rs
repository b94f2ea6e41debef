use super::Partition;
use crate::saf::BlockLayout;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Blocks with at least `w` value variables in `X_A`.
    pub i_a: Vec<usize>,
    pub i_b: Vec<usize>,
    /// Smallest number of `X_B` value variables over blocks in `i_b`.
    pub min_b_values: Option<usize>,
    /// Present when `|i_a| = kw`: whether every block outside `i_a` keeps
    /// at least `w + 1` value variables in `X_B` and `|i_b| = kw`.
    pub balanced: Option<bool>,
}

/// Splits the blocks by how many of their value variables fall in `X_A`.
pub fn classify_partition(layout: &BlockLayout, pi: &Partition) -> Classification {
    let in_a = pi.in_a();
    let mut i_a = Vec::new();
    let mut i_b = Vec::new();
    let mut min_b_values: Option<usize> = None;
    for p in 0..layout.block_count {
        let a_count = layout.value_vars(p).filter(|&v| in_a[v]).count();
        if a_count >= layout.w {
            i_a.push(p);
        } else {
            let b_count = layout.b - a_count;
            min_b_values = Some(min_b_values.map_or(b_count, |m| m.min(b_count)));
            i_b.push(p);
        }
    }
    let half = layout.k * layout.w;
    let balanced = (i_a.len() == half).then(|| i_b.len() == half && min_b_values.is_none_or(|m| m > layout.w));
    Classification { i_a, i_b, min_b_values, balanced }
}
