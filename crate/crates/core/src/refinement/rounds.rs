use super::{Coloring, RefinementEngine};
use crate::graph::Digraph;

/// Round-by-round color refinement.
#[derive(Debug, Clone, Copy, Default)]
pub struct RoundEngine;

impl RefinementEngine for RoundEngine {
    fn name(&self) -> &'static str {
        "rounds"
    }

    fn refine(&self, g: &Digraph, initial: Coloring) -> Coloring {
        let mut current = initial;
        // The partition is stable after at most n rounds.
        for _ in 0..=g.n() {
            let next = refine_round(g, &current);
            if next.is_stable() {
                return next;
            }
            current = next;
        }
        unreachable!("color refinement did not stabilize within n rounds")
    }
}

/// One refinement round. New classes are ordered by the old color id, then by
/// the sorted multiset of out-neighbor colors compared lexicographically, and
/// numbered consecutively from 0.
pub fn refine_round(g: &Digraph, c: &Coloring) -> Coloring {
    let n = g.n();
    let colors = c.colors();
    let k = c.class_count();

    // Sorted neighbor-color sequences, laid out back to back.
    let mut offsets = Vec::with_capacity(n + 1);
    let mut flat: Vec<u32> = Vec::new();
    let mut counts = vec![0u32; k];
    offsets.push(0);
    for v in 0..n {
        let deg = g.out_degree(v);
        if deg * 8 < k {
            let start = flat.len();
            flat.extend(g.out_neighbors(v).map(|y| colors[y]));
            flat[start..].sort_unstable();
        } else {
            for y in g.out_neighbors(v) {
                counts[colors[y] as usize] += 1;
            }
            for (color, cnt) in counts.iter_mut().enumerate() {
                for _ in 0..*cnt {
                    flat.push(color as u32);
                }
                *cnt = 0;
            }
        }
        offsets.push(flat.len());
    }
    let sig = |v: usize| &flat[offsets[v]..offsets[v + 1]];

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| colors[a].cmp(&colors[b]).then_with(|| sig(a).cmp(sig(b))));

    let mut new_colors = vec![0u32; n];
    let mut next_id = 0u32;
    for (i, &v) in order.iter().enumerate() {
        if i > 0 {
            let u = order[i - 1];
            if colors[u] != colors[v] || sig(u) != sig(v) {
                next_id += 1;
            }
        }
        new_colors[v] = next_id;
    }
    let classes = if n == 0 { 0 } else { next_id as usize + 1 };
    Coloring::with_meta(new_colors, c.round() + 1, classes == k)
}
