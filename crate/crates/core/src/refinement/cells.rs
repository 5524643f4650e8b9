use std::collections::VecDeque;

use super::{Coloring, RefinementEngine};
use crate::graph::Digraph;

/// Smaller-half partition refinement on an ordered partition.
///
/// Cells are contiguous ranges of a vertex array. Splitting a cell by the
/// number of out-neighbors inside a splitter cell keeps the fragments in place,
/// ordered by ascending count. When a cell that is not waiting in the queue
/// splits, its largest fragment is left out of the queue. The final color of a
/// vertex is the rank of its cell by position.
#[derive(Debug, Clone, Copy, Default)]
pub struct CellEngine;

#[derive(Debug, Clone, Copy)]
struct Cell {
    start: usize,
    len: usize,
}

impl RefinementEngine for CellEngine {
    fn name(&self) -> &'static str {
        "cells"
    }

    fn refine(&self, g: &Digraph, initial: Coloring) -> Coloring {
        let n = g.n();
        if n == 0 {
            return Coloring::with_meta(Vec::new(), 0, true);
        }
        let preds = g.transpose();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| initial.color(v));
        let mut cell_of = vec![0usize; n];
        let mut cells: Vec<Cell> = Vec::new();
        for (i, &v) in order.iter().enumerate() {
            if i == 0 || initial.color(order[i - 1]) != initial.color(v) {
                cells.push(Cell { start: i, len: 0 });
            }
            let id = cells.len() - 1;
            cells[id].len += 1;
            cell_of[v] = id;
        }

        let mut queue: VecDeque<usize> = (0..cells.len()).collect();
        let mut in_queue = vec![true; cells.len()];
        let mut count = vec![0u32; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut touched_cells: Vec<usize> = Vec::new();
        let mut splitters = 0usize;

        while let Some(w) = queue.pop_front() {
            in_queue[w] = false;
            splitters += 1;
            let Cell { start, len } = cells[w];
            let members: Vec<usize> = order[start..start + len].to_vec();
            for &y in &members {
                for v in preds.out_neighbors(y) {
                    if count[v] == 0 {
                        touched.push(v);
                    }
                    count[v] += 1;
                }
            }
            touched_cells.clear();
            touched_cells.extend(touched.iter().map(|&v| cell_of[v]));
            touched_cells.sort_unstable_by_key(|&c| cells[c].start);
            touched_cells.dedup();

            for &c in &touched_cells {
                let Cell { start, len } = cells[c];
                if len == 1 {
                    continue;
                }
                let range = start..start + len;
                order[range.clone()].sort_by_key(|&v| count[v]);
                let first = count[order[start]];
                if count[order[start + len - 1]] == first {
                    continue;
                }
                // Cut the sorted range into fragments of equal count.
                let mut fragments: Vec<Cell> = Vec::new();
                let mut frag_start = start;
                for i in range.clone().skip(1) {
                    if count[order[i]] != count[order[i - 1]] {
                        fragments.push(Cell {
                            start: frag_start,
                            len: i - frag_start,
                        });
                        frag_start = i;
                    }
                }
                fragments.push(Cell {
                    start: frag_start,
                    len: start + len - frag_start,
                });

                let mut ids = Vec::with_capacity(fragments.len());
                for (fi, frag) in fragments.iter().enumerate() {
                    let id = if fi == 0 {
                        cells[c] = *frag;
                        c
                    } else {
                        cells.push(*frag);
                        in_queue.push(false);
                        cells.len() - 1
                    };
                    for &v in &order[frag.start..frag.start + frag.len] {
                        cell_of[v] = id;
                    }
                    ids.push(id);
                }
                if in_queue[c] {
                    for &id in &ids[1..] {
                        queue.push_back(id);
                        in_queue[id] = true;
                    }
                } else {
                    let largest = (0..fragments.len())
                        .max_by_key(|&i| (fragments[i].len, std::cmp::Reverse(i)))
                        .unwrap();
                    for (i, &id) in ids.iter().enumerate() {
                        if i != largest {
                            queue.push_back(id);
                            in_queue[id] = true;
                        }
                    }
                }
            }
            for &v in &touched {
                count[v] = 0;
            }
            touched.clear();
        }

        let mut by_start: Vec<usize> = (0..cells.len()).collect();
        by_start.sort_unstable_by_key(|&c| cells[c].start);
        let mut rank = vec![0u32; cells.len()];
        for (r, &c) in by_start.iter().enumerate() {
            rank[c] = r as u32;
        }
        let colors = (0..n).map(|v| rank[cell_of[v]]).collect();
        Coloring::with_meta(colors, splitters, true)
    }
}
