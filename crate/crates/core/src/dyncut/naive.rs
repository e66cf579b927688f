use super::{CutoffResult, DynCutParams};
use crate::error::{Error, Result};
use crate::neighbor::NeighborGraph;

/// Hard count cutoff for one sorted neighborhood: the midpoint between the
/// `n_max`-th and `(n_max+1)`-th distances, or `h` when the node is not full.
pub(crate) fn naive_node(r: &[f64], n_max: usize, h: f64) -> f64 {
    if r.len() <= n_max {
        h
    } else {
        0.5 * (r[n_max - 1] + r[n_max])
    }
}

/// Non-smooth baseline keeping the `n_max` nearest neighbors of each node.
/// Ranks are the integer positions in distance order; weights are 1 for
/// kept neighbors and 0 otherwise.
pub fn naive_max_neighbor_cutoff(graph: &NeighborGraph, n_max: usize) -> Result<CutoffResult> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let mut out = CutoffResult {
        cutoffs: Vec::with_capacity(graph.n_nodes()),
        ranks: Vec::with_capacity(graph.n_edges()),
        weights: Vec::with_capacity(graph.n_edges()),
        pruned_edges: Vec::new(),
    };
    for v in 0..graph.n_nodes() {
        let c = naive_node(&graph.distances(v), n_max, graph.h());
        out.cutoffs.push(c);
        for (i, k) in graph.range(v).enumerate() {
            let keep = graph.edges()[k].distance <= c;
            out.ranks.push(i as f64);
            out.weights.push(if keep { 1.0 } else { 0.0 });
            if keep {
                out.pruned_edges.push(k);
            }
        }
    }
    Ok(out)
}

/// `(true rank, soft rank)` for every neighbor of `v`, true rank being the
/// position in ascending distance order.
pub fn rank_parity(graph: &NeighborGraph, params: &DynCutParams, v: usize) -> Vec<(usize, f64)> {
    super::soft_ranks(graph, v, params)
        .into_iter()
        .enumerate()
        .collect()
}
