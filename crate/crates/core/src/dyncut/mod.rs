//! Smooth per-atom dynamic cutoffs.
//!
//! For a centre `v` with hard-cutoff neighborhood `N_v`:
//!
//! ```text
//! R_u = Σ_{t ∈ N_v, t ≠ u} S(α (r_uv - r_tv)) · p(r_tv / h)          soft rank
//! w_u = ω(R_u) · p(r_uv / h)                                        weight
//! c_v = (Σ_u w_u r_uv + h ε) / (Σ_u w_u + ε)                         cutoff
//! ```
//!
//! `ω` is a Gaussian centred on the target neighbor count `μ`. A neighbor at
//! `r = h` has zero weight and contributes nothing to any rank, so atoms can
//! cross the hard cutoff without changing `c_v` or its first two derivatives.
//!
//! All per-node reductions run in the graph's `(distance, src)` order, and
//! nodes are independent, so results are bitwise reproducible for any
//! thread count.

mod derivatives;
mod naive;

pub use derivatives::{cutoff_derivatives, cutoff_gradient, cutoff_hessian, CutoffDerivatives};
pub use naive::{naive_max_neighbor_cutoff, rank_parity};

pub(crate) use derivatives::distance_partials;
pub(crate) use naive::naive_node;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::neighbor::NeighborGraph;
use crate::smoothfn::{sigmoid_pair, Envelope, EnvelopeParams, GaussWeight, WeightParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynCutParams {
    /// Sigmoid sharpness, 1/Å.
    pub alpha: f64,
    pub envelope: EnvelopeParams,
    pub weight: WeightParams,
    /// Stabiliser pulling the cutoff toward `h` for sparse neighborhoods.
    pub epsilon: f64,
    /// Hard cutoff, Å.
    pub h: f64,
}

impl DynCutParams {
    /// Defaults: α = 10, n = 50, σ = 4, ε = 1e-4.
    pub fn new(h: f64, mu: f64) -> Result<Self> {
        let params = Self {
            alpha: 10.0,
            envelope: EnvelopeParams::default(),
            weight: WeightParams::new(mu, 4.0)?,
            epsilon: 1e-4,
            h,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = alpha;
        self.validate().map(|_| self)
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        self.weight = WeightParams::new(self.weight.mu(), sigma)?;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate().map(|_| self)
    }

    pub fn with_envelope(mut self, envelope: EnvelopeParams) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn mu(&self) -> f64 {
        self.weight.mu()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        Ok(())
    }

    pub(crate) fn check_graph(&self, graph: &NeighborGraph) -> Result<()> {
        if graph.h() != self.h {
            return Err(Error::ParamMismatch {
                graph_h: graph.h(),
                params_h: self.h,
            });
        }
        Ok(())
    }
}

/// Cutoffs for every node plus per-edge ranks and weights (aligned with
/// `graph.edges()`).
#[derive(Clone, Debug, PartialEq)]
pub struct CutoffResult {
    pub cutoffs: Vec<f64>,
    pub ranks: Vec<f64>,
    pub weights: Vec<f64>,
    /// Indices into `graph.edges()` of edges with `r_uv <= c_dst`.
    pub pruned_edges: Vec<usize>,
}

impl CutoffResult {
    pub fn pruned_edge_count(&self) -> usize {
        self.pruned_edges.len()
    }

    /// Number of surviving incoming edges per node.
    pub fn pruned_degrees(&self, graph: &NeighborGraph) -> Vec<usize> {
        let mut out = vec![0; graph.n_nodes()];
        for &k in &self.pruned_edges {
            out[graph.edges()[k].dst] += 1;
        }
        out
    }

    pub fn mean_pruned_degree(&self) -> f64 {
        if self.cutoffs.is_empty() {
            0.0
        } else {
            self.pruned_edges.len() as f64 / self.cutoffs.len() as f64
        }
    }

    pub fn mean_cutoff(&self) -> f64 {
        if self.cutoffs.is_empty() {
            0.0
        } else {
            self.cutoffs.iter().sum::<f64>() / self.cutoffs.len() as f64
        }
    }
}

/// Everything the forward pass of one node produces, kept around for the
/// derivative passes.
pub(crate) struct NodeForward {
    pub deg: usize,
    pub cutoff: f64,
    /// Σ w_u r_u + h ε.
    pub numer: f64,
    /// Σ w_u + ε.
    pub denom: f64,
    pub ranks: Vec<f64>,
    pub weights: Vec<f64>,
    /// p, p', p'' at r_u / h (derivatives in x, not r).
    pub env: Vec<(f64, f64, f64)>,
    /// ω, ω', ω'' at R_u.
    pub omega: Vec<(f64, f64, f64)>,
    /// Row-major `deg × deg`: S(α (r_u - r_t)).
    pub sig: Vec<f64>,
    /// Row-major `deg × deg`: S'(α (r_u - r_t)), symmetric.
    pub dsig: Vec<f64>,
}

pub(crate) struct Kernel {
    pub alpha: f64,
    pub h: f64,
    pub epsilon: f64,
    pub envelope: Envelope,
    pub gauss: GaussWeight,
}

impl Kernel {
    pub fn new(params: &DynCutParams) -> Self {
        Self {
            alpha: params.alpha,
            h: params.h,
            epsilon: params.epsilon,
            envelope: Envelope::new(params.envelope),
            gauss: GaussWeight::new(params.weight),
        }
    }

    /// Forward pass over the sorted distances of one neighborhood.
    pub fn forward(&self, r: &[f64]) -> NodeForward {
        let d = r.len();
        let env: Vec<(f64, f64, f64)> = r.iter().map(|&x| self.envelope.eval(x / self.h)).collect();

        let mut sig = vec![0.0; d * d];
        let mut dsig = vec![0.0; d * d];
        for u in 0..d {
            for t in (u + 1)..d {
                let (s_ut, s_tu, ds) = sigmoid_pair(self.alpha * (r[u] - r[t]));
                sig[u * d + t] = s_ut;
                sig[t * d + u] = s_tu;
                dsig[u * d + t] = ds;
                dsig[t * d + u] = ds;
            }
        }

        // The zero diagonal of `sig` drops the t == u term.
        let ranks: Vec<f64> = (0..d)
            .map(|u| {
                let row = &sig[u * d..(u + 1) * d];
                row.iter().zip(&env).map(|(s, e)| s * e.0).sum()
            })
            .collect();

        let omega: Vec<(f64, f64, f64)> = ranks.iter().map(|&x| self.gauss.eval(x)).collect();
        let weights: Vec<f64> = (0..d).map(|u| omega[u].0 * env[u].0).collect();

        let mut numer = 0.0;
        let mut denom = 0.0;
        for u in 0..d {
            numer += weights[u] * r[u];
            denom += weights[u];
        }
        numer += self.h * self.epsilon;
        denom += self.epsilon;

        NodeForward {
            deg: d,
            cutoff: numer / denom,
            numer,
            denom,
            ranks,
            weights,
            env,
            omega,
            sig,
            dsig,
        }
    }
}

/// Soft ranks `R_u` of every neighbor of `v`, in the graph's edge order.
pub fn soft_ranks(graph: &NeighborGraph, v: usize, params: &DynCutParams) -> Vec<f64> {
    let kernel = Kernel::new(params);
    kernel.forward(&graph.distances(v)).ranks
}

/// Dynamic cutoff of every node, with ranks, weights and the pruned edge set.
pub fn dynamic_cutoff(graph: &NeighborGraph, params: &DynCutParams) -> Result<CutoffResult> {
    params.validate()?;
    params.check_graph(graph)?;
    let kernel = Kernel::new(params);
    // Keep only the per-node outputs; the d×d sigmoid tables are dropped
    // as soon as each node is done.
    let nodes: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..graph.n_nodes())
        .into_par_iter()
        .map(|v| {
            let f = kernel.forward(&graph.distances(v));
            (f.cutoff, f.ranks, f.weights)
        })
        .collect();

    let mut out = CutoffResult {
        cutoffs: Vec::with_capacity(nodes.len()),
        ranks: Vec::with_capacity(graph.n_edges()),
        weights: Vec::with_capacity(graph.n_edges()),
        pruned_edges: Vec::new(),
    };
    for (v, (cutoff, ranks, weights)) in nodes.into_iter().enumerate() {
        out.cutoffs.push(cutoff);
        out.ranks.extend_from_slice(&ranks);
        out.weights.extend_from_slice(&weights);
        for k in graph.range(v) {
            if graph.edges()[k].distance <= cutoff {
                out.pruned_edges.push(k);
            }
        }
    }
    Ok(out)
}
