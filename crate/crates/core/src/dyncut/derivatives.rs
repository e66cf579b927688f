use rayon::prelude::*;

use super::{DynCutParams, Kernel, NodeForward};
use crate::error::{Error, Result};
use crate::geometry::{Mat3, Vec3};
use crate::neighbor::{Edge, NeighborGraph};

/// Per-node derivative blocks. `grad[v]` and `hess[v]` list `(atom, block)`
/// sorted by atom index; only atoms in `N_v ∪ {v}` appear. `hess` is empty
/// when only gradients were requested.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CutoffDerivatives {
    pub grad: Vec<Vec<(usize, Vec3)>>,
    pub hess: Vec<Vec<(usize, Mat3)>>,
}

impl CutoffDerivatives {
    pub fn grad_of(&self, v: usize, t: usize) -> Option<Vec3> {
        lookup(self.grad.get(v)?, t)
    }

    pub fn hess_of(&self, v: usize, t: usize) -> Option<Mat3> {
        lookup(self.hess.get(v)?, t)
    }
}

fn lookup<T: Copy>(entries: &[(usize, T)], t: usize) -> Option<T> {
    entries
        .binary_search_by_key(&t, |e| e.0)
        .ok()
        .map(|i| entries[i].1)
}

/// `∂c_v/∂r_k` for every neighbor `k` of one node, holding the other
/// distances fixed.
pub(crate) fn distance_partials(kernel: &Kernel, fwd: &NodeForward, r: &[f64]) -> Vec<f64> {
    let d = fwd.deg;
    let (alpha, h, c, denom) = (kernel.alpha, kernel.h, fwd.cutoff, fwd.denom);
    let q: Vec<f64> = (0..d)
        .map(|u| (r[u] - c) * fwd.omega[u].1 * fwd.env[u].0 / denom)
        .collect();

    // Diagonal entries of `sig` and `dsig` are zero, so the sums below can
    // run over all t without skipping t == k.
    (0..d)
        .map(|k| {
            let (a_k, da_k, _) = fwd.env[k];
            let dsig_k = &fwd.dsig[k * d..(k + 1) * d];
            let mut d_k = 0.0;
            let mut q_ds = 0.0;
            let mut q_s = 0.0;
            for t in 0..d {
                let ds = dsig_k[t];
                d_k += ds * fwd.env[t].0;
                // t plays the role of u here: ∂R_t/∂r_k.
                q_ds += q[t] * ds;
                q_s += q[t] * fwd.sig[t * d + k];
            }
            let own = (fwd.weights[k] + (r[k] - c) * fwd.omega[k].0 * da_k / h) / denom;
            own + alpha * (q[k] * d_k - a_k * q_ds) + (da_k / h) * q_s
        })
        .collect()
}

/// Scatter distance partials onto atoms: `∂r/∂x_src = e`, `∂r/∂x_dst = -e`.
fn scatter(edges: &[Edge], partials: &[f64]) -> Vec<(usize, Vec3)> {
    let mut raw: Vec<(usize, Vec3)> = Vec::with_capacity(2 * edges.len());
    for (e, &g) in edges.iter().zip(partials) {
        if e.src == e.dst {
            continue;
        }
        raw.push((e.src, g * e.unit_vector));
        raw.push((e.dst, -g * e.unit_vector));
    }
    merge_sorted(raw)
}

fn merge_sorted<T: Copy + std::ops::AddAssign>(mut raw: Vec<(usize, T)>) -> Vec<(usize, T)> {
    // Stable sort keeps edge order within one atom, so sums are reproducible.
    raw.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, T)> = Vec::with_capacity(raw.len());
    for (t, g) in raw {
        match out.last_mut() {
            Some(last) if last.0 == t => last.1 += g,
            _ => out.push((t, g)),
        }
    }
    out
}

fn participants(graph: &NeighborGraph, v: usize) -> Vec<usize> {
    let mut atoms: Vec<usize> = graph.neighbors(v).iter().map(|e| e.src).collect();
    atoms.push(v);
    atoms.sort_unstable();
    atoms.dedup();
    atoms
}

/// Analytic `∇_{x_t} c_v` for every node and every participating atom.
pub fn cutoff_gradient(graph: &NeighborGraph, params: &DynCutParams) -> Result<CutoffDerivatives> {
    params.validate()?;
    params.check_graph(graph)?;
    let kernel = Kernel::new(params);
    let grad = (0..graph.n_nodes())
        .into_par_iter()
        .map(|v| {
            let r = graph.distances(v);
            let fwd = kernel.forward(&r);
            let partials = distance_partials(&kernel, &fwd, &r);
            let mut g = scatter(graph.neighbors(v), &partials);
            // Atoms whose only edges are self-images still participate.
            for t in participants(graph, v) {
                if g.binary_search_by_key(&t, |e| e.0).is_err() {
                    g.push((t, Vec3::zeros()));
                }
            }
            g.sort_by_key(|e| e.0);
            g
        })
        .collect();
    Ok(CutoffDerivatives {
        grad,
        hess: Vec::new(),
    })
}

/// Analytic gradient and same-atom Hessian blocks for every node.
pub fn cutoff_derivatives(
    graph: &NeighborGraph,
    params: &DynCutParams,
) -> Result<CutoffDerivatives> {
    let mut out = cutoff_gradient(graph, params)?;
    let kernel = Kernel::new(params);
    out.hess = (0..graph.n_nodes())
        .into_par_iter()
        .map(|v| {
            let fwd = kernel.forward(&graph.distances(v));
            participants(graph, v)
                .into_iter()
                .map(|t| (t, same_atom_blocks(&kernel, &fwd, graph.neighbors(v), t).1))
                .collect()
        })
        .collect();
    Ok(out)
}

/// Analytic `H_{x_t} c_v`. Atoms outside `N_v ∪ {v}` get a zero block.
pub fn cutoff_hessian(
    graph: &NeighborGraph,
    params: &DynCutParams,
    v: usize,
    t: usize,
) -> Result<Mat3> {
    params.validate()?;
    params.check_graph(graph)?;
    if v >= graph.n_nodes() || t >= graph.n_nodes() {
        return Err(Error::InvalidParameter(format!(
            "node {v} or atom {t} out of range for {} nodes",
            graph.n_nodes()
        )));
    }
    let kernel = Kernel::new(params);
    let fwd = kernel.forward(&graph.distances(v));
    Ok(same_atom_blocks(&kernel, &fwd, graph.neighbors(v), t).1)
}

/// Gradient and Hessian of `c_v` with respect to one atom position, built
/// from the weighted-sum numerator `A` and denominator `B` directly in
/// position space. Independent of `distance_partials`, which makes it a
/// useful cross-check for the gradient.
pub(crate) fn same_atom_blocks(
    kernel: &Kernel,
    fwd: &NodeForward,
    edges: &[Edge],
    t: usize,
) -> (Vec3, Mat3) {
    let d = fwd.deg;
    let (alpha, h) = (kernel.alpha, kernel.h);
    let eye = Mat3::identity();

    // Sensitivity of each distance to x_t.
    let beta: Vec<f64> = edges
        .iter()
        .map(|e| (e.src == t) as i32 as f64 - (e.dst == t) as i32 as f64)
        .collect();
    let g: Vec<Vec3> = edges
        .iter()
        .zip(&beta)
        .map(|(e, &b)| b * e.unit_vector)
        .collect();
    let hr: Vec<Mat3> = edges
        .iter()
        .zip(&beta)
        .map(|(e, &b)| {
            if b == 0.0 {
                Mat3::zeros()
            } else {
                let u = e.unit_vector;
                (b * b / e.distance) * (eye - u * u.transpose())
            }
        })
        .collect();
    let r: Vec<f64> = edges.iter().map(|e| e.distance).collect();
    let active: Vec<bool> = beta.iter().map(|&b| b != 0.0).collect();

    let mut grad_a = Vec3::zeros();
    let mut grad_b = Vec3::zeros();
    let mut hess_a = Mat3::zeros();
    let mut hess_b = Mat3::zeros();

    for u in 0..d {
        let mut grad_r = Vec3::zeros();
        let mut hess_r = Mat3::zeros();
        for j in 0..d {
            if j == u || !(active[u] || active[j]) {
                continue;
            }
            let s = fwd.sig[u * d + j];
            let ds = fwd.dsig[u * d + j];
            let dds = ds * (1.0 - 2.0 * s);
            let (a_j, da_j, dda_j) = fwd.env[j];
            let t_u = alpha * ds * a_j;
            let t_j = -alpha * ds * a_j + s * da_j / h;
            let t_uu = alpha * alpha * dds * a_j;
            let t_uj = -alpha * alpha * dds * a_j + alpha * ds * da_j / h;
            let t_jj =
                alpha * alpha * dds * a_j - 2.0 * alpha * ds * da_j / h + s * dda_j / (h * h);

            grad_r += t_u * g[u] + t_j * g[j];
            let cross = g[u] * g[j].transpose();
            hess_r += t_uu * g[u] * g[u].transpose()
                + t_uj * (cross + cross.transpose())
                + t_jj * g[j] * g[j].transpose()
                + t_u * hr[u]
                + t_j * hr[j];
        }

        let (a_u, da_u, dda_u) = fwd.env[u];
        let (om, dom, ddom) = fwd.omega[u];
        let w = fwd.weights[u];
        let grad_w = dom * a_u * grad_r + om * (da_u / h) * g[u];
        let mixed = g[u] * grad_r.transpose();
        let hess_w = ddom * a_u * grad_r * grad_r.transpose()
            + dom * a_u * hess_r
            + dom * (da_u / h) * (mixed + mixed.transpose())
            + om * (dda_u / (h * h)) * g[u] * g[u].transpose()
            + om * (da_u / h) * hr[u];

        let gw_g = grad_w * g[u].transpose();
        grad_a += r[u] * grad_w + w * g[u];
        grad_b += grad_w;
        hess_a += r[u] * hess_w + gw_g + gw_g.transpose() + w * hr[u];
        hess_b += hess_w;
    }

    let (a, b) = (fwd.numer, fwd.denom);
    let grad = grad_a / b - a * grad_b / (b * b);
    let ab = grad_a * grad_b.transpose();
    let hess = hess_a / b - (ab + ab.transpose()) / (b * b) - a * hess_b / (b * b)
        + 2.0 * a * grad_b * grad_b.transpose() / (b * b * b);
    (grad, hess)
}
