//! Toy pair potential in message form.
//!
//! ```text
//! E = Σ_v Σ_{u ∈ N_v, r_uv <= c_v} ½ φ(r_uv) f(r_uv / c_v)
//! ```
//!
//! `φ` is Lennard-Jones and `f` is a polynomial envelope, so every directed
//! term goes to zero with two vanishing derivatives at its own cutoff. The
//! cutoff `c_v` is `h` (fixed), the naive max-neighbor radius, or the smooth
//! dynamic cutoff. Forces include the chain rule through `c_v`, which also
//! reaches neighbors that were pruned.

use rayon::prelude::*;

use crate::dyncut::{distance_partials, naive_node, DynCutParams, Kernel};
use crate::error::{Error, Result};
use crate::geometry::{AtomicSystem, Vec3};
use crate::neighbor::{build_graph, NeighborGraph};
use crate::smoothfn::{Envelope, EnvelopeParams};

/// Pairs closer than this are treated as a collapsed structure.
pub const MIN_DISTANCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutoffMode {
    Fixed,
    Naive { n_max: usize },
    Dynamic(DynCutParams),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairParams {
    /// Well depth, eV.
    pub epsilon_lj: f64,
    /// Length scale, Å.
    pub sigma_lj: f64,
    pub mode: CutoffMode,
    /// Hard cutoff, Å.
    pub h: f64,
    /// Envelope applied to each message at `r / c_v`.
    pub message_envelope: EnvelopeParams,
}

impl PairParams {
    /// Copper-like Lennard-Jones (0.4 eV, 2.27 Å) with a degree-6 message
    /// envelope.
    pub fn new(h: f64, mode: CutoffMode) -> Result<Self> {
        let params = Self {
            epsilon_lj: 0.4,
            sigma_lj: 2.27,
            mode,
            h,
            message_envelope: EnvelopeParams::new(6)?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_mode(mut self, mode: CutoffMode) -> Result<Self> {
        self.mode = mode;
        self.validate().map(|_| self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_lj > 0.0 && self.epsilon_lj.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon_lj must be positive, got {}",
                self.epsilon_lj
            )));
        }
        if !(self.sigma_lj > 0.0 && self.sigma_lj.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_lj must be positive, got {}",
                self.sigma_lj
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        match self.mode {
            CutoffMode::Fixed => {}
            CutoffMode::Naive { n_max } => {
                if n_max == 0 {
                    return Err(Error::InvalidParameter("n_max must be at least 1".into()));
                }
            }
            CutoffMode::Dynamic(p) => {
                p.validate()?;
                if p.h != self.h {
                    return Err(Error::ParamMismatch {
                        graph_h: self.h,
                        params_h: p.h,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyForces {
    pub energy: f64,
    pub forces: Vec<Vec3>,
    pub per_node_cutoffs: Vec<f64>,
    /// Directed edges with `r_uv <= c_v`.
    pub edge_count_pruned: usize,
    /// Directed edges with `r_uv <= h`.
    pub edge_count_hard: usize,
}

impl EnergyForces {
    pub fn mean_cutoff(&self) -> f64 {
        mean(&self.per_node_cutoffs)
    }

    pub fn mean_pruned_degree(&self) -> f64 {
        per_node(self.edge_count_pruned, self.forces.len())
    }

    pub fn mean_hard_degree(&self) -> f64 {
        per_node(self.edge_count_hard, self.forces.len())
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn per_node(count: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        count as f64 / n as f64
    }
}

/// `(φ(r), φ'(r))` for Lennard-Jones.
pub fn lennard_jones(r: f64, epsilon: f64, sigma: f64) -> (f64, f64) {
    let s6 = (sigma / r).powi(6);
    let s12 = s6 * s6;
    (
        4.0 * epsilon * (s12 - s6),
        4.0 * epsilon * (-12.0 * s12 + 6.0 * s6) / r,
    )
}

struct NodeResult {
    energy: f64,
    cutoff: f64,
    kept: usize,
    /// `dE_v/dr_k` for each edge of the node.
    de_dr: Vec<f64>,
}

pub fn energy_forces(system: &AtomicSystem, params: &PairParams) -> Result<EnergyForces> {
    let graph = build_graph(system, params.h)?;
    energy_forces_on_graph(&graph, params)
}

/// Same as [`energy_forces`] on a prebuilt graph (its edges carry all the
/// geometry needed).
pub fn energy_forces_on_graph(graph: &NeighborGraph, params: &PairParams) -> Result<EnergyForces> {
    params.validate()?;
    if graph.h() != params.h {
        return Err(Error::ParamMismatch {
            graph_h: graph.h(),
            params_h: params.h,
        });
    }
    if graph.n_nodes() == 0 {
        return Err(Error::EmptySystem);
    }
    if let Some((i, j)) = graph.coincident() {
        return Err(Error::Overlap {
            i,
            j,
            distance: 0.0,
        });
    }
    if let Some(e) = graph.edges().iter().find(|e| e.distance < MIN_DISTANCE) {
        return Err(Error::Overlap {
            i: e.dst,
            j: e.src,
            distance: e.distance,
        });
    }

    let envelope = Envelope::new(params.message_envelope);
    let kernel = match params.mode {
        CutoffMode::Dynamic(p) => Some(Kernel::new(&p)),
        _ => None,
    };

    let nodes: Vec<NodeResult> = (0..graph.n_nodes())
        .into_par_iter()
        .map(|v| node_terms(graph, v, params, &envelope, kernel.as_ref()))
        .collect();

    let mut forces = vec![Vec3::zeros(); graph.n_nodes()];
    let mut energy = 0.0;
    let mut kept = 0;
    let mut cutoffs = Vec::with_capacity(nodes.len());
    for (v, node) in nodes.iter().enumerate() {
        energy += node.energy;
        kept += node.kept;
        cutoffs.push(node.cutoff);
        for (e, &g) in graph.neighbors(v).iter().zip(&node.de_dr) {
            if g != 0.0 && e.src != e.dst {
                forces[e.src] -= g * e.unit_vector;
                forces[e.dst] += g * e.unit_vector;
            }
        }
    }

    Ok(EnergyForces {
        energy,
        forces,
        per_node_cutoffs: cutoffs,
        edge_count_pruned: kept,
        edge_count_hard: graph.n_edges(),
    })
}

fn node_terms(
    graph: &NeighborGraph,
    v: usize,
    params: &PairParams,
    envelope: &Envelope,
    kernel: Option<&Kernel>,
) -> NodeResult {
    let r = graph.distances(v);
    let d = r.len();

    // Cutoff and its sensitivity to each distance.
    let (cutoff, dc_dr) = match params.mode {
        CutoffMode::Fixed => (params.h, None),
        CutoffMode::Naive { n_max } => {
            let c = naive_node(&r, n_max, params.h);
            let grad = (d > n_max).then(|| {
                let mut g = vec![0.0; d];
                g[n_max - 1] = 0.5;
                g[n_max] = 0.5;
                g
            });
            (c, grad)
        }
        CutoffMode::Dynamic(_) => {
            let kernel = kernel.expect("dynamic mode carries a kernel");
            let fwd = kernel.forward(&r);
            let partials = distance_partials(kernel, &fwd, &r);
            (fwd.cutoff, Some(partials))
        }
    };

    let mut energy = 0.0;
    let mut kept = 0;
    let mut de_dr = vec![0.0; d];
    // ∂E_v/∂c_v
    let mut de_dc = 0.0;
    for k in 0..d {
        if r[k] > cutoff {
            continue;
        }
        kept += 1;
        let x = r[k] / cutoff;
        let (f, df, _) = envelope.eval(x);
        let (phi, dphi) = lennard_jones(r[k], params.epsilon_lj, params.sigma_lj);
        energy += 0.5 * phi * f;
        de_dr[k] += 0.5 * (dphi * f + phi * df / cutoff);
        de_dc -= 0.5 * phi * df * x / cutoff;
    }
    if let Some(dc) = dc_dr {
        for k in 0..d {
            de_dr[k] += de_dc * dc[k];
        }
    }

    NodeResult {
        energy,
        cutoff,
        kept,
        de_dr,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanPoint {
    pub displacement: f64,
    pub energy: f64,
    /// Force on the scanned atom projected on the scan direction, eV/Å.
    pub force_along: f64,
}

/// Moves `atom` along `direction` through `steps` equally spaced points
/// covering `[-span/2, span/2]` around its current position.
pub fn pes_line_scan(
    system: &AtomicSystem,
    params: &PairParams,
    atom: usize,
    direction: Vec3,
    span: f64,
    steps: usize,
) -> Result<Vec<ScanPoint>> {
    if steps < 3 {
        return Err(Error::InvalidParameter(format!(
            "scan needs at least 3 steps, got {steps}"
        )));
    }
    if atom >= system.len() {
        return Err(Error::InvalidParameter(format!(
            "atom index {atom} out of range for {} atoms",
            system.len()
        )));
    }
    let norm = direction.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidParameter(
            "scan direction must be non-zero".into(),
        ));
    }
    let dir = direction / norm;
    let origin = system.positions[atom];
    let mut moved = system.clone();
    (0..steps)
        .map(|i| {
            let s = -0.5 * span + span * i as f64 / (steps - 1) as f64;
            moved.positions[atom] = origin + s * dir;
            let ef = energy_forces(&moved, params)?;
            Ok(ScanPoint {
                displacement: s,
                energy: ef.energy,
                force_along: ef.forces[atom].dot(&dir),
            })
        })
        .collect()
}
