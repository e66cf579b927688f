//! Hard-cutoff neighbor graph built with a cell list.
//!
//! Edges are directed `src -> dst` where `dst` is the centre atom `v` and
//! `src` is a neighbor `u` (possibly a periodic image of it, or an image of
//! `v` itself). All edges of a centre are stored contiguously and sorted by
//! `(distance, src, image_shift)`.
//!
//! Periodic cells narrower than `2h` are handled by searching as many image
//! shells as needed ("ghost replication"), so small unit cells work without a
//! separate supercell step.

use std::collections::HashMap;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{check_minimum_image, AtomicSystem, Cell, Mat3, Vec3};

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Neighbor atom `u`.
    pub src: usize,
    /// Centre atom `v`.
    pub dst: usize,
    /// `r_uv` in Å.
    pub distance: f64,
    /// `x_u + shift - x_v`.
    pub vector: Vec3,
    /// `vector / distance`, pointing from `v` toward the image of `u`.
    pub unit_vector: Vec3,
    /// Periodic image of `u` relative to the raw (unwrapped) positions.
    pub image_shift: [i32; 3],
}

impl Edge {
    fn new(src: usize, dst: usize, vector: Vec3, image_shift: [i32; 3]) -> Self {
        let distance = vector.norm();
        Self {
            src,
            dst,
            distance,
            vector,
            unit_vector: vector / distance,
            image_shift,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphOptions {
    /// Search multiple image shells when a periodic width is below `2h`.
    /// When disabled such cells are rejected with `MinimumImageViolation`.
    pub ghost_replication: bool,
}

impl Default for GraphOptions {
    fn default() -> Self {
        Self {
            ghost_replication: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeighborGraph {
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    h: f64,
    coincident: Option<(usize, usize)>,
}

impl NeighborGraph {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index range of the edges incoming to `v`.
    pub fn range(&self, v: usize) -> Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    /// Incoming edges of `v` (its neighborhood `N_v`), sorted by distance.
    pub fn neighbors(&self, v: usize) -> &[Edge] {
        &self.edges[self.range(v)]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn distances(&self, v: usize) -> Vec<f64> {
        self.neighbors(v).iter().map(|e| e.distance).collect()
    }

    /// First `(dst, src)` pair of distinct atoms (or distinct images) found
    /// at exactly zero distance. Such pairs carry no edge.
    pub fn coincident(&self) -> Option<(usize, usize)> {
        self.coincident
    }

    /// Recomputes edge geometry for new positions while keeping the edge
    /// set and image shifts. Edges that moved beyond `h` are dropped; atoms
    /// that moved inside `h` are not picked up until the next full build.
    pub fn refresh(&mut self, system: &AtomicSystem) {
        let coincident = self
            .edges
            .iter()
            .find(|e| {
                system.positions[e.src] - system.positions[e.dst]
                    + system.cell.shift_vector(e.image_shift)
                    == Vec3::zeros()
            })
            .map(|e| (e.dst, e.src));
        let mut per_node: Vec<Vec<Edge>> = (0..self.n_nodes())
            .map(|v| {
                self.neighbors(v)
                    .iter()
                    .map(|e| {
                        let vec = (system.positions[e.src] - system.positions[e.dst])
                            + system.cell.shift_vector(e.image_shift);
                        Edge::new(e.src, e.dst, vec, e.image_shift)
                    })
                    .filter(|e| e.distance > 0.0 && e.distance <= self.h)
                    .collect()
            })
            .collect();
        per_node.iter_mut().for_each(|edges| sort_edges(edges));
        *self = Self::from_nodes(per_node, self.h, coincident);
    }

    fn from_nodes(per_node: Vec<Vec<Edge>>, h: f64, coincident: Option<(usize, usize)>) -> Self {
        let mut offsets = Vec::with_capacity(per_node.len() + 1);
        offsets.push(0);
        let mut edges = Vec::with_capacity(per_node.iter().map(Vec::len).sum());
        for node in per_node {
            edges.extend(node);
            offsets.push(edges.len());
        }
        Self {
            edges,
            offsets,
            h,
            coincident,
        }
    }
}

fn sort_edges(edges: &mut [Edge]) {
    edges.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.src.cmp(&b.src))
            .then(a.image_shift.cmp(&b.image_shift))
    });
}

/// Bins in fractional coordinates of the cell when any axis is periodic,
/// plain Cartesian coordinates otherwise.
struct Binning {
    periodic: [bool; 3],
    /// Bins per periodic axis (unused for open axes).
    n_bins: [i64; 3],
    /// Fractional width of one bin.
    bin_width: [f64; 3],
    /// Lower fractional bound for open axes.
    origin: [f64; 3],
    /// Stencil half-width per axis.
    reach: [i64; 3],
}

impl Binning {
    fn new(cell: &Cell, fractional: &[Vec3], h: f64) -> Self {
        let spacings = if cell.any_periodic() {
            cell.plane_spacings()
        } else {
            [1.0; 3]
        };
        let periodic = cell.periodic();
        let mut n_bins = [1i64; 3];
        let mut bin_width = [0.0; 3];
        let mut origin = [0.0; 3];
        let mut reach = [1i64; 3];
        for axis in 0..3 {
            // Width of one fractional unit in Å along this axis.
            let span = spacings[axis];
            if periodic[axis] {
                let nb = ((span / h).floor() as i64).max(1);
                n_bins[axis] = nb;
                bin_width[axis] = 1.0 / nb as f64;
                let bin_len = span / nb as f64;
                reach[axis] = (h / bin_len).ceil() as i64;
            } else {
                bin_width[axis] = h / span;
                origin[axis] = fractional
                    .iter()
                    .map(|s| s[axis])
                    .fold(f64::INFINITY, f64::min);
                reach[axis] = 1;
            }
        }
        Self {
            periodic,
            n_bins,
            bin_width,
            origin,
            reach,
        }
    }

    fn bin_of(&self, s: &Vec3) -> [i64; 3] {
        let mut out = [0i64; 3];
        for axis in 0..3 {
            out[axis] = if self.periodic[axis] {
                ((s[axis] / self.bin_width[axis]).floor() as i64).clamp(0, self.n_bins[axis] - 1)
            } else {
                ((s[axis] - self.origin[axis]) / self.bin_width[axis]).floor() as i64
            };
        }
        out
    }
}

/// Builds the directed graph of all pairs with `0 < r_uv <= h`, with ghost
/// replication enabled.
pub fn build_graph(system: &AtomicSystem, h: f64) -> Result<NeighborGraph> {
    build_graph_with(system, h, GraphOptions::default())
}

pub fn build_graph_with(
    system: &AtomicSystem,
    h: f64,
    options: GraphOptions,
) -> Result<NeighborGraph> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "hard cutoff must be positive, got {h}"
        )));
    }
    if system.is_empty() {
        return Err(Error::EmptySystem);
    }
    let cell = &system.cell;
    if !options.ghost_replication {
        check_minimum_image(cell, h)?;
    }

    // Fractional coordinates, wrapped into [0, 1) on periodic axes. `wraps`
    // records the integer translation removed from each atom.
    let periodic = cell.periodic();
    let mut fractional = Vec::with_capacity(system.len());
    let mut wraps = Vec::with_capacity(system.len());
    let frame = if cell.any_periodic() {
        cell.basis()
            .transpose()
            .try_inverse()
            .unwrap_or_else(Mat3::identity)
    } else {
        Mat3::identity()
    };
    for x in &system.positions {
        let mut s = frame * x;
        let mut n = [0i32; 3];
        for axis in 0..3 {
            if periodic[axis] {
                let f = s[axis].floor();
                n[axis] = f as i32;
                s[axis] -= f;
            }
        }
        fractional.push(s);
        wraps.push(n);
    }

    let binning = Binning::new(cell, &fractional, h);
    let mut bins: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let atom_bins: Vec<[i64; 3]> = fractional.iter().map(|s| binning.bin_of(s)).collect();
    for (i, b) in atom_bins.iter().enumerate() {
        bins.entry(*b).or_default().push(i);
    }
    // Positions with the periodic wrap removed, so each candidate only needs
    // the translation of its bin image.
    let wrapped: Vec<Vec3> = system
        .positions
        .iter()
        .zip(&wraps)
        .map(|(x, n)| x - cell.shift_vector(*n))
        .collect();
    // Loose pre-filter; the exact test below uses raw positions.
    let h2 = h * h * (1.0 + 1e-12);

    let per_node: Vec<(Vec<Edge>, Option<usize>)> = (0..system.len())
        .into_par_iter()
        .map(|v| {
            let mut edges = Vec::new();
            let mut coincident = None;
            let home = atom_bins[v];
            let reach = binning.reach;
            for dx in -reach[0]..=reach[0] {
                for dy in -reach[1]..=reach[1] {
                    for dz in -reach[2]..=reach[2] {
                        let virt = [home[0] + dx, home[1] + dy, home[2] + dz];
                        let mut real = virt;
                        let mut image = [0i32; 3];
                        for axis in 0..3 {
                            if binning.periodic[axis] {
                                let nb = binning.n_bins[axis];
                                real[axis] = virt[axis].rem_euclid(nb);
                                image[axis] = virt[axis].div_euclid(nb) as i32;
                            }
                        }
                        let Some(members) = bins.get(&real) else {
                            continue;
                        };
                        let offset = cell.shift_vector(image) - wrapped[v];
                        for &u in members {
                            let vec = wrapped[u] + offset;
                            let r2 = vec.norm_squared();
                            if (u != v || image != [0; 3]) && r2 <= h2 {
                                let shift = [
                                    image[0] - wraps[u][0] + wraps[v][0],
                                    image[1] - wraps[u][1] + wraps[v][1],
                                    image[2] - wraps[u][2] + wraps[v][2],
                                ];
                                // Recompute from raw positions so edge geometry
                                // matches `refresh` bit for bit.
                                let vec = (system.positions[u] - system.positions[v])
                                    + cell.shift_vector(shift);
                                let r = vec.norm();
                                if r > 0.0 && r <= h {
                                    edges.push(Edge::new(u, v, vec, shift));
                                } else if r == 0.0 && (u != v || shift != [0; 3]) {
                                    coincident = Some(coincident.map_or(u, |c: usize| c.min(u)));
                                }
                            }
                        }
                    }
                }
            }
            sort_edges(&mut edges);
            (edges, coincident)
        })
        .collect();

    let coincident = per_node
        .iter()
        .enumerate()
        .find_map(|(v, (_, c))| c.map(|u| (v, u)));
    let per_node = per_node.into_iter().map(|(edges, _)| edges).collect();
    Ok(NeighborGraph::from_nodes(per_node, h, coincident))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeighborStats {
    pub mean: f64,
    pub min: usize,
    pub max: usize,
    /// `histogram[d]` is the number of nodes with degree `d`.
    pub histogram: Vec<usize>,
}

pub fn neighbor_stats(graph: &NeighborGraph) -> NeighborStats {
    let n = graph.n_nodes();
    let degrees: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let min = degrees.iter().copied().min().unwrap_or(0);
    let mut histogram = vec![0; max + 1];
    for &d in &degrees {
        histogram[d] += 1;
    }
    NeighborStats {
        mean: if n == 0 {
            0.0
        } else {
            graph.n_edges() as f64 / n as f64
        },
        min,
        max,
        histogram,
    }
}
