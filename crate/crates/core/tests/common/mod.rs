//! Shared oracles and generators for integration and acceptance tests.
#![allow(dead_code)]

use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::{DBig, FBig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dyncut_core::dyncut::DynCutParams;
use dyncut_core::geometry::random_gas;
use dyncut_core::neighbor::Edge;
use dyncut_core::{AtomicSystem, Cell, Vec3};

/// Random cell (possibly skewed) with random periodicity and a random-gas
/// filling. Returns `None` when the packing fails.
pub fn random_system(
    seed: u64,
    n_atoms: usize,
    density: f64,
    min_separation: f64,
) -> Option<AtomicSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let volume = n_atoms as f64 / density;
    let edge = volume.cbrt();
    let mut basis = [[0.0; 3]; 3];
    for (axis, row) in basis.iter_mut().enumerate() {
        row[axis] = edge * rng.random_range(0.85..1.15);
    }
    // Mild skew keeps the cell well conditioned.
    basis[1][0] = edge * rng.random_range(-0.2..0.2);
    basis[2][0] = edge * rng.random_range(-0.2..0.2);
    basis[2][1] = edge * rng.random_range(-0.2..0.2);
    let periodic = [
        rng.random_bool(0.5),
        rng.random_bool(0.5),
        rng.random_bool(0.5),
    ];
    let cell = Cell::new(basis, periodic).ok()?;
    random_gas(n_atoms, cell, min_separation, 29, seed).ok()
}

/// Every `(dst, src, shift, distance)` with `0 < r <= h`, by direct
/// enumeration of all pairs and enough periodic images.
pub fn brute_force_edges(system: &AtomicSystem, h: f64) -> Vec<(usize, usize, [i32; 3], f64)> {
    let cell = &system.cell;
    let spacings = cell.plane_spacings();
    let periodic = cell.periodic();
    let mut range = [0i32; 3];
    for axis in 0..3 {
        if periodic[axis] {
            // Raw positions may sit anywhere, so allow for the spread of
            // the atoms themselves in fractional units.
            let fr: Vec<f64> = system
                .positions
                .iter()
                .map(|x| cell.to_fractional(x)[axis])
                .collect();
            let spread = fr.iter().cloned().fold(f64::MIN, f64::max)
                - fr.iter().cloned().fold(f64::MAX, f64::min);
            range[axis] = (h / spacings[axis]).ceil() as i32 + spread.ceil() as i32 + 1;
        }
    }
    let mut out = Vec::new();
    let n = system.len();
    for v in 0..n {
        for u in 0..n {
            for a in -range[0]..=range[0] {
                for b in -range[1]..=range[1] {
                    for c in -range[2]..=range[2] {
                        let shift = [a, b, c];
                        let vec =
                            (system.positions[u] - system.positions[v]) + cell.shift_vector(shift);
                        let r = vec.norm();
                        if r > 0.0 && r <= h {
                            out.push((v, u, shift, r));
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| {
        x.0.cmp(&y.0)
            .then(x.3.total_cmp(&y.3))
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    out
}

pub fn graph_edges(edges: &[Edge]) -> Vec<(usize, usize, [i32; 3], f64)> {
    edges
        .iter()
        .map(|e| (e.dst, e.src, e.image_shift, e.distance))
        .collect()
}

type F = FBig<HalfEven, 2>;
const BITS: usize = 256;

fn hp(x: f64) -> F {
    F::try_from(x)
        .expect("finite input")
        .with_precision(BITS)
        .value()
}

fn hp_int(k: i64) -> F {
    F::from(k).with_precision(BITS).value()
}

fn hp_pi() -> F {
    DBig::from_str("3.14159265358979323846264338327950288419716939937510582097494459")
        .unwrap()
        .with_precision(80)
        .value()
        .with_rounding::<HalfEven>()
        .with_base::<2>()
        .value()
        .with_precision(BITS)
        .value()
}

/// Direct arbitrary-precision evaluation of the soft ranks, weights and
/// weighted-average cutoff from a list of neighbor distances.
pub struct HpCutoff {
    pub ranks: Vec<f64>,
    pub cutoff: f64,
}

pub fn hp_cutoff(distances: &[f64], params: &DynCutParams) -> HpCutoff {
    let n = params.envelope.exponent() as i64;
    let one = hp_int(1);
    let zero = hp_int(0);
    let h = hp(params.h);
    let alpha = hp(params.alpha);
    let eps = hp(params.epsilon);
    let mu = hp(params.mu());
    let sigma = hp(params.weight.sigma());
    let a = hp_int((n + 1) * (n + 2) / 2);
    let b = hp_int(n * (n + 2));
    let c = hp_int(n * (n + 1) / 2);

    let envelope = |r: &F| -> F {
        let x = r / &h;
        if x >= one {
            return zero.clone();
        }
        let xn = x.powi(n.into());
        &one - &a * &xn + &b * &xn * &x - &c * &xn * &x * &x
    };
    let sigmoid = |z: F| -> F { &one / (&one + (-z).exp()) };
    let norm = &sigma * (hp_int(2) * hp_pi()).sqrt();
    let two_sigma2 = hp_int(2) * &sigma * &sigma;

    let r: Vec<F> = distances.iter().map(|&x| hp(x)).collect();
    let env: Vec<F> = r.iter().map(envelope).collect();
    let mut ranks = Vec::with_capacity(r.len());
    let mut numer = &h * &eps;
    let mut denom = eps.clone();
    for u in 0..r.len() {
        let mut rank = zero.clone();
        for t in 0..r.len() {
            if t != u {
                rank += sigmoid(&alpha * (&r[u] - &r[t])) * &env[t];
            }
        }
        let dev = &rank - &mu;
        let omega = (-(&dev * &dev) / &two_sigma2).exp() / &norm;
        let w = omega * &env[u];
        numer += &w * &r[u];
        denom += w;
        ranks.push(rank.to_f64().value());
    }
    HpCutoff {
        ranks,
        cutoff: (numer / denom).to_f64().value(),
    }
}

/// Rotation matrix from Euler angles.
pub fn rotation(a: f64, b: f64, c: f64) -> dyncut_core::Mat3 {
    let rz = |t: f64| {
        dyncut_core::Mat3::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0)
    };
    let ry = |t: f64| {
        dyncut_core::Mat3::new(t.cos(), 0.0, t.sin(), 0.0, 1.0, 0.0, -t.sin(), 0.0, t.cos())
    };
    rz(a) * ry(b) * rz(c)
}

/// Open-boundary copy of a system with every position mapped by `m`.
pub fn transformed(system: &AtomicSystem, m: &dyncut_core::Mat3, offset: Vec3) -> AtomicSystem {
    let positions = system.positions.iter().map(|x| m * x + offset).collect();
    AtomicSystem::from_species(positions, system.species.clone(), Cell::open()).unwrap()
}

/// Spearman rank correlation (no ties expected).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut out = vec![0.0; v.len()];
        for (rank, &i) in idx.iter().enumerate() {
            out[i] = rank as f64;
        }
        out
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    sxy / (sxx * syy).sqrt()
}
