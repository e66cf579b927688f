//! Atomic systems, periodic cells and minimum-image displacements.
//!
//! Lattice vectors are stored as the *rows* of the cell basis. Positions are
//! Cartesian and are never wrapped in place; the neighbor builder wraps a
//! private copy when binning.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::elements;
use crate::error::{Error, Result};
use crate::units::{BOLTZMANN, FORCE_TO_ACCEL, MVV_TO_EV};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Smallest |det| accepted for a cell with at least one periodic axis (Å³).
const MIN_CELL_VOLUME: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    basis: Mat3,
    periodic: [bool; 3],
    /// (basisᵀ)⁻¹, maps Cartesian to fractional coordinates. Zero when the
    /// basis is singular, which is only allowed without periodicity.
    inv_t: Mat3,
}

impl Cell {
    /// Builds a cell from lattice vectors given as rows.
    pub fn new(vectors: [[f64; 3]; 3], periodic: [bool; 3]) -> Result<Self> {
        let basis = Mat3::from_row_slice(&[
            vectors[0][0],
            vectors[0][1],
            vectors[0][2],
            vectors[1][0],
            vectors[1][1],
            vectors[1][2],
            vectors[2][0],
            vectors[2][1],
            vectors[2][2],
        ]);
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "cell vectors must be finite".into(),
            ));
        }
        let det = basis.determinant();
        let inv_t = if det.abs() > MIN_CELL_VOLUME {
            basis.transpose().try_inverse().unwrap_or_else(Mat3::zeros)
        } else if periodic.iter().any(|&p| p) {
            return Err(Error::SingularCell { det });
        } else {
            Mat3::zeros()
        };
        Ok(Self {
            basis,
            periodic,
            inv_t,
        })
    }

    pub fn orthorhombic(a: f64, b: f64, c: f64, periodic: [bool; 3]) -> Result<Self> {
        Self::new([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]], periodic)
    }

    pub fn cubic(a: f64) -> Result<Self> {
        Self::orthorhombic(a, a, a, [true; 3])
    }

    /// An open-boundary cell with a zero basis.
    pub fn open() -> Self {
        Self {
            basis: Mat3::zeros(),
            periodic: [false; 3],
            inv_t: Mat3::zeros(),
        }
    }

    pub fn basis(&self) -> &Mat3 {
        &self.basis
    }

    pub fn vector(&self, axis: usize) -> Vec3 {
        self.basis.row(axis).transpose()
    }

    pub fn periodic(&self) -> [bool; 3] {
        self.periodic
    }

    pub fn any_periodic(&self) -> bool {
        self.periodic.iter().any(|&p| p)
    }

    pub fn volume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    pub fn has_volume(&self) -> bool {
        self.volume() > MIN_CELL_VOLUME
    }

    /// Distances between opposite faces of the cell, V / |b × c| and cyclic.
    pub fn plane_spacings(&self) -> [f64; 3] {
        let v = self.volume();
        let mut out = [0.0; 3];
        for (axis, slot) in out.iter_mut().enumerate() {
            let cross = self
                .vector((axis + 1) % 3)
                .cross(&self.vector((axis + 2) % 3));
            let area = cross.norm();
            *slot = if area > 0.0 { v / area } else { 0.0 };
        }
        out
    }

    pub fn to_fractional(&self, r: &Vec3) -> Vec3 {
        self.inv_t * r
    }

    pub fn to_cartesian(&self, s: &Vec3) -> Vec3 {
        self.basis.transpose() * s
    }

    /// Cartesian translation of the periodic image `shift`.
    ///
    /// Evaluated term by term so that `shift_vector(-s) == -shift_vector(s)`
    /// holds bit for bit.
    pub fn shift_vector(&self, shift: [i32; 3]) -> Vec3 {
        let mut out = Vec3::zeros();
        for (axis, &n) in shift.iter().enumerate() {
            if n != 0 {
                out += self.vector(axis) * n as f64;
            }
        }
        out
    }

    /// Applies the minimum-image convention along periodic axes.
    pub fn minimum_image(&self, d: &Vec3) -> Vec3 {
        if !self.any_periodic() {
            return *d;
        }
        let s = self.to_fractional(d);
        let mut shift = [0i32; 3];
        for axis in 0..3 {
            if self.periodic[axis] {
                // f64::round is half-away-from-zero, so round(-x) == -round(x).
                shift[axis] = -(s[axis].round() as i32);
            }
        }
        d + self.shift_vector(shift)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomicSystem {
    pub positions: Vec<Vec3>,
    pub species: Vec<u8>,
    /// Å/fs.
    pub velocities: Option<Vec<Vec3>>,
    /// amu.
    pub masses: Vec<f64>,
    pub cell: Cell,
}

impl AtomicSystem {
    pub fn new(
        positions: Vec<Vec3>,
        species: Vec<u8>,
        masses: Vec<f64>,
        cell: Cell,
    ) -> Result<Self> {
        if positions.len() != species.len() || positions.len() != masses.len() {
            return Err(Error::InvalidParameter(format!(
                "positions ({}), species ({}) and masses ({}) differ in length",
                positions.len(),
                species.len(),
                masses.len()
            )));
        }
        if let Some(i) = masses.iter().position(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "mass of atom {i} must be positive"
            )));
        }
        if let Some(i) = positions
            .iter()
            .position(|p| p.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "position of atom {i} is not finite"
            )));
        }
        Ok(Self {
            positions,
            species,
            velocities: None,
            masses,
            cell,
        })
    }

    /// Builds a system taking masses from the element table.
    pub fn from_species(positions: Vec<Vec3>, species: Vec<u8>, cell: Cell) -> Result<Self> {
        let masses = species
            .iter()
            .map(|&z| {
                elements::mass(z)
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown atomic number {z}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(positions, species, masses, cell)
    }

    pub fn with_velocities(mut self, velocities: Vec<Vec3>) -> Result<Self> {
        if velocities.len() != self.len() {
            return Err(Error::InvalidParameter(
                "velocity count differs from atom count".into(),
            ));
        }
        self.velocities = Some(velocities);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Kinetic energy in eV; zero when no velocities are set.
    pub fn kinetic_energy(&self) -> f64 {
        let Some(vel) = &self.velocities else {
            return 0.0;
        };
        let mvv: f64 = vel
            .iter()
            .zip(&self.masses)
            .map(|(v, m)| m * v.norm_squared())
            .sum();
        0.5 * mvv * MVV_TO_EV
    }

    /// Instantaneous kinetic temperature 2·KE / (3·N·k_B).
    pub fn temperature(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        2.0 * self.kinetic_energy() / (3.0 * self.len() as f64 * BOLTZMANN)
    }

    /// Total momentum in amu·Å/fs.
    pub fn momentum(&self) -> Vec3 {
        match &self.velocities {
            Some(vel) => vel.iter().zip(&self.masses).map(|(v, m)| v * *m).sum(),
            None => Vec3::zeros(),
        }
    }
}

/// Minimum-image displacement `x_j - x_i`.
///
/// Exactly antisymmetric: `displacement(s, i, j) == -displacement(s, j, i)`.
pub fn displacement(system: &AtomicSystem, i: usize, j: usize) -> Vec3 {
    let d = system.positions[j] - system.positions[i];
    system.cell.minimum_image(&d)
}

/// Fails when a periodic width is below `2h`, i.e. when the nearest image is
/// not guaranteed to be the only image within `h`.
pub fn check_minimum_image(cell: &Cell, h: f64) -> Result<()> {
    let spacings = cell.plane_spacings();
    for axis in 0..3 {
        if cell.periodic[axis] && spacings[axis] < 2.0 * h {
            return Err(Error::MinimumImageViolation {
                axis,
                width: spacings[axis],
                required: 2.0 * h,
            });
        }
    }
    Ok(())
}

/// Conventional FCC supercell with `4·nx·ny·nz` atoms, periodic on all axes.
pub fn build_fcc(lattice_constant: f64, repeats: [usize; 3], species: u8) -> Result<AtomicSystem> {
    if !(lattice_constant > 0.0) {
        return Err(Error::InvalidParameter(
            "lattice constant must be positive".into(),
        ));
    }
    if repeats.contains(&0) {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    const BASIS: [[f64; 3]; 4] = [
        [0.0, 0.0, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
        [0.5, 0.5, 0.0],
    ];
    let a = lattice_constant;
    let mut positions = Vec::with_capacity(4 * repeats.iter().product::<usize>());
    for i in 0..repeats[0] {
        for j in 0..repeats[1] {
            for k in 0..repeats[2] {
                for b in &BASIS {
                    positions.push(Vec3::new(
                        (i as f64 + b[0]) * a,
                        (j as f64 + b[1]) * a,
                        (k as f64 + b[2]) * a,
                    ));
                }
            }
        }
    }
    let cell = Cell::orthorhombic(
        repeats[0] as f64 * a,
        repeats[1] as f64 * a,
        repeats[2] as f64 * a,
        [true; 3],
    )?;
    let n = positions.len();
    AtomicSystem::from_species(positions, vec![species; n], cell)
}

/// Random positions inside the cell with a minimum pair separation
/// (minimum image), placed by rejection sampling.
pub fn random_gas(
    n_atoms: usize,
    cell: Cell,
    min_separation: f64,
    species: u8,
    seed: u64,
) -> Result<AtomicSystem> {
    if !cell.has_volume() {
        return Err(Error::InvalidParameter(
            "random_gas needs a cell with volume".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_sq = min_separation * min_separation;
    let mut positions: Vec<Vec3> = Vec::with_capacity(n_atoms);
    let max_attempts = 10_000 * (n_atoms + 1);
    let mut attempts = 0;
    while positions.len() < n_atoms {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::InvalidParameter(format!(
                "could not place {n_atoms} atoms {min_separation} Å apart"
            )));
        }
        let s = Vec3::new(rng.random(), rng.random(), rng.random());
        let x = cell.to_cartesian(&s);
        let clash = positions
            .iter()
            .any(|p| cell.minimum_image(&(x - p)).norm_squared() < min_sq);
        if !clash {
            positions.push(x);
        }
    }
    AtomicSystem::from_species(positions, vec![species; n_atoms], cell)
}

/// Displaces every atom by a uniform random vector in `[-amplitude, amplitude]³`.
pub fn perturb(system: &AtomicSystem, amplitude: f64, seed: u64) -> AtomicSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = system.clone();
    for p in &mut out.positions {
        for x in p.iter_mut() {
            *x += amplitude * (2.0 * rng.random::<f64>() - 1.0);
        }
    }
    out
}

/// Draws Maxwell–Boltzmann velocities at `temperature` (K) and removes the
/// net momentum. Deterministic for a fixed seed.
pub fn maxwell_boltzmann_velocities(
    system: &AtomicSystem,
    temperature: f64,
    seed: u64,
) -> Result<AtomicSystem> {
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter(
            "temperature must be non-negative".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kt = BOLTZMANN * temperature;
    let mut velocities: Vec<Vec3> = system
        .masses
        .iter()
        .map(|&m| {
            let std = (kt / m * FORCE_TO_ACCEL).sqrt();
            Vec3::new(
                std * rng.sample::<f64, _>(StandardNormal),
                std * rng.sample::<f64, _>(StandardNormal),
                std * rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect();
    if temperature > 0.0 && !velocities.is_empty() {
        let total_mass: f64 = system.masses.iter().sum();
        let p: Vec3 = velocities
            .iter()
            .zip(&system.masses)
            .map(|(v, m)| v * *m)
            .sum();
        let drift = p / total_mass;
        for v in &mut velocities {
            *v -= drift;
        }
    }
    system.clone().with_velocities(velocities)
}
