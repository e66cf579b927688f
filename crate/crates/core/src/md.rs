//! Time integration: velocity Verlet (NVE) and BAOAB Langevin (NVT).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{AtomicSystem, Vec3};
use crate::neighbor::{build_graph, NeighborGraph};
use crate::potential::{energy_forces_on_graph, EnergyForces, PairParams};
use crate::units::{BOLTZMANN, FORCE_TO_ACCEL};

/// Any force magnitude above this (eV/Å) is treated as a blow-up.
pub const MAX_FORCE: f64 = 1e4;
/// Temperatures above this multiple of the reference are treated as a blow-up.
pub const MAX_TEMPERATURE_RATIO: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Thermostat {
    None,
    /// Friction in 1/fs, temperature in K.
    Langevin {
        friction: f64,
        temperature: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MdConfig {
    /// Time step, fs.
    pub dt: f64,
    pub steps: usize,
    pub thermostat: Thermostat,
    pub seed: u64,
    pub record_every: usize,
    pub rebuild_neighbors_every: usize,
}

impl MdConfig {
    pub fn nve(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            thermostat: Thermostat::None,
            seed: 0,
            record_every: 1,
            rebuild_neighbors_every: 1,
        }
    }

    pub fn langevin(dt: f64, steps: usize, friction: f64, temperature: f64, seed: u64) -> Self {
        Self {
            thermostat: Thermostat::Langevin {
                friction,
                temperature,
            },
            seed,
            ..Self::nve(dt, steps)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        if self.record_every == 0 || self.rebuild_neighbors_every == 0 {
            return Err(Error::InvalidParameter(
                "record_every and rebuild_neighbors_every must be at least 1".into(),
            ));
        }
        if let Thermostat::Langevin {
            friction,
            temperature,
        } = self.thermostat
        {
            if !(friction >= 0.0 && friction.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "friction must be >= 0, got {friction}"
                )));
            }
            if !(temperature >= 0.0 && temperature.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "temperature must be >= 0, got {temperature}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    /// fs
    pub time: f64,
    pub total_energy: f64,
    pub kinetic_energy: f64,
    pub potential_energy: f64,
    pub temperature: f64,
    pub mean_dynamic_cutoff: f64,
    pub mean_in_cutoff_neighbors: f64,
    pub mean_hard_neighbors: f64,
}

pub fn run_md(
    system: &mut AtomicSystem,
    potential: &PairParams,
    config: &MdConfig,
) -> Result<Vec<TrajectoryRecord>> {
    run_md_observed(system, potential, config, |_, _| Ok(()))
}

/// Like [`run_md`], calling `observer` with the current frame each time a
/// record is taken.
pub fn run_md_observed<F>(
    system: &mut AtomicSystem,
    potential: &PairParams,
    config: &MdConfig,
    mut observer: F,
) -> Result<Vec<TrajectoryRecord>>
where
    F: FnMut(&AtomicSystem, &TrajectoryRecord) -> Result<()>,
{
    config.validate()?;
    potential.validate()?;
    if system.is_empty() {
        return Err(Error::EmptySystem);
    }
    let n = system.len();
    let mut velocities = system
        .velocities
        .take()
        .unwrap_or_else(|| vec![Vec3::zeros(); n]);
    let inv_mass: Vec<f64> = system.masses.iter().map(|m| FORCE_TO_ACCEL / m).collect();

    let reference_temperature = match config.thermostat {
        Thermostat::Langevin { temperature, .. } => temperature,
        Thermostat::None => {
            system.velocities = Some(velocities.clone());
            let t = system.temperature();
            system.velocities = None;
            t
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut graph = build_graph(system, potential.h)?;
    let mut ef = evaluate(&graph, potential, 0)?;
    let mut records = Vec::with_capacity(config.steps / config.record_every + 1);

    let half = 0.5 * config.dt;
    for step in 0..=config.steps {
        if step > 0 {
            // B
            kick(&mut velocities, &ef.forces, &inv_mass, half);
            match config.thermostat {
                Thermostat::None => drift(&mut system.positions, &velocities, config.dt),
                Thermostat::Langevin {
                    friction,
                    temperature,
                } => {
                    // A O A
                    drift(&mut system.positions, &velocities, half);
                    let c1 = (-friction * config.dt).exp();
                    let c2 = (1.0 - c1 * c1).max(0.0).sqrt();
                    for (i, vel) in velocities.iter_mut().enumerate() {
                        let sd = (BOLTZMANN * temperature * inv_mass[i]).sqrt();
                        for axis in 0..3 {
                            let xi: f64 = StandardNormal.sample(&mut rng);
                            vel[axis] = c1 * vel[axis] + c2 * sd * xi;
                        }
                    }
                    drift(&mut system.positions, &velocities, half);
                }
            }
            if step % config.rebuild_neighbors_every == 0 {
                graph = build_graph(system, potential.h)?;
            } else {
                graph.refresh(system);
            }
            ef = evaluate(&graph, potential, step)?;
            // B
            kick(&mut velocities, &ef.forces, &inv_mass, half);
        }

        system.velocities = Some(velocities);
        let kinetic = system.kinetic_energy();
        let temperature = system.temperature();
        if !kinetic.is_finite() {
            return Err(Error::BlowUp {
                step,
                reason: "non-finite kinetic energy".into(),
            });
        }
        if reference_temperature > 0.0
            && temperature > MAX_TEMPERATURE_RATIO * reference_temperature
        {
            return Err(Error::BlowUp {
                step,
                reason: format!(
                    "temperature {temperature:.1} K exceeds {MAX_TEMPERATURE_RATIO}x reference"
                ),
            });
        }

        if step % config.record_every == 0 {
            let record = TrajectoryRecord {
                step,
                time: step as f64 * config.dt,
                total_energy: kinetic + ef.energy,
                kinetic_energy: kinetic,
                potential_energy: ef.energy,
                temperature,
                mean_dynamic_cutoff: ef.mean_cutoff(),
                mean_in_cutoff_neighbors: ef.mean_pruned_degree(),
                mean_hard_neighbors: ef.mean_hard_degree(),
            };
            observer(system, &record)?;
            records.push(record);
        }
        velocities = system.velocities.take().expect("velocities were just set");
    }
    system.velocities = Some(velocities);
    Ok(records)
}

fn evaluate(graph: &NeighborGraph, potential: &PairParams, step: usize) -> Result<EnergyForces> {
    let ef = energy_forces_on_graph(graph, potential).map_err(|e| match e {
        Error::Overlap { i, j, distance } => Error::BlowUp {
            step,
            reason: format!("atoms {i} and {j} overlap at {distance:.4} Å"),
        },
        other => other,
    })?;
    if !ef.energy.is_finite() {
        return Err(Error::BlowUp {
            step,
            reason: "non-finite potential energy".into(),
        });
    }
    for (i, f) in ef.forces.iter().enumerate() {
        if !f.iter().all(|x| x.is_finite()) || f.norm() > MAX_FORCE {
            return Err(Error::BlowUp {
                step,
                reason: format!("force on atom {i} is {:.3e} eV/Å", f.norm()),
            });
        }
    }
    Ok(ef)
}

fn kick(velocities: &mut [Vec3], forces: &[Vec3], inv_mass: &[f64], dt: f64) {
    for ((v, f), im) in velocities.iter_mut().zip(forces).zip(inv_mass) {
        *v += (dt * im) * f;
    }
}

fn drift(positions: &mut [Vec3], velocities: &[Vec3], dt: f64) {
    for (x, v) in positions.iter_mut().zip(velocities) {
        *x += dt * v;
    }
}

/// Least-squares slope of total energy per atom against time, in
/// meV/atom/ps. `None` with fewer than 10 records.
pub fn drift_slope(records: &[TrajectoryRecord], n_atoms: usize) -> Option<f64> {
    if records.len() < 10 || n_atoms == 0 {
        return None;
    }
    let n = records.len() as f64;
    let t_mean = records.iter().map(|r| r.time).sum::<f64>() / n;
    let e_mean = records.iter().map(|r| r.total_energy).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for r in records {
        let dt = r.time - t_mean;
        sxy += dt * (r.total_energy - e_mean);
        sxx += dt * dt;
    }
    if sxx == 0.0 {
        return None;
    }
    // eV/atom/fs -> meV/atom/ps
    Some(sxy / sxx / n_atoms as f64 * 1e6)
}

/// Mean number of neighbors inside the active cutoff, one value per record.
pub fn neighbor_count_trace(records: &[TrajectoryRecord]) -> Vec<f64> {
    records.iter().map(|r| r.mean_in_cutoff_neighbors).collect()
}
