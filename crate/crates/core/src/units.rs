//! Fixed unit system: Å, fs, eV, amu, K.

/// Boltzmann constant in eV/K.
pub const BOLTZMANN: f64 = 8.617333262e-5;

/// Converts a force-over-mass in (eV/Å)/amu into an acceleration in Å/fs².
pub const FORCE_TO_ACCEL: f64 = 9.648_533_212_3e-3;

/// Converts amu·Å²/fs² into eV.
pub const MVV_TO_EV: f64 = 1.0 / FORCE_TO_ACCEL;
