//! Smooth dynamic cutoffs for atomistic neighbor graphs.
//!
//! The pipeline is: build a hard-cutoff neighbor graph ([`neighbor`]), assign
//! every neighbor a differentiable soft rank, weight the ranks with a Gaussian
//! centred on the target neighbor count, and take the weighted average of the
//! neighbor distances as the per-atom cutoff ([`dyncut`]). Everything is built
//! from C² pieces ([`smoothfn`]), so the cutoff has analytic first and second
//! derivatives with respect to atom positions and can be placed inside an
//! energy model without breaking energy conservation ([`potential`], [`md`]).
//!
//! Units throughout: Å, fs, eV, amu, K.

pub mod bench;
pub mod dyncut;
pub mod elements;
pub mod error;
pub mod geometry;
pub mod md;
pub mod neighbor;
pub mod potential;
pub mod smoothfn;
pub mod units;

pub use error::{Error, Result};
pub use geometry::{AtomicSystem, Cell, Mat3, Vec3};
