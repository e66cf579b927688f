use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("system contains no atoms")]
    EmptySystem,

    #[error("cell basis is singular (|det| = {det:e})")]
    SingularCell { det: f64 },

    #[error(
        "periodic cell width {width:.6} Å along axis {axis} is smaller than 2h = {required:.6} Å \
         and ghost replication is disabled"
    )]
    MinimumImageViolation {
        axis: usize,
        width: f64,
        required: f64,
    },

    #[error("graph was built with h = {graph_h} Å but parameters use h = {params_h} Å")]
    ParamMismatch { graph_h: f64, params_h: f64 },

    #[error("atoms {i} and {j} overlap (r = {distance:.4} Å)")]
    Overlap { i: usize, j: usize, distance: f64 },

    #[error("simulation blew up at step {step}: {reason}")]
    BlowUp { step: usize, reason: String },
}
