use thiserror::Error;

use crate::decimation::ReconstructionReport;
use crate::signal::SpikeSignal;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("jacobian is singular or too ill-conditioned (cond estimate {condition:e})")]
    Conditioning { condition: f64 },

    #[error("newton iteration stalled after {iterations} iterations with residual {residual:e}")]
    NoConvergence {
        iterate: Box<SpikeSignal>,
        residual: f64,
        iterations: usize,
    },

    #[error("model order {order} not supported by the data: {reason}")]
    ModelOrder { order: usize, reason: String },

    #[error("prony roots are not real: max imaginary part {imag:e} exceeds {tolerance:e}")]
    Inconsistent { imag: f64, tolerance: f64 },

    #[error("continuation failed: reached eta = {achieved_eta:e} of requested {requested_eta:e}")]
    Construction {
        achieved_eta: f64,
        requested_eta: f64,
    },

    #[error("perturbed cluster leaves the admissible region ({reason}); try a smaller eta")]
    BoundViolation { reason: String },

    #[error("fourier gap is numerically zero (max {max_gap:e}); the two signals coincide")]
    Underflow { max_gap: f64 },

    #[error("bandwidth {bandwidth} exceeds the validity range 1/(2 pi h) = {limit}")]
    ValidityRange { bandwidth: f64, limit: f64 },

    #[error("frequency {s} outside the measured band [-{bandwidth}, {bandwidth}]")]
    OutOfBand { s: f64, bandwidth: f64 },

    #[error("noise {noise:e} at s = {s} exceeds the oracle bound {epsilon:e}")]
    NoiseBound { s: f64, noise: f64, epsilon: f64 },

    #[error("no candidate reached residual {threshold:e}; best residual {}", .best.residual)]
    ReconstructionFailure {
        best: Box<ReconstructionReport>,
        threshold: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
