//! Reconstruction of spike trains `F(x) = sum_j a_j delta(x - x_j)` from
//! band-limited, noisy Fourier data.
//!
//! * [`signal`]: signals, moments, Fourier transform, cluster geometry.
//! * [`prony`]: the moment map, its Jacobian, Prony solving and Newton inversion.
//! * [`adversary`]: pairs of clustered signals with matched low-order moments.
//! * [`decimation`]: noisy oracles, decimated Prony reconstruction and error sweeps.

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod decimation;
pub mod error;
pub mod exact;
pub mod exec;
pub mod fmt;
pub mod prony;
pub mod signal;
pub mod stats;
pub mod sum;

pub use adversary::{
    construct_adversary, construct_adversary_with, construct_max_adversary, fourier_gap, table_signals,
    verify_moment_match, AdversaryConfig, AdversaryPair, Family, FourierGapProfile, MomentMatch,
};
pub use decimation::{
    decimated_prony, error_scaling_sweep, make_adversarial_oracle, make_random_oracle, DecimationConfig,
    FourierOracle, ReconstructionReport, SweepRow, Which,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use prony::{
    conditioning, newton_invert, prony_forward, prony_jacobian, prony_solve, ConditioningReport, NewtonSolution,
    PronyImage, PronyJacobian,
};
pub use signal::{
    detect_cluster, fourier_eval, fourier_series_eval, moments, node_distance, rescale_cluster, AmplitudeBounds,
    ClusterMap, ClusterSpec, SpikeSignal,
};
