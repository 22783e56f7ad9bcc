//! Experiment drivers and command-line front end for `spikeres`.
//!
//! Every experiment writes CSV/JSON files with 17-significant-digit floats
//! plus a `manifest.json` listing each file with its SHA-256 digest.
//!
//! | kind             | files                                           |
//! |------------------|-------------------------------------------------|
//! | `tables`         | `table1.csv`, `table2.csv`                      |
//! | `figure1`        | `figure1.csv`, `figure1_fit.json`               |
//! | `gap_bound`      | `gap_bound.csv`                                 |
//! | `scaling`        | `scaling.csv`, `scaling_fit.json`               |
//! | `adversary_demo` | `pair.json`, `gap_profile.csv`                  |
//! | `decimate`       | `report.json`                                   |

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod spec;

pub use cli::cli_main;
pub use error::{Result, XlabError};
pub use experiments::{
    gap_bound_rows, run_adversary_demo, run_decimate, run_experiment, run_figure1, run_gap_bound, run_scaling,
    run_tables, GapBoundRow, ScalingFit,
};
pub use spec::{ExperimentKind, ExperimentSpec, OutputDigest, RunManifest};
