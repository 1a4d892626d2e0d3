//! Run orchestration: config parsing, scenario drivers, CSV/manifest
//! output, the validation suite, and a small worker pool.
//!
//! The physics modules stay filesystem-free; everything that knows about
//! files, key=value configs, or threads lives here.

pub mod config;
pub mod output;
pub mod runners;
pub mod validation;
pub mod workers;

pub use config::{CmWidth, InitialChain, RunConfig, Settings};
pub use runners::{
    run_dissociation, run_fidelity_surface, run_fringe_scan, DissociationOutcome, FringeRow,
    FringeScan, SurfaceCell, SurfaceOutcome,
};
pub use validation::{run_validation, Check, ValidationReport};
pub use workers::run_indexed;
