//! Batch front end for the Gaussian-orbital tensor-train pipeline: job
//! configs, molecule fixtures, sweeps, dense oracle checks, and CSV/JSON
//! reports.

pub mod config;
pub mod fixture;
pub mod oracle;
pub mod output;
pub mod pipeline;

pub use config::{JobConfig, ValidationError};
pub use fixture::MoleculeFixture;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "GTOQTT_THREADS";
