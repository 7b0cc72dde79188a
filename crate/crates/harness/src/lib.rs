//! Experiment runner for the `enhanced-cs` integrators.
//!
//! The `ecs` binary is a thin shell over this library:
//!
//! - [`run`]: one configured integration, written as a CSV run record
//! - [`converge`]: observed order of accuracy over a ladder of step sizes
//! - [`verify`]: the coefficient condition checkers for a list of orders
//! - [`suite`]: named batches of runs executed in parallel

pub mod config;
pub mod converge;
pub mod error;
pub mod run;
pub mod suite;
pub mod verify;

pub use config::{ConfigOverrides, ExperimentConfig};
pub use error::{HarnessError, Result};
