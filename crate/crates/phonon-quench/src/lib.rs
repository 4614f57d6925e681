//! Command-line front end for `phonon_quench_core`: configuration files,
//! experiment drivers, CSV/SVG emission and run manifests.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, Mode, RunConfig};
pub use error::CliError;
pub use run::{execute, Invocation, Outcome};
