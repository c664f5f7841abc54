//! Generalized regression neural networks (GRNN) for regression, system
//! identification and online control.
//!
//! A GRNN memorizes every training pattern in a single pass and predicts by
//! averaging the stored outputs with normalized Gaussian weights of the
//! squared Euclidean distance to each stored input. The crate provides:
//!
//! - [`grnn`]: the estimator, bandwidth selection and a plain-text model format.
//! - [`growth`]: a novelty/error gate with bounded capacity for the pattern store.
//! - [`bp`]: a one-hidden-layer backpropagation network used as a baseline.
//! - [`data`]: CSV ingestion, z-score normalization, seeded splits and
//!   synthetic benchmark datasets.
//! - [`sysid`]: series-parallel identification of simulated plants.
//! - [`control`]: an online GRNN inverse-model controller for a quadcopter
//!   altitude loop.
//! - [`bench`]: the GRNN vs. backpropagation benchmark protocol and its CSV outputs.

pub mod bench;
pub mod bp;
pub mod control;
pub mod data;
mod error;
pub mod growth;
pub mod grnn;
pub mod metrics;
pub mod sysid;

pub use error::{Error, Result};
pub use grnn::{GrnnModel, Pattern};
pub use growth::GrowthPolicy;
