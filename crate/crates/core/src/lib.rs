//! Correlation measures of finite-dimensional quantum states and numerical
//! checks of the identities that tie quantum discord to state merging and
//! dense coding.
//!
//! Entropies are in bits. Every optimized quantity is reported together with
//! the direction of its bias: minimizations return upper bounds and
//! maximizations return lower bounds.

pub mod entanglement;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod harness;
pub mod linalg;
pub mod measure;
pub mod optimize;
pub mod param;
pub mod rng;
pub mod state;
pub mod tasks;

pub use error::{Error, Result};
pub use exec::Execution;
pub use optimize::{Method, OptResult, OptimizerConfig};
pub use rng::RandomSource;
pub use state::{DensityOperator, PureState, QuantumChannel, SystemLayout};
