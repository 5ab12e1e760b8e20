//! Photocount statistics, Gaussian approximations and CV-QKD security of
//! unbalanced homodyne and double homodyne receivers.

// `!(x > 0.0)` is used on purpose to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod gauss_approx;
pub mod metrics;
pub mod optimize;
pub mod photostat;
pub mod povm;
pub mod quad;
pub mod security;
pub mod special;

pub use error::{Error, Result};
pub use exec::Execution;
pub use photostat::{
    Amplitude, ArmConfig, BeamSplitter, CountDistribution, DetectorPair, DoubleHomodyneConfig,
    HomodyneConfig, JointDistribution, SignalState,
};
