//! Monte Carlo experiment runners. Each takes a declarative config and
//! returns a [`crate::report::MetricReport`]; every row is regenerable from
//! the config and master seed.

pub mod common;
mod control_channel;
mod maee;
mod multipath;
mod quantization;
mod rician;
mod single_path;
mod variance;

pub use control_channel::run_control_channel;
pub use maee::run_maee_tradeoff;
pub use multipath::run_multipath_matrix_mse;
pub use quantization::run_quantization_study;
pub use rician::run_rician_study;
pub use single_path::run_single_path_mse;
pub use variance::run_variance_validation;
