//! Data pipeline, optimiser and training loop for the hybrid point-cloud
//! classifier. Everything here is `f64`.

pub mod augment;
pub mod checkpoint;
pub mod config;
pub mod data;
pub mod error;
pub mod metrics;
pub mod optim;
pub mod trainer;

pub use error::{Result, TrainError};
