use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("voxel grid of {requested} cells exceeds the budget of {budget}")]
    Capacity { requested: usize, budget: usize },
    #[error("point ({x:.3}, {y:.3}, {z:.3}) lies outside the distance field")]
    OutOfDomain { x: f64, y: f64, z: f64 },
    #[error("parameter {u} outside curve range [{min}, {max}]")]
    ParameterRange { u: f64, min: f64, max: f64 },
    #[error("power model fit failed: {0}")]
    Fit(String),
    #[error("power model has no positive root along direction ({x:.4}, {y:.4}, {z:.4})")]
    ModelDomain { x: f64, y: f64, z: f64 },
    #[error("decision vector has {found} entries, expected {expected}")]
    Decode { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("planning failed: {0}")]
    Planning(String),
    #[error("risk state produces no usable objective weight")]
    DegenerateRisk,
}
