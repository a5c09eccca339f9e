//! Risk-adaptive multi-objective trajectory planning kernels.
//!
//! Trajectories are 4D NURBS curves over `(x, y, z, speed)`. A constrained
//! NSGA-II trades off flight time, obstacle safety and energy, and a
//! risk-weighted rank vote picks one member of the resulting Pareto set.
//!
//! The crate is `no_std` + `alloc`. File formats, the CLI and the parallel
//! population evaluator live in the `riskplan` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod costs;
pub mod environment;
pub mod error;
pub(crate) mod math;
pub mod moo;
pub mod nurbs;
pub mod power;
pub mod problem;
pub mod rng;
pub mod seeding;
pub mod voting;

pub use error::{Error, Result};

/// Three-component vector used throughout for positions and directions.
pub type Vec3 = nalgebra::Vector3<f64>;
