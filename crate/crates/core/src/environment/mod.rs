//! World model: domain, obstacles, distance field and non-insertion hulls.

mod hull;
mod primitives;
mod sdf;

use alloc::vec::Vec;

pub use hull::{hull_signed_distance, OrientedHull, Rotation};
pub use primitives::{DomainBox, ObstaclePrimitive};
pub use sdf::{build_sdf, SignedDistanceField, DEFAULT_RESOLUTION, DEFAULT_VOXEL_BUDGET};

use crate::{Result, Vec3};

/// Immutable environment shared by every cost evaluation of a run.
#[derive(Debug, Clone)]
pub struct Environment {
    pub domain: DomainBox,
    pub obstacles: Vec<ObstaclePrimitive>,
    pub hulls: Vec<OrientedHull>,
    pub sdf: SignedDistanceField,
}

impl Environment {
    pub fn build(
        domain: DomainBox,
        obstacles: Vec<ObstaclePrimitive>,
        hulls: Vec<OrientedHull>,
        resolution: f64,
        voxel_budget: usize,
    ) -> Result<Self> {
        for o in &obstacles {
            o.validate()?;
        }
        for h in &hulls {
            h.validate()?;
        }
        let sdf = build_sdf(&obstacles, &domain, resolution, voxel_budget)?;
        Ok(Self { domain, obstacles, hulls, sdf })
    }

    pub fn query_distance(&self, p: &Vec3) -> Result<f64> {
        self.sdf.query(p)
    }
}

pub fn query_distance(sdf: &SignedDistanceField, point: &Vec3) -> Result<f64> {
    sdf.query(point)
}
