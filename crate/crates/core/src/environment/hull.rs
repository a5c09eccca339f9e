use serde::{Deserialize, Serialize};

use crate::math::norm3;
use crate::{Error, Result, Vec3};

pub type Rotation = nalgebra::Matrix3<f64>;

/// Oriented bounding box guarding infrastructure the vehicle must not enter.
///
/// `rotation` maps hull-frame coordinates to world coordinates; its columns are
/// the hull axes expressed in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedHull {
    pub center: Vec3,
    pub half_extents: Vec3,
    pub rotation: Rotation,
}

impl OrientedHull {
    pub fn new(center: Vec3, half_extents: Vec3, rotation: Rotation) -> Result<Self> {
        let hull = Self { center, half_extents, rotation };
        hull.validate()?;
        Ok(hull)
    }

    pub fn axis_aligned(center: Vec3, half_extents: Vec3) -> Result<Self> {
        Self::new(center, half_extents, Rotation::identity())
    }

    pub fn validate(&self) -> Result<()> {
        if self.half_extents.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::Config("hull half_extents must be positive".into()));
        }
        let err = (self.rotation.transpose() * self.rotation - Rotation::identity()).abs().max();
        if !(err <= 1e-9) {
            return Err(Error::Config("hull rotation is not orthonormal".into()));
        }
        Ok(())
    }

    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        self.rotation.transpose() * (p - self.center)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let q = self.to_local(p);
        (0..3).all(|a| q[a].abs() <= self.half_extents[a])
    }

    /// Distance to the hull surface: positive outside, non-positive inside
    /// (the magnitude is then the depth to the nearest face).
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        let local = self.to_local(p);
        let q = local.abs() - self.half_extents;
        let outside = norm3(&q.map(|c| c.max(0.0)));
        let inside = q.x.max(q.y).max(q.z).min(0.0);
        outside + inside
    }
}

pub fn hull_signed_distance(hull: &OrientedHull, point: &Vec3) -> f64 {
    hull.signed_distance(point)
}
