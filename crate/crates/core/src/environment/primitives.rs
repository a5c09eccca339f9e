use alloc::format;

use serde::{Deserialize, Serialize};

use crate::math::norm3;
use crate::{Error, Result, Vec3};

/// Axis-aligned flight volume plus the speed bound of the 4D search domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub min_corner: Vec3,
    pub max_corner: Vec3,
    pub v_max: f64,
}

impl DomainBox {
    pub fn new(min_corner: Vec3, max_corner: Vec3, v_max: f64) -> Result<Self> {
        let domain = Self { min_corner, max_corner, v_max };
        domain.validate()?;
        Ok(domain)
    }

    pub fn validate(&self) -> Result<()> {
        for axis in 0..3 {
            if !(self.min_corner[axis] < self.max_corner[axis]) {
                return Err(Error::Config(format!(
                    "domain min_corner[{axis}] = {} must be below max_corner[{axis}] = {}",
                    self.min_corner[axis], self.max_corner[axis]
                )));
            }
        }
        if !(self.v_max > 0.0) {
            return Err(Error::Config(format!("v_max = {} must be positive", self.v_max)));
        }
        Ok(())
    }

    pub fn extent(&self) -> Vec3 {
        self.max_corner - self.min_corner
    }

    pub fn diagonal(&self) -> f64 {
        norm3(&self.extent())
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.min_corner[a] && p[a] <= self.max_corner[a])
    }
}

/// Obstacle geometry declared in a scenario. Capsules stand in for cables and pylons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ObstaclePrimitive {
    Box { min: Vec3, max: Vec3 },
    Sphere { center: Vec3, radius: f64 },
    Capsule { endpoint_a: Vec3, endpoint_b: Vec3, radius: f64 },
}

impl ObstaclePrimitive {
    pub fn validate(&self) -> Result<()> {
        match self {
            ObstaclePrimitive::Box { min, max } => {
                if (0..3).any(|a| !(min[a] < max[a])) {
                    return Err(Error::Config("box min must be below max componentwise".into()));
                }
            }
            ObstaclePrimitive::Sphere { radius, .. } | ObstaclePrimitive::Capsule { radius, .. } => {
                if !(*radius >= 0.0) {
                    return Err(Error::Config(format!("radius {radius} must be non-negative")));
                }
            }
        }
        Ok(())
    }

    /// Closed point-membership test used by rasterization.
    pub fn contains(&self, p: &Vec3) -> bool {
        match self {
            ObstaclePrimitive::Box { min, max } => (0..3).all(|a| p[a] >= min[a] && p[a] <= max[a]),
            ObstaclePrimitive::Sphere { center, radius } => norm3(&(p - center)) <= *radius,
            ObstaclePrimitive::Capsule { endpoint_a, endpoint_b, radius } => {
                segment_distance(p, endpoint_a, endpoint_b) <= *radius
            }
        }
    }

    /// Exact Euclidean distance from `p` to the primitive surface, 0 inside.
    pub fn distance(&self, p: &Vec3) -> f64 {
        match self {
            ObstaclePrimitive::Box { min, max } => {
                let d = Vec3::new(
                    (min.x - p.x).max(p.x - max.x).max(0.0),
                    (min.y - p.y).max(p.y - max.y).max(0.0),
                    (min.z - p.z).max(p.z - max.z).max(0.0),
                );
                norm3(&d)
            }
            ObstaclePrimitive::Sphere { center, radius } => (norm3(&(p - center)) - radius).max(0.0),
            ObstaclePrimitive::Capsule { endpoint_a, endpoint_b, radius } => {
                (segment_distance(p, endpoint_a, endpoint_b) - radius).max(0.0)
            }
        }
    }
}

pub(crate) fn segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(&ab);
    let t = if len2 > 0.0 { ((p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm3(&(p - (a + ab * t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_rejects_inverted_corner() {
        let err = DomainBox::new(Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, -1.0, 1.0), 1.0);
        assert!(matches!(err, Err(Error::Config(_))));
        assert!(DomainBox::new(Vec3::zeros(), Vec3::repeat(1.0), 0.0).is_err());
    }

    #[test]
    fn capsule_membership() {
        let c = ObstaclePrimitive::Capsule {
            endpoint_a: Vec3::new(0.0, 0.0, 0.0),
            endpoint_b: Vec3::new(4.0, 0.0, 0.0),
            radius: 0.5,
        };
        assert!(c.contains(&Vec3::new(2.0, 0.4, 0.0)));
        assert!(!c.contains(&Vec3::new(2.0, 0.6, 0.0)));
        assert!((c.distance(&Vec3::new(6.0, 0.0, 0.0)) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn box_distance_matches_face_gap() {
        let b = ObstaclePrimitive::Box { min: Vec3::repeat(-0.5), max: Vec3::repeat(0.5) };
        assert_eq!(b.distance(&Vec3::new(2.5, 0.0, 0.0)), 2.0);
        assert_eq!(b.distance(&Vec3::zeros()), 0.0);
    }
}
