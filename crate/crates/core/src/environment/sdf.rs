//! Voxelized obstacle occupancy and its exact Euclidean distance transform.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{DomainBox, ObstaclePrimitive};
use crate::math::{ceil, floor, sqrt};
use crate::{Error, Result, Vec3};

pub const DEFAULT_RESOLUTION: f64 = 0.5;
pub const DEFAULT_VOXEL_BUDGET: usize = 1 << 24;

// Finite stand-in for infinity inside the 1D transform; keeps the parabola
// intersections free of inf - inf.
const FAR: f64 = 1e20;

/// Unsigned distance grid sampled at voxel centers.
///
/// Voxel `(i, j, k)` has its center at `origin + (i + 0.5, j + 0.5, k + 0.5) * resolution`.
/// Occupied voxels store exactly 0. With no obstacle at all every voxel stores
/// [`SignedDistanceField::far_value`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedDistanceField {
    pub origin: Vec3,
    pub resolution: f64,
    pub dims: [usize; 3],
    pub distance: Vec<f64>,
    far_value: f64,
}

impl SignedDistanceField {
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    pub fn voxel_center(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin
            + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * self.resolution
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.distance[self.index(i, j, k)]
    }

    /// Sentinel returned for obstacle-free worlds; larger than the domain diagonal.
    pub fn far_value(&self) -> f64 {
        self.far_value
    }

    pub fn len(&self) -> usize {
        self.distance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distance.is_empty()
    }

    /// Trilinear interpolation of the grid. Points up to one voxel outside the
    /// grid are clamped onto it; anything further out is an error.
    pub fn query(&self, p: &Vec3) -> Result<f64> {
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let rel = (p[a] - self.origin[a]) / self.resolution;
            let n = self.dims[a] as f64;
            if !(rel >= -1.0 && rel <= n + 1.0) {
                return Err(Error::OutOfDomain { x: p.x, y: p.y, z: p.z });
            }
            let g = (rel - 0.5).clamp(0.0, n - 1.0);
            let i0 = (floor(g) as usize).min(self.dims[a].saturating_sub(2));
            base[a] = i0;
            frac[a] = if self.dims[a] > 1 { g - i0 as f64 } else { 0.0 };
        }
        let step = |a: usize| usize::from(self.dims[a] > 1);
        let (sx, sy, sz) = (step(0), step(1), step(2));
        let [i, j, k] = base;
        let [fx, fy, fz] = frac;
        let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
        let c00 = lerp(self.value(i, j, k), self.value(i + sx, j, k), fx);
        let c10 = lerp(self.value(i, j + sy, k), self.value(i + sx, j + sy, k), fx);
        let c01 = lerp(self.value(i, j, k + sz), self.value(i + sx, j, k + sz), fx);
        let c11 = lerp(self.value(i, j + sy, k + sz), self.value(i + sx, j + sy, k + sz), fx);
        Ok(lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz))
    }
}

/// Rasterizes `obstacles` on voxel centers and runs the exact separable
/// Euclidean distance transform (Felzenszwalb–Huttenlocher) along x, y, z.
pub fn build_sdf(
    obstacles: &[ObstaclePrimitive],
    domain: &DomainBox,
    resolution: f64,
    voxel_budget: usize,
) -> Result<SignedDistanceField> {
    if !(resolution > 0.0) {
        return Err(Error::Config(alloc::format!("resolution {resolution} must be positive")));
    }
    domain.validate()?;
    let extent = domain.extent();
    let mut dims = [0usize; 3];
    let mut requested: f64 = 1.0;
    for a in 0..3 {
        let n = ceil(extent[a] / resolution - 1e-9).max(1.0);
        requested *= n;
        dims[a] = n as usize;
    }
    if requested > voxel_budget as f64 {
        let requested = if requested >= usize::MAX as f64 { usize::MAX } else { requested as usize };
        return Err(Error::Capacity { requested, budget: voxel_budget });
    }
    let total = dims[0] * dims[1] * dims[2];
    let far_value = 2.0 * domain.diagonal() + 1.0;
    let mut sdf = SignedDistanceField {
        origin: domain.min_corner,
        resolution,
        dims,
        distance: vec![FAR; total],
        far_value,
    };

    let mut any_occupied = false;
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let c = sdf.voxel_center(i, j, k);
                if obstacles.iter().any(|o| o.contains(&c)) {
                    let idx = sdf.index(i, j, k);
                    sdf.distance[idx] = 0.0;
                    any_occupied = true;
                }
            }
        }
    }
    if !any_occupied {
        sdf.distance.iter_mut().for_each(|d| *d = far_value);
        return Ok(sdf);
    }

    let max_dim = dims.iter().copied().max().unwrap_or(1);
    let mut line = vec![0.0; max_dim];
    let mut out = vec![0.0; max_dim];
    let mut scratch = EnvelopeScratch::new(max_dim);
    let strides = [1, dims[0], dims[0] * dims[1]];
    for axis in 0..3 {
        let n = dims[axis];
        let (o1, o2) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for b in 0..dims[o2] {
            for a in 0..dims[o1] {
                let start = a * strides[o1] + b * strides[o2];
                for t in 0..n {
                    line[t] = sdf.distance[start + t * strides[axis]];
                }
                squared_distance_1d(&line[..n], &mut out[..n], &mut scratch);
                for t in 0..n {
                    sdf.distance[start + t * strides[axis]] = out[t];
                }
            }
        }
    }
    for d in sdf.distance.iter_mut() {
        *d = sqrt(*d) * resolution;
    }
    Ok(sdf)
}

struct EnvelopeScratch {
    v: Vec<usize>,
    z: Vec<f64>,
}

impl EnvelopeScratch {
    fn new(n: usize) -> Self {
        Self { v: vec![0; n], z: vec![0.0; n + 1] }
    }
}

/// Lower envelope of parabolas `f[q] + (x - q)^2`, in voxel units.
fn squared_distance_1d(f: &[f64], d: &mut [f64], s: &mut EnvelopeScratch) {
    let n = f.len();
    let (v, z) = (&mut s.v, &mut s.z);
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let intersect = |q: usize, p: usize| -> f64 {
        let (qf, pf) = (q as f64, p as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * qf - 2.0 * pf)
    };
    for q in 1..n {
        let mut sx = intersect(q, v[k]);
        while sx <= z[k] {
            k -= 1;
            sx = intersect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = sx;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        d[q] = (dq * dq + f[v[k]]).min(FAR);
    }
}
