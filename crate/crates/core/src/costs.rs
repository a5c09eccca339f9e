//! Time, safety and energy objectives plus the acceleration and collision
//! hard constraints of a sampled trajectory.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::environment::{Environment, OrientedHull};
use crate::math::norm3;
use crate::nurbs::{NurbsCurve4D, TrajectorySamples};
use crate::power::PowerQuadricModel;
use crate::{Error, Result, Vec3};

pub const DEFAULT_V_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyParams {
    pub r_sdf_min: f64,
    pub r_sdf_max: f64,
    pub r_ch_max: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub r_uav: f64,
    /// Use the literal `lambda / d - 1` middle branch instead of the continuous one.
    #[serde(default)]
    pub strict_paper_sdf_branch: bool,
}

impl Default for SafetyParams {
    fn default() -> Self {
        Self {
            r_sdf_min: 1.0,
            r_sdf_max: 5.0,
            r_ch_max: 2.0,
            k_a: 0.5,
            k_b: 0.5,
            r_uav: 0.5,
            strict_paper_sdf_branch: false,
        }
    }
}

impl SafetyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_sdf_min > 0.0 && self.r_sdf_min < self.r_sdf_max) {
            return Err(Error::Config(format!(
                "need 0 < r_sdf_min < r_sdf_max, got [{}, {}]",
                self.r_sdf_min, self.r_sdf_max
            )));
        }
        if !(self.r_ch_max > 0.0) {
            return Err(Error::Config("r_ch_max must be positive".into()));
        }
        if !(self.k_a >= 0.0 && self.k_b >= 0.0 && (self.k_a + self.k_b - 1.0).abs() < 1e-9) {
            return Err(Error::Config("k_a and k_b must be non-negative and sum to 1".into()));
        }
        if !(self.r_uav >= 0.0) {
            return Err(Error::Config("r_uav must be non-negative".into()));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.r_sdf_min * self.r_sdf_max / (self.r_sdf_max - self.r_sdf_min)
    }
}

/// Objective values; lower is better for all three.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostVector {
    pub time_s: f64,
    pub safety: f64,
    pub energy_j: f64,
}

impl CostVector {
    pub fn as_array(&self) -> [f64; 3] {
        [self.time_s, self.safety, self.energy_j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub max_accel_violation: f64,
    pub collision_violation: f64,
    pub feasible: bool,
}

impl ConstraintReport {
    pub fn new(max_accel_violation: f64, collision_violation: f64) -> Self {
        Self {
            max_accel_violation,
            collision_violation,
            feasible: max_accel_violation == 0.0 && collision_violation == 0.0,
        }
    }

    pub fn total_violation(&self) -> f64 {
        self.max_accel_violation + self.collision_violation
    }
}

/// Sum of `d_i / max(v_{i+1}, v_floor)`: each segment is flown at its end speed.
pub fn time_cost(samples: &TrajectorySamples, v_floor: f64) -> f64 {
    samples
        .segment_lengths
        .iter()
        .zip(&samples.speeds[1..])
        .map(|(d, v)| d / v.max(v_floor))
        .sum()
}

pub fn sdf_point_cost(d_obs: f64, params: &SafetyParams) -> f64 {
    if d_obs >= params.r_sdf_max {
        0.0
    } else if d_obs <= params.r_sdf_min {
        1.0
    } else if params.strict_paper_sdf_branch {
        params.lambda() / d_obs - 1.0
    } else {
        params.lambda() * (1.0 / d_obs - 1.0 / params.r_sdf_max)
    }
}

pub fn hull_point_cost(point: &Vec3, hulls: &[OrientedHull], r_ch_max: f64) -> f64 {
    hulls
        .iter()
        .map(|h| {
            let d = h.signed_distance(point);
            if d >= r_ch_max {
                0.0
            } else if d <= 0.0 {
                1.0
            } else {
                1.0 - d / r_ch_max
            }
        })
        .sum()
}

/// Obstacle distance at every sample point.
pub fn obstacle_distances(samples: &TrajectorySamples, env: &Environment) -> Result<Vec<f64>> {
    samples.positions.iter().map(|p| env.query_distance(p)).collect()
}

/// `k_a (mean + max)` of the distance-field cost plus `k_b (mean + max)` of the hull cost.
pub fn safety_cost(samples: &TrajectorySamples, env: &Environment, params: &SafetyParams) -> Result<f64> {
    let d_obs = obstacle_distances(samples, env)?;
    Ok(safety_cost_from_distances(samples, &d_obs, env, params))
}

pub(crate) fn safety_cost_from_distances(
    samples: &TrajectorySamples,
    d_obs: &[f64],
    env: &Environment,
    params: &SafetyParams,
) -> f64 {
    let sdf: Vec<f64> = d_obs.iter().map(|d| sdf_point_cost(*d, params)).collect();
    let ch: Vec<f64> = samples
        .positions
        .iter()
        .map(|p| hull_point_cost(p, &env.hulls, params.r_ch_max))
        .collect();
    params.k_a * mean_plus_max(&sdf) + params.k_b * mean_plus_max(&ch)
}

fn mean_plus_max(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    mean + max
}

/// Sum over segments of `P(direction) * d_{i-1} / max(v_i, v_floor)`.
pub fn energy_cost(samples: &TrajectorySamples, model: &PowerQuadricModel, v_floor: f64) -> Result<f64> {
    let mut energy = 0.0;
    for (i, d) in samples.segment_lengths.iter().enumerate() {
        if *d == 0.0 {
            continue;
        }
        let dir = samples.positions[i + 1] - samples.positions[i];
        let dt = d / samples.speeds[i + 1].max(v_floor);
        energy += model.power_for_direction(&dir)? * dt;
    }
    Ok(energy)
}

/// Tangential acceleration of each segment from `v² = v0² + 2 a d`.
pub fn segment_accelerations(samples: &TrajectorySamples) -> impl Iterator<Item = f64> + '_ {
    samples.segment_lengths.iter().enumerate().map(|(i, d)| {
        let (v0, v1) = (samples.speeds[i], samples.speeds[i + 1]);
        (v1 * v1 - v0 * v0) / (2.0 * d.max(1e-6))
    })
}

pub fn check_constraints(samples: &TrajectorySamples, env: &Environment, a_max: f64, r_uav: f64) -> Result<ConstraintReport> {
    let d_obs = obstacle_distances(samples, env)?;
    Ok(constraints_from_distances(samples, &d_obs, a_max, r_uav))
}

// Bisection depth cap: 2^20 pieces per segment is far below any voxel size.
const MAX_BISECTION_DEPTH: u32 = 20;

/// Smallest obstacle distance along `curve` between consecutive samples.
///
/// Each sampled segment is bisected in parameter space until its chord is at
/// most `spacing`, so thin obstacles cannot slip between two samples. The
/// samples themselves are not re-queried.
pub fn curve_clearance(curve: &NurbsCurve4D, samples: &TrajectorySamples, env: &Environment, spacing: f64) -> Result<f64> {
    if !(spacing > 0.0) {
        return Err(Error::Config(format!("clearance spacing {spacing} must be positive")));
    }
    let mut clearance = f64::INFINITY;
    let mut stack: Vec<(f64, Vec3, f64, Vec3, u32)> = Vec::new();
    for i in 0..samples.segment_lengths.len() {
        stack.push((
            samples.param_values[i],
            samples.positions[i],
            samples.param_values[i + 1],
            samples.positions[i + 1],
            0,
        ));
        while let Some((ua, pa, ub, pb, depth)) = stack.pop() {
            if norm3(&(pb - pa)) <= spacing || depth >= MAX_BISECTION_DEPTH {
                continue;
            }
            let um = 0.5 * (ua + ub);
            let c = curve.evaluate(um)?;
            let pm = Vec3::new(c[0], c[1], c[2]);
            clearance = clearance.min(env.query_distance(&pm)?);
            stack.push((ua, pa, um, pm, depth + 1));
            stack.push((um, pm, ub, pb, depth + 1));
        }
    }
    Ok(clearance)
}

pub(crate) fn constraints_from_distances(samples: &TrajectorySamples, d_obs: &[f64], a_max: f64, r_uav: f64) -> ConstraintReport {
    let max_accel = segment_accelerations(samples).map(f64::abs).fold(0.0, f64::max);
    let collision = d_obs.iter().map(|d| (r_uav - d).max(0.0)).fold(0.0, f64::max);
    ConstraintReport::new((max_accel - a_max).max(0.0), collision)
}
