//! The trajectory optimization problem: decision-vector layout, decoding to a
//! 4D curve, and evaluation of objectives and constraints.
//!
//! Layout of a decision vector for `n + 1` control points:
//! `[w_0, x_1, y_1, z_1, v_1, w_1, ..., x_{n-1}, y_{n-1}, z_{n-1}, v_{n-1}, w_{n-1}, w_n]`.
//! Start and goal positions and speeds are fixed and not part of it.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::costs::{
    constraints_from_distances, curve_clearance, energy_cost, obstacle_distances, safety_cost_from_distances, time_cost,
    ConstraintReport, CostVector, SafetyParams,
};
use crate::environment::{DomainBox, Environment};
use crate::moo::{Bounds, Individual, Problem};
use crate::nurbs::{sample_uniform, NurbsCurve4D, Point4, TrajectorySamples};
use crate::power::PowerQuadricModel;
use crate::{Error, Result, Vec3};

pub const WEIGHT_BOUNDS: (f64, f64) = (0.1, 10.0);
/// Added to `collision_violation` when a candidate cannot be evaluated at all.
pub const EVALUATION_FAILURE_VIOLATION: f64 = 1e6;
const FAILED_COST: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Weight,
    Position(usize),
    Speed,
}

/// Shape of a decision vector with `n_interior` free control points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionLayout {
    pub n_interior: usize,
}

impl DecisionLayout {
    pub fn new(n_interior: usize) -> Self {
        Self { n_interior }
    }

    /// `5 (n - 1) + 2` for `n + 1` control points.
    pub fn arity(&self) -> usize {
        5 * self.n_interior + 2
    }

    pub fn from_arity(arity: usize) -> Result<Self> {
        if arity < 2 || !(arity - 2).is_multiple_of(5) {
            return Err(Error::Decode { expected: 5 * ((arity.saturating_sub(2)) / 5) + 2, found: arity });
        }
        Ok(Self::new((arity - 2) / 5))
    }

    pub fn kind(&self, index: usize) -> EntryKind {
        if index == 0 || index + 1 == self.arity() {
            return EntryKind::Weight;
        }
        match (index - 1) % 5 {
            c @ 0..=2 => EntryKind::Position(c),
            3 => EntryKind::Speed,
            _ => EntryKind::Weight,
        }
    }

    pub fn bounds(&self, domain: &DomainBox, v_floor: f64) -> Result<Bounds> {
        let (lower, upper) = (0..self.arity())
            .map(|i| match self.kind(i) {
                EntryKind::Weight => WEIGHT_BOUNDS,
                EntryKind::Position(a) => (domain.min_corner[a], domain.max_corner[a]),
                EntryKind::Speed => (v_floor, domain.v_max),
            })
            .unzip();
        Bounds::new(lower, upper)
    }
}

/// Fixed start and goal states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoints {
    pub start: Vec3,
    pub goal: Vec3,
    pub v_start: f64,
    pub v_goal: f64,
}

pub fn decode(decision: &[f64], endpoints: &Endpoints, degree: usize, layout: DecisionLayout) -> Result<NurbsCurve4D> {
    if decision.len() != layout.arity() {
        return Err(Error::Decode { expected: layout.arity(), found: decision.len() });
    }
    let n = layout.n_interior;
    let mut points: Vec<Point4> = Vec::with_capacity(n + 2);
    let mut weights = Vec::with_capacity(n + 2);
    let (s, g) = (endpoints.start, endpoints.goal);
    points.push([s.x, s.y, s.z, endpoints.v_start]);
    weights.push(decision[0]);
    for j in 0..n {
        let e = &decision[1 + 5 * j..6 + 5 * j];
        points.push([e[0], e[1], e[2], e[3]]);
        weights.push(e[4]);
    }
    points.push([g.x, g.y, g.z, endpoints.v_goal]);
    weights.push(decision[decision.len() - 1]);
    NurbsCurve4D::clamped_uniform(points, weights, degree)
}

/// Inverse of [`decode`] on the free entries.
pub fn encode(curve: &NurbsCurve4D) -> Vec<f64> {
    let cps = curve.control_points();
    let w = curve.weights();
    let mut out = Vec::with_capacity(5 * (cps.len() - 2) + 2);
    out.push(w[0]);
    for i in 1..cps.len() - 1 {
        out.extend_from_slice(&cps[i]);
        out.push(w[i]);
    }
    out.push(w[w.len() - 1]);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationParams {
    pub degree: usize,
    pub n_samples: usize,
    pub safety: SafetyParams,
    pub a_max: f64,
    pub v_floor: f64,
}

/// Costs and constraint report of one decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEvaluation {
    pub costs: CostVector,
    pub constraints: ConstraintReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedIndividual {
    pub decision: Vec<f64>,
    pub costs: CostVector,
    pub constraints: ConstraintReport,
}

impl From<Individual<TrajectoryEvaluation>> for EvaluatedIndividual {
    fn from(ind: Individual<TrajectoryEvaluation>) -> Self {
        Self { decision: ind.decision, costs: ind.evaluation.costs, constraints: ind.evaluation.constraints }
    }
}

impl crate::moo::Candidate for EvaluatedIndividual {
    fn num_objectives(&self) -> usize {
        3
    }

    fn objective(&self, m: usize) -> f64 {
        self.costs.as_array()[m]
    }

    fn violation(&self) -> f64 {
        self.constraints.total_violation()
    }
}

/// Everything needed to score a decision vector. Immutable during a run.
#[derive(Debug, Clone)]
pub struct TrajectoryProblem<'a> {
    env: &'a Environment,
    power: Option<PowerQuadricModel>,
    endpoints: Endpoints,
    params: EvaluationParams,
    layout: DecisionLayout,
    bounds: Bounds,
    objective_mask: [bool; 3],
}

impl<'a> TrajectoryProblem<'a> {
    pub fn new(
        env: &'a Environment,
        power: Option<PowerQuadricModel>,
        endpoints: Endpoints,
        params: EvaluationParams,
        layout: DecisionLayout,
    ) -> Result<Self> {
        params.safety.validate()?;
        let bounds = layout.bounds(&env.domain, params.v_floor)?;
        Ok(Self { env, power, endpoints, params, layout, bounds, objective_mask: [true; 3] })
    }

    /// Restricts ranking to a subset of `(time, safety, energy)`; costs are still computed.
    pub fn with_objective_mask(mut self, mask: [bool; 3]) -> Self {
        assert!(mask.iter().any(|m| *m), "at least one objective must stay active");
        self.objective_mask = mask;
        self
    }

    pub fn objective_mask(&self) -> [bool; 3] {
        self.objective_mask
    }

    pub fn layout(&self) -> DecisionLayout {
        self.layout
    }

    pub fn endpoints(&self) -> &Endpoints {
        &self.endpoints
    }

    pub fn params(&self) -> &EvaluationParams {
        &self.params
    }

    pub fn environment(&self) -> &Environment {
        self.env
    }

    pub fn power_model(&self) -> Option<&PowerQuadricModel> {
        self.power.as_ref()
    }

    pub fn decode(&self, decision: &[f64]) -> Result<NurbsCurve4D> {
        decode(decision, &self.endpoints, self.params.degree, self.layout)
    }

    pub fn samples(&self, decision: &[f64]) -> Result<TrajectorySamples> {
        sample_uniform(&self.decode(decision)?, self.params.n_samples)
    }

    fn try_evaluate(&self, decision: &[f64]) -> Result<TrajectoryEvaluation> {
        let curve = self.decode(decision)?;
        let samples = sample_uniform(&curve, self.params.n_samples)?;
        let d_obs = obstacle_distances(&samples, self.env)?;
        let time_s = time_cost(&samples, self.params.v_floor);
        let safety = safety_cost_from_distances(&samples, &d_obs, self.env, &self.params.safety);
        let energy_j = match &self.power {
            Some(model) => energy_cost(&samples, model, self.params.v_floor)?,
            None => 0.0,
        };
        let mut constraints = constraints_from_distances(&samples, &d_obs, self.params.a_max, self.params.safety.r_uav);
        // the sample-only check misses obstacles thinner than a sample gap
        let between = curve_clearance(&curve, &samples, self.env, 0.5 * self.env.sdf.resolution)?;
        let collision = constraints.collision_violation.max(self.params.safety.r_uav - between);
        constraints = ConstraintReport::new(constraints.max_accel_violation, collision);
        Ok(TrajectoryEvaluation { costs: CostVector { time_s, safety, energy_j }, constraints })
    }

    /// Never fails: candidates that cannot be scored come back infeasible.
    pub fn evaluate_decision(&self, decision: &[f64]) -> EvaluatedIndividual {
        let eval = Problem::evaluate(self, decision);
        EvaluatedIndividual { decision: decision.to_vec(), costs: eval.costs, constraints: eval.constraints }
    }
}

impl Problem for TrajectoryProblem<'_> {
    type Evaluation = TrajectoryEvaluation;

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn num_objectives(&self) -> usize {
        self.objective_mask.iter().filter(|m| **m).count()
    }

    fn evaluate(&self, decision: &[f64]) -> TrajectoryEvaluation {
        self.try_evaluate(decision).unwrap_or(TrajectoryEvaluation {
            costs: CostVector { time_s: FAILED_COST, safety: FAILED_COST, energy_j: FAILED_COST },
            constraints: ConstraintReport::new(0.0, EVALUATION_FAILURE_VIOLATION),
        })
    }

    fn objectives(&self, evaluation: &TrajectoryEvaluation, out: &mut Vec<f64>) {
        let all = evaluation.costs.as_array();
        out.extend((0..3).filter(|&m| self.objective_mask[m]).map(|m| all[m]));
    }

    fn violation(&self, evaluation: &TrajectoryEvaluation) -> f64 {
        evaluation.constraints.total_violation()
    }
}

/// One row of an emitted trajectory: time stamp, position, speed and power draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedSample {
    pub t_s: f64,
    pub position: Vec3,
    pub speed_mps: f64,
    pub power_w: f64,
}

/// Time-stamps samples with the same per-segment durations as the cost functions.
/// Sample `i > 0` reports the power of the segment ending at it; sample 0 that of the first segment.
pub fn timeline(samples: &TrajectorySamples, model: Option<&PowerQuadricModel>, v_floor: f64) -> Result<Vec<TimedSample>> {
    let mut rows = Vec::with_capacity(samples.len());
    let mut t = 0.0;
    let mut seg_power = Vec::with_capacity(samples.segment_lengths.len());
    for i in 0..samples.segment_lengths.len() {
        let dir = samples.positions[i + 1] - samples.positions[i];
        seg_power.push(match model {
            Some(m) => m.power_for_direction(&dir)?,
            None => 0.0,
        });
    }
    for i in 0..samples.len() {
        if i > 0 {
            t += samples.segment_lengths[i - 1] / samples.speeds[i].max(v_floor);
        }
        let power_w = if i == 0 { seg_power.first().copied().unwrap_or(0.0) } else { seg_power[i - 1] };
        rows.push(TimedSample { t_s: t, position: samples.positions[i], speed_mps: samples.speeds[i], power_w });
    }
    Ok(rows)
}

/// Mean and minimum obstacle distance along a sampled trajectory.
pub fn obstacle_distance_stats(samples: &TrajectorySamples, env: &Environment) -> Result<(f64, f64)> {
    let d = obstacle_distances(samples, env)?;
    let mean = d.iter().sum::<f64>() / d.len().max(1) as f64;
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((mean, min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{ObstaclePrimitive, DEFAULT_VOXEL_BUDGET};
    use alloc::vec;

    fn env(obstacles: Vec<ObstaclePrimitive>) -> Environment {
        let domain = DomainBox::new(Vec3::new(0.0, -5.0, 0.0), Vec3::new(20.0, 5.0, 6.0), 2.0).unwrap();
        Environment::build(domain, obstacles, vec![], 0.5, DEFAULT_VOXEL_BUDGET).unwrap()
    }

    fn endpoints() -> Endpoints {
        Endpoints { start: Vec3::new(1.0, 0.0, 2.0), goal: Vec3::new(19.0, 0.0, 2.0), v_start: 1.0, v_goal: 1.0 }
    }

    fn params() -> EvaluationParams {
        EvaluationParams { degree: 3, n_samples: 50, safety: SafetyParams::default(), a_max: 2.2, v_floor: 0.1 }
    }

    fn straight(n_interior: usize) -> Vec<f64> {
        let mut z = vec![1.0];
        for j in 1..=n_interior {
            let x = 1.0 + 18.0 * j as f64 / (n_interior + 1) as f64;
            z.extend_from_slice(&[x, 0.0, 2.0, 1.0, 1.0]);
        }
        z.push(1.0);
        z
    }

    #[test]
    fn layout_arity_and_kinds() {
        let l = DecisionLayout::new(4);
        assert_eq!(l.arity(), 22);
        assert_eq!(l.kind(0), EntryKind::Weight);
        assert_eq!(l.kind(1), EntryKind::Position(0));
        assert_eq!(l.kind(3), EntryKind::Position(2));
        assert_eq!(l.kind(4), EntryKind::Speed);
        assert_eq!(l.kind(5), EntryKind::Weight);
        assert_eq!(l.kind(21), EntryKind::Weight);
        assert_eq!(DecisionLayout::from_arity(22).unwrap(), l);
        assert!(DecisionLayout::from_arity(21).is_err());
    }

    #[test]
    fn decode_round_trip_and_endpoints() {
        let z = straight(3);
        let curve = decode(&z, &endpoints(), 3, DecisionLayout::new(3)).unwrap();
        assert_eq!(encode(&curve), z);
        let (u0, u1) = curve.param_range();
        let a = curve.evaluate(u0).unwrap();
        let b = curve.evaluate(u1).unwrap();
        assert_eq!(a, [1.0, 0.0, 2.0, 1.0]);
        assert_eq!(b, [19.0, 0.0, 2.0, 1.0]);
        assert!(matches!(decode(&z[1..], &endpoints(), 3, DecisionLayout::new(3)), Err(Error::Decode { .. })));
    }

    #[test]
    fn start_weight_shapes_curve_but_not_endpoint() {
        let mut z = straight(3);
        z[2] = 3.0; // bend the first interior point sideways
        let c1 = decode(&z, &endpoints(), 3, DecisionLayout::new(3)).unwrap();
        z[0] = 4.0;
        let c2 = decode(&z, &endpoints(), 3, DecisionLayout::new(3)).unwrap();
        assert_eq!(c1.evaluate(0.0).unwrap(), c2.evaluate(0.0).unwrap());
        assert_ne!(c1.evaluate(0.05).unwrap(), c2.evaluate(0.05).unwrap());
    }

    #[test]
    fn straight_seed_in_empty_world() {
        let e = env(vec![]);
        let p = TrajectoryProblem::new(&e, None, endpoints(), params(), DecisionLayout::new(3)).unwrap();
        let ind = p.evaluate_decision(&straight(3));
        assert_eq!(ind.costs.safety, 0.0);
        assert!(ind.constraints.feasible);
        assert!((ind.costs.time_s - 18.0).abs() < 1e-9);
    }

    #[test]
    fn through_obstacle_is_infeasible() {
        let e = env(vec![ObstaclePrimitive::Box { min: Vec3::new(9.0, -1.0, 0.0), max: Vec3::new(11.0, 1.0, 6.0) }]);
        let p = TrajectoryProblem::new(&e, None, endpoints(), params(), DecisionLayout::new(3)).unwrap();
        let ind = p.evaluate_decision(&straight(3));
        assert!(!ind.constraints.feasible);
        assert!(ind.constraints.collision_violation > 0.0);
    }

    #[test]
    fn evaluation_is_deterministic_and_total() {
        let e = env(vec![]);
        let p = TrajectoryProblem::new(&e, None, endpoints(), params(), DecisionLayout::new(3)).unwrap();
        let z = straight(3);
        assert_eq!(p.evaluate_decision(&z), p.evaluate_decision(&z));
        let bad = p.evaluate_decision(&z[..5]);
        assert!(!bad.constraints.feasible);
        assert!(bad.constraints.collision_violation >= EVALUATION_FAILURE_VIOLATION);
    }

    #[test]
    fn masked_objectives() {
        let e = env(vec![]);
        let p = TrajectoryProblem::new(&e, None, endpoints(), params(), DecisionLayout::new(3))
            .unwrap()
            .with_objective_mask([true, false, false]);
        assert_eq!(Problem::num_objectives(&p), 1);
        let eval = Problem::evaluate(&p, &straight(3));
        let mut out = Vec::new();
        p.objectives(&eval, &mut out);
        assert_eq!(out, vec![eval.costs.time_s]);
    }

    #[test]
    fn timeline_matches_time_cost() {
        let e = env(vec![]);
        let p = TrajectoryProblem::new(&e, Some(PowerQuadricModel::isotropic(400.0)), endpoints(), params(), DecisionLayout::new(3)).unwrap();
        let z = straight(3);
        let s = p.samples(&z).unwrap();
        let rows = timeline(&s, p.power_model(), 0.1).unwrap();
        assert_eq!(rows.len(), 50);
        assert!((rows.last().unwrap().t_s - time_cost(&s, 0.1)).abs() < 1e-9);
        assert!(rows.iter().all(|r| (r.power_w - 400.0).abs() < 1e-9));
    }
}
