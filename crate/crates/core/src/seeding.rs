//! Feasible initial trajectory and initial population.
//!
//! A bidirectional RRT finds any collision-free polyline, greedy shortcutting
//! straightens it, and equidistant resampling at `delta_rope` turns it into
//! control points. The rest of the population is Gaussian noise around that seed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::environment::Environment;
use crate::math::{ceil, norm3};
use crate::moo::Bounds;
use crate::power::PowerQuadricModel;
use crate::problem::{DecisionLayout, Endpoints, EntryKind, EvaluatedIndividual, EvaluationParams, TrajectoryProblem};
use crate::rng::{rng_from_seed, PlannerRng};
use crate::{Error, Result, Vec3};

pub const MAX_REPAIR_HALVINGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedingParams {
    pub delta_rope: f64,
    pub sigma_pos: f64,
    pub sigma_speed: f64,
    pub rrt_step: f64,
    pub rrt_max_iters: usize,
    /// Extra clearance beyond `r_uav` demanded of RRT edges and shortcuts, so
    /// that the smoothed curve keeps its distance around corners.
    pub clearance_margin: f64,
    pub rng_seed: u64,
}

impl SeedingParams {
    /// Defaults tied to the vehicle speed bound: `sigma_speed = v_max / 2`.
    pub fn with_v_max(v_max: f64) -> Self {
        Self {
            delta_rope: 5.0,
            sigma_pos: 15.0,
            sigma_speed: v_max / 2.0,
            rrt_step: 1.0,
            rrt_max_iters: 5000,
            clearance_margin: 1.0,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_rope > 0.0 && self.rrt_step > 0.0) {
            return Err(Error::Config("delta_rope and rrt_step must be positive".into()));
        }
        if !(self.sigma_pos >= 0.0 && self.sigma_speed >= 0.0 && self.clearance_margin >= 0.0) {
            return Err(Error::Config("sigmas and clearance margin must be non-negative".into()));
        }
        Ok(())
    }
}

struct Checker<'a> {
    env: &'a Environment,
    clearance: f64,
    spacing: f64,
}

impl Checker<'_> {
    fn point_ok(&self, p: &Vec3) -> bool {
        self.env.domain.contains(p) && self.env.query_distance(p).is_ok_and(|d| d >= self.clearance)
    }

    fn segment_ok(&self, a: &Vec3, b: &Vec3) -> bool {
        let len = norm3(&(b - a));
        let steps = ceil(len / self.spacing).max(1.0) as usize;
        (0..=steps).all(|i| self.point_ok(&(a + (b - a) * (i as f64 / steps as f64))))
    }
}

struct Tree {
    nodes: Vec<Vec3>,
    parent: Vec<usize>,
}

impl Tree {
    fn new(root: Vec3) -> Self {
        Self { nodes: vec![root], parent: vec![0] }
    }

    fn nearest(&self, p: &Vec3) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, n) in self.nodes.iter().enumerate() {
            let d = (n - p).norm_squared();
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    fn push(&mut self, p: Vec3, parent: usize) -> usize {
        self.nodes.push(p);
        self.parent.push(parent);
        self.nodes.len() - 1
    }

    fn path_to_root(&self, mut i: usize) -> Vec<Vec3> {
        let mut out = vec![self.nodes[i]];
        while i != 0 {
            i = self.parent[i];
            out.push(self.nodes[i]);
        }
        out
    }
}

enum Extend {
    Trapped,
    Advanced(usize),
    Reached(usize),
}

fn extend(tree: &mut Tree, target: &Vec3, step: f64, checker: &Checker) -> Extend {
    let near = tree.nearest(target);
    let from = tree.nodes[near];
    let delta = target - from;
    let dist = norm3(&delta);
    let (to, reached) = if dist <= step { (*target, true) } else { (from + delta * (step / dist), false) };
    if !checker.segment_ok(&from, &to) {
        return Extend::Trapped;
    }
    let idx = tree.push(to, near);
    if reached { Extend::Reached(idx) } else { Extend::Advanced(idx) }
}

/// Collision-free polyline from `start` to `goal` with nodes every `delta_rope` metres.
pub fn find_seed_path(env: &Environment, start: Vec3, goal: Vec3, r_uav: f64, params: &SeedingParams) -> Result<Vec<Vec3>> {
    let raw = rrt_connect(env, start, goal, r_uav, params)?;
    let checker = checker(env, r_uav + params.clearance_margin);
    let short = shortcut(&raw, &checker);
    Ok(resample_equidistant(&short, params.delta_rope))
}

fn checker(env: &Environment, clearance: f64) -> Checker<'_> {
    Checker { env, clearance, spacing: env.sdf.resolution / 2.0 }
}

/// Bidirectional RRT. Returns the raw tree path, before shortcutting.
pub fn rrt_connect(env: &Environment, start: Vec3, goal: Vec3, r_uav: f64, params: &SeedingParams) -> Result<Vec<Vec3>> {
    params.validate()?;
    let strict = checker(env, r_uav);
    for (name, p) in [("start", &start), ("goal", &goal)] {
        if !strict.point_ok(p) {
            return Err(Error::Input(format!("{name} ({:.3}, {:.3}, {:.3}) is in collision or outside the domain", p.x, p.y, p.z)));
        }
    }
    let margin = checker(env, r_uav + params.clearance_margin);
    if margin.segment_ok(&start, &goal) {
        return Ok(vec![start, goal]);
    }
    // the endpoints themselves may sit inside the margin; edges touching them use the strict check
    let mut rng = rng_from_seed(params.rng_seed);
    let (lo, hi) = (env.domain.min_corner, env.domain.max_corner);
    let mut a = Tree::new(start);
    let mut b = Tree::new(goal);
    let mut a_is_start = true;
    for _ in 0..params.rrt_max_iters {
        let sample = Vec3::new(
            rng.random_range(lo.x..=hi.x),
            rng.random_range(lo.y..=hi.y),
            rng.random_range(lo.z..=hi.z),
        );
        let edge_checker = if a.nodes.len() == 1 { &strict } else { &margin };
        if let Extend::Advanced(new) | Extend::Reached(new) = extend(&mut a, &sample, params.rrt_step, edge_checker) {
            let target = a.nodes[new];
            loop {
                let chk = if b.nodes.len() == 1 { &strict } else { &margin };
                match extend(&mut b, &target, params.rrt_step, chk) {
                    Extend::Advanced(_) => continue,
                    Extend::Trapped => break,
                    Extend::Reached(joined) => {
                        let mut from_a = a.path_to_root(new);
                        from_a.reverse();
                        let to_b = b.path_to_root(joined);
                        from_a.extend(to_b.into_iter().skip(1));
                        if !a_is_start {
                            from_a.reverse();
                        }
                        return Ok(from_a);
                    }
                }
            }
        }
        core::mem::swap(&mut a, &mut b);
        a_is_start = !a_is_start;
    }
    Err(Error::Planning(format!("no path found within {} RRT iterations", params.rrt_max_iters)))
}

/// Greedy shortcutting: from each kept node jump to the farthest node reachable in a straight line.
fn shortcut(path: &[Vec3], checker: &Checker) -> Vec<Vec3> {
    if path.len() <= 2 {
        return path.to_vec();
    }
    let mut out = vec![path[0]];
    let mut i = 0;
    while i < path.len() - 1 {
        let mut j = path.len() - 1;
        while j > i + 1 && !checker.segment_ok(&path[i], &path[j]) {
            j -= 1;
        }
        out.push(path[j]);
        i = j;
    }
    out
}

/// Points every `spacing` metres of arc length; the last segment may be shorter.
pub fn resample_equidistant(path: &[Vec3], spacing: f64) -> Vec<Vec3> {
    let total: f64 = path.windows(2).map(|w| norm3(&(w[1] - w[0]))).sum();
    let n_seg = ceil(total / spacing - 1e-9).max(1.0) as usize;
    let mut out = Vec::with_capacity(n_seg + 1);
    out.push(path[0]);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for k in 1..n_seg {
        let s = k as f64 * spacing;
        while seg + 1 < path.len() - 1 && seg_start + norm3(&(path[seg + 1] - path[seg])) < s {
            seg_start += norm3(&(path[seg + 1] - path[seg]));
            seg += 1;
        }
        let len = norm3(&(path[seg + 1] - path[seg]));
        let t = if len > 0.0 { ((s - seg_start) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(path[seg] + (path[seg + 1] - path[seg]) * t);
    }
    out.push(path[path.len() - 1]);
    out
}

/// Interior nodes become control points at `v_cruise` with unit weights.
/// Too-short polylines are padded by splitting their longest segment.
pub fn polyline_to_decision_vector(polyline: &[Vec3], v_cruise: f64, degree: usize) -> Result<Vec<f64>> {
    if polyline.len() < 2 {
        return Err(Error::Input("polyline needs at least two nodes".into()));
    }
    let mut nodes = polyline.to_vec();
    while nodes.len() < degree + 1 {
        let (k, _) = nodes
            .windows(2)
            .enumerate()
            .map(|(k, w)| (k, norm3(&(w[1] - w[0]))))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let mid = (nodes[k] + nodes[k + 1]) * 0.5;
        nodes.insert(k + 1, mid);
    }
    let mut z = Vec::with_capacity(5 * (nodes.len() - 2) + 2);
    z.push(1.0);
    for p in &nodes[1..nodes.len() - 1] {
        z.extend_from_slice(&[p.x, p.y, p.z, v_cruise, 1.0]);
    }
    z.push(1.0);
    Ok(z)
}

/// First member is the seed itself; the others get component-wise Gaussian
/// noise on positions and speeds (weights untouched), clamped to `bounds`.
pub fn initial_population(
    seed: &[f64],
    pop_size: usize,
    bounds: &Bounds,
    sigma_pos: f64,
    sigma_speed: f64,
    rng: &mut PlannerRng,
) -> Result<Vec<Vec<f64>>> {
    if pop_size < 2 {
        return Err(Error::Config("population needs at least two members".into()));
    }
    let layout = DecisionLayout::from_arity(seed.len())?;
    let pos = Normal::new(0.0, sigma_pos).map_err(|e| Error::Config(format!("{e}")))?;
    let spd = Normal::new(0.0, sigma_speed).map_err(|e| Error::Config(format!("{e}")))?;
    let mut out = Vec::with_capacity(pop_size);
    out.push(seed.to_vec());
    for _ in 1..pop_size {
        let mut z = seed.to_vec();
        for (i, v) in z.iter_mut().enumerate() {
            match layout.kind(i) {
                EntryKind::Position(_) => *v += pos.sample(rng),
                EntryKind::Speed => *v += spd.sample(rng),
                EntryKind::Weight => {}
            }
        }
        bounds.clamp(&mut z);
        out.push(z);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Seed {
    pub polyline: Vec<Vec3>,
    pub individual: EvaluatedIndividual,
    /// Times `delta_rope` was halved before the smoothed seed became feasible.
    pub halvings: usize,
    pub delta_rope: f64,
}

/// Finds a path once and resamples it at `delta_rope`, halving the spacing
/// (at most [`MAX_REPAIR_HALVINGS`] times) until the decoded curve is feasible.
pub fn build_seed(
    env: &Environment,
    power: Option<&PowerQuadricModel>,
    endpoints: &Endpoints,
    eval: &EvaluationParams,
    v_cruise: f64,
    params: &SeedingParams,
) -> Result<Seed> {
    let (start, goal, r_uav) = (endpoints.start, endpoints.goal, eval.safety.r_uav);
    let raw = rrt_connect(env, start, goal, r_uav, params)?;
    let short = shortcut(&raw, &checker(env, r_uav + params.clearance_margin));
    let mut delta = params.delta_rope;
    let mut last = None;
    for halvings in 0..=MAX_REPAIR_HALVINGS {
        let polyline = resample_equidistant(&short, delta);
        let z = polyline_to_decision_vector(&polyline, v_cruise, eval.degree)?;
        let layout = DecisionLayout::from_arity(z.len())?;
        let problem = TrajectoryProblem::new(env, power.cloned(), *endpoints, *eval, layout)?;
        let individual = problem.evaluate_decision(&z);
        if individual.constraints.feasible {
            return Ok(Seed { polyline, individual, halvings, delta_rope: delta });
        }
        last = Some(individual.constraints);
        delta /= 2.0;
    }
    Err(Error::Planning(format!(
        "seed trajectory still infeasible after {MAX_REPAIR_HALVINGS} halvings of delta_rope: {:?}",
        last
    )))
}
