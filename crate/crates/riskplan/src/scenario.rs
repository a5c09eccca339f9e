//! Scenario documents: one JSON file describing the world, the mission and
//! every tunable of the pipeline. Omitted optional fields take documented
//! defaults; validation reports every violation at once with its field path.

use std::path::{Path, PathBuf};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use riskplan_core::costs::{SafetyParams, DEFAULT_V_FLOOR};
use riskplan_core::environment::{
    DomainBox, Environment, ObstaclePrimitive, OrientedHull, DEFAULT_RESOLUTION, DEFAULT_VOXEL_BUDGET,
};
use riskplan_core::moo::MooParams;
use riskplan_core::nurbs::MAX_DEGREE;
use riskplan_core::problem::{Endpoints, EvaluationParams};
use riskplan_core::seeding::SeedingParams;
use riskplan_core::voting::{Baselines, RiskState};
use riskplan_core::Vec3;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub domain: DomainSpec,
    #[serde(default)]
    pub obstacles: Vec<ObstaclePrimitive>,
    #[serde(default)]
    pub hulls: Vec<HullSpec>,
    pub start: Waypoint,
    pub goal: Waypoint,
    #[serde(default)]
    pub hyperparams: Hyperparams,
    #[serde(default)]
    pub safety: SafetySpec,
    #[serde(default)]
    pub optimizer: OptimizerSpec,
    #[serde(default)]
    pub seeding: SeedingSpec,
    #[serde(default)]
    pub risks: RiskState,
    #[serde(default)]
    pub baselines: Baselines,
    #[serde(default)]
    pub objectives: ObjectiveMask,
    /// Power CSV (`vx,vy,vz,power_w`), relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_calibration: Option<PathBuf>,
    #[serde(default)]
    pub rng_seed: u64,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub min: Vec3,
    pub max: Vec3,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_voxel_budget")]
    pub voxel_budget: usize,
}

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}

fn default_voxel_budget() -> usize {
    DEFAULT_VOXEL_BUDGET
}

/// Non-insertion hull. Orientation is either a full rotation matrix (rows,
/// columns are the hull axes in world frame) or a yaw angle about +z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HullSpec {
    pub center: Vec3,
    pub half_extents: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[[f64; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yaw_deg: Option<f64>,
}

impl HullSpec {
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        match (self.rotation, self.yaw_deg) {
            (Some(r), _) => Matrix3::from_fn(|i, j| r[i][j]),
            (None, Some(yaw)) => {
                let (s, c) = yaw.to_radians().sin_cos();
                Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
            }
            (None, None) => Matrix3::identity(),
        }
    }

    pub fn to_hull(&self) -> riskplan_core::Result<OrientedHull> {
        OrientedHull::new(self.center, self.half_extents, self.rotation_matrix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub position: Vec3,
    /// Speed at the endpoint, m/s. Defaults to the seed cruise speed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub v_max: f64,
    pub a_max: f64,
    /// NURBS degree, `1 < p <= 5`.
    pub p: usize,
    pub r_sdf_min: f64,
    pub r_sdf_max: f64,
    pub r_ch_max: f64,
    pub delta_rope: f64,
    pub n_gen: usize,
    pub n_pop: usize,
    pub n_nurbs: usize,
    /// Recorded in output metadata only; no cost term uses the vehicle mass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_uav: Option<f64>,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            v_max: 2.0,
            a_max: 2.2,
            p: 3,
            r_sdf_min: 1.0,
            r_sdf_max: 5.0,
            r_ch_max: 2.0,
            delta_rope: 5.0,
            n_gen: 1000,
            n_pop: 40,
            n_nurbs: 50,
            m_uav: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SafetySpec {
    pub k_a: f64,
    pub k_b: f64,
    pub r_uav: f64,
    pub strict_paper_sdf_branch: bool,
}

impl Default for SafetySpec {
    fn default() -> Self {
        let d = SafetyParams::default();
        Self { k_a: d.k_a, k_b: d.k_b, r_uav: d.r_uav, strict_paper_sdf_branch: d.strict_paper_sdf_branch }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSpec {
    pub crossover_rate: f64,
    pub eta_crossover: f64,
    /// Per-variable mutation probability; `1 / D` when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation_rate: Option<f64>,
    pub eta_mutation: f64,
    pub v_floor: f64,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        let d = MooParams::default();
        Self {
            crossover_rate: d.crossover_rate,
            eta_crossover: d.eta_crossover,
            mutation_rate: d.mutation_rate,
            eta_mutation: d.eta_mutation,
            v_floor: DEFAULT_V_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedingSpec {
    pub sigma_pos: f64,
    /// `v_max / 2` when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_speed: Option<f64>,
    pub rrt_step: f64,
    pub rrt_max_iters: usize,
    pub clearance_margin: f64,
    /// Speed given to the seed's control points; `v_max / 2` when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_cruise: Option<f64>,
}

impl Default for SeedingSpec {
    fn default() -> Self {
        let d = SeedingParams::with_v_max(2.0);
        Self {
            sigma_pos: d.sigma_pos,
            sigma_speed: None,
            rrt_step: d.rrt_step,
            rrt_max_iters: d.rrt_max_iters,
            clearance_margin: d.clearance_margin,
            v_cruise: None,
        }
    }
}

/// Which costs the optimizer ranks on. All three are always computed and reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveMask {
    pub time: bool,
    pub safety: bool,
    pub energy: bool,
}

impl Default for ObjectiveMask {
    fn default() -> Self {
        Self { time: true, safety: true, energy: true }
    }
}

impl ObjectiveMask {
    pub fn as_array(&self) -> [bool; 3] {
        [self.time, self.safety, self.energy]
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut scenario = parse_scenario(&text, path)?;
    scenario.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    scenario.validate()?;
    Ok(scenario)
}

/// Parses without validating; `origin` only labels error messages.
pub fn parse_scenario(text: &str, origin: &Path) -> Result<Scenario> {
    serde_json::from_str(text).map_err(|e| Error::json(origin, e))
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                v.push(msg);
            }
        };
        let d = &self.domain;
        for a in 0..3 {
            check(
                d.min[a] < d.max[a],
                format!("domain.max[{a}]: {} must exceed domain.min[{a}] = {}", d.max[a], d.min[a]),
            );
        }
        check(d.resolution > 0.0, format!("domain.resolution: {} must be positive", d.resolution));
        check(d.voxel_budget > 0, "domain.voxel_budget: must be positive".into());

        for (i, o) in self.obstacles.iter().enumerate() {
            if let Err(e) = o.validate() {
                check(false, format!("obstacles[{i}]: {e}"));
            }
        }
        for (i, h) in self.hulls.iter().enumerate() {
            check(
                !(h.rotation.is_some() && h.yaw_deg.is_some()),
                format!("hulls[{i}]: give either rotation or yaw_deg, not both"),
            );
            if let Err(e) = h.to_hull() {
                check(false, format!("hulls[{i}]: {e}"));
            }
        }

        let hp = &self.hyperparams;
        check(hp.v_max > 0.0, format!("hyperparams.v_max: {} must be positive", hp.v_max));
        check(hp.a_max > 0.0, format!("hyperparams.a_max: {} must be positive", hp.a_max));
        check(
            hp.p > 1 && hp.p <= MAX_DEGREE,
            format!("hyperparams.p: {} outside the allowed degree range 1 < p <= {MAX_DEGREE}", hp.p),
        );
        check(hp.r_sdf_min > 0.0, format!("hyperparams.r_sdf_min: {} must be positive", hp.r_sdf_min));
        check(
            hp.r_sdf_max > hp.r_sdf_min,
            format!("hyperparams.r_sdf_max: {} must exceed r_sdf_min = {}", hp.r_sdf_max, hp.r_sdf_min),
        );
        check(hp.r_ch_max > 0.0, format!("hyperparams.r_ch_max: {} must be positive", hp.r_ch_max));
        check(hp.delta_rope > 0.0, format!("hyperparams.delta_rope: {} must be positive", hp.delta_rope));
        check(hp.n_gen > 0, "hyperparams.n_gen: must be positive".into());
        check(
            hp.n_pop >= 8 && hp.n_pop.is_multiple_of(4),
            format!("hyperparams.n_pop: {} must be at least 8 and a multiple of 4", hp.n_pop),
        );
        check(hp.n_nurbs >= 2, format!("hyperparams.n_nurbs: {} must be at least 2", hp.n_nurbs));
        if let Some(m) = hp.m_uav {
            check(m > 0.0, format!("hyperparams.m_uav: {m} must be positive"));
        }

        let inside = |p: &Vec3| (0..3).all(|a| p[a] >= d.min[a] && p[a] <= d.max[a]);
        for (name, w) in [("start", &self.start), ("goal", &self.goal)] {
            check(inside(&w.position), format!("{name}.position: outside the domain"));
            if let Some(v) = w.speed {
                check(v >= 0.0 && v <= hp.v_max, format!("{name}.speed: {v} must lie in [0, v_max = {}]", hp.v_max));
            }
        }
        check(self.start.position != self.goal.position, "goal.position: must differ from start.position".into());

        let s = &self.safety;
        check(s.k_a >= 0.0, format!("safety.k_a: {} must be non-negative", s.k_a));
        check(s.k_b >= 0.0, format!("safety.k_b: {} must be non-negative", s.k_b));
        check(s.r_uav >= 0.0, format!("safety.r_uav: {} must be non-negative", s.r_uav));

        let o = &self.optimizer;
        check((0.0..=1.0).contains(&o.crossover_rate), format!("optimizer.crossover_rate: {} outside [0, 1]", o.crossover_rate));
        if let Some(m) = o.mutation_rate {
            check((0.0..=1.0).contains(&m), format!("optimizer.mutation_rate: {m} outside [0, 1]"));
        }
        check(o.eta_crossover > 0.0, format!("optimizer.eta_crossover: {} must be positive", o.eta_crossover));
        check(o.eta_mutation > 0.0, format!("optimizer.eta_mutation: {} must be positive", o.eta_mutation));
        check(
            o.v_floor > 0.0 && o.v_floor < hp.v_max,
            format!("optimizer.v_floor: {} must lie in (0, v_max)", o.v_floor),
        );

        let sd = &self.seeding;
        check(sd.sigma_pos >= 0.0, format!("seeding.sigma_pos: {} must be non-negative", sd.sigma_pos));
        if let Some(x) = sd.sigma_speed {
            check(x >= 0.0, format!("seeding.sigma_speed: {x} must be non-negative"));
        }
        check(sd.rrt_step > 0.0, format!("seeding.rrt_step: {} must be positive", sd.rrt_step));
        check(sd.rrt_max_iters > 0, "seeding.rrt_max_iters: must be positive".into());
        check(sd.clearance_margin >= 0.0, format!("seeding.clearance_margin: {} must be non-negative", sd.clearance_margin));
        if let Some(x) = sd.v_cruise {
            check(
                x >= o.v_floor && x <= hp.v_max,
                format!("seeding.v_cruise: {x} must lie in [v_floor, v_max]"),
            );
        }

        let r = &self.risks;
        for (name, x) in [
            ("wind", r.wind),
            ("communication", r.communication),
            ("localization", r.localization),
            ("battery", r.battery),
        ] {
            check((0.0..=1.0).contains(&x), format!("risks.{name}: {x} outside [0, 1]"));
        }
        if let Err(e) = self.baselines.validate() {
            check(false, format!("baselines: {e}"));
        }

        let m = self.objectives;
        check(m.time || m.safety || m.energy, "objectives: at least one objective must be active".into());
        check(
            !m.energy || self.power_calibration.is_some(),
            "power_calibration: required while objectives.energy is active".into(),
        );

        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    pub fn domain_box(&self) -> riskplan_core::Result<DomainBox> {
        DomainBox::new(self.domain.min, self.domain.max, self.hyperparams.v_max)
    }

    pub fn hulls(&self) -> riskplan_core::Result<Vec<OrientedHull>> {
        self.hulls.iter().map(HullSpec::to_hull).collect()
    }

    pub fn environment(&self) -> riskplan_core::Result<Environment> {
        Environment::build(
            self.domain_box()?,
            self.obstacles.clone(),
            self.hulls()?,
            self.domain.resolution,
            self.domain.voxel_budget,
        )
    }

    pub fn safety_params(&self) -> SafetyParams {
        SafetyParams {
            r_sdf_min: self.hyperparams.r_sdf_min,
            r_sdf_max: self.hyperparams.r_sdf_max,
            r_ch_max: self.hyperparams.r_ch_max,
            k_a: self.safety.k_a,
            k_b: self.safety.k_b,
            r_uav: self.safety.r_uav,
            strict_paper_sdf_branch: self.safety.strict_paper_sdf_branch,
        }
    }

    pub fn evaluation_params(&self) -> EvaluationParams {
        EvaluationParams {
            degree: self.hyperparams.p,
            n_samples: self.hyperparams.n_nurbs,
            safety: self.safety_params(),
            a_max: self.hyperparams.a_max,
            v_floor: self.optimizer.v_floor,
        }
    }

    pub fn endpoints(&self) -> Endpoints {
        Endpoints {
            start: self.start.position,
            goal: self.goal.position,
            v_start: self.start.speed.unwrap_or(self.v_cruise()),
            v_goal: self.goal.speed.unwrap_or(self.v_cruise()),
        }
    }

    pub fn moo_params(&self) -> MooParams {
        MooParams {
            n_gen: self.hyperparams.n_gen,
            pop_size: self.hyperparams.n_pop,
            crossover_rate: self.optimizer.crossover_rate,
            eta_crossover: self.optimizer.eta_crossover,
            mutation_rate: self.optimizer.mutation_rate,
            eta_mutation: self.optimizer.eta_mutation,
            rng_seed: self.rng_seed,
        }
    }

    pub fn seeding_params(&self) -> SeedingParams {
        let v_max = self.hyperparams.v_max;
        SeedingParams {
            delta_rope: self.hyperparams.delta_rope,
            sigma_pos: self.seeding.sigma_pos,
            sigma_speed: self.seeding.sigma_speed.unwrap_or(v_max / 2.0),
            rrt_step: self.seeding.rrt_step,
            rrt_max_iters: self.seeding.rrt_max_iters,
            clearance_margin: self.seeding.clearance_margin,
            // decorrelate the tree from the optimizer stream
            rng_seed: self.rng_seed ^ 0x9e37_79b9_7f4a_7c15,
        }
    }

    pub fn v_cruise(&self) -> f64 {
        self.seeding.v_cruise.unwrap_or(self.hyperparams.v_max / 2.0)
    }

    pub fn power_calibration_path(&self) -> Option<PathBuf> {
        self.power_calibration.as_ref().map(|p| if p.is_absolute() { p.clone() } else { self.base_dir.join(p) })
    }
}
