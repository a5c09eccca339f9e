//! Result files: Pareto JSON, trajectory CSV, generation log.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use riskplan_core::moo::GenerationStats;
use riskplan_core::power::{BlandAltman, PowerQuadricModel};
use riskplan_core::problem::{EvaluatedIndividual, TimedSample};
use riskplan_core::voting::{RiskState, VoteWeights};

use crate::error::{Error, Result};
use crate::pipeline::{Front, PlanResult, SeedSummary, Timings};
use crate::scenario::Scenario;

pub const PARETO_FILE: &str = "pareto.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const GENERATIONS_FILE: &str = "generations.csv";
pub const TIMINGS_FILE: &str = "timings.json";
pub const FORMAT: &str = "riskplan-pareto/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub rng_seed: u64,
    /// Vehicle mass as given in the scenario; informational only.
    pub m_uav: Option<f64>,
    pub generations: usize,
    pub generation_log: String,
    pub version: String,
}

/// On-disk form of a planned front. Wall-clock timings live in a separate
/// file so that identical runs produce byte-identical Pareto files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoFile {
    pub format: String,
    pub scenario: Scenario,
    pub power_model: Option<PowerQuadricModel>,
    pub power_validation: Option<BlandAltman>,
    pub seed: SeedSummary,
    pub risks: RiskState,
    pub vote_weights: VoteWeights,
    pub selected_index: usize,
    pub pareto: Vec<EvaluatedIndividual>,
    pub metadata: Metadata,
}

impl ParetoFile {
    pub fn from_plan(plan: &PlanResult) -> Self {
        let f = &plan.front;
        Self {
            format: FORMAT.into(),
            scenario: f.scenario.clone(),
            power_model: f.power_model,
            power_validation: f.power_validation,
            seed: f.seed.clone(),
            risks: plan.risks,
            vote_weights: plan.weights,
            selected_index: plan.selected_index,
            pareto: f.pareto.clone(),
            metadata: Metadata {
                rng_seed: f.scenario.rng_seed,
                m_uav: f.scenario.hyperparams.m_uav,
                generations: f.generations.len().saturating_sub(1),
                generation_log: GENERATIONS_FILE.into(),
                version: env!("CARGO_PKG_VERSION").into(),
            },
        }
    }

    /// Rebuilds the cached front (without the generation log or timings).
    pub fn into_front(self) -> Front {
        Front {
            scenario: self.scenario,
            power_model: self.power_model,
            power_validation: self.power_validation,
            seed: self.seed,
            pareto: self.pareto,
            generations: Vec::new(),
            timings: Timings { environment_s: 0.0, seeding_s: 0.0, optimization_s: 0.0, total_s: 0.0 },
        }
    }
}

pub fn load_pareto(path: &Path) -> Result<ParetoFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut file: ParetoFile = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    if file.format != FORMAT {
        return Err(Error::Validation(vec![format!("format: expected {FORMAT}, found {}", file.format)]));
    }
    file.scenario.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    if file.selected_index >= file.pareto.len() {
        return Err(Error::Validation(vec![format!("selected_index: {} out of range", file.selected_index)]));
    }
    Ok(file)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_trajectory_csv(path: &Path, rows: &[TimedSample]) -> Result<()> {
    let wrap = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(["t_s", "x_m", "y_m", "z_m", "speed_mps", "power_w"]).map_err(wrap)?;
    for r in rows {
        let p = r.position;
        w.write_record([r.t_s, p.x, p.y, p.z, r.speed_mps, r.power_w].map(|x| x.to_string())).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `gen,front_size,best_time,best_safety,best_energy`; objectives excluded from
/// ranking are left empty.
pub fn write_generations_csv(path: &Path, stats: &[GenerationStats], mask: [bool; 3]) -> Result<()> {
    let mut out = String::from("gen,front_size,best_time,best_safety,best_energy\n");
    for s in stats {
        out.push_str(&generation_line(s, mask));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn generation_line(s: &GenerationStats, mask: [bool; 3]) -> String {
    let mut best = s.best.iter();
    let cols: Vec<String> = mask
        .iter()
        .map(|active| match active.then(|| best.next()).flatten() {
            Some(v) if v.is_finite() => v.to_string(),
            _ => String::new(),
        })
        .collect();
    format!("{},{},{}", s.generation, s.front_size, cols.join(","))
}

/// Writes every result file of a plan into `dir`; returns the written paths.
pub fn write_plan(dir: &Path, plan: &PlanResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths: Vec<PathBuf> = [PARETO_FILE, TRAJECTORY_FILE, GENERATIONS_FILE, TIMINGS_FILE]
        .iter()
        .map(|f| dir.join(f))
        .collect();
    write_json(&paths[0], &ParetoFile::from_plan(plan))?;
    write_trajectory_csv(&paths[1], &plan.trajectory)?;
    write_generations_csv(&paths[2], &plan.front.generations, plan.front.scenario.objectives.as_array())?;
    write_json(&paths[3], &plan.front.timings)?;
    Ok(paths)
}

