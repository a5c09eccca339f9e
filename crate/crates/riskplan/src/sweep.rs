//! Experiment sweeps over vote coefficients or one mission risk.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use riskplan_core::voting::{adjust_coefficients, RiskState, VoteWeights};

use crate::error::{Error, Result};
use crate::pipeline::{optimize, Front, TrajectoryMetrics};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskAxis {
    Wind,
    Communication,
    Localization,
    Battery,
}

impl RiskAxis {
    pub fn set(self, risks: &mut RiskState, value: f64) {
        match self {
            RiskAxis::Wind => risks.wind = value,
            RiskAxis::Communication => risks.communication = value,
            RiskAxis::Localization => risks.localization = value,
            RiskAxis::Battery => risks.battery = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepKind {
    /// Every `(k_t, k_s, k_e)` on the simplex lattice with the given spacing.
    Coefficients { step: f64 },
    /// One risk varied from `from` to `to`; the others come from `base`
    /// (or the scenario's risks when omitted).
    Risk {
        axis: RiskAxis,
        #[serde(default)]
        from: f64,
        #[serde(default = "one")]
        to: f64,
        step: f64,
        #[serde(default)]
        base: Option<RiskState>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(flatten)]
    pub kind: SweepKind,
    /// Optimizer seeds; one cached front per seed. Defaults to the scenario's seed.
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Re-run the optimizer for every grid point instead of re-voting on the
    /// cached front. The per-point seed is derived from the run seed and the point index.
    #[serde(default)]
    pub replan: bool,
}

/// One grid point of a sweep: the risks (for risk sweeps) and the vote weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub risks: Option<RiskState>,
    pub weights: VoteWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub point: usize,
    pub value: f64,
    pub k_t: f64,
    pub k_s: f64,
    pub k_e: f64,
    pub selected_index: usize,
    pub front_size: usize,
    #[serde(flatten)]
    pub metrics: TrajectoryMetrics,
}

pub fn load_sweep_spec(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let spec: SweepSpec = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    spec.validate()?;
    Ok(spec)
}

/// Number of grid steps covering `span`, tolerant of `0.1`-style rounding.
fn steps(span: f64, step: f64) -> Option<usize> {
    let n = span / step;
    let r = n.round();
    ((n - r).abs() < 1e-6 && r >= 0.0).then_some(r as usize)
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        match &self.kind {
            SweepKind::Coefficients { step } => {
                if !(*step > 0.0 && *step <= 1.0) || steps(1.0, *step).is_none() {
                    v.push(format!("step: {step} must divide 1 evenly"));
                }
            }
            SweepKind::Risk { from, to, step, base, .. } => {
                if !(0.0..=1.0).contains(from) || !(0.0..=1.0).contains(to) || from > to {
                    v.push(format!("from/to: [{from}, {to}] must be an interval inside [0, 1]"));
                }
                if step.is_nan() || *step <= 0.0 || steps(to - from, *step).is_none() {
                    v.push(format!("step: {step} must divide to - from evenly"));
                }
                if let Some(b) = base {
                    if let Err(e) = b.validate() {
                        v.push(format!("base: {e}"));
                    }
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Grid values along the sweep axis paired with vote weights.
    pub fn points(&self, scenario: &Scenario) -> Result<Vec<(f64, SweepPoint)>> {
        self.validate()?;
        match &self.kind {
            SweepKind::Coefficients { step } => {
                let n = steps(1.0, *step).unwrap_or(0);
                let mut out = Vec::new();
                for i in 0..=n {
                    for j in 0..=(n - i) {
                        let k = (n - i - j) as f64 / n as f64;
                        let (kt, ks) = (i as f64 / n as f64, j as f64 / n as f64);
                        let weights = VoteWeights::fixed(kt, ks, k).map_err(Error::stage("sweep"))?;
                        out.push((out.len() as f64, SweepPoint { risks: None, weights }));
                    }
                }
                Ok(out)
            }
            SweepKind::Risk { axis, from, to, step, base } => {
                let n = steps(to - from, *step).unwrap_or(0);
                (0..=n)
                    .map(|i| {
                        let value = if i == n { *to } else { from + i as f64 * step };
                        let mut risks = base.unwrap_or(scenario.risks);
                        axis.set(&mut risks, value);
                        let weights =
                            adjust_coefficients(&risks, &scenario.baselines).map_err(Error::stage("sweep"))?;
                        Ok((value, SweepPoint { risks: Some(risks), weights }))
                    })
                    .collect()
            }
        }
    }

    pub fn seeds(&self, scenario: &Scenario) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![scenario.rng_seed]
        } else {
            self.seeds.clone()
        }
    }
}

fn row(front: &Front, env: &riskplan_core::environment::Environment, seed: u64, point: usize, value: f64, p: &SweepPoint) -> Result<SweepRow> {
    let selected_index = front.select_with(&p.weights)?;
    Ok(SweepRow {
        seed,
        point,
        value,
        k_t: p.weights.k_t,
        k_s: p.weights.k_s,
        k_e: p.weights.k_e,
        selected_index,
        front_size: front.pareto.len(),
        metrics: front.metrics(env, selected_index)?,
    })
}

/// Rows ordered by seed, then grid point. Seeds run in parallel; the output
/// depends only on (scenario, spec).
pub fn run_sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let points = spec.points(scenario)?;
    let env = scenario.environment().map_err(Error::stage("environment"))?;
    let per_seed: Vec<Result<Vec<SweepRow>>> = spec
        .seeds(scenario)
        .into_par_iter()
        .map(|seed| {
            if spec.replan {
                points
                    .iter()
                    .enumerate()
                    .map(|(i, (value, p))| {
                        let mut s = scenario.clone();
                        s.rng_seed = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
                        let front = optimize(&s, |_| {})?;
                        row(&front, &env, seed, i, *value, p)
                    })
                    .collect()
            } else {
                let mut s = scenario.clone();
                s.rng_seed = seed;
                let front = optimize(&s, |_| {})?;
                points.iter().enumerate().map(|(i, (value, p))| row(&front, &env, seed, i, *value, p)).collect()
            }
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_seed {
        rows.extend(r?);
    }
    Ok(rows)
}

pub const SWEEP_HEADER: [&str; 13] = [
    "seed",
    "point",
    "value",
    "k_t",
    "k_s",
    "k_e",
    "selected_index",
    "front_size",
    "time_s",
    "safety",
    "energy_j",
    "mean_obstacle_distance_m",
    "min_obstacle_distance_m",
];

// Written field by field: the csv serializer cannot handle flattened structs.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let wrap = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(SWEEP_HEADER).map_err(wrap)?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([
            r.seed.to_string(),
            r.point.to_string(),
            r.value.to_string(),
            r.k_t.to_string(),
            r.k_s.to_string(),
            r.k_e.to_string(),
            r.selected_index.to_string(),
            r.front_size.to_string(),
            m.time_s.to_string(),
            m.safety.to_string(),
            m.energy_j.to_string(),
            m.mean_obstacle_distance_m.to_string(),
            m.min_obstacle_distance_m.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
