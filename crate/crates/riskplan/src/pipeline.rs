//! End-to-end planning: environment -> power model -> seed -> NSGA-II -> vote.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use riskplan_core::costs::ConstraintReport;
use riskplan_core::environment::Environment;
use riskplan_core::moo::{run_nsga2, GenerationStats};
use riskplan_core::power::{BlandAltman, PowerQuadricModel};
use riskplan_core::problem::{
    obstacle_distance_stats, timeline, DecisionLayout, EvaluatedIndividual, TimedSample, TrajectoryProblem,
};
use riskplan_core::rng::rng_from_seed;
use riskplan_core::seeding::{build_seed, initial_population};
use riskplan_core::voting::{adjust_coefficients, vote, RiskState, VoteWeights};
use riskplan_core::Vec3;

use crate::calibration::load_power_model;
use crate::error::{Error, Result};
use crate::executor::Parallel;
use crate::scenario::Scenario;

/// Summary of the seed trajectory handed to the optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub polyline: Vec<Vec3>,
    pub delta_rope: f64,
    pub halvings: usize,
    pub individual: EvaluatedIndividual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub environment_s: f64,
    pub seeding_s: f64,
    pub optimization_s: f64,
    pub total_s: f64,
}

/// Optimizer output before voting: everything needed to re-vote or re-evaluate.
#[derive(Debug, Clone)]
pub struct Front {
    pub scenario: Scenario,
    pub power_model: Option<PowerQuadricModel>,
    pub power_validation: Option<BlandAltman>,
    pub seed: SeedSummary,
    pub pareto: Vec<EvaluatedIndividual>,
    pub generations: Vec<GenerationStats>,
    pub timings: Timings,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub front: Front,
    pub risks: RiskState,
    pub weights: VoteWeights,
    pub selected_index: usize,
    pub trajectory: Vec<TimedSample>,
}

impl PlanResult {
    pub fn selected(&self) -> &EvaluatedIndividual {
        &self.front.pareto[self.selected_index]
    }
}

/// Selected-trajectory figures reported by sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetrics {
    pub time_s: f64,
    pub safety: f64,
    pub energy_j: f64,
    pub mean_obstacle_distance_m: f64,
    pub min_obstacle_distance_m: f64,
}

/// Builds the world and the power model of a validated scenario.
pub fn prepare(scenario: &Scenario) -> Result<(Environment, Option<PowerQuadricModel>, Option<BlandAltman>)> {
    let env = scenario.environment().map_err(Error::stage("environment"))?;
    let (model, validation) = match scenario.power_calibration_path() {
        Some(path) => {
            let report = load_power_model(&path)?;
            (Some(report.model), report.validation)
        }
        None => (None, None),
    };
    Ok((env, model, validation))
}

pub fn problem_for<'a>(
    scenario: &Scenario,
    env: &'a Environment,
    power: Option<PowerQuadricModel>,
    arity: usize,
) -> Result<TrajectoryProblem<'a>> {
    let layout = DecisionLayout::from_arity(arity).map_err(Error::stage("decode"))?;
    let problem = TrajectoryProblem::new(env, power, scenario.endpoints(), scenario.evaluation_params(), layout)
        .map_err(Error::stage("problem setup"))?;
    Ok(problem.with_objective_mask(scenario.objectives.as_array()))
}

/// Runs the optimizer; `progress` sees every generation's statistics.
pub fn optimize(scenario: &Scenario, mut progress: impl FnMut(&GenerationStats)) -> Result<Front> {
    let t0 = Instant::now();
    let (env, power, power_validation) = prepare(scenario)?;
    let t_env = t0.elapsed().as_secs_f64();

    let seeding = scenario.seeding_params();
    let seed = build_seed(&env, power.as_ref(), &scenario.endpoints(), &scenario.evaluation_params(), scenario.v_cruise(), &seeding)
        .map_err(Error::stage("seeding"))?;
    if seed.halvings > 0 {
        log::info!("seed repaired after {} halvings of delta_rope (now {} m)", seed.halvings, seed.delta_rope);
    }
    let t_seed = t0.elapsed().as_secs_f64();

    let problem = problem_for(scenario, &env, power, seed.individual.decision.len())?;
    let bounds = riskplan_core::moo::Problem::bounds(&problem).clone();
    let mut pop_rng = rng_from_seed(scenario.rng_seed.wrapping_add(0x2545_f491_4f6c_dd1d));
    let population = initial_population(
        &seed.individual.decision,
        scenario.hyperparams.n_pop,
        &bounds,
        seeding.sigma_pos,
        seeding.sigma_speed,
        &mut pop_rng,
    )
    .map_err(Error::stage("initial population"))?;

    let mut generations = Vec::with_capacity(scenario.hyperparams.n_gen + 1);
    let outcome = run_nsga2(&problem, &Parallel, population, &scenario.moo_params(), |stats, _| {
        progress(stats);
        generations.push(stats.clone());
    })
    .map_err(Error::stage("optimization"))?;
    if let Some(msg) = outcome.diagnostic {
        return Err(Error::Planning { stage: "optimization", source: riskplan_core::Error::Planning(msg) });
    }
    let pareto: Vec<EvaluatedIndividual> = outcome.front.into_iter().map(Into::into).collect();
    let t_total = t0.elapsed().as_secs_f64();

    Ok(Front {
        scenario: scenario.clone(),
        power_model: power,
        power_validation,
        seed: SeedSummary {
            polyline: seed.polyline,
            delta_rope: seed.delta_rope,
            halvings: seed.halvings,
            individual: seed.individual,
        },
        pareto,
        generations,
        timings: Timings {
            environment_s: t_env,
            seeding_s: t_seed - t_env,
            optimization_s: t_total - t_seed,
            total_s: t_total,
        },
    })
}

impl Front {
    pub fn environment(&self) -> Result<Environment> {
        self.scenario.environment().map_err(Error::stage("environment"))
    }

    /// Risk-weighted vote over the cached front.
    pub fn select(&self, risks: &RiskState) -> Result<(VoteWeights, usize)> {
        let weights = adjust_coefficients(risks, &self.scenario.baselines).map_err(Error::stage("voting"))?;
        Ok((weights, self.select_with(&weights)?))
    }

    pub fn select_with(&self, weights: &VoteWeights) -> Result<usize> {
        let costs: Vec<_> = self.pareto.iter().map(|i| i.costs).collect();
        vote(&costs, weights).ok_or_else(|| Error::Planning {
            stage: "voting",
            source: riskplan_core::Error::Planning("empty Pareto set".into()),
        })
    }

    pub fn trajectory(&self, env: &Environment, index: usize) -> Result<Vec<TimedSample>> {
        let member = &self.pareto[index];
        let problem = problem_for(&self.scenario, env, self.power_model, member.decision.len())?;
        let samples = problem.samples(&member.decision).map_err(Error::stage("sampling"))?;
        timeline(&samples, self.power_model.as_ref(), self.scenario.optimizer.v_floor).map_err(Error::stage("sampling"))
    }

    pub fn metrics(&self, env: &Environment, index: usize) -> Result<TrajectoryMetrics> {
        let member = &self.pareto[index];
        let problem = problem_for(&self.scenario, env, self.power_model, member.decision.len())?;
        let samples = problem.samples(&member.decision).map_err(Error::stage("sampling"))?;
        let (mean, min) = obstacle_distance_stats(&samples, env).map_err(Error::stage("sampling"))?;
        Ok(TrajectoryMetrics {
            time_s: member.costs.time_s,
            safety: member.costs.safety,
            energy_j: member.costs.energy_j,
            mean_obstacle_distance_m: mean,
            min_obstacle_distance_m: min,
        })
    }

    /// Re-scores every stored decision; used to check that saved fronts are faithful.
    pub fn reevaluate(&self, env: &Environment) -> Result<Vec<EvaluatedIndividual>> {
        self.pareto
            .iter()
            .map(|m| Ok(problem_for(&self.scenario, env, self.power_model, m.decision.len())?.evaluate_decision(&m.decision)))
            .collect()
    }

    pub fn into_plan(self, env: &Environment, risks: RiskState) -> Result<PlanResult> {
        let (weights, selected_index) = self.select(&risks)?;
        let trajectory = self.trajectory(env, selected_index)?;
        Ok(PlanResult { front: self, risks, weights, selected_index, trajectory })
    }
}

/// Full pipeline with the scenario's own risks.
pub fn plan(scenario: &Scenario, progress: impl FnMut(&GenerationStats)) -> Result<PlanResult> {
    let front = optimize(scenario, progress)?;
    let env = front.environment()?;
    let risks = scenario.risks;
    front.into_plan(&env, risks)
}

/// Satisfied-constraint check used on emitted trajectories.
pub fn is_feasible(report: &ConstraintReport) -> bool {
    report.feasible && report.total_violation() == 0.0
}
