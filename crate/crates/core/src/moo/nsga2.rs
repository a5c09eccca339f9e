use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sort::{crowding_distance, non_dominated_sort};
use super::{assemble, polynomial_mutation, sbx_crossover, Executor, Individual, Problem};
use crate::rng::rng_from_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MooParams {
    pub n_gen: usize,
    pub pop_size: usize,
    pub crossover_rate: f64,
    pub eta_crossover: f64,
    /// Per-variable mutation probability; `None` means `1 / D`.
    pub mutation_rate: Option<f64>,
    pub eta_mutation: f64,
    pub rng_seed: u64,
}

impl Default for MooParams {
    fn default() -> Self {
        Self {
            n_gen: 1000,
            pop_size: 40,
            crossover_rate: 0.95,
            eta_crossover: 10.0,
            mutation_rate: None,
            eta_mutation: 50.0,
            rng_seed: 0,
        }
    }
}

impl MooParams {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 8 || !self.pop_size.is_multiple_of(4) {
            return Err(Error::Config(format!("pop_size {} must be >= 8 and divisible by 4", self.pop_size)));
        }
        let rate_ok = |r: f64| (0.0..=1.0).contains(&r);
        if !rate_ok(self.crossover_rate) || !self.mutation_rate.is_none_or(rate_ok) {
            return Err(Error::Config("crossover and mutation rates must lie in [0, 1]".into()));
        }
        if !(self.eta_crossover > 0.0 && self.eta_mutation > 0.0) {
            return Err(Error::Config("distribution indices must be positive".into()));
        }
        Ok(())
    }
}

/// Front summary handed to the progress callback after each generation
/// (generation 0 is the evaluated initial population).
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub front_size: usize,
    pub feasible: usize,
    /// Per-objective minimum over feasible individuals; NaN when none is feasible.
    pub best: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Nsga2Outcome<E> {
    /// Feasible members of the final first front, deduplicated on objectives.
    pub front: Vec<Individual<E>>,
    pub population: Vec<Individual<E>>,
    pub diagnostic: Option<String>,
}

struct Ranked<E> {
    ind: Individual<E>,
    rank: usize,
    crowding: f64,
}

pub fn run_nsga2<P, X, F>(
    problem: &P,
    executor: &X,
    seed_population: Vec<Vec<f64>>,
    params: &MooParams,
    mut progress: F,
) -> Result<Nsga2Outcome<P::Evaluation>>
where
    P: Problem,
    X: Executor,
    F: FnMut(&GenerationStats, &[Individual<P::Evaluation>]),
{
    params.validate()?;
    let bounds = problem.bounds();
    let dim = bounds.dim();
    if seed_population.len() != params.pop_size {
        return Err(Error::Config(format!(
            "seed population has {} members, expected {}",
            seed_population.len(),
            params.pop_size
        )));
    }
    if let Some(bad) = seed_population.iter().find(|d| d.len() != dim) {
        return Err(Error::Decode { expected: dim, found: bad.len() });
    }
    let mutation_rate = params.mutation_rate.unwrap_or(1.0 / dim.max(1) as f64);
    let mut rng = rng_from_seed(params.rng_seed);

    let evaluations = executor.evaluate_all(problem, &seed_population);
    let mut population = rank_population(assemble(problem, seed_population, evaluations));
    progress(&stats(0, &population), &plain(&population));

    for generation in 1..=params.n_gen {
        let mut offspring = Vec::with_capacity(params.pop_size);
        while offspring.len() < params.pop_size {
            let p1 = tournament(&population, &mut rng);
            let p2 = tournament(&population, &mut rng);
            let (c1, c2) = sbx_crossover(
                &population[p1].ind.decision,
                &population[p2].ind.decision,
                bounds,
                params.crossover_rate,
                params.eta_crossover,
                &mut rng,
            );
            offspring.push(polynomial_mutation(&c1, bounds, mutation_rate, params.eta_mutation, &mut rng));
            offspring.push(polynomial_mutation(&c2, bounds, mutation_rate, params.eta_mutation, &mut rng));
        }
        let evaluations = executor.evaluate_all(problem, &offspring);
        let mut merged: Vec<Individual<P::Evaluation>> = population.into_iter().map(|r| r.ind).collect();
        merged.extend(assemble(problem, offspring, evaluations));
        population = environmental_selection(merged, params.pop_size);
        progress(&stats(generation, &population), &plain(&population));
    }

    let population: Vec<Individual<P::Evaluation>> = population.into_iter().map(|r| r.ind).collect();
    let fronts = non_dominated_sort(&population);
    let first: Vec<Individual<P::Evaluation>> = fronts
        .first()
        .map(|f| f.iter().map(|&i| population[i].clone()).filter(|i| i.is_feasible()).collect())
        .unwrap_or_default();
    let front = dedup_by_objectives(first, 1e-9);
    let diagnostic = if front.is_empty() {
        Some(String::from("no feasible individual in the final population"))
    } else {
        None
    };
    Ok(Nsga2Outcome { front, population, diagnostic })
}

/// Drops members whose objective vector is within `tol` (max-norm) of an earlier member.
pub fn dedup_by_objectives<E>(items: Vec<Individual<E>>, tol: f64) -> Vec<Individual<E>> {
    let mut kept: Vec<Individual<E>> = Vec::with_capacity(items.len());
    for it in items {
        let dup = kept.iter().any(|k| {
            k.objectives.iter().zip(&it.objectives).all(|(a, b)| (a - b).abs() <= tol)
        });
        if !dup {
            kept.push(it);
        }
    }
    kept
}

fn plain<E: Clone>(population: &[Ranked<E>]) -> Vec<Individual<E>> {
    population.iter().map(|r| r.ind.clone()).collect()
}

fn stats<E>(generation: usize, population: &[Ranked<E>]) -> GenerationStats {
    let m = population.first().map(|r| r.ind.objectives.len()).unwrap_or(0);
    let mut best = alloc::vec![f64::NAN; m];
    let mut feasible = 0;
    for r in population.iter().filter(|r| r.ind.is_feasible()) {
        feasible += 1;
        for (b, v) in best.iter_mut().zip(&r.ind.objectives) {
            if b.is_nan() || *v < *b {
                *b = *v;
            }
        }
    }
    GenerationStats {
        generation,
        front_size: population.iter().filter(|r| r.rank == 0).count(),
        feasible,
        best,
    }
}

fn tournament<E, R: Rng>(population: &[Ranked<E>], rng: &mut R) -> usize {
    let a = rng.random_range(0..population.len());
    let b = rng.random_range(0..population.len());
    let (ra, rb) = (&population[a], &population[b]);
    if ra.rank != rb.rank {
        if ra.rank < rb.rank { a } else { b }
    } else if rb.crowding > ra.crowding {
        b
    } else {
        a
    }
}

fn rank_population<E>(individuals: Vec<Individual<E>>) -> Vec<Ranked<E>> {
    let fronts = non_dominated_sort(&individuals);
    let mut rank = alloc::vec![0usize; individuals.len()];
    let mut crowding = alloc::vec![0.0f64; individuals.len()];
    for (r, front) in fronts.iter().enumerate() {
        let cd = crowding_distance(&individuals, front);
        for (k, &i) in front.iter().enumerate() {
            rank[i] = r;
            crowding[i] = cd[k];
        }
    }
    individuals
        .into_iter()
        .enumerate()
        .map(|(i, ind)| Ranked { ind, rank: rank[i], crowding: crowding[i] })
        .collect()
}

fn environmental_selection<E>(merged: Vec<Individual<E>>, size: usize) -> Vec<Ranked<E>> {
    let fronts = non_dominated_sort(&merged);
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    for front in &fronts {
        if chosen.len() + front.len() <= size {
            chosen.extend_from_slice(front);
            if chosen.len() == size {
                break;
            }
            continue;
        }
        let cd = crowding_distance(&merged, front);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&x, &y| cd[y].total_cmp(&cd[x]).then(x.cmp(&y)));
        let room = size - chosen.len();
        chosen.extend(order[..room].iter().map(|&k| front[k]));
        break;
    }
    chosen.sort_unstable();
    let mut slots: Vec<Option<Individual<E>>> = merged.into_iter().map(Some).collect();
    let survivors = chosen.iter().map(|&i| slots[i].take().expect("chosen once")).collect();
    rank_population(survivors)
}
