//! Constrained NSGA-II.
//!
//! The optimizer is generic over a [`Problem`]; population evaluation is
//! delegated to an [`Executor`] so that callers with threads can evaluate in
//! parallel while the generational loop stays sequential and deterministic.

pub mod benchmarks;
mod nsga2;
mod operators;
mod sort;

use alloc::format;
use alloc::vec::Vec;

pub use nsga2::{dedup_by_objectives, run_nsga2, GenerationStats, MooParams, Nsga2Outcome};
pub use operators::{polynomial_mutation, sbx_crossover};
pub use sort::{constrained_dominates, crowding_distance, non_dominated_sort, Candidate};

use crate::{Error, Result};

/// Per-variable box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Config("bound vectors differ in length".into()));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::Config(format!("bound {i}: lower {} is not below upper {}", lower[i], upper[i])));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(alloc::vec![lower; dim], alloc::vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| *v >= self.lower[i] && *v <= self.upper[i])
    }
}

pub trait Problem: Sync {
    type Evaluation: Clone + Send;

    fn bounds(&self) -> &Bounds;

    /// Number of objectives the optimizer ranks on.
    fn num_objectives(&self) -> usize;

    /// Must be pure: equal decisions give equal evaluations.
    fn evaluate(&self, decision: &[f64]) -> Self::Evaluation;

    fn objectives(&self, evaluation: &Self::Evaluation, out: &mut Vec<f64>);

    /// Total constraint violation, 0 when feasible.
    fn violation(&self, evaluation: &Self::Evaluation) -> f64;
}

/// Evaluates a batch of decisions; results must come back in input order.
pub trait Executor {
    fn evaluate_all<P: Problem>(&self, problem: &P, decisions: &[Vec<f64>]) -> Vec<P::Evaluation>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn evaluate_all<P: Problem>(&self, problem: &P, decisions: &[Vec<f64>]) -> Vec<P::Evaluation> {
        decisions.iter().map(|d| problem.evaluate(d)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual<E> {
    pub decision: Vec<f64>,
    pub evaluation: E,
    pub objectives: Vec<f64>,
    pub violation: f64,
}

impl<E> Individual<E> {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

impl<E> Candidate for Individual<E> {
    fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    fn objective(&self, m: usize) -> f64 {
        self.objectives[m]
    }

    fn violation(&self) -> f64 {
        self.violation
    }
}

pub(crate) fn assemble<P: Problem>(problem: &P, decisions: Vec<Vec<f64>>, evaluations: Vec<P::Evaluation>) -> Vec<Individual<P::Evaluation>> {
    decisions
        .into_iter()
        .zip(evaluations)
        .map(|(decision, evaluation)| {
            let mut objectives = Vec::with_capacity(problem.num_objectives());
            problem.objectives(&evaluation, &mut objectives);
            let violation = problem.violation(&evaluation);
            Individual { decision, evaluation, objectives, violation }
        })
        .collect()
}
