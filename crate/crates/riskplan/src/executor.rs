use rayon::prelude::*;
use riskplan_core::moo::{Executor, Problem};

/// Evaluates a population on the rayon pool. `collect` on an indexed
/// parallel iterator keeps input order, so runs stay deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl Executor for Parallel {
    fn evaluate_all<P: Problem>(&self, problem: &P, decisions: &[Vec<f64>]) -> Vec<P::Evaluation> {
        decisions.par_iter().map(|d| problem.evaluate(d)).collect()
    }
}
