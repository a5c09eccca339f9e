//! Analytic test problems for the optimizer.

use alloc::vec::Vec;

use rand::Rng;

use super::{Bounds, Problem};
use crate::math::sqrt;
use crate::rng::rng_from_seed;

/// ZDT1: two objectives on `[0, 1]^D`; Pareto-optimal front `f2 = 1 - sqrt(f1)`.
#[derive(Debug, Clone)]
pub struct Zdt1 {
    bounds: Bounds,
}

impl Zdt1 {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 2, "ZDT1 needs at least two variables");
        Self { bounds: Bounds::uniform(dim, 0.0, 1.0).expect("unit box") }
    }

    pub fn values(x: &[f64]) -> [f64; 2] {
        let f1 = x[0];
        let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64;
        [f1, g * (1.0 - sqrt(f1 / g))]
    }

    /// Distance from an objective point to the analytic front, by dense search
    /// over `f1`.
    pub fn front_distance(point: [f64; 2]) -> f64 {
        let n = 10_000;
        (0..=n)
            .map(|i| {
                let f1 = i as f64 / n as f64;
                let (dx, dy) = (point[0] - f1, point[1] - (1.0 - sqrt(f1)));
                sqrt(dx * dx + dy * dy)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl Problem for Zdt1 {
    type Evaluation = [f64; 2];

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, decision: &[f64]) -> [f64; 2] {
        Self::values(decision)
    }

    fn objectives(&self, evaluation: &[f64; 2], out: &mut Vec<f64>) {
        out.extend_from_slice(evaluation);
    }

    fn violation(&self, _: &[f64; 2]) -> f64 {
        0.0
    }
}

/// Uniform random decisions inside `bounds`.
pub fn random_population(bounds: &Bounds, size: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..size)
        .map(|_| (0..bounds.dim()).map(|i| rng.random_range(bounds.lower[i]..=bounds.upper[i])).collect())
        .collect()
}
