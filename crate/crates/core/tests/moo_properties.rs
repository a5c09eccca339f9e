use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use riskplan_core::moo::benchmarks::{random_population, Zdt1};
use riskplan_core::moo::{crowding_distance, non_dominated_sort, run_nsga2, Candidate, MooParams, Sequential};

#[derive(Debug, Clone)]
struct Point {
    f: Vec<f64>,
    cv: f64,
}

impl Candidate for Point {
    fn num_objectives(&self) -> usize {
        self.f.len()
    }
    fn objective(&self, m: usize) -> f64 {
        self.f[m]
    }
    fn violation(&self) -> f64 {
        self.cv
    }
}

/// Feasibility first, then smaller violation, then Pareto dominance.
fn oracle_dominates(a: &Point, b: &Point) -> bool {
    match (a.cv == 0.0, b.cv == 0.0) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.cv < b.cv,
        (true, true) => a.f.iter().zip(&b.f).all(|(x, y)| x <= y) && a.f.iter().zip(&b.f).any(|(x, y)| x < y),
    }
}

fn oracle_fronts(pop: &[Point]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..pop.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| oracle_dominates(&pop[j], &pop[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

#[test]
fn sorting_matches_brute_force_on_200_populations() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(42);
    for _ in 0..200 {
        let n = rng.random_range(1..=64);
        let m = rng.random_range(2..=3);
        let pop: Vec<Point> = (0..n)
            .map(|_| Point {
                // coarse grid so ties and duplicates occur
                f: (0..m).map(|_| rng.random_range(0..8) as f64).collect(),
                cv: if rng.random_bool(0.6) { 0.0 } else { [0.5, 1.0, 2.0][rng.random_range(0..3)] },
            })
            .collect();
        let got = non_dominated_sort(&pop);
        let mut want = oracle_fronts(&pop);
        for f in &mut want {
            f.sort_unstable();
        }
        assert_eq!(got, want);
        for f in &got {
            let cd = crowding_distance(&pop, f);
            assert_eq!(cd.len(), f.len());
            assert!(cd.iter().all(|d| *d >= 0.0));
        }
    }
}

fn zdt1_run(seed: u64, gens: usize) -> Vec<[f64; 2]> {
    let problem = Zdt1::new(10);
    let params = MooParams { n_gen: gens, pop_size: 40, rng_seed: seed, ..MooParams::default() };
    let init = random_population(problem_bounds(&problem), 40, seed ^ 0x5eed);
    let out = run_nsga2(&problem, &Sequential, init, &params, |_, _| {}).unwrap();
    out.front.iter().map(|i| i.evaluation).collect()
}

fn problem_bounds(p: &Zdt1) -> &riskplan_core::moo::Bounds {
    use riskplan_core::moo::Problem;
    p.bounds()
}

#[test]
fn zdt1_converges() {
    let front = zdt1_run(1, 250);
    let mean = front.iter().map(|f| Zdt1::front_distance(*f)).sum::<f64>() / front.len() as f64;
    assert!(mean < 0.05, "mean distance {mean}");
}

#[test]
fn identical_seeds_identical_fronts() {
    let a = zdt1_run(9, 60);
    let b = zdt1_run(9, 60);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[0].to_bits(), y[0].to_bits());
        assert_eq!(x[1].to_bits(), y[1].to_bits());
    }
    assert_ne!(a, zdt1_run(10, 60));
}
