use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use riskplan_core::nurbs::{basis_functions, make_clamped_uniform_knots, sample_uniform, NurbsCurve4D, Point4};

fn random_curve(rng: &mut Xoshiro256PlusPlus, n: usize, degree: usize) -> NurbsCurve4D {
    let cps: Vec<Point4> = (0..n)
        .map(|_| [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(0.0..10.0), rng.random_range(0.1..5.0)])
        .collect();
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
    NurbsCurve4D::clamped_uniform(cps, w, degree).unwrap()
}

/// Cox–de Boor recursion, straight from the definition.
fn cox_de_boor(knots: &[f64], i: usize, p: usize, u: f64, last: bool) -> f64 {
    if p == 0 {
        let inside = knots[i] <= u && u < knots[i + 1];
        // closed right end on the final non-empty span
        let at_end = last && u == knots[i + 1] && knots[i] < knots[i + 1];
        return if inside || at_end { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    let d1 = knots[i + p] - knots[i];
    if d1 > 0.0 {
        v += (u - knots[i]) / d1 * cox_de_boor(knots, i, p - 1, u, last);
    }
    let d2 = knots[i + p + 1] - knots[i + 1];
    if d2 > 0.0 {
        v += (knots[i + p + 1] - u) / d2 * cox_de_boor(knots, i + 1, p - 1, u, last);
    }
    v
}

fn oracle_point(curve: &NurbsCurve4D, u: f64) -> [f64; 4] {
    let (k, p, cps, w) = (curve.knots(), curve.degree(), curve.control_points(), curve.weights());
    let last = u == *k.last().unwrap();
    let mut num = [0.0; 4];
    let mut den = 0.0;
    for i in 0..cps.len() {
        let nw = cox_de_boor(k, i, p, u, last) * w[i];
        den += nw;
        for a in 0..4 {
            num[a] += nw * cps[i][a];
        }
    }
    num.map(|x| x / den)
}

#[test]
fn matches_cox_de_boor_oracle() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
    for degree in 1..=5 {
        let curve = random_curve(&mut rng, degree + 4, degree);
        for _ in 0..200 {
            let u = rng.random_range(0.0..=1.0);
            let c = curve.evaluate(u).unwrap();
            let o = oracle_point(&curve, u);
            for a in 0..4 {
                assert!((c[a] - o[a]).abs() < 1e-9 * (1.0 + o[a].abs()), "degree {degree} u {u}");
            }
        }
    }
}

#[test]
fn partition_of_unity_1000_parameters() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
    let curve = random_curve(&mut rng, 12, 3);
    for _ in 0..1000 {
        let u = rng.random_range(0.0..=1.0);
        let (_, r) = curve.rational_basis(u).unwrap();
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.iter().all(|x| *x >= 0.0));
        let (_, n) = basis_functions(curve.knots(), 3, u).unwrap();
        assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn endpoints_interpolated_exactly() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
    for degree in 1..=5 {
        let extra = rng.random_range(0..8);
        let curve = random_curve(&mut rng, degree + 1 + extra, degree);
        let cps = curve.control_points();
        assert_eq!(curve.evaluate(0.0).unwrap(), cps[0]);
        assert_eq!(curve.evaluate(1.0).unwrap(), *cps.last().unwrap());
    }
}

#[test]
fn strong_convex_hull_bounding_box() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(4);
    let curve = random_curve(&mut rng, 15, 3);
    let cps = curve.control_points();
    for _ in 0..2000 {
        let u = rng.random_range(0.0..=1.0);
        let (first, basis) = curve.rational_basis(u).unwrap();
        let c = curve.evaluate(u).unwrap();
        for a in 0..4 {
            let active = (first..first + basis.len()).map(|i| cps[i][a]);
            let lo = active.clone().fold(f64::INFINITY, f64::min);
            let hi = active.fold(f64::NEG_INFINITY, f64::max);
            assert!(c[a] >= lo - 1e-9 && c[a] <= hi + 1e-9);
        }
    }
}

#[test]
fn local_support() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
    let p = 3;
    let curve = random_curve(&mut rng, 10, p);
    for i in 0..10 {
        let mut cps = curve.control_points().to_vec();
        cps[i] = [cps[i][0] + 5.0, cps[i][1] - 3.0, cps[i][2] + 1.0, cps[i][3] + 0.5];
        let moved = NurbsCurve4D::clamped_uniform(cps, curve.weights().to_vec(), p).unwrap();
        let (lo, hi) = (curve.knots()[i], curve.knots()[i + p + 1]);
        for s in 0..=500 {
            let u = s as f64 / 500.0;
            if u < lo || u > hi {
                assert_eq!(curve.evaluate(u).unwrap(), moved.evaluate(u).unwrap(), "cp {i} changed u={u}");
            }
        }
    }
}

#[test]
fn raising_weight_pulls_towards_control_point() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(6);
    let curve = random_curve(&mut rng, 8, 3);
    let i = 4;
    let mut w = curve.weights().to_vec();
    w[i] *= 2.0;
    let heavy = NurbsCurve4D::clamped_uniform(curve.control_points().to_vec(), w, 3).unwrap();
    let target = curve.control_points()[i];
    let dist = |c: [f64; 4]| (0..4).map(|a| (c[a] - target[a]).powi(2)).sum::<f64>().sqrt();
    let (lo, hi) = (curve.knots()[i], curve.knots()[i + 4]);
    for s in 1..100 {
        let u = lo + (hi - lo) * s as f64 / 100.0;
        assert!(dist(heavy.evaluate(u).unwrap()) < dist(curve.evaluate(u).unwrap()));
    }
}

/// Adaptive Simpson on |C'(u)| with a central-difference derivative of the oracle.
fn arc_length_oracle(curve: &NurbsCurve4D) -> f64 {
    let speed = |u: f64| {
        let h = 1e-6;
        let (a, b) = ((u - h).max(0.0), (u + h).min(1.0));
        let (pa, pb) = (oracle_point(curve, a), oracle_point(curve, b));
        ((0..3).map(|k| (pb[k] - pa[k]).powi(2)).sum::<f64>()).sqrt() / (b - a)
    };
    #[allow(clippy::too_many_arguments)]
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return left + right + (left + right - whole) / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    // split at knots so the integrand is smooth on each piece
    let mut knots: Vec<f64> = curve.knots().to_vec();
    knots.dedup();
    knots
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (fa, fm, fb) = (speed(a), speed(0.5 * (a + b)), speed(b));
            simpson(&speed, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 1e-9, 40)
        })
        .sum()
}

#[test]
fn s_curve_arc_length_within_one_percent() {
    let cps: Vec<Point4> = vec![
        [0.0, 0.0, 2.0, 1.0],
        [4.0, 0.0, 2.0, 1.5],
        [6.0, 4.0, 3.0, 2.0],
        [8.0, 8.0, 4.0, 2.0],
        [10.0, 4.0, 4.0, 2.0],
        [12.0, 0.0, 3.0, 1.5],
        [14.0, 4.0, 2.0, 1.0],
        [20.0, 4.0, 2.0, 1.0],
    ];
    let w = vec![1.0, 1.0, 2.0, 0.5, 1.5, 1.0, 1.0, 1.0];
    let curve = NurbsCurve4D::clamped_uniform(cps, w, 3).unwrap();
    let oracle = arc_length_oracle(&curve);
    let sampled = sample_uniform(&curve, 50).unwrap().total_length();
    let rel = (sampled - oracle).abs() / oracle;
    assert!(rel < 0.01, "sampled {sampled} oracle {oracle} rel {rel}");
    // chord sums never exceed the arc
    assert!(sampled <= oracle * (1.0 + 1e-9));
}

#[test]
fn knot_vectors() {
    assert_eq!(make_clamped_uniform_knots(6, 2).unwrap(), [0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0]);
    assert!(make_clamped_uniform_knots(3, 3).is_err());
}

proptest! {
    #[test]
    fn samples_are_consistent(seed in any::<u64>(), n in 2usize..80, degree in 1usize..=5) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let curve = random_curve(&mut rng, degree + 1 + (seed % 6) as usize, degree);
        let s = sample_uniform(&curve, n).unwrap();
        prop_assert_eq!(s.positions.len(), n);
        prop_assert_eq!(s.speeds.len(), n);
        prop_assert_eq!(s.segment_lengths.len(), n - 1);
        for i in 0..n - 1 {
            prop_assert!(((s.positions[i + 1] - s.positions[i]).norm() - s.segment_lengths[i]).abs() < 1e-12);
        }
        prop_assert_eq!(s.param_values[0], 0.0);
        prop_assert_eq!(s.param_values[n - 1], 1.0);
    }
}
