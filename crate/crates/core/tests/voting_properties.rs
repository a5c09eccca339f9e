use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use riskplan_core::costs::CostVector;
use riskplan_core::voting::{adjust_coefficients, rank_objectives, unnormalized, vote, Baselines, RiskState, VoteWeights};

fn risk() -> impl Strategy<Value = RiskState> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(w, c, l, b)| RiskState::new(w, c, l, b).unwrap())
}

#[test]
fn weights_sum_to_one_over_1e5_states() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
    let b = Baselines::default();
    for _ in 0..100_000 {
        let r = RiskState::new(rng.random(), rng.random(), rng.random(), rng.random()).unwrap();
        let w = adjust_coefficients(&r, &b).unwrap();
        assert!((w.k_t + w.k_s + w.k_e - 1.0).abs() < 1e-12);
        assert!(w.k_t >= 0.0 && w.k_s >= 0.0 && w.k_e >= 0.0);
    }
}

fn random_front(rng: &mut Xoshiro256PlusPlus) -> Vec<CostVector> {
    let n = rng.random_range(1..=10);
    (0..n)
        .map(|_| CostVector {
            time_s: rng.random_range(0..6) as f64,
            safety: rng.random_range(0..6) as f64,
            energy_j: rng.random_range(0..6) as f64,
        })
        .collect()
}

#[test]
fn rank_dominated_never_selected_on_weight_grid() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
    for _ in 0..300 {
        let front = random_front(&mut rng);
        let ranks = rank_objectives(&front);
        for i in 0..=20 {
            for j in 0..=(20 - i) {
                let k = [i as f64 * 0.05, j as f64 * 0.05, (20 - i - j) as f64 * 0.05];
                let w = VoteWeights::fixed(k[0], k[1], k[2]).unwrap();
                let sel = vote(&front, &w).unwrap();
                for other in 0..front.len() {
                    let (s, o) = (ranks[sel], ranks[other]);
                    let weakly = (0..3).all(|m| o[m] <= s[m]);
                    let strictly_where_weighted = (0..3).any(|m| o[m] < s[m] && k[m] > 0.0);
                    assert!(!(weakly && strictly_where_weighted), "selected {sel} dominated by {other} at {k:?}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn unnormalized_monotonicity(r in risk(), delta in 0.01..0.5f64) {
        let b = Baselines::default();
        let u0 = unnormalized(&r, &b);
        let bump = |f: &dyn Fn(&mut RiskState)| { let mut s = r; f(&mut s); unnormalized(&s, &b) };
        for u in [
            bump(&|s| s.wind += delta),
            bump(&|s| s.communication += delta),
            bump(&|s| s.localization += delta),
        ] {
            prop_assert!(u[0] < u0[0]);
            prop_assert!(u[1] > u0[1]);
        }
        let ub = bump(&|s| s.battery += delta);
        prop_assert!(ub[0] > u0[0] && ub[1] < u0[1] && ub[2] > u0[2]);
        prop_assert!(bump(&|s| s.wind += delta)[2] >= u0[2]);
    }

    #[test]
    fn safety_time_ratio_follows_wind(r in risk(), delta in 0.01..0.3f64) {
        prop_assume!(r.wind + delta <= 1.0);
        let b = Baselines::default();
        let lo = adjust_coefficients(&r, &b).unwrap();
        let hi = adjust_coefficients(&RiskState { wind: r.wind + delta, ..r }, &b).unwrap();
        // k_T may reach 0; compare k_S * k_T' <= k_S' * k_T to avoid dividing by it
        prop_assert!(lo.k_s * hi.k_t <= hi.k_s * lo.k_t + 1e-15);
    }

    #[test]
    fn invariant_under_monotone_transform(
        costs in prop::collection::vec((0.0..100.0f64, 0.0..100.0f64, 0.0..100.0f64), 1..12),
        k in (0.0..1.0f64, 0.0..1.0f64, 0.01..1.0f64),
        which in 0usize..3,
    ) {
        let front: Vec<CostVector> = costs.iter().map(|c| CostVector { time_s: c.0, safety: c.1, energy_j: c.2 }).collect();
        let w = VoteWeights::fixed(k.0, k.1, k.2).unwrap();
        let transformed: Vec<CostVector> = front
            .iter()
            .map(|c| {
                let mut a = c.as_array();
                a[which] = (a[which] * 0.5).exp() + 3.0;
                CostVector { time_s: a[0], safety: a[1], energy_j: a[2] }
            })
            .collect();
        let (a, b) = (vote(&front, &w), vote(&transformed, &w));
        // the safety/time tie-break sees raw costs, so only compare when the scores are untied
        let ranks = rank_objectives(&front);
        let scores: Vec<f64> = ranks.iter().map(|r| w.k_t * r[0] as f64 + w.k_s * r[1] as f64 + w.k_e * r[2] as f64).collect();
        let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
        if scores.iter().filter(|s| **s == best).count() == 1 {
            prop_assert_eq!(a, b);
        }
    }
}
