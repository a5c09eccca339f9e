//! Risk-adjusted rank voting over a Pareto set.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::costs::CostVector;
use crate::{Error, Result};

/// Mission risks, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RiskState {
    pub wind: f64,
    pub communication: f64,
    pub localization: f64,
    pub battery: f64,
}

impl RiskState {
    pub fn new(wind: f64, communication: f64, localization: f64, battery: f64) -> Result<Self> {
        let r = Self { wind, communication, localization, battery };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("wind", self.wind),
            ("communication", self.communication),
            ("localization", self.localization),
            ("battery", self.battery),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(alloc::format!("{name} risk {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Combined "be careful" pressure: shifts weight from time to safety.
    fn caution(&self) -> f64 {
        0.5 * self.wind + 0.25 * self.communication + 0.25 * self.localization - self.battery
    }
}

/// Baseline coefficients `(time, safety, energy)`; must be non-negative and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub time: f64,
    pub safety: f64,
    pub energy: f64,
}

impl Default for Baselines {
    fn default() -> Self {
        let third = 1.0 / 3.0;
        Self { time: third, safety: third, energy: third }
    }
}

impl Baselines {
    pub fn validate(&self) -> Result<()> {
        let v = [self.time, self.safety, self.energy];
        if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::Config("baselines must be finite and non-negative".into()));
        }
        if ((v[0] + v[1] + v[2]) - 1.0).abs() > 1e-9 {
            return Err(Error::Config("baselines must sum to 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoteWeights {
    pub k_t: f64,
    pub k_s: f64,
    pub k_e: f64,
    pub baselines: Baselines,
    pub gamma: f64,
}

impl VoteWeights {
    /// Weights given directly, e.g. for coefficient sweeps. Normalized to sum 1.
    pub fn fixed(k_t: f64, k_s: f64, k_e: f64) -> Result<Self> {
        let sum = k_t + k_s + k_e;
        if [k_t, k_s, k_e].iter().any(|k| !(*k >= 0.0)) || !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::Config("vote weights must be non-negative with a positive sum".into()));
        }
        let gamma = 1.0 / sum;
        let (k_t, k_s, k_e) = (k_t * gamma, k_s * gamma, k_e * gamma);
        Ok(Self { k_t, k_s, k_e, baselines: Baselines { time: k_t, safety: k_s, energy: k_e }, gamma })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.k_t, self.k_s, self.k_e]
    }
}

/// Unnormalized `(u_T, u_S, u_E)` before clamping.
pub fn unnormalized(risks: &RiskState, b: &Baselines) -> [f64; 3] {
    let c = risks.caution();
    [
        b.time * (1.0 - c),
        b.safety * (1.0 + c),
        b.energy * (1.0 + 0.5 * risks.wind + 0.5 * risks.battery),
    ]
}

/// Negative raw weights are clamped to zero before normalization.
pub fn adjust_coefficients(risks: &RiskState, baselines: &Baselines) -> Result<VoteWeights> {
    risks.validate()?;
    baselines.validate()?;
    let u = unnormalized(risks, baselines).map(|x| x.max(0.0));
    let sum = u[0] + u[1] + u[2];
    if !(sum > 0.0) {
        return Err(Error::DegenerateRisk);
    }
    let gamma = 1.0 / sum;
    Ok(VoteWeights { k_t: u[0] * gamma, k_s: u[1] * gamma, k_e: u[2] * gamma, baselines: *baselines, gamma })
}

/// Competition ranks, 0 = lowest: `[5, 5, 7] -> [0, 0, 2]`.
pub fn competition_ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = if pos > 0 && values[order[pos - 1]] == values[i] { ranks[order[pos - 1]] } else { pos };
    }
    ranks
}

/// Per-trajectory `[time, safety, energy]` ranks.
pub fn rank_objectives(front: &[CostVector]) -> Vec<[usize; 3]> {
    let cols: Vec<Vec<usize>> = (0..3)
        .map(|m| competition_ranks(&front.iter().map(|c| c.as_array()[m]).collect::<Vec<_>>()))
        .collect();
    (0..front.len()).map(|i| [cols[0][i], cols[1][i], cols[2][i]]).collect()
}

pub fn weighted_scores(ranks: &[[usize; 3]], w: &VoteWeights) -> Vec<f64> {
    ranks
        .iter()
        .map(|r| w.k_t * r[0] as f64 + w.k_s * r[1] as f64 + w.k_e * r[2] as f64)
        .collect()
}

/// Index minimizing the weighted rank sum; ties go to lower safety cost,
/// then lower time, then lower index. `None` for an empty front.
pub fn vote(front: &[CostVector], weights: &VoteWeights) -> Option<usize> {
    let scores = weighted_scores(&rank_objectives(front), weights);
    (0..front.len()).min_by(|&a, &b| {
        scores[a]
            .total_cmp(&scores[b])
            .then(front[a].safety.total_cmp(&front[b].safety))
            .then(front[a].time_s.total_cmp(&front[b].time_s))
            .then(Ordering::Equal)
    })
}
