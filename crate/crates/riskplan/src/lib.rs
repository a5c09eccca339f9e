//! Scenario files, power calibration, the planning pipeline and sweeps on top
//! of `riskplan-core`. The `riskplan` binary is a thin CLI over this crate.

pub mod calibration;
pub mod error;
pub mod executor;
pub mod output;
pub mod pipeline;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
pub use pipeline::{optimize, plan, Front, PlanResult, TrajectoryMetrics};
pub use scenario::{load_scenario, Scenario};

use riskplan_core::voting::RiskState;

/// Parses `WR,CR,LR,BR` (wind, communication, localization, battery).
pub fn parse_risks(text: &str) -> Result<RiskState> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::Validation(vec![format!("risks: expected four comma-separated values in [0, 1], got {text:?}")]);
    if parts.len() != 4 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    RiskState::new(v[0], v[1], v[2], v[3]).map_err(|e| Error::Validation(vec![format!("risks: {e}")]))
}
