//! Power calibration CSV (`vx,vy,vz,power_w`) and model validation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use riskplan_core::power::{
    axis_samples, bland_altman, conflicting_duplicates, fit_quadric, BlandAltman, PowerQuadricModel, PowerSample,
};
use riskplan_core::Vec3;

use crate::error::{Error, Result};

/// Directions within this tolerance of a coordinate axis count as anchors.
pub const AXIS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Deserialize)]
struct Row {
    vx: f64,
    vy: f64,
    vz: f64,
    power_w: f64,
}

pub fn read_power_csv(path: &Path) -> Result<Vec<PowerSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| Error::Csv { path: path.to_path_buf(), source })?;
    let mut out = Vec::new();
    let mut bad = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        match row {
            Ok(r) => match PowerSample::new(Vec3::new(r.vx, r.vy, r.vz), r.power_w) {
                Ok(s) => out.push(s),
                Err(e) => bad.push(format!("{}: line {line}: {e}", path.display())),
            },
            Err(e) => bad.push(format!("{}: line {line}: {e}", path.display())),
        }
    }
    if !bad.is_empty() {
        return Err(Error::Validation(bad));
    }
    Ok(out)
}

pub fn write_power_csv(path: &Path, samples: &[PowerSample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|source| Error::Csv { path: path.to_path_buf(), source })?;
    let wrap = |source| Error::Csv { path: path.to_path_buf(), source };
    w.write_record(["vx", "vy", "vz", "power_w"]).map_err(wrap)?;
    for s in samples {
        let d = s.direction;
        w.write_record([d.x, d.y, d.z, s.power].map(|x| x.to_string())).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Residual {
    pub direction: Vec3,
    pub measured_w: f64,
    pub predicted_w: Option<f64>,
    /// `predicted - measured`; absent when the model has no root in that direction.
    pub error_w: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub model: PowerQuadricModel,
    pub fit_samples: usize,
    pub validation: Option<BlandAltman>,
    pub residuals: Vec<Residual>,
    pub warnings: Vec<String>,
}

/// Splits samples into fitting and validation sets.
///
/// Without a holdout fraction, the axis-aligned anchors are fitted and every
/// other sample is used for validation. With `Some(f)`, anchors stay in the
/// fit set and every other sample joins it too, except an evenly spread
/// fraction `f` of them that is held out.
pub fn split(samples: &[PowerSample], holdout: Option<f64>) -> (Vec<PowerSample>, Vec<PowerSample>) {
    let is_axis = |s: &PowerSample| (s.direction.amax() - 1.0).abs() <= AXIS_TOLERANCE;
    let (anchors, others): (Vec<PowerSample>, Vec<PowerSample>) = samples.iter().partition(|s| is_axis(s));
    match holdout {
        None => (anchors, others),
        Some(f) => {
            let n_hold = (f * others.len() as f64).ceil() as usize;
            let mut fit = anchors;
            let mut held = Vec::with_capacity(n_hold);
            // Bresenham-style spreading keeps the held-out set deterministic and even
            for (i, s) in others.iter().enumerate() {
                let before = i * n_hold / others.len().max(1);
                let after = (i + 1) * n_hold / others.len().max(1);
                if after > before {
                    held.push(*s);
                } else {
                    fit.push(*s);
                }
            }
            (fit, held)
        }
    }
}

pub fn calibrate(samples: &[PowerSample], holdout: Option<f64>) -> Result<CalibrationReport> {
    if let Some(f) = holdout {
        if !(0.0..1.0).contains(&f) {
            return Err(Error::Validation(vec![format!("holdout: {f} must lie in [0, 1)")]));
        }
    }
    let mut warnings = Vec::new();
    for (i, j) in conflicting_duplicates(samples) {
        warnings.push(format!(
            "samples {i} and {j} share a direction but report {} W and {} W; fitted in the least-squares sense",
            samples[i].power, samples[j].power
        ));
    }
    let (fit, held) = split(samples, holdout);
    if axis_samples(&fit, AXIS_TOLERANCE).len() < 6 {
        return Err(Error::Fit(format!(
            "need the six axis directions (+-x, +-y, +-z) in the fitting set, found {} axis samples",
            axis_samples(&fit, AXIS_TOLERANCE).len()
        )));
    }
    let model = fit_quadric(&fit).map_err(|e| Error::Fit(e.to_string()))?;
    let residuals: Vec<Residual> = held
        .iter()
        .map(|s| {
            let predicted = model.power_for_direction(&s.direction).ok();
            Residual {
                direction: s.direction,
                measured_w: s.power,
                predicted_w: predicted,
                error_w: predicted.map(|p| p - s.power),
            }
        })
        .collect();
    let unreachable = residuals.iter().filter(|r| r.error_w.is_none()).count();
    if unreachable > 0 {
        warnings.push(format!("{unreachable} validation directions fall outside the model domain"));
    }
    let errors: Vec<f64> = residuals.iter().filter_map(|r| r.error_w).collect();
    Ok(CalibrationReport { model, fit_samples: fit.len(), validation: bland_altman(&errors), residuals, warnings })
}

pub fn load_power_model(path: &Path) -> Result<CalibrationReport> {
    let samples = read_power_csv(path)?;
    let report = calibrate(&samples, None)?;
    for w in &report.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(report)
}
