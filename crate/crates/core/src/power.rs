//! Semi-empirical steady-state power model.
//!
//! Directional power measurements `P(v)` are placed at the points `P * v` and a
//! coupling-free quadric `a x² + b y² + c z² + g x + h y + k z + 1 = 0` is fitted
//! through them. Power along any unit direction is the distance at which the
//! ray from the origin meets that surface.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::math::{norm3, sqrt};
use crate::{Error, Result, Vec3};

pub const MAX_CONDITION_NUMBER: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub direction: Vec3,
    pub power: f64,
}

impl PowerSample {
    /// Normalizes `direction`; a zero vector or non-positive power is rejected.
    pub fn new(direction: Vec3, power: f64) -> Result<Self> {
        let n = norm3(&direction);
        if !(n > 1e-12) {
            return Err(Error::Input("power sample direction must be non-zero".into()));
        }
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::Input(format!("power sample must be positive, got {power}")));
        }
        Ok(Self { direction: direction / n, power })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerQuadricModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub g: f64,
    pub h: f64,
    pub k: f64,
    /// Power reported for a zero direction (hover): mean of the fitting samples.
    pub hover_power: f64,
}

impl PowerQuadricModel {
    /// Isotropic model that predicts `power` in every direction.
    pub fn isotropic(power: f64) -> Self {
        let q = -1.0 / (power * power);
        Self { a: q, b: q, c: q, g: 0.0, h: 0.0, k: 0.0, hover_power: power }
    }

    /// Implicit surface value at a point; zero on the surface.
    pub fn implicit(&self, p: &Vec3) -> f64 {
        self.a * p.x * p.x + self.b * p.y * p.y + self.c * p.z * p.z + self.g * p.x + self.h * p.y + self.k * p.z + 1.0
    }

    pub fn power_for_direction(&self, direction: &Vec3) -> Result<f64> {
        let n = norm3(direction);
        if n < 1e-12 {
            return Ok(self.hover_power);
        }
        let v = direction / n;
        let a = self.a * v.x * v.x + self.b * v.y * v.y + self.c * v.z * v.z;
        let b = self.g * v.x + self.h * v.y + self.k * v.z;
        let domain_err = || Error::ModelDomain { x: v.x, y: v.y, z: v.z };
        if a.abs() < 1e-12 {
            let t = -1.0 / b;
            return if t > 0.0 && t.is_finite() { Ok(t) } else { Err(domain_err()) };
        }
        let disc = b * b - 4.0 * a;
        if !(disc >= 0.0) {
            return Err(domain_err());
        }
        // cancellation-free roots of a t² + b t + 1 = 0
        let sq = sqrt(disc);
        let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
        let roots = [q / a, if q != 0.0 { 1.0 / q } else { f64::NAN }];
        roots
            .into_iter()
            .filter(|t| *t > 0.0 && t.is_finite())
            .min_by(|x, y| x.total_cmp(y))
            .ok_or_else(domain_err)
    }
}

/// Least-squares fit of the six quadric coefficients (exact with six samples).
pub fn fit_quadric(samples: &[PowerSample]) -> Result<PowerQuadricModel> {
    if samples.len() < 6 {
        return Err(Error::Fit(format!("need at least 6 samples, got {}", samples.len())));
    }
    for (i, s) in samples.iter().enumerate() {
        if !(s.power > 0.0) || !s.power.is_finite() {
            return Err(Error::Input(format!("sample {i} has non-positive power {}", s.power)));
        }
        if (norm3(&s.direction) - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!("sample {i} direction is not unit length")));
        }
    }
    // Work in units of the mean power so the columns are comparable.
    let scale = samples.iter().map(|s| s.power).sum::<f64>() / samples.len() as f64;
    let rows = samples.len();
    let mut m = DMatrix::<f64>::zeros(rows, 6);
    for (r, s) in samples.iter().enumerate() {
        let p = s.direction * (s.power / scale);
        m[(r, 0)] = p.x * p.x;
        m[(r, 1)] = p.y * p.y;
        m[(r, 2)] = p.z * p.z;
        m[(r, 3)] = p.x;
        m[(r, 4)] = p.y;
        m[(r, 5)] = p.z;
    }
    let rhs = DVector::<f64>::from_element(rows, -1.0);
    let svd = m.svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 0.0) || smax / smin > MAX_CONDITION_NUMBER {
        return Err(Error::Fit(format!(
            "ill-conditioned system; deficient directions: {}",
            deficient_directions(samples)
        )));
    }
    let theta = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Fit(String::from(e)))?;
    let s2 = scale * scale;
    Ok(PowerQuadricModel {
        a: theta[0] / s2,
        b: theta[1] / s2,
        c: theta[2] / s2,
        g: theta[3] / scale,
        h: theta[4] / scale,
        k: theta[5] / scale,
        hover_power: scale,
    })
}

fn deficient_directions(samples: &[PowerSample]) -> String {
    const LABELS: [&str; 6] = ["+x", "-x", "+y", "-y", "+z", "-z"];
    let mut missing = Vec::new();
    for (i, label) in LABELS.iter().enumerate() {
        let axis = i / 2;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        if !samples.iter().any(|s| sign * s.direction[axis] > 0.5) {
            missing.push(*label);
        }
    }
    if missing.is_empty() {
        String::from("directions are nearly collinear")
    } else {
        missing.join(", ")
    }
}

/// Index pairs of samples sharing a direction (within 1e-9) but reporting different powers.
pub fn conflicting_duplicates(samples: &[PowerSample]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let same_dir = (samples[i].direction - samples[j].direction).amax() <= 1e-9;
            if same_dir && samples[i].power != samples[j].power {
                out.push((i, j));
            }
        }
    }
    out
}

/// Returns the samples whose direction is within `tol` of one of the six axes.
pub fn axis_samples(samples: &[PowerSample], tol: f64) -> Vec<PowerSample> {
    samples
        .iter()
        .filter(|s| {
            let d = s.direction;
            let big = d.amax();
            (big - 1.0).abs() <= tol
        })
        .copied()
        .collect()
}

/// Bland–Altman agreement statistics of `predicted - measured`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlandAltman {
    pub n: usize,
    pub mean_error: f64,
    pub std_dev: f64,
    pub lower_limit: f64,
    pub upper_limit: f64,
}

pub fn bland_altman(errors: &[f64]) -> Option<BlandAltman> {
    if errors.is_empty() {
        return None;
    }
    let n = errors.len();
    let mean = errors.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let sd = sqrt(var);
    Some(BlandAltman {
        n,
        mean_error: mean,
        std_dev: sd,
        lower_limit: mean - 1.96 * sd,
        upper_limit: mean + 1.96 * sd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn axes(powers: [f64; 6]) -> Vec<PowerSample> {
        let dirs = [
            Vec3::x(),
            -Vec3::x(),
            Vec3::y(),
            -Vec3::y(),
            Vec3::z(),
            -Vec3::z(),
        ];
        dirs.iter().zip(powers).map(|(d, p)| PowerSample::new(*d, p).unwrap()).collect()
    }

    #[test]
    fn symmetric_axes_give_isotropic_coefficients() {
        let m = fit_quadric(&axes([500.0; 6])).unwrap();
        let expect = -1.0 / (500.0 * 500.0);
        for q in [m.a, m.b, m.c] {
            assert!(((q - expect) / expect).abs() < 1e-12);
        }
        for l in [m.g, m.h, m.k] {
            assert!(l.abs() < 1e-15);
        }
        assert!((m.power_for_direction(&Vec3::new(1.0, 2.0, -0.5)).unwrap() - 500.0).abs() < 1e-9);
    }

    #[test]
    fn asymmetric_vertical_axis() {
        let m = fit_quadric(&axes([600.0, 600.0, 600.0, 600.0, 800.0, 500.0])).unwrap();
        // 2x2 oracle: c P^2 + k P + 1 = 0 at P = 800 (up, +) and P = 500 (down, -)
        let (pu, pd) = (800.0f64, 500.0f64);
        let det = pu * pu * (-pd) - pu * pd * pd;
        let c = (pd + pu) / det;
        let k = (pd * pd - pu * pu) / det;
        assert!(((m.c - c) / c).abs() < 1e-9);
        assert!(((m.k - k) / k).abs() < 1e-9);
        assert!((m.c * pu * pu + m.k * pu + 1.0).abs() < 1e-9);
        assert!((m.c * pd * pd - m.k * pd + 1.0).abs() < 1e-9);
        let up = m.power_for_direction(&Vec3::z()).unwrap();
        let down = m.power_for_direction(&-Vec3::z()).unwrap();
        assert!((up - 800.0).abs() / 800.0 < 1e-6);
        assert!((down - 500.0).abs() / 500.0 < 1e-6);
    }

    #[test]
    fn too_few_or_degenerate_samples() {
        let mut s = axes([500.0; 6]);
        s.pop();
        assert!(matches!(fit_quadric(&s), Err(Error::Fit(_))));
        let same: Vec<_> = (0..8).map(|_| PowerSample::new(Vec3::x(), 500.0).unwrap()).collect();
        match fit_quadric(&same) {
            Err(Error::Fit(msg)) => assert!(msg.contains("-x") && msg.contains("+z"), "{msg}"),
            other => panic!("expected fit error, got {other:?}"),
        }
        assert!(PowerSample::new(Vec3::x(), 0.0).is_err());
    }

    #[test]
    fn hover_returns_stored_mean() {
        let m = fit_quadric(&axes([600.0, 600.0, 600.0, 600.0, 800.0, 500.0])).unwrap();
        assert!((m.power_for_direction(&Vec3::zeros()).unwrap() - 3700.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn no_positive_root_is_a_domain_error() {
        // open surface: positive a with no linear term never meets the +x ray
        let m = PowerQuadricModel { a: 1e-6, b: -1e-6, c: -1e-6, g: 0.0, h: 0.0, k: 0.0, hover_power: 1.0 };
        assert!(matches!(m.power_for_direction(&Vec3::x()), Err(Error::ModelDomain { .. })));
    }

    #[test]
    fn duplicate_directions_are_flagged() {
        let mut s = axes([500.0; 6]);
        s.push(PowerSample::new(Vec3::x(), 520.0).unwrap());
        assert_eq!(conflicting_duplicates(&s), vec![(0, 6)]);
        assert!(fit_quadric(&s).is_ok());
    }

    #[test]
    fn bland_altman_limits() {
        let ba = bland_altman(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert_eq!(ba.mean_error, 0.0);
        let sd = sqrt(4.0 / 3.0);
        assert!((ba.std_dev - sd).abs() < 1e-12);
        assert!((ba.upper_limit - 1.96 * sd).abs() < 1e-12);
        assert!(bland_altman(&[]).is_none());
    }
}
