//! Rational B-spline curves over `(x, y, z, speed)`.
//!
//! Basis functions follow the De Boor–Cox recursion in its triangular,
//! division-safe form: only the `p + 1` non-zero functions on the active
//! knot span are computed.

use alloc::format;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result, Vec3};

pub const MAX_DEGREE: usize = 5;

/// Control point `(x, y, z, speed)`.
pub type Point4 = [f64; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct NurbsCurve4D {
    control_points: Vec<Point4>,
    weights: Vec<f64>,
    degree: usize,
    knots: Vec<f64>,
}

impl NurbsCurve4D {
    pub fn new(control_points: Vec<Point4>, weights: Vec<f64>, degree: usize, knots: Vec<f64>) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::Config(format!("degree {degree} outside 1..={MAX_DEGREE}")));
        }
        let n = control_points.len();
        if n < degree + 1 {
            return Err(Error::Config(format!("{n} control points cannot carry a degree-{degree} curve")));
        }
        if weights.len() != n {
            return Err(Error::Config(format!("{} weights for {n} control points", weights.len())));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Config("weights must be positive".into()));
        }
        if knots.len() != n + degree + 1 {
            return Err(Error::Config(format!(
                "{} knots, expected {} for {n} control points of degree {degree}",
                knots.len(),
                n + degree + 1
            )));
        }
        if knots.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::Config("knots must be non-decreasing".into()));
        }
        let m = knots.len() - 1;
        let clamped = knots[..=degree].iter().all(|k| *k == knots[0])
            && knots[m - degree..].iter().all(|k| *k == knots[m]);
        if !clamped || !(knots[0] < knots[m]) {
            return Err(Error::Config("knot vector must be clamped with a non-empty range".into()));
        }
        Ok(Self { control_points, weights, degree, knots })
    }

    /// Convenience constructor with [`make_clamped_uniform_knots`].
    pub fn clamped_uniform(control_points: Vec<Point4>, weights: Vec<f64>, degree: usize) -> Result<Self> {
        let knots = make_clamped_uniform_knots(control_points.len(), degree)?;
        Self::new(control_points, weights, degree, knots)
    }

    pub fn control_points(&self) -> &[Point4] {
        &self.control_points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn param_range(&self) -> (f64, f64) {
        (self.knots[self.degree], self.knots[self.knots.len() - 1 - self.degree])
    }

    /// Rational blending coefficients `N_i w_i / sum N_j w_j` at `u`, with the
    /// index of the first active control point.
    pub fn rational_basis(&self, u: f64) -> Result<(usize, Vec<f64>)> {
        let mut n = [0.0; MAX_DEGREE + 1];
        let span = basis_into(&self.knots, self.degree, u, &mut n)?;
        let first = span - self.degree;
        let mut r: Vec<f64> = (0..=self.degree).map(|j| n[j] * self.weights[first + j]).collect();
        let denom: f64 = r.iter().sum();
        r.iter_mut().for_each(|x| *x /= denom);
        Ok((first, r))
    }

    pub fn evaluate(&self, u: f64) -> Result<Point4> {
        // clamped ends interpolate their control points exactly
        let (u0, u1) = self.param_range();
        if u == u0 {
            return Ok(self.control_points[0]);
        }
        if u == u1 {
            return Ok(self.control_points[self.control_points.len() - 1]);
        }
        let mut n = [0.0; MAX_DEGREE + 1];
        let span = basis_into(&self.knots, self.degree, u, &mut n)?;
        let first = span - self.degree;
        let mut num = [0.0; 4];
        let mut denom = 0.0;
        for j in 0..=self.degree {
            let nw = n[j] * self.weights[first + j];
            let cp = &self.control_points[first + j];
            for c in 0..4 {
                num[c] += nw * cp[c];
            }
            denom += nw;
        }
        Ok(num.map(|x| x / denom))
    }
}

/// Non-zero basis values `N_{span-p..=span, p}(u)` and the knot span index.
pub fn basis_functions(knots: &[f64], degree: usize, u: f64) -> Result<(usize, Vec<f64>)> {
    if degree == 0 || degree > MAX_DEGREE || knots.len() < 2 * (degree + 1) {
        return Err(Error::Config(format!("degree {degree} unsupported for {} knots", knots.len())));
    }
    let mut n = [0.0; MAX_DEGREE + 1];
    let span = basis_into(knots, degree, u, &mut n)?;
    Ok((span, n[..=degree].to_vec()))
}

fn find_span(knots: &[f64], degree: usize, u: f64) -> Result<usize> {
    let m = knots.len() - 1;
    let n = m - degree - 1;
    let (lo_u, hi_u) = (knots[degree], knots[n + 1]);
    if !(u >= lo_u && u <= hi_u) {
        return Err(Error::ParameterRange { u, min: lo_u, max: hi_u });
    }
    if u >= hi_u {
        // last non-degenerate span
        let mut s = n;
        while s > degree && knots[s] >= knots[s + 1] {
            s -= 1;
        }
        return Ok(s);
    }
    let (mut lo, mut hi) = (degree, n + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

fn basis_into(knots: &[f64], degree: usize, u: f64, n: &mut [f64; MAX_DEGREE + 1]) -> Result<usize> {
    let span = find_span(knots, degree, u)?;
    let mut left = [0.0; MAX_DEGREE + 1];
    let mut right = [0.0; MAX_DEGREE + 1];
    n[0] = 1.0;
    for j in 1..=degree {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            let temp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    Ok(span)
}

/// Clamped knot vector on `[0, 1]` with equally spaced interior knots.
pub fn make_clamped_uniform_knots(n_ctrl: usize, degree: usize) -> Result<Vec<f64>> {
    if degree == 0 || n_ctrl < degree + 1 {
        return Err(Error::Config(format!("{n_ctrl} control points cannot carry a degree-{degree} curve")));
    }
    let interior = n_ctrl - degree - 1;
    let mut knots = Vec::with_capacity(n_ctrl + degree + 1);
    knots.extend(core::iter::repeat_n(0.0, degree + 1));
    knots.extend((1..=interior).map(|i| i as f64 / (interior + 1) as f64));
    knots.extend(core::iter::repeat_n(1.0, degree + 1));
    Ok(knots)
}

/// Discrete trajectory: `Q + 1` samples and `Q` segment lengths.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectorySamples {
    pub positions: Vec<Vec3>,
    pub speeds: Vec<f64>,
    pub segment_lengths: Vec<f64>,
    pub param_values: Vec<f64>,
}

impl TrajectorySamples {
    /// Builds samples from explicit positions and speeds (segment lengths derived).
    pub fn from_points(positions: Vec<Vec3>, speeds: Vec<f64>) -> Self {
        assert_eq!(positions.len(), speeds.len(), "one speed per position");
        let segment_lengths = segment_lengths(&positions);
        let q = positions.len().saturating_sub(1).max(1) as f64;
        let param_values = (0..positions.len()).map(|i| i as f64 / q).collect();
        Self { positions, speeds, segment_lengths, param_values }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.segment_lengths.iter().sum()
    }
}

fn segment_lengths(positions: &[Vec3]) -> Vec<f64> {
    positions
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            sqrt(d.x * d.x + d.y * d.y + d.z * d.z)
        })
        .collect()
}

/// Evaluates the curve at `n_samples` equally spaced parameters spanning its range.
pub fn sample_uniform(curve: &NurbsCurve4D, n_samples: usize) -> Result<TrajectorySamples> {
    if n_samples < 2 {
        return Err(Error::Config(format!("need at least 2 samples, got {n_samples}")));
    }
    let (u0, u1) = curve.param_range();
    let q = (n_samples - 1) as f64;
    let mut positions = Vec::with_capacity(n_samples);
    let mut speeds = Vec::with_capacity(n_samples);
    let mut param_values = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let u = if i + 1 == n_samples { u1 } else { u0 + (u1 - u0) * (i as f64 / q) };
        let c = curve.evaluate(u)?;
        positions.push(Vec3::new(c[0], c[1], c[2]));
        speeds.push(c[3]);
        param_values.push(u);
    }
    let segment_lengths = segment_lengths(&positions);
    Ok(TrajectorySamples { positions, speeds, segment_lengths, param_values })
}
