//! Real-coded variation: simulated binary crossover and polynomial mutation,
//! both in their bounded forms.

use alloc::vec::Vec;

use rand::Rng;

use super::Bounds;
use crate::math::powf;

/// Returns two children. Each pair crosses with probability `rate`, and each
/// variable of a crossing pair with probability 1/2.
pub fn sbx_crossover<R: Rng + ?Sized>(
    a: &[f64],
    b: &[f64],
    bounds: &Bounds,
    rate: f64,
    eta: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), b.len(), "parents differ in arity");
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    if rng.random::<f64>() >= rate {
        return (c1, c2);
    }
    let exp = 1.0 / (eta + 1.0);
    let spread = |beta: f64, u: f64| {
        let alpha = 2.0 - powf(beta, -(eta + 1.0));
        if u <= 1.0 / alpha {
            powf(u * alpha, exp)
        } else {
            powf(1.0 / (2.0 - u * alpha), exp)
        }
    };
    for i in 0..a.len() {
        if rng.random::<f64>() > 0.5 || (a[i] - b[i]).abs() <= 1e-14 {
            continue;
        }
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let (y1, y2) = if a[i] < b[i] { (a[i], b[i]) } else { (b[i], a[i]) };
        let gap = y2 - y1;
        let u = rng.random::<f64>();
        let beta_lo = spread(1.0 + 2.0 * (y1 - lo) / gap, u);
        let beta_hi = spread(1.0 + 2.0 * (hi - y2) / gap, u);
        let low_child = (0.5 * ((y1 + y2) - beta_lo * gap)).clamp(lo, hi);
        let high_child = (0.5 * ((y1 + y2) + beta_hi * gap)).clamp(lo, hi);
        if rng.random::<f64>() <= 0.5 {
            c1[i] = high_child;
            c2[i] = low_child;
        } else {
            c1[i] = low_child;
            c2[i] = high_child;
        }
    }
    (c1, c2)
}

/// Bounded polynomial mutation applied to each variable with probability `rate`.
pub fn polynomial_mutation<R: Rng + ?Sized>(v: &[f64], bounds: &Bounds, rate: f64, eta: f64, rng: &mut R) -> Vec<f64> {
    let mut out = v.to_vec();
    let exp = 1.0 / (eta + 1.0);
    for (i, y) in out.iter_mut().enumerate() {
        if rng.random::<f64>() >= rate {
            continue;
        }
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let width = hi - lo;
        if !(width > 0.0) {
            continue;
        }
        let d1 = (*y - lo) / width;
        let d2 = (hi - *y) / width;
        let u = rng.random::<f64>();
        let dq = if u < 0.5 {
            let val = 2.0 * u + (1.0 - 2.0 * u) * powf(1.0 - d1, eta + 1.0);
            powf(val, exp) - 1.0
        } else {
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * powf(1.0 - d2, eta + 1.0);
            1.0 - powf(val, exp)
        };
        *y = (*y + dq * width).clamp(lo, hi);
    }
    out
}
