//! Least-squares slope fits for convergence orders.

use crate::error::{Error, Result};
use crate::math;

/// Slope of the least-squares line through `(ln x, ln |y|)`.
///
/// Pairs with `y == 0` are rejected since their logarithm is undefined.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInput("a slope fit needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| *v == 0.0 || !v.is_finite()) || xs.iter().any(|x| *x < 0.0) {
        return Err(Error::InvalidInput("log-log fit needs positive x and non-zero finite y".into()));
    }
    let lx: alloc::vec::Vec<f64> = xs.iter().map(|x| math::ln(*x)).collect();
    let ly: alloc::vec::Vec<f64> = ys.iter().map(|y| math::ln(math::abs(*y))).collect();
    Ok(linear_slope(&lx, &ly))
}

pub fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}
