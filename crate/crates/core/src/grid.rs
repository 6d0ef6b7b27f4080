//! One-dimensional sample axes with quadrature weights and differentiation
//! matrices. Chains are tensor products of these.
//!
//! * `Periodic`: `n` equispaced samples without the seam point, periodic
//!   trapezoid weights and the trigonometric (spectral) differentiation matrix.
//! * `Chebyshev`: `n` Chebyshev–Lobatto nodes including both ends,
//!   Clenshaw–Curtis weights and the Chebyshev differentiation matrix.
//! * `Uniform`: `n` equispaced samples including both ends, composite
//!   trapezoid weights and fourth-order finite differences.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum AxisKind {
    Periodic,
    Chebyshev,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

pub const MIN_PERIODIC: usize = 8;
pub const MIN_CHEBYSHEV: usize = 2;
pub const MIN_UNIFORM: usize = 5;

impl Axis {
    /// `[0, 2π)` with `n` samples.
    pub fn periodic(n: usize) -> Self {
        Axis { kind: AxisKind::Periodic, lo: 0.0, hi: 2.0 * PI, n }
    }

    pub fn chebyshev(lo: f64, hi: f64, n: usize) -> Self {
        Axis { kind: AxisKind::Chebyshev, lo, hi, n }
    }

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Self {
        Axis { kind: AxisKind::Uniform, lo, hi, n }
    }

    pub fn is_periodic(&self) -> bool {
        self.kind == AxisKind::Periodic
    }

    pub fn min_samples(&self) -> usize {
        match self.kind {
            AxisKind::Periodic => MIN_PERIODIC,
            AxisKind::Chebyshev => MIN_CHEBYSHEV,
            AxisKind::Uniform => MIN_UNIFORM,
        }
    }

    pub fn validate(&self, axis: usize) -> Result<()> {
        if self.n < self.min_samples() {
            return Err(Error::TooFewSamples { axis, found: self.n, min: self.min_samples() });
        }
        if !(self.hi > self.lo) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidInput(alloc::format!("axis {axis}: invalid range [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.n;
        match self.kind {
            AxisKind::Periodic => (0..n).map(|j| self.lo + self.len() * j as f64 / n as f64).collect(),
            AxisKind::Uniform => (0..n).map(|j| self.lo + self.len() * j as f64 / (n - 1) as f64).collect(),
            AxisKind::Chebyshev => {
                let m = (n - 1) as f64;
                (0..n)
                    .map(|j| {
                        if j == 0 {
                            self.lo
                        } else if j == n - 1 {
                            self.hi
                        } else {
                            self.lo + self.len() * 0.5 * (1.0 - math::cos(j as f64 * PI / m))
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        let n = self.n;
        match self.kind {
            AxisKind::Periodic => vec![self.len() / n as f64; n],
            AxisKind::Uniform => {
                let h = self.len() / (n - 1) as f64;
                let mut w = vec![h; n];
                w[0] = 0.5 * h;
                w[n - 1] = 0.5 * h;
                w
            }
            AxisKind::Chebyshev => clenshaw_curtis(n - 1).into_iter().map(|w| w * 0.5 * self.len()).collect(),
        }
    }

    /// Row-major `n × n` matrix mapping samples to derivative samples.
    pub fn diff_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        match self.kind {
            AxisKind::Periodic => {
                let scale = 2.0 * PI / self.len();
                for i in 0..n {
                    for k in 0..n {
                        if i == k {
                            continue;
                        }
                        let m = (i + n - k) % n;
                        let x = m as f64 * PI / n as f64;
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        let s = if n % 2 == 0 { math::cos(x) / math::sin(x) } else { 1.0 / math::sin(x) };
                        d[i * n + k] = scale * 0.5 * sign * s;
                    }
                }
            }
            AxisKind::Chebyshev => {
                let m = n - 1;
                let x: Vec<f64> = (0..n).map(|j| math::cos(j as f64 * PI / m as f64)).collect();
                let c: Vec<f64> = (0..n)
                    .map(|j| {
                        let e = if j == 0 || j == m { 2.0 } else { 1.0 };
                        if j % 2 == 0 {
                            e
                        } else {
                            -e
                        }
                    })
                    .collect();
                // derivative with respect to u = lo + len (1 − x)/2
                let scale = -2.0 / self.len();
                for i in 0..n {
                    let mut row = 0.0;
                    for k in 0..n {
                        if i != k {
                            let v = c[i] / c[k] / (x[i] - x[k]);
                            d[i * n + k] = scale * v;
                            row += v;
                        }
                    }
                    d[i * n + i] = -scale * row;
                }
            }
            AxisKind::Uniform => {
                let h = self.len() / (n - 1) as f64;
                let f = 1.0 / (12.0 * h);
                let mut set = |i: usize, stencil: [(usize, f64); 5]| {
                    for (k, c) in stencil {
                        d[i * n + k] = c * f;
                    }
                };
                set(0, [(0, -25.0), (1, 48.0), (2, -36.0), (3, 16.0), (4, -3.0)]);
                set(1, [(0, -3.0), (1, -10.0), (2, 18.0), (3, -6.0), (4, 1.0)]);
                for i in 2..n - 2 {
                    set(i, [(i - 2, 1.0), (i - 1, -8.0), (i, 0.0), (i + 1, 8.0), (i + 2, -1.0)]);
                }
                set(n - 2, [(n - 1, 3.0), (n - 2, 10.0), (n - 3, -18.0), (n - 4, 6.0), (n - 5, -1.0)]);
                set(n - 1, [(n - 1, 25.0), (n - 2, -48.0), (n - 3, 36.0), (n - 4, -16.0), (n - 5, 3.0)]);
            }
        }
        d
    }

    /// The axis at half resolution and the sample indices it keeps, if the
    /// sample set nests.
    pub fn halved(&self) -> Option<(Axis, Vec<usize>)> {
        let n = self.n;
        let (m, idx): (usize, Vec<usize>) = match self.kind {
            AxisKind::Periodic if n % 2 == 0 => (n / 2, (0..n).step_by(2).collect()),
            AxisKind::Chebyshev | AxisKind::Uniform if (n - 1) % 2 == 0 => ((n - 1) / 2 + 1, (0..n).step_by(2).collect()),
            _ => return None,
        };
        let axis = Axis { n: m, ..*self };
        if m < axis.min_samples().min(4) {
            return None;
        }
        Some((axis, idx))
    }
}

/// Clenshaw–Curtis weights on `[-1, 1]` for the `N + 1` nodes `cos(jπ/N)`.
pub fn clenshaw_curtis(big_n: usize) -> Vec<f64> {
    let n = big_n;
    let mut w = vec![0.0; n + 1];
    if n == 0 {
        w[0] = 2.0;
        return w;
    }
    let nf = n as f64;
    let mut v = vec![1.0; n.saturating_sub(1)];
    if n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
        for k in 1..n / 2 {
            let kf = k as f64;
            for (j, vj) in v.iter_mut().enumerate() {
                let th = (j + 1) as f64 * PI / nf;
                *vj -= 2.0 * math::cos(2.0 * kf * th) / (4.0 * kf * kf - 1.0);
            }
        }
        for (j, vj) in v.iter_mut().enumerate() {
            let th = (j + 1) as f64 * PI / nf;
            *vj -= math::cos(nf * th) / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (j, vj) in v.iter_mut().enumerate() {
                let th = (j + 1) as f64 * PI / nf;
                *vj -= 2.0 * math::cos(2.0 * kf * th) / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (j, vj) in v.into_iter().enumerate() {
        w[j + 1] = 2.0 * vj / nf;
    }
    w
}
