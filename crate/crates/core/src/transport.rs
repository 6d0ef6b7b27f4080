//! Transport of cycles and chains by the flow, and solution surfaces swept
//! out by a transported cycle.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::chain::{Chain, Cycle};
use crate::error::{Error, Result};
use crate::flow::{integrate_to_times, IntegratorParams};
use crate::grid::{Axis, AxisKind};
use crate::mechanics::Dynamics;
use crate::par;
use crate::point::ExtendedPoint;

/// Growth factor of adjacent-sample distance above which a transported
/// cycle is flagged as under-resolved.
pub const REFINEMENT_GROWTH: f64 = 10.0;

/// Emitted when adjacent samples drift apart by more than
/// [`REFINEMENT_GROWTH`] times their initial separation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RefinementWarning {
    pub growth: f64,
    /// Flat index of the first sample of the worst pair.
    pub sample: usize,
    pub t: f64,
}

/// Integrates every sample of `s` independently to `t_target`.
pub fn transport_chain(sys: &dyn Dynamics, s: &Chain, t_target: f64, params: &IntegratorParams) -> Result<Chain> {
    let moved = par::map_range(s.points().len(), |i| {
        let p = &s.points()[i];
        integrate_to_times(sys, p, &[p.t(), t_target], params).map(|v| v[1])
    });
    let mut points = Vec::with_capacity(moved.len());
    for (index, r) in moved.into_iter().enumerate() {
        points.push(r.map_err(|e| Error::Sample { index, source: Box::new(e) })?);
    }
    s.with_points(points)
}

pub fn transport_cycle(sys: &dyn Dynamics, c: &Cycle, t_target: f64, params: &IntegratorParams) -> Result<Cycle> {
    Cycle::try_from(transport_chain(sys, c.as_chain(), t_target, params)?)
}

/// Compares adjacent-sample spacing before and after transport.
pub fn refinement_check(before: &Chain, after: &Chain) -> Option<RefinementWarning> {
    let shape = before.shape();
    let (a, b) = (before.points(), after.points());
    let mut worst: Option<RefinementWarning> = None;
    let mut stride = 1;
    for axis in (0..shape.len()).rev() {
        let n = shape[axis];
        let periodic = before.axes()[axis].is_periodic();
        for flat in 0..a.len() {
            let i = (flat / stride) % n;
            let next = if i + 1 < n {
                flat + stride
            } else if periodic {
                flat + stride - n * stride
            } else {
                continue;
            };
            let d0 = spatial_distance(&a[flat], &a[next]);
            if d0 == 0.0 {
                continue;
            }
            let growth = spatial_distance(&b[flat], &b[next]) / d0;
            if growth > REFINEMENT_GROWTH && worst.map_or(true, |w| growth > w.growth) {
                worst = Some(RefinementWarning { growth, sample: flat, t: b[flat].t() });
            }
        }
        stride *= n;
    }
    worst
}

fn spatial_distance(p: &ExtendedPoint, q: &ExtendedPoint) -> f64 {
    let mut s = 0.0;
    for i in 0..p.n() {
        let d = p[i] - q[i];
        s += d * d;
    }
    crate::math::sqrt(s)
}

/// Largest spatial distance from a sample of `a` to the nearest sample of `b`.
pub fn sample_distance(a: &[ExtendedPoint], b: &[ExtendedPoint]) -> f64 {
    a.iter().map(|p| b.iter().map(|q| spatial_distance(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

/// A chain swept out by transporting a cycle over `[t₁, t₂]`.
///
/// Parameter axes are the cycle's axes followed by time. The orientation is
/// chosen so that `∂Σ = c₁ − c₂`.
#[derive(Debug, Clone)]
pub struct SolutionSurface {
    chain: Chain,
    t1: f64,
    t2: f64,
}

impl SolutionSurface {
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn times(&self) -> Vec<f64> {
        self.chain.axes().last().expect("time axis").nodes()
    }

    pub fn time_columns(&self) -> usize {
        self.chain.axes().last().expect("time axis").n
    }

    /// The cycle at time column `j`.
    pub fn column(&self, j: usize) -> Result<Cycle> {
        let m = self.time_columns();
        if j >= m {
            return Err(Error::InvalidInput(alloc::format!("time column {j} out of range")));
        }
        let pts: Vec<ExtendedPoint> = self.chain.points().iter().skip(j).step_by(m).copied().collect();
        let shape = &self.chain.shape()[..self.chain.p() - 1];
        Cycle::from_samples(pts, shape)
    }

    pub fn source(&self) -> Cycle {
        self.column(0).expect("first column")
    }

    pub fn target(&self) -> Cycle {
        self.column(self.time_columns() - 1).expect("last column")
    }

    /// `(c₁, c₂)` with `∂Σ = c₁ − c₂`.
    pub fn boundary_cycles(&self) -> (Cycle, Cycle) {
        (self.source(), self.target())
    }

    /// Same surface with displaced samples (used for variations).
    pub fn with_points(&self, points: Vec<ExtendedPoint>) -> Result<Self> {
        Ok(SolutionSurface { chain: self.chain.with_points(points)?, ..*self })
    }
}

pub fn build_solution_surface(
    sys: &dyn Dynamics,
    c1: &Cycle,
    t1: f64,
    t2: f64,
    time_samples: usize,
    params: &IntegratorParams,
) -> Result<SolutionSurface> {
    build_solution_surface_on(sys, c1, Axis::chebyshev(t1, t2, time_samples), params)
}

/// Like [`build_solution_surface`] with an explicit time axis (Chebyshev or
/// uniform columns).
pub fn build_solution_surface_on(sys: &dyn Dynamics, c1: &Cycle, time_axis: Axis, params: &IntegratorParams) -> Result<SolutionSurface> {
    let (t1, t2) = (time_axis.lo, time_axis.hi);
    if time_axis.kind == AxisKind::Periodic {
        return Err(Error::InvalidInput("the time axis of a solution surface must be bounded".into()));
    }
    if !(t2 > t1) {
        return Err(Error::InvalidInput("solution surfaces need t2 > t1".into()));
    }
    if c1.t() != t1 {
        return Err(Error::InvalidInput(alloc::format!("cycle lives at t = {}, surface starts at {t1}", c1.t())));
    }
    time_axis.validate(c1.p())?;
    let times = time_axis.nodes();
    let columns = par::map_range(c1.points().len(), |i| integrate_to_times(sys, &c1.points()[i], &times, params));
    let mut points = Vec::with_capacity(c1.points().len() * times.len());
    for (index, col) in columns.into_iter().enumerate() {
        points.extend(col.map_err(|e| Error::Sample { index, source: Box::new(e) })?);
    }
    let mut axes = c1.as_chain().axes().to_vec();
    axes.push(time_axis);
    let p = c1.p();
    let orientation = if p % 2 == 1 { 1.0 } else { -1.0 };
    let chain = Chain::new(axes, points)?.with_orientation(orientation * c1.as_chain().orientation());
    Ok(SolutionSurface { chain, t1, t2 })
}
