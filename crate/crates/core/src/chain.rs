//! Discretized cycles and chains, and quadrature of forms over them.
//!
//! A [`Chain`] is a tensor-product grid of [`ExtendedPoint`]s over `p`
//! parameter axes (last axis varies fastest) with an orientation sign. The
//! integral of a `p`-form is the pullback quadrature
//! `Σ w · α(P; ∂_1 P, …, ∂_p P)` with parameter tangents obtained by applying
//! each axis' differentiation matrix to the sampled points. A [`Cycle`] is a
//! chain whose axes are all periodic on `[0, 2π)` and whose samples share one
//! time.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr};
use crate::forms::DifferentialForm;
use crate::grid::Axis;
use crate::par;
use crate::point::{ExtendedPoint, TangentVector, MAX_DIM};

/// A quadrature value with a half-resolution error estimate when the grid
/// nests.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quadrature {
    pub value: f64,
    pub estimate: Option<f64>,
}

impl Quadrature {
    pub fn estimate_or(&self, fallback: f64) -> f64 {
        self.estimate.unwrap_or(fallback)
    }
}

#[derive(Debug, Clone)]
pub struct Chain {
    axes: Vec<Axis>,
    points: Vec<ExtendedPoint>,
    orientation: f64,
    faces_known: bool,
}

impl Chain {
    pub fn new(axes: Vec<Axis>, points: Vec<ExtendedPoint>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            a.validate(i)?;
        }
        let count: usize = axes.iter().map(|a| a.n).product();
        if points.len() != count {
            return Err(Error::DimensionMismatch { expected: count, found: points.len() });
        }
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(alloc::format!("sample {i} is not finite")));
        }
        Ok(Chain { axes, points, orientation: 1.0, faces_known: true })
    }

    /// Samples `f(u)` at the tensor grid of axis nodes.
    pub fn from_fn(axes: Vec<Axis>, f: impl Fn(&[f64]) -> Result<ExtendedPoint>) -> Result<Self> {
        let nodes: Vec<Vec<f64>> = axes.iter().map(Axis::nodes).collect();
        let shape: Vec<usize> = axes.iter().map(|a| a.n).collect();
        let count: usize = shape.iter().product();
        let mut points = Vec::with_capacity(count);
        let mut u = vec![0.0; axes.len()];
        for flat in 0..count {
            let idx = unflatten(flat, &shape);
            for (a, &i) in idx.iter().enumerate() {
                u[a] = nodes[a][i];
            }
            points.push(f(&u)?);
        }
        Chain::new(axes, points)
    }

    /// Chain with spatial coordinates given by expressions in the parameters
    /// `u`, `v`, `w` (one per axis), at fixed time `t`.
    pub fn parametric(spatial: &[Expr], t: f64, axes: Vec<Axis>) -> Result<Self> {
        check_parametric(spatial, axes.len())?;
        Chain::from_fn(axes, |u| eval_parametric(spatial, t, u))
    }

    pub fn p(&self) -> usize {
        self.axes.len()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }

    pub fn points(&self) -> &[ExtendedPoint] {
        &self.points
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn with_orientation(mut self, sign: f64) -> Self {
        self.orientation = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        c.orientation = -c.orientation;
        c
    }

    /// Drops the face structure: [`Chain::boundary`] then reports
    /// [`Error::NoBoundary`].
    pub fn without_boundary(mut self) -> Self {
        self.faces_known = false;
        self
    }

    /// Same grid and orientation with new samples.
    pub fn with_points(&self, points: Vec<ExtendedPoint>) -> Result<Self> {
        let mut c = Chain::new(self.axes.clone(), points)?;
        c.orientation = self.orientation;
        c.faces_known = self.faces_known;
        Ok(c)
    }

    pub fn is_closed(&self) -> bool {
        self.axes.iter().all(Axis::is_periodic)
    }

    pub fn integrate(&self, alpha: &DifferentialForm) -> Result<Quadrature> {
        if alpha.degree() != self.p() {
            return Err(Error::Arity { expected: self.p(), found: alpha.degree() });
        }
        if alpha.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: alpha.dim() });
        }
        let value = self.orientation * quadrature(&self.axes, &self.points, alpha)?;
        let estimate = match self.halved() {
            Some((axes, points)) => Some(crate::math::abs(value - self.orientation * quadrature(&axes, &points, alpha)?)),
            None => None,
        };
        Ok(Quadrature { value, estimate })
    }

    fn halved(&self) -> Option<(Vec<Axis>, Vec<ExtendedPoint>)> {
        if self.axes.is_empty() {
            return None;
        }
        let mut axes = Vec::new();
        let mut keep = Vec::new();
        for a in &self.axes {
            let (h, idx) = a.halved()?;
            axes.push(h);
            keep.push(idx);
        }
        let shape = self.shape();
        let small: Vec<usize> = axes.iter().map(|a| a.n).collect();
        let count: usize = small.iter().product();
        let mut points = Vec::with_capacity(count);
        let mut full = vec![0; shape.len()];
        for flat in 0..count {
            let idx = unflatten(flat, &small);
            for a in 0..idx.len() {
                full[a] = keep[a][idx[a]];
            }
            points.push(self.points[flatten(&full, &shape)]);
        }
        Some((axes, points))
    }

    /// Oriented boundary faces `(sign, face)`. Bounded axis `a` contributes
    /// its low face with sign `-(-1)^a` and its high face with `(-1)^a`,
    /// times the chain orientation; periodic axes contribute nothing.
    pub fn boundary(&self) -> Result<Vec<(f64, Chain)>> {
        if !self.faces_known {
            return Err(Error::NoBoundary);
        }
        let shape = self.shape();
        let mut out = Vec::new();
        for (a, axis) in self.axes.iter().enumerate() {
            if axis.is_periodic() {
                continue;
            }
            let parity = if a % 2 == 0 { 1.0 } else { -1.0 };
            for (end, side) in [(0, -1.0), (axis.n - 1, 1.0)] {
                let mut face_axes = self.axes.clone();
                face_axes.remove(a);
                let face_shape: Vec<usize> = face_axes.iter().map(|x| x.n).collect();
                let count: usize = face_shape.iter().product();
                let mut pts = Vec::with_capacity(count);
                for flat in 0..count {
                    let mut idx = unflatten(flat, &face_shape);
                    idx.insert(a, end);
                    pts.push(self.points[flatten(&idx, &shape)]);
                }
                let face = Chain { axes: face_axes, points: pts, orientation: 1.0, faces_known: true };
                out.push((self.orientation * parity * side, face));
            }
        }
        Ok(out)
    }

    /// `∮_{∂s} α` summed over the oriented faces.
    pub fn integrate_boundary(&self, alpha: &DifferentialForm) -> Result<Quadrature> {
        let mut value = 0.0;
        let mut estimate = Some(0.0);
        for (sign, face) in self.boundary()? {
            let q = face.integrate(alpha)?;
            value += sign * q.value;
            estimate = match (estimate, q.estimate) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        }
        Ok(Quadrature { value, estimate })
    }
}

/// A closed `p`-cycle sampled on a periodic grid at one time.
#[derive(Debug, Clone)]
pub struct Cycle(Chain);

impl Cycle {
    /// `shape[a]` samples along each periodic axis, without the seam point.
    pub fn from_samples(points: Vec<ExtendedPoint>, shape: &[usize]) -> Result<Self> {
        let axes = shape.iter().map(|&n| Axis::periodic(n)).collect();
        Cycle::try_from(Chain::new(axes, points)?)
    }

    /// Expressions in `u` (and `v`, `w` for higher cycles) at fixed time.
    pub fn parametric(spatial: &[Expr], t: f64, shape: &[usize]) -> Result<Self> {
        let axes = shape.iter().map(|&n| Axis::periodic(n)).collect();
        Cycle::try_from(Chain::parametric(spatial, t, axes)?)
    }

    pub fn from_fn(shape: &[usize], f: impl Fn(&[f64]) -> Result<ExtendedPoint>) -> Result<Self> {
        let axes = shape.iter().map(|&n| Axis::periodic(n)).collect();
        Cycle::try_from(Chain::from_fn(axes, f)?)
    }

    pub fn p(&self) -> usize {
        self.0.p()
    }

    pub fn t(&self) -> f64 {
        self.0.points[0].t()
    }

    pub fn points(&self) -> &[ExtendedPoint] {
        self.0.points()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.0.shape()
    }

    pub fn as_chain(&self) -> &Chain {
        &self.0
    }

    pub fn into_chain(self) -> Chain {
        self.0
    }

    pub fn reversed(&self) -> Self {
        Cycle(self.0.reversed())
    }

    pub fn with_points(&self, points: Vec<ExtendedPoint>) -> Result<Self> {
        Cycle::try_from(self.0.with_points(points)?)
    }

    /// Shifts the sample start index along the first axis by `k`.
    pub fn rotated(&self, k: usize) -> Self {
        let shape = self.shape();
        let n0 = shape[0];
        let mut pts = self.0.points.clone();
        for (flat, p) in pts.iter_mut().enumerate() {
            let mut idx = unflatten(flat, &shape);
            idx[0] = (idx[0] + k) % n0;
            *p = self.0.points[flatten(&idx, &shape)];
        }
        Cycle(Chain { points: pts, ..self.0.clone() })
    }

    pub fn integrate(&self, alpha: &DifferentialForm) -> Result<Quadrature> {
        self.0.integrate(alpha)
    }
}

impl TryFrom<Chain> for Cycle {
    type Error = Error;

    fn try_from(c: Chain) -> Result<Self> {
        if c.p() == 0 || !c.is_closed() {
            return Err(Error::InvalidInput("a cycle needs only periodic axes".into()));
        }
        for (i, a) in c.axes.iter().enumerate() {
            if a.lo != 0.0 || a.hi != core::f64::consts::TAU {
                return Err(Error::InvalidInput(alloc::format!("cycle axis {i} must span [0, 2π)")));
            }
        }
        let t = c.points[0].t();
        if let Some(i) = c.points.iter().position(|p| p.t() != t) {
            return Err(Error::InvalidInput(alloc::format!("cycle sample {i} is not at time {t}")));
        }
        Ok(Cycle(c))
    }
}

pub fn integrate_over_cycle(alpha: &DifferentialForm, c: &Cycle) -> Result<Quadrature> {
    c.integrate(alpha)
}

pub fn integrate_over_chain(alpha: &DifferentialForm, s: &Chain) -> Result<Quadrature> {
    s.integrate(alpha)
}

pub fn boundary(s: &Chain) -> Result<Vec<(f64, Chain)>> {
    s.boundary()
}

fn check_parametric(spatial: &[Expr], p: usize) -> Result<()> {
    if spatial.is_empty() || spatial.len() + 1 > MAX_DIM {
        return Err(Error::InvalidDimension(spatial.len()));
    }
    if p > 3 {
        return Err(Error::InvalidInput("at most three curve parameters (u, v, w)".into()));
    }
    Ok(())
}

fn eval_parametric(spatial: &[Expr], t: f64, u: &[f64]) -> Result<ExtendedPoint> {
    let b = Bindings::params(u);
    let mut x = [0.0; MAX_DIM];
    for (xi, e) in x.iter_mut().zip(spatial) {
        *xi = e.eval(&b)?;
    }
    Ok(ExtendedPoint::new(&x[..spatial.len()], t))
}

fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for a in (0..shape.len()).rev() {
        idx[a] = flat % shape[a];
        flat /= shape[a];
    }
    idx
}

fn flatten(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (i, n)| acc * n + i)
}

fn quadrature(axes: &[Axis], points: &[ExtendedPoint], alpha: &DifferentialForm) -> Result<f64> {
    let shape: Vec<usize> = axes.iter().map(|a| a.n).collect();
    let diffs: Vec<Vec<f64>> = axes.iter().map(Axis::diff_matrix).collect();
    let weights: Vec<Vec<f64>> = axes.iter().map(Axis::weights).collect();
    let dim = points[0].dim();
    let terms = par::map_range(points.len(), |flat| -> Result<f64> {
        let idx = unflatten(flat, &shape);
        let mut w = 1.0;
        let mut tangents = Vec::with_capacity(axes.len());
        for (a, axis) in axes.iter().enumerate() {
            w *= weights[a][idx[a]];
            let n = axis.n;
            let row = &diffs[a][idx[a] * n..(idx[a] + 1) * n];
            let mut comps = [0.0; MAX_DIM];
            let mut j = idx.clone();
            for (k, &d) in row.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                j[a] = k;
                let q = &points[flatten(&j, &shape)];
                for c in 0..dim {
                    comps[c] += d * q[c];
                }
            }
            tangents.push(TangentVector::from_components(&comps[..dim]));
        }
        Ok(w * alpha.evaluate(&points[flat], &tangents)?)
    });
    let mut sum = 0.0;
    for (flat, t) in terms.into_iter().enumerate() {
        sum += t.map_err(|e| Error::Sample { index: flat, source: alloc::boxed::Box::new(e) })?;
    }
    Ok(sum)
}
