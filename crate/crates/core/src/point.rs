//! Points and tangent vectors of extended phase space.
//!
//! Coordinates are stored inline: `n` phase-space coordinates followed by
//! time at index `n`. Time is treated as an ordinary coordinate everywhere in
//! the calculus.

use core::ops::{Add, Index, IndexMut, Mul, Sub};

/// Largest supported extended dimension (phase-space dimension + 1).
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, PartialEq)]
pub struct ExtendedPoint {
    n: u8,
    c: [f64; MAX_DIM],
}

impl ExtendedPoint {
    pub fn new(x: &[f64], t: f64) -> Self {
        assert!(x.len() < MAX_DIM, "phase-space dimension {} too large", x.len());
        let mut c = [0.0; MAX_DIM];
        c[..x.len()].copy_from_slice(x);
        c[x.len()] = t;
        ExtendedPoint { n: x.len() as u8, c }
    }

    /// Builds a point from extended coordinates (time last).
    pub fn from_coords(coords: &[f64]) -> Self {
        assert!(!coords.is_empty() && coords.len() <= MAX_DIM);
        let n = coords.len() - 1;
        ExtendedPoint::new(&coords[..n], coords[n])
    }

    /// Phase-space dimension.
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Extended dimension, `n + 1`.
    pub fn dim(&self) -> usize {
        self.n as usize + 1
    }

    pub fn x(&self) -> &[f64] {
        &self.c[..self.n as usize]
    }

    pub fn x_mut(&mut self) -> &mut [f64] {
        &mut self.c[..self.n as usize]
    }

    pub fn t(&self) -> f64 {
        self.c[self.n as usize]
    }

    pub fn set_t(&mut self, t: f64) {
        self.c[self.n as usize] = t;
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..=self.n as usize]
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.c[..=self.n as usize]
    }

    /// `self + s * v`, including the time component.
    pub fn displaced(&self, v: &TangentVector, s: f64) -> Self {
        debug_assert_eq!(self.n, v.n);
        let mut out = *self;
        for i in 0..self.dim() {
            out.c[i] += s * v.c[i];
        }
        out
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim() {
            let d = self.c[i] - other.c[i];
            s += d * d;
        }
        crate::math::sqrt(s)
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }
}

impl core::fmt::Debug for ExtendedPoint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "ExtendedPoint(x = {:?}, t = {})", self.x(), self.t())
    }
}

impl Index<usize> for ExtendedPoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl IndexMut<usize> for ExtendedPoint {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.coords_mut()[i]
    }
}

/// A tangent vector on extended phase space: spatial part and time component.
#[derive(Clone, Copy, PartialEq)]
pub struct TangentVector {
    n: u8,
    c: [f64; MAX_DIM],
}

impl TangentVector {
    pub fn new(spatial: &[f64], time_component: f64) -> Self {
        assert!(spatial.len() < MAX_DIM);
        let mut c = [0.0; MAX_DIM];
        c[..spatial.len()].copy_from_slice(spatial);
        c[spatial.len()] = time_component;
        TangentVector { n: spatial.len() as u8, c }
    }

    pub fn from_components(comps: &[f64]) -> Self {
        assert!(!comps.is_empty() && comps.len() <= MAX_DIM);
        let n = comps.len() - 1;
        TangentVector::new(&comps[..n], comps[n])
    }

    pub fn zero(n: usize) -> Self {
        TangentVector { n: n as u8, c: [0.0; MAX_DIM] }
    }

    /// Unit vector along extended coordinate `i` (time is `i == n`).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = TangentVector::zero(n);
        v.c[i] = 1.0;
        v
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn dim(&self) -> usize {
        self.n as usize + 1
    }

    pub fn spatial(&self) -> &[f64] {
        &self.c[..self.n as usize]
    }

    pub fn spatial_mut(&mut self) -> &mut [f64] {
        &mut self.c[..self.n as usize]
    }

    pub fn time_component(&self) -> f64 {
        self.c[self.n as usize]
    }

    pub fn components(&self) -> &[f64] {
        &self.c[..=self.n as usize]
    }

    pub fn components_mut(&mut self) -> &mut [f64] {
        &mut self.c[..=self.n as usize]
    }

    pub fn norm(&self) -> f64 {
        crate::math::sqrt(self.components().iter().map(|v| v * v).sum())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.components().iter().zip(other.components()).map(|(a, b)| a * b).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| v.is_finite())
    }
}

impl core::fmt::Debug for TangentVector {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "TangentVector(spatial = {:?}, time = {})", self.spatial(), self.time_component())
    }
}

impl Index<usize> for TangentVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.components()[i]
    }
}

impl IndexMut<usize> for TangentVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.components_mut()[i]
    }
}

impl Add for TangentVector {
    type Output = TangentVector;
    fn add(mut self, rhs: TangentVector) -> TangentVector {
        for i in 0..self.dim() {
            self.c[i] += rhs.c[i];
        }
        self
    }
}

impl Sub for TangentVector {
    type Output = TangentVector;
    fn sub(mut self, rhs: TangentVector) -> TangentVector {
        for i in 0..self.dim() {
            self.c[i] -= rhs.c[i];
        }
        self
    }
}

impl Mul<TangentVector> for f64 {
    type Output = TangentVector;
    fn mul(self, mut rhs: TangentVector) -> TangentVector {
        for i in 0..rhs.dim() {
            rhs.c[i] *= self;
        }
        rhs
    }
}
