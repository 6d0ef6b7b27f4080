//! What the flow, invariant and action code needs from a mechanical system.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, VectorField};
use crate::point::{ExtendedPoint, TangentVector, MAX_DIM};

/// Axis-aligned working box in phase space plus the time window used when
/// sampling.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub t_lo: f64,
    pub t_hi: f64,
}

pub const DEFAULT_HALF_WIDTH: f64 = 10.0;

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput("region bounds must satisfy lo < hi".into()));
        }
        Ok(Region { lo, hi, t_lo: 0.0, t_hi: 1.0 })
    }

    /// `[-h, h]^n`.
    pub fn cube(n: usize, h: f64) -> Self {
        Region { lo: vec![-h; n], hi: vec![h; n], t_lo: 0.0, t_hi: 1.0 }
    }

    pub fn default_for(n: usize) -> Self {
        Region::cube(n, DEFAULT_HALF_WIDTH)
    }

    pub fn with_time(mut self, t_lo: f64, t_hi: f64) -> Self {
        self.t_lo = t_lo;
        self.t_hi = t_hi;
        self
    }

    pub fn n(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    /// `count` uniform samples (time uniform in `[t_lo, t_hi]`), reproducible
    /// from `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<ExtendedPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = [0.0; MAX_DIM];
        (0..count)
            .map(|_| {
                for i in 0..self.n() {
                    x[i] = rng.gen_range(self.lo[i]..=self.hi[i]);
                }
                let t = if self.t_hi > self.t_lo { rng.gen_range(self.t_lo..=self.t_hi) } else { self.t_lo };
                ExtendedPoint::new(&x[..self.n()], t)
            })
            .collect()
    }
}

/// A first-order system on extended phase space with unit time velocity.
pub trait Dynamics: Send + Sync {
    /// Phase-space dimension.
    fn n(&self) -> usize;

    fn velocity(&self, p: &ExtendedPoint) -> Result<TangentVector>;

    fn region(&self) -> &Region;
}

/// Dynamics generated by a distinguished form: `σ̂` for Nambu systems, the
/// Poincaré–Cartan form `σ` for Hamiltonian ones.
pub trait Mechanics: Dynamics {
    fn distinguished_form(&self) -> &DifferentialForm;

    /// Exterior derivative of the distinguished form, built in closed form.
    fn distinguished_differential(&self) -> &DifferentialForm;

    /// The dynamical vector field with field-valued (differentiable)
    /// components.
    fn velocity_field(&self) -> &VectorField;

    fn label(&self) -> &str;
}

/// Central-difference divergence of the spatial part of a velocity field,
/// with step `1e-5 · max(1, |x_i|)`.
pub fn divergence(v: impl Fn(&ExtendedPoint) -> Result<TangentVector>, p: &ExtendedPoint) -> Result<f64> {
    let mut div = 0.0;
    for i in 0..p.n() {
        let h = 1e-5 * crate::math::abs(p[i]).max(1.0);
        let mut a = *p;
        a[i] += h;
        let mut b = *p;
        b[i] -= h;
        div += (v(&a)?.spatial()[i] - v(&b)?.spatial()[i]) / (2.0 * h);
    }
    Ok(div)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_reproducible_and_inside() {
        let r = Region::cube(3, 1.0);
        let a = r.sample(50, 7);
        assert_eq!(a, r.sample(50, 7));
        assert_ne!(a, r.sample(50, 8));
        assert!(a.iter().all(|p| r.contains(p.x())));
    }

    #[test]
    fn divergence_of_control_field() {
        let d = divergence(|p| Ok(TangentVector::new(&[p[0], 0.0, 0.0], 1.0)), &ExtendedPoint::new(&[0.3, 0.2, 0.1], 0.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
    }
}
