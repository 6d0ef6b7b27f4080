//! Surface action `S[Σ] = ∫_Σ σ̂`, its first variation along equal-time
//! displacement fields `W`, and the Hamiltonian counterpart `S[γ] = ∫_γ σ`.
//!
//! A displaced surface is obtained by one explicit Euler step `p + εW(p)` of
//! every sample. For a surface made of solutions the first variation reduces
//! to the boundary integral `∮_{∂Σ} i_W σ̂`, which for `n = 3` is
//! `(∮_{c₁} − ∮_{c₂}) x(W^y dz − W^z dy)`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::chain::{Chain, Quadrature};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fit::log_log_slope;
use crate::flow::{integrate_to_times, IntegratorParams};
use crate::forms::{DifferentialForm, VectorField};
use crate::grid::Axis;
use crate::hamilton::HamiltonianSystem;
use crate::math;
use crate::mechanics::Mechanics;
use crate::par;
use crate::point::ExtendedPoint;
use crate::transport::SolutionSurface;

/// An equal-time variation field with the list of spatial components that
/// are meant to vanish on the boundary.
#[derive(Debug, Clone)]
pub struct VariationField {
    w: VectorField,
    clamp: Vec<bool>,
}

impl VariationField {
    pub fn new(w: VectorField, clamp: Vec<bool>) -> Result<Self> {
        let n = w.dim() - 1;
        if !w.components()[n].is_zero() {
            return Err(Error::InvalidInput("variation fields must have zero time component".into()));
        }
        if clamp.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: clamp.len() });
        }
        Ok(VariationField { w, clamp })
    }

    /// No clamped components.
    pub fn free(w: VectorField) -> Result<Self> {
        let n = w.dim() - 1;
        VariationField::new(w, alloc::vec![false; n])
    }

    /// Parses spatial components; the time component is zero.
    pub fn parse(spatial: &[&str], clamp: Vec<bool>) -> Result<Self> {
        let n = spatial.len();
        let mut comps = spatial.iter().map(|s| Field::parse(s, n)).collect::<Result<Vec<_>>>()?;
        comps.push(Field::zero());
        VariationField::new(VectorField::new(comps), clamp)
    }

    pub fn field(&self) -> &VectorField {
        &self.w
    }

    pub fn clamp(&self) -> &[bool] {
        &self.clamp
    }

    pub fn is_zero(&self) -> bool {
        self.w.is_zero()
    }

    /// Largest magnitude of a clamped component over the boundary samples
    /// of `s`.
    pub fn clamp_violation(&self, s: &Chain) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (_, face) in s.boundary()? {
            for p in face.points() {
                let v = self.w.at(p)?;
                for (i, c) in self.clamp.iter().enumerate() {
                    if *c {
                        worst = worst.max(math::abs(v[i]));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Every sample moved by `ε W`.
    pub fn displace(&self, s: &Chain, eps: f64) -> Result<Chain> {
        let moved = par::map_range(s.points().len(), |i| self.w.at(&s.points()[i]).map(|w| s.points()[i].displaced(&w, eps)));
        let mut pts = Vec::with_capacity(moved.len());
        for (index, p) in moved.into_iter().enumerate() {
            pts.push(p.map_err(|e| Error::Sample { index, source: Box::new(e) })?);
        }
        s.with_points(pts)
    }
}

/// `∫ σ̂` (or `∫ σ`) over a chain whose dimension equals the form degree.
pub fn takhtajan_action(sys: &dyn Mechanics, s: &Chain) -> Result<Quadrature> {
    let form = sys.distinguished_form();
    if s.p() != form.degree() {
        return Err(Error::Arity { expected: form.degree(), found: s.p() });
    }
    s.integrate(form)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActionReport {
    pub action: Quadrature,
    pub epsilons: Vec<f64>,
    pub delta_s: Vec<f64>,
    /// Fitted slope of `log |δS|` against `log ε`; `None` when every `δS`
    /// vanishes.
    pub slope: Option<f64>,
    /// `δS/ε` at the smallest `ε`.
    pub first_variation: f64,
    /// `∮_{∂Σ} i_W σ̂`, the first-order prediction for any chain of
    /// solutions.
    pub boundary_prediction: Quadrature,
    /// Largest clamped component of `W` on the boundary.
    pub clamp_violation: f64,
}

impl ActionReport {
    /// `|δS/ε − prediction| / |prediction|`.
    pub fn relative_mismatch(&self) -> f64 {
        let p = self.boundary_prediction.value;
        math::abs(self.first_variation - p) / math::abs(p)
    }
}

fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.len() < 3 {
        return Err(Error::InvalidInput("at least three ε values are required".into()));
    }
    if epsilons.iter().any(|e| !(*e > 0.0)) || epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("ε values must be positive and strictly decreasing".into()));
    }
    Ok(())
}

/// `δS(ε) = S[Σ + εW] − S[Σ]` for each `ε`, with a log-log slope fit.
pub fn vary_chain_action(sys: &dyn Mechanics, s: &Chain, w: &VariationField, epsilons: &[f64]) -> Result<ActionReport> {
    check_epsilons(epsilons)?;
    if w.field().dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: w.field().dim() });
    }
    let action = takhtajan_action(sys, s)?;
    let mut delta_s = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let moved = w.displace(s, eps)?;
        for (index, p) in moved.points().iter().enumerate() {
            if !sys.region().contains(p.x()) {
                return Err(Error::Sample { index, source: Box::new(Error::RegionExit { t: p.t(), coords: p.x().to_vec() }) });
            }
        }
        delta_s.push(takhtajan_action(sys, &moved)?.value - action.value);
    }
    let slope = if delta_s.iter().all(|d| *d == 0.0) { None } else { Some(log_log_slope(epsilons, &delta_s)?) };
    let boundary_prediction = s.integrate_boundary(&sys.distinguished_form().interior(w.field())?)?;
    let last = epsilons.len() - 1;
    Ok(ActionReport {
        action,
        first_variation: delta_s[last] / epsilons[last],
        epsilons: epsilons.to_vec(),
        delta_s,
        slope,
        boundary_prediction,
        clamp_violation: w.clamp_violation(s)?,
    })
}

pub fn vary_action(sys: &dyn Mechanics, surface: &SolutionSurface, w: &VariationField, epsilons: &[f64]) -> Result<ActionReport> {
    vary_chain_action(sys, surface.chain(), w, epsilons)
}

/// `(∮_{c₁} − ∮_{c₂}) x(W^y dz − W^z dy)` for a three-dimensional system.
pub fn boundary_term(sys: &dyn Mechanics, surface: &SolutionSurface, w: &VariationField) -> Result<Quadrature> {
    let n = sys.n();
    if n != 3 || w.field().dim() != 4 {
        return Err(Error::InvalidDimension(n));
    }
    let x = Field::coord(0);
    let wc = w.field().components();
    let form = DifferentialForm::dx(4, 2).mul_field(&x.mul(&wc[1])).sub(&DifferentialForm::dx(4, 1).mul_field(&x.mul(&wc[2])))?;
    let (c1, c2) = surface.boundary_cycles();
    let a = c1.integrate(&form)?;
    let b = c2.integrate(&form)?;
    let estimate = match (a.estimate, b.estimate) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    Ok(Quadrature { value: a.value - b.value, estimate })
}

/// A solution curve sampled at Chebyshev times on `[t1, t2]`, as a 1-chain.
pub fn trajectory_chain(
    sys: &dyn Mechanics,
    p0: &ExtendedPoint,
    t1: f64,
    t2: f64,
    samples: usize,
    params: &IntegratorParams,
) -> Result<Chain> {
    let axis = Axis::chebyshev(t1, t2, samples);
    axis.validate(0)?;
    let pts = integrate_to_times(sys, p0, &axis.nodes(), params)?;
    Chain::new(alloc::vec![axis], pts)
}

/// `S[γ] = ∫_γ σ` and its variations; the prediction is `p_a W^{q_a}` at
/// `t₂` minus at `t₁`.
pub fn hamiltonian_action_check(hsys: &HamiltonianSystem, gamma: &Chain, w: &VariationField, epsilons: &[f64]) -> Result<ActionReport> {
    if gamma.p() != 1 {
        return Err(Error::Arity { expected: 1, found: gamma.p() });
    }
    vary_chain_action(hsys, gamma, w, epsilons)
}
