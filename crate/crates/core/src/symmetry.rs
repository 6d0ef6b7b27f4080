//! Symmetry candidates, relative and absolute integral invariants, and
//! momentum one-forms.
//!
//! A candidate `(ξ, χ)` is a symmetry when `L_ξ σ̂ = dχ`. Then
//! `α = i_ξ σ̂ − χ` integrates to the same value over every transported
//! cycle, and `i_ξ dσ̂ = −dα` integrates to the same value over every
//! transported chain. Everything here is generic over [`Mechanics`], so the
//! Hamiltonian form `σ` works the same way (with `χ` a function).

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::chain::{Chain, Cycle, Quadrature};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::flow::{integrate_to_times, IntegratorParams};
use crate::forms::{DifferentialForm, VectorField};
use crate::math;
use crate::mechanics::Mechanics;
use crate::par;
use crate::point::{ExtendedPoint, TangentVector};
use crate::transport::{refinement_check, RefinementWarning};

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SymmetryCandidate {
    pub label: String,
    pub xi: VectorField,
    pub chi: DifferentialForm,
}

impl SymmetryCandidate {
    pub fn new(label: impl Into<String>, xi: VectorField, chi: DifferentialForm) -> Self {
        SymmetryCandidate { label: label.into(), xi, chi }
    }

    /// Candidate with `χ = 0` for a system whose distinguished form has the
    /// given degree.
    pub fn without_chi(label: impl Into<String>, xi: VectorField, form_degree: usize) -> Self {
        let dim = xi.dim();
        SymmetryCandidate::new(label, xi, DifferentialForm::zero(dim, form_degree - 1))
    }

    pub fn validate(&self, sys: &dyn Mechanics) -> Result<()> {
        let form = sys.distinguished_form();
        if self.xi.dim() != form.dim() {
            return Err(Error::DimensionMismatch { expected: form.dim(), found: self.xi.dim() });
        }
        if self.chi.dim() != form.dim() {
            return Err(Error::DimensionMismatch { expected: form.dim(), found: self.chi.dim() });
        }
        if self.chi.degree() + 1 != form.degree() {
            return Err(Error::Arity { expected: form.degree() - 1, found: self.chi.degree() });
        }
        Ok(())
    }

    /// `α = i_ξ σ̂ − χ`, the integrand of the relative invariant.
    pub fn relative_form(&self, sys: &dyn Mechanics) -> Result<DifferentialForm> {
        self.validate(sys)?;
        sys.distinguished_form().interior(&self.xi)?.sub(&self.chi)
    }

    /// `i_ξ dσ̂`, the integrand of the absolute invariant.
    pub fn absolute_form(&self, sys: &dyn Mechanics) -> Result<DifferentialForm> {
        self.validate(sys)?;
        sys.distinguished_differential().interior(&self.xi)
    }

    /// `L_ξ σ̂ − dχ`, with `L_ξ σ̂ = i_ξ dσ̂ + d i_ξ σ̂`.
    pub fn residual_form(&self, sys: &dyn Mechanics) -> Result<DifferentialForm> {
        self.validate(sys)?;
        let lie = self.absolute_form(sys)?.add(&sys.distinguished_form().interior(&self.xi)?.exterior_derivative()?)?;
        lie.sub(&self.chi.exterior_derivative()?)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymmetryReport {
    pub label: String,
    pub passed: bool,
    pub max_residual: f64,
    /// Index of the sample with the largest residual.
    pub worst_sample: usize,
    pub samples: usize,
    pub tol: f64,
    pub seed: Option<u64>,
}

/// Largest basis-coefficient magnitude of `form` over the samples, and the
/// sample where it occurs.
pub fn max_over_samples(form: &DifferentialForm, samples: &[ExtendedPoint]) -> Result<(f64, usize)> {
    let vals = par::map_range(samples.len(), |i| form.at(&samples[i]).map(|v| v.max_abs()));
    let mut worst = (0.0, 0);
    for (i, v) in vals.into_iter().enumerate() {
        let v = v.map_err(|e| Error::Sample { index: i, source: Box::new(e) })?;
        if !(v <= worst.0) {
            worst = (v, i);
        }
    }
    Ok(worst)
}

pub fn check_symmetry(sys: &dyn Mechanics, cand: &SymmetryCandidate, samples: &[ExtendedPoint], tol: f64) -> Result<SymmetryReport> {
    let residual = cand.residual_form(sys)?;
    let (max_residual, worst_sample) = max_over_samples(&residual, samples)?;
    Ok(SymmetryReport {
        label: cand.label.clone(),
        passed: max_residual <= tol,
        max_residual,
        worst_sample,
        samples: samples.len(),
        tol,
        seed: None,
    })
}

/// [`check_symmetry`] on `count` points drawn from the system region.
pub fn check_symmetry_seeded(sys: &dyn Mechanics, cand: &SymmetryCandidate, count: usize, seed: u64, tol: f64) -> Result<SymmetryReport> {
    let samples = sys.region().sample(count, seed);
    let mut r = check_symmetry(sys, cand, &samples, tol)?;
    r.seed = Some(seed);
    Ok(r)
}

/// Settings for the symmetry precondition run before invariant sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecheckOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for PrecheckOptions {
    fn default() -> Self {
        PrecheckOptions { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvariantReport {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub estimates: Vec<Option<f64>>,
    /// `max |v − v₀|`.
    pub drift: f64,
    /// `drift / max(|v₀|, 1e-3)`.
    pub relative_drift: f64,
    /// The symmetry precondition; a failed check does not stop the sweep.
    pub symmetry: SymmetryReport,
    pub refinement: Vec<RefinementWarning>,
}

impl InvariantReport {
    fn assemble(
        label: &str,
        times: Vec<f64>,
        quads: Vec<Quadrature>,
        symmetry: SymmetryReport,
        refinement: Vec<RefinementWarning>,
    ) -> Self {
        let values: Vec<f64> = quads.iter().map(|q| q.value).collect();
        let v0 = values[0];
        let drift = values.iter().map(|v| math::abs(v - v0)).fold(0.0, f64::max);
        InvariantReport {
            label: label.into(),
            times,
            estimates: quads.iter().map(|q| q.estimate).collect(),
            values,
            drift,
            relative_drift: drift / math::abs(v0).max(1e-3),
            symmetry,
            refinement,
        }
    }

    pub fn max_estimate(&self) -> Option<f64> {
        self.estimates.iter().try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))
    }
}

/// Transports every sample of `s` through `times` in one pass per sample and
/// returns the chain at each time.
fn sweep(sys: &dyn Mechanics, s: &Chain, times: &[f64], params: &IntegratorParams) -> Result<Vec<Chain>> {
    check_times(times)?;
    let t0 = s.points()[0].t();
    if s.points().iter().any(|p| p.t() != t0) {
        return Err(Error::InvalidInput("seed chain must live at a single time".into()));
    }
    let mut full = Vec::with_capacity(times.len() + 1);
    full.push(t0);
    full.extend_from_slice(times);
    let columns = par::map_range(s.points().len(), |i| integrate_to_times(sys, &s.points()[i], &full, params));
    let mut cols = Vec::with_capacity(columns.len());
    for (index, c) in columns.into_iter().enumerate() {
        cols.push(c.map_err(|e| Error::Sample { index, source: Box::new(e) })?);
    }
    (1..full.len()).map(|j| s.with_points(cols.iter().map(|c| c[j]).collect())).collect()
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidInput("no times requested".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("times must be strictly increasing".into()));
    }
    Ok(())
}

/// `f(t) = ∮_{c_t} (i_ξ σ̂ − χ)` at each requested time, `c_t` being the
/// flow image of `c`.
pub fn relative_invariant(
    sys: &dyn Mechanics,
    cand: &SymmetryCandidate,
    c: &Cycle,
    times: &[f64],
    params: &IntegratorParams,
    precheck: &PrecheckOptions,
) -> Result<InvariantReport> {
    let alpha = cand.relative_form(sys)?;
    let symmetry = check_symmetry_seeded(sys, cand, precheck.samples, precheck.seed, precheck.tol)?;
    let chains = sweep(sys, c.as_chain(), times, params)?;
    let mut quads = Vec::with_capacity(chains.len());
    let mut warnings = Vec::new();
    for s in &chains {
        quads.push(s.integrate(&alpha)?);
        warnings.extend(refinement_check(c.as_chain(), s));
    }
    Ok(InvariantReport::assemble(&cand.label, times.to_vec(), quads, symmetry, warnings))
}

/// `∫_{s_t} i_ξ dσ̂` at each requested time.
pub fn absolute_invariant(
    sys: &dyn Mechanics,
    cand: &SymmetryCandidate,
    seed_chain: &Chain,
    times: &[f64],
    params: &IntegratorParams,
    precheck: &PrecheckOptions,
) -> Result<InvariantReport> {
    let beta = cand.absolute_form(sys)?;
    let symmetry = check_symmetry_seeded(sys, cand, precheck.samples, precheck.seed, precheck.tol)?;
    let chains = sweep(sys, seed_chain, times, params)?;
    let mut quads = Vec::with_capacity(chains.len());
    let mut warnings = Vec::new();
    for s in &chains {
        quads.push(s.integrate(&beta)?);
        warnings.extend(refinement_check(seed_chain, s));
    }
    Ok(InvariantReport::assemble(&cand.label, times.to_vec(), quads, symmetry, warnings))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StokesCheck {
    /// `∫_s i_ξ dσ̂`.
    pub surface: Quadrature,
    /// `∮_{∂s} (i_ξ σ̂ − χ)`.
    pub boundary: Quadrature,
    /// `|surface + boundary|`.
    pub residual: f64,
}

pub fn stokes_check(sys: &dyn Mechanics, cand: &SymmetryCandidate, s: &Chain) -> Result<StokesCheck> {
    let surface = s.integrate(&cand.absolute_form(sys)?)?;
    let boundary = s.integrate_boundary(&cand.relative_form(sys)?)?;
    Ok(StokesCheck { surface, boundary, residual: math::abs(surface.value + boundary.value) })
}

/// Generators `ξ_j` with candidate momenta `P_j` (forms one degree below the
/// distinguished form), plus named linear combinations of generators.
#[derive(Debug, Clone, Default)]
pub struct MomentumSystem {
    pub generators: Vec<(String, VectorField)>,
    pub candidates: Vec<DifferentialForm>,
    pub combinations: Vec<(String, Vec<(usize, f64)>)>,
}

impl MomentumSystem {
    pub fn new(generators: Vec<(String, VectorField)>, candidates: Vec<DifferentialForm>) -> Result<Self> {
        if generators.len() != candidates.len() {
            return Err(Error::Arity { expected: generators.len(), found: candidates.len() });
        }
        Ok(MomentumSystem { generators, candidates, combinations: Vec::new() })
    }

    pub fn with_combination(mut self, label: impl Into<String>, terms: Vec<(usize, f64)>) -> Result<Self> {
        if let Some((i, _)) = terms.iter().find(|(i, _)| *i >= self.generators.len()) {
            return Err(Error::InvalidInput(alloc::format!("combination refers to unknown generator {i}")));
        }
        if terms.is_empty() {
            return Err(Error::InvalidInput("empty combination".into()));
        }
        self.combinations.push((label.into(), terms));
        Ok(self)
    }

    /// `(Σ c_j ξ_j, Σ c_j P_j)`.
    pub fn combine(&self, terms: &[(usize, f64)]) -> Result<(VectorField, DifferentialForm)> {
        let (i0, _) = terms.first().ok_or_else(|| Error::InvalidInput("empty combination".into()))?;
        let mut xi = VectorField::zero(self.generators[*i0].1.dim());
        let p0 = &self.candidates[*i0];
        let mut p = DifferentialForm::zero(p0.dim(), p0.degree());
        for &(i, c) in terms {
            xi = xi.add(&self.generators[i].1.scale(c))?;
            p = p.add(&self.candidates[i].scale(c))?;
        }
        Ok((xi, p))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentumCheck {
    pub label: String,
    /// `max ‖d(i_ξ dσ̂)‖`.
    pub closedness: f64,
    /// `max ‖i_ξ dσ̂ + dP‖`.
    pub exactness: f64,
    pub passed: bool,
    /// Combination coefficients when this row is a linear combination.
    pub combination: Option<Vec<(usize, f64)>>,
}

pub fn check_momentum(
    sys: &dyn Mechanics,
    label: &str,
    xi: &VectorField,
    p: &DifferentialForm,
    samples: &[ExtendedPoint],
    tol: f64,
) -> Result<MomentumCheck> {
    let beta = sys.distinguished_differential().interior(xi)?;
    if p.degree() + 1 != beta.degree() || p.dim() != beta.dim() {
        return Err(Error::Arity { expected: beta.degree() - 1, found: p.degree() });
    }
    let (closedness, _) = max_over_samples(&beta.exterior_derivative()?, samples)?;
    let (exactness, _) = max_over_samples(&beta.add(&p.exterior_derivative()?)?, samples)?;
    Ok(MomentumCheck { label: label.into(), closedness, exactness, passed: closedness <= tol && exactness <= tol, combination: None })
}

/// One row per generator, then one per declared combination.
pub fn verify_momentum_one_forms(
    sys: &dyn Mechanics,
    ms: &MomentumSystem,
    samples: &[ExtendedPoint],
    tol: f64,
) -> Result<Vec<MomentumCheck>> {
    let mut out = Vec::new();
    for ((label, xi), p) in ms.generators.iter().zip(&ms.candidates) {
        out.push(check_momentum(sys, label, xi, p, samples, tol)?);
    }
    for (label, terms) in &ms.combinations {
        let (xi, p) = ms.combine(terms)?;
        let mut row = check_momentum(sys, label, &xi, &p, samples, tol)?;
        row.combination = Some(terms.clone());
        out.push(row);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingReport {
    pub lambda: f64,
    /// `Σ|lhs(λX)| / Σ|lhs(X)|` with `lhs(X) = i_{ξ_X} dσ̂`.
    pub lhs_scale: f64,
    /// `Σ|rhs(λX)| / Σ|rhs(X)|` with `rhs(X) = dP₁ ∧ dP₂`.
    pub rhs_scale: f64,
    /// `rhs_scale / lhs_scale`; equals `λ`, so the two sides cannot agree
    /// for every generator unless `λ = 1`.
    pub ratio: f64,
    pub degenerate: bool,
}

/// Evaluates both sides of the proposed identity `i_{ξ_X} dσ̂ = dP₁ ∧ dP₂`
/// for `X` and `λX` on every coordinate basis pair at every sample.
pub fn pandit_gangal_scaling_demo(
    sys: &crate::nambu::NambuSystem,
    generator: &VectorField,
    p1: &Field,
    p2: &Field,
    lambda: f64,
    samples: &[ExtendedPoint],
) -> Result<ScalingReport> {
    let n = crate::mechanics::Dynamics::n(sys);
    if n != 3 {
        return Err(Error::InvalidDimension(n));
    }
    let dim = n + 1;
    let lhs = |l: f64| sys.d_sigma_hat().interior(&generator.scale(l));
    let dp = |f: &Field, l: f64| crate::nambu::gradient_form(&f.scale(l), dim);
    let rhs = |l: f64| dp(p1, l).wedge(&dp(p2, l));
    let total = |form: &DifferentialForm| -> Result<f64> {
        let mut s = 0.0;
        for p in samples {
            let v = form.at(p)?;
            for a in 0..dim {
                for b in 0..dim {
                    if a != b {
                        s += math::abs(v.evaluate(&[TangentVector::basis(n, a), TangentVector::basis(n, b)])?);
                    }
                }
            }
        }
        Ok(s)
    };
    let (l1, r1) = (total(&lhs(1.0)?)?, total(&rhs(1.0)?)?);
    if l1 == 0.0 || r1 == 0.0 {
        return Err(Error::InvalidInput("both sides must be non-zero at some sample".into()));
    }
    let lhs_scale = total(&lhs(lambda)?)? / l1;
    let rhs_scale = total(&rhs(lambda)?)? / r1;
    Ok(ScalingReport { lambda, lhs_scale, rhs_scale, ratio: rhs_scale / lhs_scale, degenerate: lambda == 1.0 })
}
