//! Hamiltonian mechanics on extended phase space `(q¹…qᵐ, p₁…p_m, t)`, with
//! the Poincaré–Cartan form `σ = p_a dq^a − H dt`.
//!
//! Here symmetries give conserved functions `f_ξ = i_ξ σ − χ` rather than
//! integral invariants; the same calculus and flow code is reused.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{parse, EvalError, Expr};
use crate::field::Field;
use crate::flow::{integrate, IntegratorParams, Trajectory};
use crate::forms::{DifferentialForm, VectorField};
use crate::math;
use crate::mechanics::{Dynamics, Mechanics, Region};
use crate::nambu::{gradient_form, NambuSystem};
use crate::par;
use crate::point::{ExtendedPoint, TangentVector, MAX_DIM};
use crate::symmetry::{check_momentum, check_symmetry_seeded, MomentumCheck, MomentumSystem, SymmetryCandidate, SymmetryReport};

pub const MAX_DOF: usize = 3;

#[derive(Clone)]
pub struct HamiltonianSystem {
    m: usize,
    label: String,
    h: Expr,
    field: Field,
    region: Region,
    sigma: DifferentialForm,
    d_sigma: DifferentialForm,
    velocity_field: VectorField,
}

impl core::fmt::Debug for HamiltonianSystem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("HamiltonianSystem").field("label", &self.label).field("m", &self.m).field("h", &self.h.render()).finish()
    }
}

impl HamiltonianSystem {
    pub fn new(label: impl Into<String>, m: usize, h: Expr) -> Result<Self> {
        if !(1..=MAX_DOF).contains(&m) {
            return Err(Error::InvalidDimension(2 * m));
        }
        let n = 2 * m;
        if let Some(v) = h.unbound_var(n) {
            return Err(Error::Eval(EvalError::Unbound(v)));
        }
        let dim = n + 1;
        let field = Field::expr(h.clone(), n);
        let dt = DifferentialForm::dx(dim, n);
        let mut sigma = dt.mul_field(&field).scale(-1.0);
        let mut d_sigma = gradient_form(&field, dim).wedge(&dt)?.scale(-1.0);
        for a in 0..m {
            let dq = DifferentialForm::dx(dim, a);
            let dp = DifferentialForm::dx(dim, m + a);
            sigma = sigma.add(&dq.mul_field(&Field::coord(m + a)))?;
            d_sigma = d_sigma.add(&dp.wedge(&dq)?)?;
        }
        let mut comps: Vec<Field> = (0..m).map(|a| field.partial(m + a)).collect();
        comps.extend((0..m).map(|a| field.partial(a).scale(-1.0)));
        comps.push(Field::constant(1.0));
        Ok(HamiltonianSystem {
            m,
            label: label.into(),
            h,
            field,
            region: Region::default_for(n),
            sigma,
            d_sigma,
            velocity_field: VectorField::new(comps),
        })
    }

    pub fn from_source(label: impl Into<String>, m: usize, src: &str) -> Result<Self> {
        HamiltonianSystem::new(label, m, parse(src)?)
    }

    /// `H = (p² + q²)/2`.
    pub fn sho() -> Self {
        HamiltonianSystem::from_source("sho", 1, "(p1^2 + q1^2)/2").expect("built-in system")
    }

    /// `H = ½|p|² + ¼(q₁² + q₂²)²`: a planar central potential.
    pub fn central_quartic() -> Self {
        HamiltonianSystem::from_source("central-quartic", 2, "0.5*(p1^2 + p2^2) + 0.25*(q1^2 + q2^2)^2").expect("built-in system")
    }

    /// `H = ½|p|²` with `m` degrees of freedom.
    pub fn free_particle(m: usize) -> Result<Self> {
        let src: Vec<String> = (1..=m).map(|a| format!("p{a}^2")).collect();
        HamiltonianSystem::from_source(format!("free-particle({m})"), m, &format!("0.5*({})", src.join(" + ")))
    }

    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        match (name, params) {
            ("sho", []) => Ok(HamiltonianSystem::sho()),
            ("central-quartic", []) => Ok(HamiltonianSystem::central_quartic()),
            ("free-particle", []) => HamiltonianSystem::free_particle(1),
            ("free-particle", [m]) if *m >= 1.0 && math::floor(*m) == *m => HamiltonianSystem::free_particle(*m as usize),
            ("sho" | "central-quartic", _) => Err(Error::Arity { expected: 0, found: params.len() }),
            ("free-particle", _) => Err(Error::InvalidInput("free-particle takes one integer parameter".into())),
            _ => Err(Error::InvalidInput(format!("unknown built-in system '{name}'"))),
        }
    }

    pub const BUILTINS: [&'static str; 3] = ["sho", "central-quartic", "free-particle"];

    pub fn with_region(mut self, region: Region) -> Result<Self> {
        if region.n() != 2 * self.m {
            return Err(Error::DimensionMismatch { expected: 2 * self.m, found: region.n() });
        }
        self.region = region;
        Ok(self)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Degrees of freedom.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.h
    }

    pub fn hamiltonian_field(&self) -> &Field {
        &self.field
    }

    pub fn sigma(&self) -> &DifferentialForm {
        &self.sigma
    }

    pub fn d_sigma(&self) -> &DifferentialForm {
        &self.d_sigma
    }

    /// `(q̇, ṗ, ṫ) = (∂H/∂p, −∂H/∂q, 1)`.
    pub fn velocity(&self, p: &ExtendedPoint) -> Result<TangentVector> {
        let n = 2 * self.m;
        if p.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.n() });
        }
        let mut g = [0.0; MAX_DIM];
        self.h.gradient_into(p.coords(), (1u32 << n) - 1, &mut g[..=n])?;
        let mut v = [0.0; MAX_DIM];
        for a in 0..self.m {
            v[a] = g[self.m + a];
            v[self.m + a] = -g[a];
        }
        Ok(TangentVector::new(&v[..n], 1.0))
    }

    /// The velocity together with `max |i_γ̇ dσ|` at the point.
    pub fn hamilton_velocity(&self, p: &ExtendedPoint) -> Result<(TangentVector, f64)> {
        let v = self.velocity(p)?;
        let residual = self.d_sigma.at(p)?.interior(&v)?.max_abs();
        Ok((v, residual))
    }

    /// `f_ξ = i_ξ σ − χ`, with the symmetry precondition checked on seeded
    /// samples (a failure is reported, not raised).
    pub fn conserved_function(&self, cand: &SymmetryCandidate, samples: usize, seed: u64, tol: f64) -> Result<ConservedFunction> {
        let form = cand.relative_form(self)?;
        let symmetry = check_symmetry_seeded(self, cand, samples, seed, tol)?;
        Ok(ConservedFunction { field: form.coeffs()[0].clone(), symmetry })
    }

    /// Per generator: `‖i_ξ dσ + dP‖` at the samples and the drift of `P`
    /// along trajectories from `starts` over `[0, t_end]`.
    pub fn verify_extended_momentum_map(
        &self,
        ms: &MomentumSystem,
        samples: &[ExtendedPoint],
        starts: &[ExtendedPoint],
        t_end: f64,
        params: &IntegratorParams,
        tol: f64,
    ) -> Result<Vec<ExtendedMomentumCheck>> {
        let trajectories = par::map_range(starts.len(), |i| integrate(self, &starts[i], starts[i].t(), starts[i].t() + t_end, params));
        let mut trajs = Vec::with_capacity(starts.len());
        for (index, t) in trajectories.into_iter().enumerate() {
            trajs.push(t.map_err(|e| Error::Sample { index, source: Box::new(e) })?);
        }
        let mut out = Vec::new();
        let rows = ms.generators.iter().zip(&ms.candidates).map(|((l, xi), p)| (l.clone(), xi.clone(), p.clone(), None));
        let combos = ms.combinations.iter().map(|(l, terms)| ms.combine(terms).map(|(xi, p)| (l.clone(), xi, p, Some(terms.clone()))));
        for row in rows.map(Ok).chain(combos) {
            let (label, xi, p, combination) = row?;
            if p.degree() != 0 {
                return Err(Error::Arity { expected: 0, found: p.degree() });
            }
            let mut check = check_momentum(self, &label, &xi, &p, samples, tol)?;
            check.combination = combination;
            let f = &p.coeffs()[0];
            let mut drift: f64 = 0.0;
            for t in &trajs {
                drift = drift.max(conservation_drift(f, t)?);
            }
            out.push(ExtendedMomentumCheck { passed: check.passed && drift <= tol, check, pdot_drift: drift });
        }
        Ok(out)
    }
}

/// `max_k |f(γ(t_k)) − f(γ(t_0))|` over the stored samples.
pub fn conservation_drift(f: &Field, traj: &Trajectory) -> Result<f64> {
    let f0 = f.value(traj.start().coords())?;
    let mut drift: f64 = 0.0;
    for p in traj.points() {
        drift = drift.max(math::abs(f.value(p.coords())? - f0));
    }
    Ok(drift)
}

#[derive(Debug, Clone)]
pub struct ConservedFunction {
    pub field: Field,
    pub symmetry: SymmetryReport,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExtendedMomentumCheck {
    pub check: MomentumCheck,
    /// `max |P(γ(t)) − P(γ(0))|` over the sampled trajectories.
    pub pdot_drift: f64,
    pub passed: bool,
}

impl Dynamics for HamiltonianSystem {
    fn n(&self) -> usize {
        2 * self.m
    }

    fn velocity(&self, p: &ExtendedPoint) -> Result<TangentVector> {
        HamiltonianSystem::velocity(self, p)
    }

    fn region(&self) -> &Region {
        &self.region
    }
}

impl Mechanics for HamiltonianSystem {
    fn distinguished_form(&self) -> &DifferentialForm {
        &self.sigma
    }

    fn distinguished_differential(&self) -> &DifferentialForm {
        &self.d_sigma
    }

    fn velocity_field(&self) -> &VectorField {
        &self.velocity_field
    }

    fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EulerTopReport {
    pub inertia: [f64; 3],
    pub initial: [f64; 3],
    pub final_state: [f64; 3],
    pub t_end: f64,
    /// `|H₁(end) − H₁(start)| / |H₁(start)|` (energy).
    pub energy_drift: f64,
    /// Same for `H₂ = ½|L|²`.
    pub casimir_drift: f64,
    /// Largest state change along the run.
    pub max_displacement: f64,
    /// Both Hamiltonians are conserved by construction of the Nambu flow.
    /// They are the defining Hamiltonians, not outputs of the symmetry
    /// machinery.
    pub note: String,
}

/// Integrates the Nambu Euler top and measures conservation of its two
/// Hamiltonians.
pub fn euler_top_embedding_check(inertia: [f64; 3], initial: [f64; 3], t_end: f64, params: &IntegratorParams) -> Result<EulerTopReport> {
    let sys = NambuSystem::euler_top(inertia[0], inertia[1], inertia[2])?;
    let p0 = ExtendedPoint::new(&initial, 0.0);
    let traj = integrate(&sys, &p0, 0.0, t_end, params)?;
    let end = *traj.end();
    let rel = |h: &Expr| -> Result<f64> {
        let a = h.eval_at(p0.coords())?;
        let b = h.eval_at(end.coords())?;
        Ok(if a == 0.0 { math::abs(b) } else { math::abs(b - a) / math::abs(a) })
    };
    let hs = sys.hamiltonians();
    let max_displacement = traj.points().iter().map(|p| p.distance(&ExtendedPoint::new(&initial, p.t()))).fold(0.0, f64::max);
    Ok(EulerTopReport {
        inertia,
        initial,
        final_state: [end[0], end[1], end[2]],
        t_end,
        energy_drift: rel(&hs[0])?,
        casimir_drift: rel(&hs[1])?,
        max_displacement,
        note:
            "energy and ½|L|² are the Nambu Hamiltonians themselves; the symmetry machinery yields integral invariants, not these functions"
                .into(),
    })
}
