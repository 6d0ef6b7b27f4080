//! Nambu systems: `n` phase-space coordinates driven by `n − 1` Hamiltonians
//! through a Levi-Civita contraction of their gradients.
//!
//! The distinguished `(n−1)`-form is
//! `σ̂ = x¹ dx² ∧ … ∧ dxⁿ + (−1)ⁿ H₁ dH₂ ∧ … ∧ dH_{n−1} ∧ dt`,
//! whose differential `dx¹∧…∧dxⁿ + (−1)ⁿ dH₁∧…∧dH_{n−1}∧dt` annihilates the
//! dynamical field `γ̇ = (ẋ, 1)`. For `n = 3` the second term is
//! `−H₁ dH₂ ∧ dt`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{parse, EvalError, Expr};
use crate::field::Field;
use crate::forms::{DifferentialForm, FormValue, VectorField};
use crate::mechanics::{self, Dynamics, Mechanics, Region};
use crate::point::{ExtendedPoint, TangentVector, MAX_DIM};

pub const MIN_N: usize = 3;
pub const MAX_N: usize = 6;

#[derive(Clone)]
pub struct NambuSystem {
    n: usize,
    label: String,
    hamiltonians: Vec<Expr>,
    fields: Vec<Field>,
    region: Region,
    perms: Vec<(f64, [u8; MAX_N])>,
    sigma_hat: DifferentialForm,
    d_sigma_hat: DifferentialForm,
    velocity_field: VectorField,
}

impl core::fmt::Debug for NambuSystem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("NambuSystem")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("hamiltonians", &self.hamiltonians.iter().map(|h| h.render()).collect::<Vec<_>>())
            .finish()
    }
}

impl NambuSystem {
    pub fn new(label: impl Into<String>, n: usize, hamiltonians: Vec<Expr>) -> Result<Self> {
        if !(MIN_N..=MAX_N).contains(&n) {
            return Err(Error::InvalidDimension(n));
        }
        if hamiltonians.len() != n - 1 {
            return Err(Error::Arity { expected: n - 1, found: hamiltonians.len() });
        }
        if let Some(v) = hamiltonians.iter().find_map(|h| h.unbound_var(n)) {
            return Err(Error::Eval(EvalError::Unbound(v)));
        }
        let fields: Vec<Field> = hamiltonians.iter().map(|h| Field::expr(h.clone(), n)).collect();
        let perms = permutations(n);
        let dim = n + 1;

        let dh: Vec<DifferentialForm> = fields.iter().map(|h| gradient_form(h, dim)).collect();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let dt = DifferentialForm::dx(dim, n);
        let tail = dh[1..].iter().try_fold(DifferentialForm::scalar(dim, Field::constant(1.0)), |acc, f| acc.wedge(f))?;
        let sigma_hat = DifferentialForm::basis(dim, &(1..n).collect::<Vec<_>>())?
            .mul_field(&Field::coord(0))
            .add(&tail.wedge(&dt)?.mul_field(&fields[0]).scale(sign))?;
        let all = dh.iter().try_fold(DifferentialForm::scalar(dim, Field::constant(1.0)), |acc, f| acc.wedge(f))?;
        let d_sigma_hat = DifferentialForm::basis(dim, &(0..n).collect::<Vec<_>>())?.add(&all.wedge(&dt)?.scale(sign))?;

        let mut comps: Vec<Field> = (0..n)
            .map(|i| {
                Field::sum(
                    perms
                        .iter()
                        .filter(|(_, p)| p[0] as usize == i)
                        .map(|(s, p)| Field::product((0..n - 1).map(|k| fields[k].partial(p[k + 1] as usize))).scale(*s)),
                )
            })
            .collect();
        comps.push(Field::constant(1.0));
        let velocity_field = VectorField::new(comps);

        Ok(NambuSystem {
            n,
            label: label.into(),
            hamiltonians,
            fields,
            region: Region::default_for(n),
            perms,
            sigma_hat,
            d_sigma_hat,
            velocity_field,
        })
    }

    /// Parses the Hamiltonians; the dimension is their count plus one.
    pub fn from_sources(label: impl Into<String>, sources: &[&str]) -> Result<Self> {
        let hs = sources.iter().map(|s| parse(s).map_err(Error::from)).collect::<Result<Vec<_>>>()?;
        NambuSystem::new(label, sources.len() + 1, hs)
    }

    /// `H₁ = ½(x1²/I₁ + x2²/I₂ + x3²/I₃)`, `H₂ = ½|x|²`.
    pub fn euler_top(i1: f64, i2: f64, i3: f64) -> Result<Self> {
        if !(i1 > 0.0 && i2 > 0.0 && i3 > 0.0) {
            return Err(Error::InvalidInput("moments of inertia must be positive".into()));
        }
        NambuSystem::from_sources(
            format!("euler-top({i1}, {i2}, {i3})"),
            &[&format!("0.5*(x1^2/{i1} + x2^2/{i2} + x3^2/{i3})"), "0.5*(x1^2 + x2^2 + x3^2)"],
        )
    }

    /// `H₁ = ½|x|²`, `H₂ = x3`: rigid rotation about the third axis.
    pub fn rotor() -> Self {
        NambuSystem::from_sources("rotor", &["0.5*(x1^2 + x2^2 + x3^2)", "x3"]).expect("built-in system")
    }

    /// `H₁ = ½ x2²`, `H₂ = x3`: velocity `(x2, 0, 0)`.
    pub fn linear_shear() -> Self {
        NambuSystem::from_sources("linear-shear", &["0.5*x2^2", "x3"]).expect("built-in system")
    }

    /// A four-dimensional system with three quadratic/linear Hamiltonians.
    pub fn demo_4d() -> Self {
        NambuSystem::from_sources(
            "demo-4d",
            &["0.5*(x1^2 + x2^2 + x3^2 + x4^2)", "0.5*(x1^2 + x2^2/2 + x3^2/3 + x4^2/4)", "x1 + x2 + x3 + x4"],
        )
        .expect("built-in system")
    }

    /// Looks up a built-in system by name.
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        let no_params = |s: Self| {
            if params.is_empty() {
                Ok(s)
            } else {
                Err(Error::Arity { expected: 0, found: params.len() })
            }
        };
        match name {
            "euler-top" => match params {
                [] => NambuSystem::euler_top(1.0, 2.0, 3.0),
                [a, b, c] => NambuSystem::euler_top(*a, *b, *c),
                _ => Err(Error::Arity { expected: 3, found: params.len() }),
            },
            "rotor" => no_params(NambuSystem::rotor()),
            "linear-shear" => no_params(NambuSystem::linear_shear()),
            "demo-4d" => no_params(NambuSystem::demo_4d()),
            _ => Err(Error::InvalidInput(format!("unknown built-in system '{name}'"))),
        }
    }

    pub const BUILTINS: [&'static str; 4] = ["euler-top", "rotor", "linear-shear", "demo-4d"];

    pub fn with_region(mut self, region: Region) -> Result<Self> {
        if region.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: region.n() });
        }
        self.region = region;
        Ok(self)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Phase-space dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hamiltonians(&self) -> &[Expr] {
        &self.hamiltonians
    }

    pub fn hamiltonian_fields(&self) -> &[Field] {
        &self.fields
    }

    /// Same system with Hamiltonians `i` and `j` swapped.
    pub fn swapped(&self, i: usize, j: usize) -> Result<Self> {
        let mut hs = self.hamiltonians.clone();
        hs.swap(i, j);
        NambuSystem::new(self.label.clone(), self.n, hs).and_then(|s| s.with_region(self.region.clone()))
    }

    pub fn sigma_hat(&self) -> &DifferentialForm {
        &self.sigma_hat
    }

    pub fn d_sigma_hat(&self) -> &DifferentialForm {
        &self.d_sigma_hat
    }

    /// `ẋ_i = ε_{i j₁…j_{n−1}} ∂_{j₁}H₁ ⋯ ∂_{j_{n−1}}H_{n−1}`, time component 1.
    pub fn velocity(&self, p: &ExtendedPoint) -> Result<TangentVector> {
        self.check_point(p)?;
        let n = self.n;
        let mut grads = [[0.0; MAX_DIM]; MAX_N];
        for (k, h) in self.hamiltonians.iter().enumerate() {
            h.gradient_into(p.coords(), (1u32 << n) - 1, &mut grads[k][..=n])?;
        }
        let mut v = [0.0; MAX_N];
        for (s, perm) in &self.perms {
            let mut term = *s;
            for k in 0..n - 1 {
                term *= grads[k][perm[k + 1] as usize];
                if term == 0.0 {
                    break;
                }
            }
            v[perm[0] as usize] += term;
        }
        Ok(TangentVector::new(&v[..n], 1.0))
    }

    /// `max |i_γ̇ dσ̂|` over the coordinate basis tuples at `p`.
    pub fn verify_dynamics(&self, p: &ExtendedPoint) -> Result<f64> {
        let v = self.velocity(p)?;
        self.dynamics_residual(p, &v)
    }

    /// As [`verify_dynamics`](Self::verify_dynamics) with a supplied velocity.
    pub fn dynamics_residual(&self, p: &ExtendedPoint, v: &TangentVector) -> Result<f64> {
        self.check_point(p)?;
        Ok(self.d_sigma_hat.at(p)?.interior(v)?.max_abs())
    }

    pub fn liouville_divergence(&self, p: &ExtendedPoint) -> Result<f64> {
        mechanics::divergence(|q| self.velocity(q), p)
    }

    /// `dσ̂` at `p`.
    pub fn d_sigma_hat_at(&self, p: &ExtendedPoint) -> Result<FormValue> {
        self.d_sigma_hat.at(p)
    }

    fn check_point(&self, p: &ExtendedPoint) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.n() });
        }
        Ok(())
    }
}

impl Dynamics for NambuSystem {
    fn n(&self) -> usize {
        self.n
    }

    fn velocity(&self, p: &ExtendedPoint) -> Result<TangentVector> {
        NambuSystem::velocity(self, p)
    }

    fn region(&self) -> &Region {
        &self.region
    }
}

impl Mechanics for NambuSystem {
    fn distinguished_form(&self) -> &DifferentialForm {
        &self.sigma_hat
    }

    fn distinguished_differential(&self) -> &DifferentialForm {
        &self.d_sigma_hat
    }

    fn velocity_field(&self) -> &VectorField {
        &self.velocity_field
    }

    fn label(&self) -> &str {
        &self.label
    }
}

/// `dh` as a one-form with field coefficients.
pub fn gradient_form(h: &Field, dim: usize) -> DifferentialForm {
    let mut f = DifferentialForm::zero(dim, 1);
    for j in 0..dim {
        f = f.add(&DifferentialForm::dx(dim, j).mul_field(&h.partial(j))).expect("same shape");
    }
    f
}

/// All permutations of `0..n` with their signs, in lexicographic order.
fn permutations(n: usize) -> Vec<(f64, [u8; MAX_N])> {
    let mut out = Vec::new();
    let mut cur = [0u8; MAX_N];
    let mut used = [false; MAX_N];
    fn rec(n: usize, depth: usize, cur: &mut [u8; MAX_N], used: &mut [bool; MAX_N], out: &mut Vec<(f64, [u8; MAX_N])>) {
        if depth == n {
            let mut inv = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if cur[a] > cur[b] {
                        inv += 1;
                    }
                }
            }
            out.push((if inv % 2 == 0 { 1.0 } else { -1.0 }, *cur));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur[depth] = i as u8;
                rec(n, depth + 1, cur, used, out);
                used[i] = false;
            }
        }
    }
    rec(n, 0, &mut cur, &mut used, &mut out);
    out
}
