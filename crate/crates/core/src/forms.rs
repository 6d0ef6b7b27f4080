//! Pointwise exterior calculus on extended phase space.
//!
//! A k-form on a `dim`-dimensional extended space is a dense array of
//! `C(dim, k)` coefficient [`Field`]s in the coordinate basis
//! `dx^{i1} ∧ … ∧ dx^{ik}` (`i1 < … < ik`, time is the last coordinate).
//! Basis elements are identified by bit masks and stored in increasing mask
//! order (colexicographic in the index tuple).
//!
//! Evaluation uses the determinant convention
//! `(dx^I)(v_1, …, v_k) = det[v_a^{i_b}]`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, JetCache, Provenance};
use crate::math;
use crate::point::{ExtendedPoint, TangentVector, MAX_DIM};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Basis masks of degree `k` in dimension `dim`, in storage order.
pub fn basis_masks(dim: usize, k: usize) -> Vec<u16> {
    let mut out: Vec<u16> = (0u16..(1u16 << dim)).filter(|m| m.count_ones() as usize == k).collect();
    out.sort_unstable();
    out
}

/// Storage index of a basis mask (colexicographic rank).
pub fn rank(mask: u16) -> usize {
    let mut r = 0;
    for (pos, i) in indices(mask).enumerate() {
        r += binomial(i, pos + 1);
    }
    r
}

/// Set bits of `mask`, ascending.
pub fn indices(mask: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |i| mask & (1 << i) != 0)
}

pub fn mask_of(idx: &[usize]) -> Result<u16> {
    let mut m = 0u16;
    for &i in idx {
        if i >= 16 || m & (1 << i) != 0 {
            return Err(Error::InvalidInput(alloc::format!("invalid basis index list {idx:?}")));
        }
        m |= 1 << i;
    }
    Ok(m)
}

/// Sign of `dx^A ∧ dx^B = ± dx^{A∪B}` for disjoint masks.
pub fn wedge_sign(a: u16, b: u16) -> f64 {
    let mut inversions = 0u32;
    for j in indices(b) {
        // elements of A greater than j
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Terms of the interior product of a basis element: `i_v dx^I =
/// Σ_r (-1)^r v^{i_r} dx^{I∖i_r}`, yielded as `(r-th index, sign, remaining mask)`.
fn interior_terms(mask: u16) -> impl Iterator<Item = (usize, f64, u16)> {
    indices(mask).enumerate().map(move |(r, i)| {
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        (i, sign, mask & !(1 << i))
    })
}

/// Sign of `dx^j ∧ dx^I = ± dx^{I∪j}` for `j ∉ I`.
fn prepend_sign(j: usize, mask: u16) -> f64 {
    if (mask & ((1u16 << j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn det(m: &mut [[f64; MAX_DIM]; MAX_DIM], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => {
            let mut d = 1.0;
            for c in 0..k {
                let mut piv = c;
                for r in c + 1..k {
                    if math::abs(m[r][c]) > math::abs(m[piv][c]) {
                        piv = r;
                    }
                }
                if m[piv][c] == 0.0 {
                    return 0.0;
                }
                if piv != c {
                    m.swap(piv, c);
                    d = -d;
                }
                d *= m[c][c];
                for r in c + 1..k {
                    let f = m[r][c] / m[c][c];
                    for cc in c..k {
                        m[r][cc] -= f * m[c][cc];
                    }
                }
            }
            d
        }
    }
}

/// A form evaluated at one point: plain coefficients in the coordinate basis.
#[derive(Clone, PartialEq)]
pub struct FormValue {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl FormValue {
    pub fn zero(dim: usize, degree: usize) -> Self {
        FormValue { dim, degree, coeffs: vec![0.0; binomial(dim, degree)] }
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = binomial(dim, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(FormValue { dim, degree, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `dx^{idx}` (indices in any order; sign adjusted).
    pub fn coeff(&self, idx: &[usize]) -> Result<f64> {
        let m = mask_of(idx)?;
        Ok(permutation_sign(idx) * self.coeffs[rank(m)])
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(&self.coeffs)
    }

    pub fn evaluate(&self, vs: &[TangentVector]) -> Result<f64> {
        if vs.len() != self.degree {
            return Err(Error::Arity { expected: self.degree, found: vs.len() });
        }
        for v in vs {
            if v.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
            }
        }
        let k = self.degree;
        let mut sum = 0.0;
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for (c, mask) in self.coeffs.iter().zip(basis_masks(self.dim, k)) {
            if *c == 0.0 {
                continue;
            }
            for (b, i) in indices(mask).enumerate() {
                for (a, v) in vs.iter().enumerate() {
                    m[a][b] = v[i];
                }
            }
            sum += c * det(&mut m, k);
        }
        Ok(sum)
    }

    pub fn interior(&self, v: &TangentVector) -> Result<FormValue> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        let mut out = FormValue::zero(self.dim, self.degree - 1);
        for (c, mask) in self.coeffs.iter().zip(basis_masks(self.dim, self.degree)) {
            if *c == 0.0 {
                continue;
            }
            for (i, sign, rest) in interior_terms(mask) {
                out.coeffs[rank(rest)] += sign * v[i] * c;
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &FormValue) -> Result<FormValue> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::DegreeOverflow { degree, dim: self.dim });
        }
        let mut out = FormValue::zero(self.dim, degree);
        let bm = basis_masks(self.dim, other.degree);
        for (a, ma) in self.coeffs.iter().zip(basis_masks(self.dim, self.degree)) {
            for (b, mb) in other.coeffs.iter().zip(&bm) {
                if ma & mb == 0 {
                    out.coeffs[rank(ma | mb)] += wedge_sign(ma, *mb) * a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FormValue) -> Result<FormValue> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(FormValue { coeffs, ..*self })
    }

    pub fn sub(&self, other: &FormValue) -> Result<FormValue> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> FormValue {
        FormValue { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|v| c * v).collect() }
    }

    fn check_same(&self, other: &FormValue) -> Result<()> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::DimensionMismatch { expected: self.coeffs.len(), found: other.coeffs.len() });
        }
        Ok(())
    }
}

impl fmt::Debug for FormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormValue(dim = {}, degree = {}, {:?})", self.dim, self.degree, self.coeffs)
    }
}

fn permutation_sign(idx: &[usize]) -> f64 {
    let mut inv = 0;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] > idx[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A differential form with field coefficients.
#[derive(Clone)]
pub struct DifferentialForm {
    dim: usize,
    degree: usize,
    coeffs: Vec<Field>,
}

impl DifferentialForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= MAX_DIM && degree <= dim, "degree {degree} form in dimension {dim}");
        DifferentialForm { dim, degree, coeffs: vec![Field::zero(); binomial(dim, degree)] }
    }

    /// A 0-form.
    pub fn scalar(dim: usize, f: Field) -> Self {
        DifferentialForm { dim, degree: 0, coeffs: vec![f] }
    }

    /// `dx^{i1} ∧ … ∧ dx^{ik}` with unit coefficient.
    pub fn basis(dim: usize, idx: &[usize]) -> Result<Self> {
        Self::from_terms(dim, idx.len(), [(idx, Field::constant(1.0))])
    }

    /// The differential `dx^i` of coordinate `i`.
    pub fn dx(dim: usize, i: usize) -> Self {
        let mut f = Self::zero(dim, 1);
        f.coeffs[i] = Field::constant(1.0);
        f
    }

    /// Sum of `coeff · dx^{idx}` terms; index lists may be in any order.
    pub fn from_terms<'a, I>(dim: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], Field)>,
    {
        if degree > dim || dim > MAX_DIM {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        let mut form = Self::zero(dim, degree);
        for (idx, f) in terms {
            if idx.len() != degree {
                return Err(Error::Arity { expected: degree, found: idx.len() });
            }
            if idx.iter().any(|&i| i >= dim) {
                return Err(Error::DimensionMismatch { expected: dim, found: idx.iter().max().unwrap() + 1 });
            }
            let m = mask_of(idx)?;
            let slot = &mut form.coeffs[rank(m)];
            *slot = slot.add(&f.scale(permutation_sign(idx)));
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Field] {
        &self.coeffs
    }

    /// Non-zero terms as `(basis mask, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (u16, &Field)> {
        basis_masks(self.dim, self.degree).into_iter().zip(&self.coeffs).filter(|(_, f)| !f.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Field::is_zero)
    }

    pub fn provenance(&self) -> Provenance {
        if self.coeffs.iter().all(|f| f.provenance() == Provenance::Analytic) {
            Provenance::Analytic
        } else {
            Provenance::Numeric
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.degree != other.degree {
            return Err(Error::Arity { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(DifferentialForm { coeffs, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        DifferentialForm { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|f| f.scale(c)).collect() }
    }

    /// `f α` for a scalar field `f`.
    pub fn mul_field(&self, f: &Field) -> Self {
        DifferentialForm { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c.mul(f)).collect() }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::DegreeOverflow { degree, dim: self.dim });
        }
        let mut acc: Vec<Vec<Field>> = vec![Vec::new(); binomial(self.dim, degree)];
        for (ma, a) in self.terms() {
            for (mb, b) in other.terms() {
                if ma & mb == 0 {
                    acc[rank(ma | mb)].push(a.mul(b).scale(wedge_sign(ma, mb)));
                }
            }
        }
        Ok(DifferentialForm { dim: self.dim, degree, coeffs: acc.into_iter().map(Field::sum).collect() })
    }

    /// `i_v α`.
    pub fn interior(&self, v: &VectorField) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        let mut acc: Vec<Vec<Field>> = vec![Vec::new(); binomial(self.dim, self.degree - 1)];
        for (mask, c) in self.terms() {
            for (i, sign, rest) in interior_terms(mask) {
                let vi = &v.comps[i];
                if !vi.is_zero() {
                    acc[rank(rest)].push(vi.mul(c).scale(sign));
                }
            }
        }
        Ok(DifferentialForm { dim: self.dim, degree: self.degree - 1, coeffs: acc.into_iter().map(Field::sum).collect() })
    }

    /// `dα = Σ_I Σ_j ∂_j α_I dx^j ∧ dx^I`.
    pub fn exterior_derivative(&self) -> Result<Self> {
        let degree = self.degree + 1;
        if degree > self.dim {
            return Err(Error::DegreeOverflow { degree, dim: self.dim });
        }
        let mut acc: Vec<Vec<Field>> = vec![Vec::new(); binomial(self.dim, degree)];
        for (mask, c) in self.terms() {
            for j in 0..self.dim {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let dc = c.partial(j);
                if !dc.is_zero() {
                    acc[rank(mask | (1 << j))].push(dc.scale(prepend_sign(j, mask)));
                }
            }
        }
        Ok(DifferentialForm { dim: self.dim, degree, coeffs: acc.into_iter().map(Field::sum).collect() })
    }

    /// `L_ξ α = i_ξ dα + d i_ξ α` (Cartan's formula).
    pub fn lie_derivative(&self, xi: &VectorField) -> Result<Self> {
        let top = if self.degree < self.dim { Some(self.exterior_derivative()?.interior(xi)?) } else { None };
        let bottom = if self.degree > 0 { Some(self.interior(xi)?.exterior_derivative()?) } else { None };
        match (top, bottom) {
            (Some(a), Some(b)) => a.add(&b),
            (Some(a), None) | (None, Some(a)) => Ok(a),
            (None, None) => Ok(Self::zero(self.dim, self.degree)),
        }
    }

    /// Coefficients at a point.
    pub fn at(&self, p: &ExtendedPoint) -> Result<FormValue> {
        self.at_coords(p.coords())
    }

    pub fn at_coords(&self, coords: &[f64]) -> Result<FormValue> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: coords.len() });
        }
        let mut cache = JetCache::new();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for f in &self.coeffs {
            coeffs.push(if f.is_zero() { 0.0 } else { f.jet_cached(coords, 0, &mut cache)?.value() });
        }
        Ok(FormValue { dim: self.dim, degree: self.degree, coeffs })
    }

    pub fn evaluate(&self, p: &ExtendedPoint, vs: &[TangentVector]) -> Result<f64> {
        if vs.len() != self.degree {
            return Err(Error::Arity { expected: self.degree, found: vs.len() });
        }
        self.at(p)?.evaluate(vs)
    }
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for (mask, c) in self.terms() {
            l.entry(&(indices(mask).collect::<Vec<_>>(), c));
        }
        l.finish()
    }
}

/// A vector field on extended phase space (last component is the time component).
#[derive(Clone)]
pub struct VectorField {
    comps: Vec<Field>,
}

impl VectorField {
    pub fn new(comps: Vec<Field>) -> Self {
        assert!(!comps.is_empty() && comps.len() <= MAX_DIM);
        VectorField { comps }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField::new(vec![Field::zero(); dim])
    }

    /// The coordinate vector field `∂_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut v = VectorField::zero(dim);
        v.comps[i] = Field::constant(1.0);
        v
    }

    /// Parses one expression per extended component (time last) for a space
    /// with `n` phase-space coordinates.
    pub fn parse(components: &[&str], n: usize) -> Result<Self> {
        if components.len() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, found: components.len() });
        }
        let comps = components.iter().map(|s| Field::parse(s, n)).collect::<Result<Vec<_>>>()?;
        Ok(VectorField::new(comps))
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Field] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Field::is_zero)
    }

    pub fn scale(&self, c: f64) -> Self {
        VectorField { comps: self.comps.iter().map(|f| f.scale(c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(VectorField { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect() })
    }

    /// `Σ c_j v_j`.
    pub fn linear_combination(terms: &[(f64, &VectorField)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidInput("empty linear combination".into()))?;
        let mut acc = VectorField::zero(first.1.dim());
        for (c, v) in terms {
            acc = acc.add(&v.scale(*c))?;
        }
        Ok(acc)
    }

    pub fn at(&self, p: &ExtendedPoint) -> Result<TangentVector> {
        self.at_coords(p.coords())
    }

    pub fn at_coords(&self, coords: &[f64]) -> Result<TangentVector> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coords.len() });
        }
        let mut cache = JetCache::new();
        let mut out = [0.0; MAX_DIM];
        for (o, f) in out.iter_mut().zip(&self.comps) {
            *o = f.jet_cached(coords, 0, &mut cache)?.value();
        }
        Ok(TangentVector::from_components(&out[..self.dim()]))
    }

    /// `J[i][j] = ∂_j v^i`.
    pub fn jacobian(&self, coords: &[f64]) -> Result<[[f64; MAX_DIM]; MAX_DIM]> {
        let d = self.dim();
        let mut cache = JetCache::new();
        let mut out = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..d {
            let jet = self.comps[i].jet_cached(coords, 1, &mut cache)?;
            for j in 0..d {
                out[i][j] = jet.grad(j);
            }
        }
        Ok(out)
    }

    /// Derivative of the scalar field `f` along this vector field, `ξ f`.
    pub fn apply(&self, f: &Field) -> Field {
        Field::sum(self.comps.iter().enumerate().map(|(j, c)| c.mul(&f.partial(j))))
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("VectorField").field(&self.comps).finish()
    }
}

/// `(Φ*_{+ε} α − Φ*_{−ε} α)(p; vs) / 2ε` along the flow `Φ` of `xi`: an
/// estimate of `(L_ξ α)(p; vs)` that does not use Cartan's formula. The
/// central differences at `ε` and `ε/2` are Richardson-combined.
///
/// The flow and its tangent map are integrated jointly with RK4.
pub fn lie_derivative_flow_check(
    xi: &VectorField,
    alpha: &DifferentialForm,
    p: &ExtendedPoint,
    vs: &[TangentVector],
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("flow-check step must be positive".into()));
    }
    if vs.len() != alpha.degree() {
        return Err(Error::Arity { expected: alpha.degree(), found: vs.len() });
    }
    let central = |h: f64| -> Result<f64> {
        let plus = pullback_along_flow(xi, alpha, p, vs, h)?;
        let minus = pullback_along_flow(xi, alpha, p, vs, -h)?;
        Ok((plus - minus) / (2.0 * h))
    };
    // Richardson on the two central differences cancels the ε² term.
    let coarse = central(eps)?;
    let fine = central(0.5 * eps)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `(Φ*_s α)(p; vs) = α(Φ_s p; DΦ_s vs)`.
pub fn pullback_along_flow(xi: &VectorField, alpha: &DifferentialForm, p: &ExtendedPoint, vs: &[TangentVector], s: f64) -> Result<f64> {
    let d = p.dim();
    if xi.dim() != d || alpha.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: xi.dim() });
    }
    let k = vs.len();
    let width = d * (1 + k);
    let mut y = vec![0.0; width];
    y[..d].copy_from_slice(p.coords());
    for (a, v) in vs.iter().enumerate() {
        y[d * (1 + a)..d * (2 + a)].copy_from_slice(v.components());
    }
    let rhs = |y: &[f64], out: &mut [f64]| -> Result<()> {
        let x = &y[..d];
        let v = xi.at_coords(x)?;
        out[..d].copy_from_slice(v.components());
        let jac = xi.jacobian(x)?;
        for a in 0..k {
            let off = d * (1 + a);
            for i in 0..d {
                out[off + i] = (0..d).map(|j| jac[i][j] * y[off + j]).sum();
            }
        }
        Ok(())
    };
    let steps = 16;
    let h = s / steps as f64;
    let mut k1 = vec![0.0; width];
    let mut k2 = vec![0.0; width];
    let mut k3 = vec![0.0; width];
    let mut k4 = vec![0.0; width];
    let mut tmp = vec![0.0; width];
    for _ in 0..steps {
        rhs(&y, &mut k1)?;
        for i in 0..width {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs(&tmp, &mut k2)?;
        for i in 0..width {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs(&tmp, &mut k3)?;
        for i in 0..width {
            tmp[i] = y[i] + h * k3[i];
        }
        rhs(&tmp, &mut k4)?;
        for i in 0..width {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let q = ExtendedPoint::from_coords(&y[..d]);
    let pushed: Vec<TangentVector> = (0..k).map(|a| TangentVector::from_components(&y[d * (1 + a)..d * (2 + a)])).collect();
    alpha.evaluate(&q, &pushed)
}
