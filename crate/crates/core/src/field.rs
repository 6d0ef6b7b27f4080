//! Scalar coefficient fields on extended phase space.
//!
//! A [`Field`] is a small immutable DAG whose leaves are expressions,
//! coordinates, constants or opaque numeric closures. Derivatives of
//! expression-backed leaves are exact up to second order (via [`Jet`]s); beyond
//! that, and for numeric leaves, central finite differences are used.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::expr::{EvalError, Expr, Jet, Scalar, MAX_JET_ORDER};
use crate::math;

/// Step for first derivatives of numeric leaves, relative to `max(1, |x|)`.
pub const FD_STEP: f64 = 1e-5;
/// Step for second derivatives of numeric leaves.
pub const FD_STEP2: f64 = 1e-4;

pub type NumericFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct Field(Arc<Node>);

enum Node {
    Const(f64),
    Coord(usize),
    Expr { expr: Expr, mask: u32 },
    Numeric(Arc<NumericFn>),
    Sum(Vec<Field>),
    Product(Vec<Field>),
    Scaled(f64, Field),
    Partial(usize, Field),
}

/// How derivatives of a field (or form) are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Provenance {
    Analytic,
    Numeric,
}

/// Per-point cache of expression-leaf jets, keyed by leaf identity.
#[derive(Default)]
pub struct JetCache {
    entries: Vec<(usize, Jet)>,
}

impl JetCache {
    pub fn new() -> Self {
        JetCache { entries: Vec::new() }
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

impl Field {
    fn wrap(n: Node) -> Field {
        Field(Arc::new(n))
    }

    pub fn zero() -> Field {
        Field::constant(0.0)
    }

    pub fn constant(c: f64) -> Field {
        Field::wrap(Node::Const(c))
    }

    /// The coordinate function for extended coordinate `i`.
    pub fn coord(i: usize) -> Field {
        Field::wrap(Node::Coord(i))
    }

    /// Expression-backed field in a space with `n` phase-space coordinates.
    pub fn expr(expr: Expr, n: usize) -> Field {
        if expr.is_constant() {
            if let Ok(c) = expr.eval_const() {
                return Field::constant(c);
            }
        }
        let mask = expr.coord_mask(n);
        Field::wrap(Node::Expr { expr, mask })
    }

    /// Parses `src` into an expression-backed field.
    pub fn parse(src: &str, n: usize) -> crate::Result<Field> {
        Ok(Field::expr(crate::expr::parse(src)?, n))
    }

    /// Opaque field; its derivatives are taken by finite differences.
    pub fn numeric(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Field {
        Field::wrap(Node::Numeric(Arc::new(f)))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn add(&self, other: &Field) -> Field {
        Field::sum([self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Field) -> Field {
        Field::product([self.clone(), other.clone()])
    }

    pub fn sum(terms: impl IntoIterator<Item = Field>) -> Field {
        let mut c = 0.0;
        let mut out = Vec::new();
        for f in terms {
            match &*f.0 {
                Node::Const(v) => c += v,
                Node::Sum(inner) => out.extend(inner.iter().cloned()),
                _ => out.push(f),
            }
        }
        if c != 0.0 {
            out.push(Field::constant(c));
        }
        match out.len() {
            0 => Field::zero(),
            1 => out.pop().unwrap(),
            _ => Field::wrap(Node::Sum(out)),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = Field>) -> Field {
        let mut c = 1.0;
        let mut out = Vec::new();
        for f in factors {
            match &*f.0 {
                Node::Const(v) => c *= v,
                Node::Scaled(s, inner) => {
                    c *= s;
                    out.push(inner.clone());
                }
                Node::Product(inner) => out.extend(inner.iter().cloned()),
                _ => out.push(f),
            }
        }
        if c == 0.0 {
            return Field::zero();
        }
        let body = match out.len() {
            0 => return Field::constant(c),
            1 => out.pop().unwrap(),
            _ => Field::wrap(Node::Product(out)),
        };
        body.scale(c)
    }

    pub fn scale(&self, c: f64) -> Field {
        if c == 1.0 {
            return self.clone();
        }
        if c == 0.0 {
            return Field::zero();
        }
        match &*self.0 {
            Node::Const(v) => Field::constant(c * v),
            Node::Scaled(s, inner) => inner.scale(c * s),
            _ => Field::wrap(Node::Scaled(c, self.clone())),
        }
    }

    /// `∂self/∂x_j`, distributed over sums and products so that partials only
    /// wrap leaves.
    pub fn partial(&self, j: usize) -> Field {
        match &*self.0 {
            Node::Const(_) => Field::zero(),
            Node::Coord(i) => Field::constant(if *i == j { 1.0 } else { 0.0 }),
            Node::Expr { mask, .. } if mask & (1 << j) == 0 => Field::zero(),
            Node::Expr { .. } | Node::Numeric(_) | Node::Partial(..) => {
                if let Node::Partial(_, inner) = &*self.0 {
                    if inner.is_independent_of(j) {
                        return Field::zero();
                    }
                }
                Field::wrap(Node::Partial(j, self.clone()))
            }
            Node::Sum(terms) => Field::sum(terms.iter().map(|f| f.partial(j))),
            Node::Product(fs) => Field::sum(
                (0..fs.len()).map(|k| Field::product(fs.iter().enumerate().map(|(i, f)| if i == k { f.partial(j) } else { f.clone() }))),
            ),
            Node::Scaled(c, inner) => inner.partial(j).scale(*c),
        }
    }

    fn is_independent_of(&self, j: usize) -> bool {
        match &*self.0 {
            Node::Const(_) => true,
            Node::Coord(i) => *i != j,
            Node::Expr { mask, .. } => mask & (1 << j) == 0,
            Node::Numeric(_) => false,
            Node::Sum(fs) | Node::Product(fs) => fs.iter().all(|f| f.is_independent_of(j)),
            Node::Scaled(_, f) | Node::Partial(_, f) => f.is_independent_of(j),
        }
    }

    /// Deepest nesting of partial derivatives above a leaf.
    pub fn derivative_depth(&self) -> usize {
        match &*self.0 {
            Node::Const(_) | Node::Coord(_) | Node::Expr { .. } | Node::Numeric(_) => 0,
            Node::Sum(fs) | Node::Product(fs) => fs.iter().map(Field::derivative_depth).max().unwrap_or(0),
            Node::Scaled(_, f) => f.derivative_depth(),
            Node::Partial(_, f) => 1 + f.derivative_depth(),
        }
    }

    fn has_numeric_leaf(&self) -> bool {
        match &*self.0 {
            Node::Numeric(_) => true,
            Node::Const(_) | Node::Coord(_) | Node::Expr { .. } => false,
            Node::Sum(fs) | Node::Product(fs) => fs.iter().any(Field::has_numeric_leaf),
            Node::Scaled(_, f) | Node::Partial(_, f) => f.has_numeric_leaf(),
        }
    }

    /// Whether values of this field are computed without finite differences.
    pub fn provenance(&self) -> Provenance {
        if self.has_numeric_leaf() || self.derivative_depth() > MAX_JET_ORDER as usize {
            Provenance::Numeric
        } else {
            Provenance::Analytic
        }
    }

    pub fn value(&self, coords: &[f64]) -> Result<f64, EvalError> {
        Ok(self.jet_cached(coords, 0, &mut JetCache::new())?.value())
    }

    pub fn jet(&self, coords: &[f64], order: u8) -> Result<Jet, EvalError> {
        self.jet_cached(coords, order, &mut JetCache::new())
    }

    /// Taylor jet of order `order` at `coords`. The cache must only be shared
    /// between evaluations at the same point.
    pub fn jet_cached(&self, coords: &[f64], order: u8, cache: &mut JetCache) -> Result<Jet, EvalError> {
        let dim = coords.len();
        match &*self.0 {
            Node::Const(c) => Ok(Jet::constant(dim, order, *c)),
            Node::Coord(i) => Ok(Jet::variable(dim, order, *i, coords[*i])),
            Node::Expr { expr, .. } => {
                let key = Arc::as_ptr(&self.0) as *const u8 as usize;
                if let Some((_, j)) = cache.entries.iter().find(|(k, j)| *k == key && j.order() >= order) {
                    return Ok(j.truncated(order));
                }
                let j = expr.jet(coords, order)?;
                cache.entries.retain(|(k, _)| *k != key);
                cache.entries.push((key, j));
                Ok(j)
            }
            Node::Numeric(f) => numeric_jet(f.as_ref(), coords, order),
            Node::Sum(fs) => {
                let mut acc = fs[0].jet_cached(coords, order, cache)?;
                for f in &fs[1..] {
                    acc = acc.add(&f.jet_cached(coords, order, cache)?);
                }
                Ok(acc)
            }
            Node::Product(fs) => {
                let mut acc = fs[0].jet_cached(coords, order, cache)?;
                for f in &fs[1..] {
                    acc = acc.mul(&f.jet_cached(coords, order, cache)?);
                }
                Ok(acc)
            }
            Node::Scaled(c, f) => Ok(f.jet_cached(coords, order, cache)?.scale(*c)),
            Node::Partial(j, f) => {
                if order < MAX_JET_ORDER {
                    return Ok(f.jet_cached(coords, order + 1, cache)?.partial(*j));
                }
                // Out of analytic capacity: central difference of the inner jet.
                let h = FD_STEP * math::abs(coords[*j]).max(1.0);
                let mut p = [0.0; crate::MAX_DIM];
                p[..dim].copy_from_slice(coords);
                p[*j] = coords[*j] + h;
                let plus = f.jet_cached(&p[..dim], order, &mut JetCache::new())?;
                p[*j] = coords[*j] - h;
                let minus = f.jet_cached(&p[..dim], order, &mut JetCache::new())?;
                Ok(plus.sub(&minus).scale(0.5 / h))
            }
        }
    }
}

impl core::fmt::Debug for Field {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::Coord(i) => write!(f, "c{i}"),
            Node::Expr { expr, .. } => write!(f, "{expr}"),
            Node::Numeric(_) => f.write_str("<numeric>"),
            Node::Sum(fs) => f.debug_tuple("Sum").field(fs).finish(),
            Node::Product(fs) => f.debug_tuple("Product").field(fs).finish(),
            Node::Scaled(c, inner) => write!(f, "{c}*{inner:?}"),
            Node::Partial(j, inner) => write!(f, "d{j}({inner:?})"),
        }
    }
}

fn numeric_jet(f: &NumericFn, coords: &[f64], order: u8) -> Result<Jet, EvalError> {
    let dim = coords.len();
    let mut p = [0.0; crate::MAX_DIM];
    p[..dim].copy_from_slice(coords);
    let eval = |p: &[f64]| -> Result<f64, EvalError> {
        let v = f(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Domain { op: "numeric field", value: v })
        }
    };
    let v0 = eval(coords)?;
    let mut jet = Jet::constant(dim, order, v0);
    if order >= 1 {
        for i in 0..dim {
            let h = FD_STEP * math::abs(coords[i]).max(1.0);
            p[i] = coords[i] + h;
            let a = eval(&p[..dim])?;
            p[i] = coords[i] - h;
            let b = eval(&p[..dim])?;
            p[i] = coords[i];
            jet.set_grad(i, (a - b) / (2.0 * h));
        }
    }
    if order >= 2 {
        for i in 0..dim {
            let hi = FD_STEP2 * math::abs(coords[i]).max(1.0);
            for j in i..dim {
                let hj = FD_STEP2 * math::abs(coords[j]).max(1.0);
                let v = if i == j {
                    p[i] = coords[i] + hi;
                    let a = eval(&p[..dim])?;
                    p[i] = coords[i] - hi;
                    let b = eval(&p[..dim])?;
                    p[i] = coords[i];
                    (a - 2.0 * v0 + b) / (hi * hi)
                } else {
                    let mut s = 0.0;
                    for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                        p[i] = coords[i] + si * hi;
                        p[j] = coords[j] + sj * hj;
                        s += w * eval(&p[..dim])?;
                    }
                    p[i] = coords[i];
                    p[j] = coords[j];
                    s / (4.0 * hi * hj)
                };
                jet.set_hess(i, j, v);
                jet.set_hess(j, i, v);
            }
        }
    }
    Ok(jet)
}
