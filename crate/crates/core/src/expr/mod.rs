//! Scalar-field expressions over extended phase space.
//!
//! Variables are the fixed names `x1`…`x6` and `t`, with `q1`…`q3`, `p1`…`p3`
//! as canonical aliases (in a system with `m` degrees of freedom `qi` is
//! coordinate `i` and `pi` is coordinate `m + i`) and `u`, `v`, `w` as curve or
//! surface parameters. Constants are decimal literals, `pi` and `e`.
//!
//! Grammar, loosest to tightest: `+ -` (left), `* /` (left), unary `-`, `^`
//! (right). Functions are `sin cos exp log sqrt`, each of one argument.
//! `0^0` evaluates to 1.

mod dual;
mod jet;
mod parse;
mod scalar;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use dual::Dual;
pub use jet::{Jet, MAX_JET_ORDER};
pub use parse::{parse, ParseError, ParseErrorKind};
pub use scalar::Scalar;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// `x1`…`x6` (1-based).
    X(u8),
    /// Canonical position `q1`…`q3`.
    Q(u8),
    /// Canonical momentum `p1`…`p3`.
    P(u8),
    /// Time.
    T,
    /// Curve/surface parameter `u`, `v`, `w` (0, 1, 2).
    Param(u8),
}

impl Var {
    /// Index into extended coordinates with `n` phase-space coordinates.
    pub fn coord_index(self, n: usize) -> Option<usize> {
        match self {
            Var::X(k) => {
                let i = k as usize - 1;
                (i < n).then_some(i)
            }
            Var::Q(k) | Var::P(k) => {
                if n % 2 != 0 {
                    return None;
                }
                let m = n / 2;
                let i = k as usize - 1;
                if i >= m {
                    return None;
                }
                Some(if matches!(self, Var::Q(_)) { i } else { m + i })
            }
            Var::T => Some(n),
            Var::Param(_) => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(k) => write!(f, "x{k}"),
            Var::Q(k) => write!(f, "q{k}"),
            Var::P(k) => write!(f, "p{k}"),
            Var::T => f.write_str("t"),
            Var::Param(i) => f.write_str(["u", "v", "w"][*i as usize]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Immutable expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    Unbound(Var),
    /// Operation outside its real domain (log of a non-positive number,
    /// division by zero, ...).
    Domain {
        op: &'static str,
        value: f64,
    },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Unbound(v) => write!(f, "unbound variable '{v}'"),
            EvalError::Domain { op, value } => write!(f, "domain error: {op} at {value}"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Variable assignment: extended coordinates (time last) plus curve parameters.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<'a> {
    pub coords: &'a [f64],
    pub params: &'a [f64],
}

impl<'a> Bindings<'a> {
    pub fn coords(coords: &'a [f64]) -> Self {
        Bindings { coords, params: &[] }
    }

    pub fn params(params: &'a [f64]) -> Self {
        Bindings { coords: &[], params }
    }

    /// Phase-space dimension implied by the coordinates.
    pub fn n(&self) -> usize {
        self.coords.len().saturating_sub(1)
    }

    fn index(&self, v: Var) -> Result<Slot, EvalError> {
        match v {
            Var::Param(i) if (i as usize) < self.params.len() => Ok(Slot::Param(i as usize)),
            Var::Param(_) => Err(EvalError::Unbound(v)),
            _ if self.coords.is_empty() => Err(EvalError::Unbound(v)),
            _ => v.coord_index(self.n()).map(Slot::Coord).ok_or(EvalError::Unbound(v)),
        }
    }
}

enum Slot {
    Coord(usize),
    Param(usize),
}

impl Expr {
    pub fn num(c: f64) -> Expr {
        Expr::Num(c)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    /// True when the expression mentions no variables.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => f(*v),
            Expr::Neg(a) | Expr::Call(_, a) => a.visit_vars(f),
            Expr::Bin(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    /// First variable that does not name an extended coordinate for `n`
    /// phase-space coordinates.
    pub fn unbound_var(&self, n: usize) -> Option<Var> {
        let mut bad = None;
        self.visit_vars(&mut |v| {
            if bad.is_none() && v.coord_index(n).is_none() {
                bad = Some(v);
            }
        });
        bad
    }

    /// Bit mask of the extended coordinates (with `n` phase-space coordinates)
    /// the expression depends on.
    pub fn coord_mask(&self, n: usize) -> u32 {
        let mut mask = 0u32;
        self.visit_vars(&mut |v| {
            if let Some(i) = v.coord_index(n) {
                mask |= 1 << i;
            }
        });
        mask
    }

    /// Evaluates the tree in any [`Scalar`] type; `var` resolves variables.
    pub fn eval_scalar<S, F>(&self, proto: &S, var: &F) -> Result<S, EvalError>
    where
        S: Scalar,
        F: Fn(Var) -> Result<S, EvalError>,
    {
        let out = match self {
            Expr::Num(c) => proto.lift(*c),
            Expr::Var(v) => var(*v)?,
            Expr::Neg(a) => a.eval_scalar(proto, var)?.neg(),
            Expr::Bin(op, a, b) => {
                if *op == BinOp::Pow {
                    return pow(a, b, proto, var);
                }
                let x = a.eval_scalar(proto, var)?;
                let y = b.eval_scalar(proto, var)?;
                match op {
                    BinOp::Add => x.add(&y),
                    BinOp::Sub => x.sub(&y),
                    BinOp::Mul => x.mul(&y),
                    BinOp::Div => {
                        if y.re() == 0.0 {
                            return Err(EvalError::Domain { op: "division by zero", value: x.re() });
                        }
                        x.div(&y)
                    }
                    BinOp::Pow => unreachable!(),
                }
            }
            Expr::Call(func, a) => {
                let x = a.eval_scalar(proto, var)?;
                let r = x.re();
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log if r <= 0.0 => return Err(EvalError::Domain { op: "log", value: r }),
                    Func::Log => x.ln(),
                    Func::Sqrt if r < 0.0 => return Err(EvalError::Domain { op: "sqrt", value: r }),
                    Func::Sqrt => x.sqrt(),
                }
            }
        };
        if !out.re().is_finite() {
            return Err(EvalError::Domain { op: "non-finite result", value: out.re() });
        }
        Ok(out)
    }

    pub fn eval(&self, b: &Bindings<'_>) -> Result<f64, EvalError> {
        self.eval_scalar(&0.0, &|v| {
            b.index(v).map(|s| match s {
                Slot::Coord(i) => b.coords[i],
                Slot::Param(i) => b.params[i],
            })
        })
    }

    /// Evaluates at extended coordinates (time last).
    pub fn eval_at(&self, coords: &[f64]) -> Result<f64, EvalError> {
        self.eval(&Bindings::coords(coords))
    }

    /// Evaluates an expression without variables.
    pub fn eval_const(&self) -> Result<f64, EvalError> {
        self.eval(&Bindings { coords: &[], params: &[] })
    }

    /// Directional derivative by one forward-mode pass: `seed[i]` is the dual
    /// part given to extended coordinate `i`.
    pub fn eval_dual(&self, coords: &[f64], seed: &[f64]) -> Result<Dual, EvalError> {
        let b = Bindings::coords(coords);
        self.eval_scalar(&Dual::constant(0.0), &|v| {
            b.index(v).map(|s| match s {
                Slot::Coord(i) => Dual::new(coords[i], seed[i]),
                Slot::Param(_) => unreachable!(),
            })
        })
    }

    /// `∂e/∂coord_j` for every extended coordinate (spatial then `t`), one
    /// dual pass per coordinate.
    pub fn gradient(&self, coords: &[f64]) -> Result<Vec<f64>, EvalError> {
        let mut out = vec![0.0; coords.len()];
        self.gradient_into(coords, u32::MAX, &mut out)?;
        Ok(out)
    }

    /// Like [`gradient`](Self::gradient) but only for coordinates in `mask`;
    /// other entries of `out` are set to zero.
    pub fn gradient_into(&self, coords: &[f64], mask: u32, out: &mut [f64]) -> Result<(), EvalError> {
        let b = Bindings::coords(coords);
        for (j, o) in out.iter_mut().enumerate() {
            *o = 0.0;
            if mask & (1 << j) == 0 {
                continue;
            }
            let d = self.eval_scalar(&Dual::constant(0.0), &|v| {
                b.index(v).map(|s| match s {
                    Slot::Coord(i) => Dual::new(coords[i], if i == j { 1.0 } else { 0.0 }),
                    Slot::Param(_) => unreachable!(),
                })
            })?;
            *o = d.derivative;
        }
        Ok(())
    }

    /// Value, gradient and (for `order == 2`) Hessian in one pass.
    pub fn jet(&self, coords: &[f64], order: u8) -> Result<Jet, EvalError> {
        let dim = coords.len();
        let b = Bindings::coords(coords);
        self.eval_scalar(&Jet::constant(dim, order, 0.0), &|v| {
            b.index(v).map(|s| match s {
                Slot::Coord(i) => Jet::variable(dim, order, i, coords[i]),
                Slot::Param(_) => unreachable!(),
            })
        })
    }

    /// Renders a fully parenthesized source string that parses back to an
    /// expression with identical values.
    pub fn render(&self) -> String {
        alloc::format!("{self}")
    }
}

fn pow<S, F>(base: &Expr, exponent: &Expr, proto: &S, var: &F) -> Result<S, EvalError>
where
    S: Scalar,
    F: Fn(Var) -> Result<S, EvalError>,
{
    let x = base.eval_scalar(proto, var)?;
    let r = x.re();
    if exponent.is_constant() {
        let c = exponent.eval_const()?;
        if c == math::round(c) && math::abs(c) <= i32::MAX as f64 {
            let k = c as i32;
            if r == 0.0 && k < 0 {
                return Err(EvalError::Domain { op: "zero to a negative power", value: c });
            }
            return Ok(x.powi(k));
        }
        if r < 0.0 {
            return Err(EvalError::Domain { op: "negative base with fractional exponent", value: r });
        }
        if r == 0.0 && c < 0.0 {
            return Err(EvalError::Domain { op: "zero to a negative power", value: c });
        }
        return Ok(x.powf(c));
    }
    if r <= 0.0 {
        return Err(EvalError::Domain { op: "non-positive base with variable exponent", value: r });
    }
    let y = exponent.eval_scalar(proto, var)?;
    Ok(y.mul(&x.ln()).exp())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => write!(f, "(-{:?})", -c),
            Expr::Num(c) => write!(f, "{c:?}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl core::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Expr, ParseError> {
        parse(s)
    }
}
