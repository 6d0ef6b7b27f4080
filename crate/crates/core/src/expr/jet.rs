use super::Scalar;
use crate::math;
use crate::point::MAX_DIM;

/// Truncated second-order Taylor expansion of a scalar field in all extended
/// coordinates at once: value, gradient and Hessian.
///
/// `order` bounds which parts are meaningful (0: value, 1: + gradient,
/// 2: + Hessian); arithmetic only touches the parts below it.
#[derive(Clone, Copy)]
pub struct Jet {
    order: u8,
    dim: u8,
    v: f64,
    g: [f64; MAX_DIM],
    h: [[f64; MAX_DIM]; MAX_DIM],
}

pub const MAX_JET_ORDER: u8 = 2;

impl Jet {
    pub fn constant(dim: usize, order: u8, c: f64) -> Jet {
        debug_assert!(dim <= MAX_DIM && order <= MAX_JET_ORDER);
        Jet { order, dim: dim as u8, v: c, g: [0.0; MAX_DIM], h: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    /// The coordinate function `x_index` expanded at `value`.
    pub fn variable(dim: usize, order: u8, index: usize, value: f64) -> Jet {
        let mut j = Jet::constant(dim, order, value);
        if order >= 1 {
            j.g[index] = 1.0;
        }
        j
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn grad(&self, i: usize) -> f64 {
        debug_assert!(self.order >= 1);
        self.g[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        debug_assert!(self.order >= 2);
        self.h[i][j]
    }

    pub(crate) fn set_grad(&mut self, i: usize, v: f64) {
        self.g[i] = v;
    }

    pub(crate) fn set_hess(&mut self, i: usize, j: usize, v: f64) {
        self.h[i][j] = v;
    }

    /// Drops Taylor parts above `order`.
    pub fn truncated(mut self, order: u8) -> Jet {
        debug_assert!(order <= self.order);
        self.order = order;
        self
    }

    /// Jet of `∂_j self` (one order lower).
    pub fn partial(&self, j: usize) -> Jet {
        debug_assert!(self.order >= 1);
        let mut out = Jet::constant(self.dim(), self.order - 1, self.g[j]);
        if out.order >= 1 {
            for k in 0..self.dim() {
                out.g[k] = self.h[j][k];
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Jet {
        let mut out = *self;
        out.v *= c;
        let d = self.dim();
        if self.order >= 1 {
            for i in 0..d {
                out.g[i] *= c;
            }
        }
        if self.order >= 2 {
            for i in 0..d {
                for j in 0..d {
                    out.h[i][j] *= c;
                }
            }
        }
        out
    }

    fn zip(&self, o: &Jet, s: f64) -> Jet {
        let mut out = *self;
        let order = self.order.min(o.order);
        out.order = order;
        out.v = self.v + s * o.v;
        let d = self.dim();
        if order >= 1 {
            for i in 0..d {
                out.g[i] = self.g[i] + s * o.g[i];
            }
        }
        if order >= 2 {
            for i in 0..d {
                for j in 0..d {
                    out.h[i][j] = self.h[i][j] + s * o.h[i][j];
                }
            }
        }
        out
    }

    /// `f ∘ self` given `f`, `f'`, `f''` at the value.
    fn compose(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let mut out = Jet::constant(self.dim(), self.order, f0);
        let d = self.dim();
        if self.order >= 1 {
            for i in 0..d {
                out.g[i] = f1 * self.g[i];
            }
        }
        if self.order >= 2 {
            for i in 0..d {
                for j in 0..d {
                    out.h[i][j] = f1 * self.h[i][j] + f2 * (self.g[i] * self.g[j]);
                }
            }
        }
        out
    }
}

impl core::fmt::Debug for Jet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let d = self.dim();
        let mut s = f.debug_struct("Jet");
        s.field("order", &self.order).field("value", &self.v);
        if self.order >= 1 {
            s.field("grad", &&self.g[..d]);
        }
        s.finish()
    }
}

impl Scalar for Jet {
    fn lift(&self, c: f64) -> Jet {
        Jet::constant(self.dim(), self.order, c)
    }
    fn re(&self) -> f64 {
        self.v
    }
    fn add(&self, o: &Jet) -> Jet {
        self.zip(o, 1.0)
    }
    fn sub(&self, o: &Jet) -> Jet {
        self.zip(o, -1.0)
    }
    fn mul(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut out = Jet::constant(self.dim(), order, self.v * o.v);
        let d = self.dim();
        if order >= 1 {
            for i in 0..d {
                out.g[i] = self.v * o.g[i] + o.v * self.g[i];
            }
        }
        if order >= 2 {
            for i in 0..d {
                for j in 0..d {
                    out.h[i][j] = self.v * o.h[i][j] + o.v * self.h[i][j] + (self.g[i] * o.g[j] + o.g[i] * self.g[j]);
                }
            }
        }
        out
    }
    fn div(&self, o: &Jet) -> Jet {
        let r = 1.0 / o.v;
        let recip = o.compose(r, -r * r, 2.0 * r * r * r);
        self.mul(&recip)
    }
    fn neg(&self) -> Jet {
        self.scale(-1.0)
    }
    fn sin(&self) -> Jet {
        let (s, c) = (math::sin(self.v), math::cos(self.v));
        self.compose(s, c, -s)
    }
    fn cos(&self) -> Jet {
        let (s, c) = (math::sin(self.v), math::cos(self.v));
        self.compose(c, -s, -c)
    }
    fn exp(&self) -> Jet {
        let e = math::exp(self.v);
        self.compose(e, e, e)
    }
    fn ln(&self) -> Jet {
        let r = 1.0 / self.v;
        self.compose(math::ln(self.v), r, -r * r)
    }
    fn sqrt(&self) -> Jet {
        let s = math::sqrt(self.v);
        self.compose(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn powi(&self, k: i32) -> Jet {
        match k {
            0 => self.lift(1.0),
            1 => *self,
            2 => self.mul(self),
            _ => {
                let kf = k as f64;
                self.compose(math::powi(self.v, k), kf * math::powi(self.v, k - 1), kf * (kf - 1.0) * math::powi(self.v, k - 2))
            }
        }
    }
    fn powf(&self, c: f64) -> Jet {
        if c == 0.0 {
            return self.lift(1.0);
        }
        if c == 1.0 {
            return *self;
        }
        self.compose(math::pow(self.v, c), c * math::pow(self.v, c - 1.0), c * (c - 1.0) * math::pow(self.v, c - 2.0))
    }
}
