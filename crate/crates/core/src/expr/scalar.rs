use crate::math;

/// Number types an [`Expr`](super::Expr) can be evaluated in: plain `f64`,
/// forward-mode [`Dual`](super::Dual) numbers and second-order [`Jet`](super::Jet)s.
pub trait Scalar: Clone {
    /// A constant with the same shape (seed layout) as `self`.
    fn lift(&self, c: f64) -> Self;
    /// The real (value) part.
    fn re(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
    fn powf(&self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> f64 {
        c
    }
    fn re(&self) -> f64 {
        *self
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn div(&self, o: &f64) -> f64 {
        self / o
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn sin(&self) -> f64 {
        math::sin(*self)
    }
    fn cos(&self) -> f64 {
        math::cos(*self)
    }
    fn exp(&self) -> f64 {
        math::exp(*self)
    }
    fn ln(&self) -> f64 {
        math::ln(*self)
    }
    fn sqrt(&self) -> f64 {
        math::sqrt(*self)
    }
    fn powi(&self, k: i32) -> f64 {
        math::powi(*self, k)
    }
    fn powf(&self, c: f64) -> f64 {
        math::pow(*self, c)
    }
}
