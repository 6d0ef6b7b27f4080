use super::Scalar;
use crate::math;

/// Forward-mode dual number `value + derivative·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub derivative: f64,
}

impl Dual {
    pub fn new(value: f64, derivative: f64) -> Self {
        Dual { value, derivative }
    }

    pub fn constant(value: f64) -> Self {
        Dual { value, derivative: 0.0 }
    }

    /// A variable seeded with unit derivative.
    pub fn variable(value: f64) -> Self {
        Dual { value, derivative: 1.0 }
    }

    // f(a + a'ε) = f(a) + f'(a) a' ε
    fn chain(&self, f: f64, df: f64) -> Dual {
        Dual { value: f, derivative: df * self.derivative }
    }
}

impl Scalar for Dual {
    fn lift(&self, c: f64) -> Dual {
        Dual::constant(c)
    }
    fn re(&self) -> f64 {
        self.value
    }
    fn add(&self, o: &Dual) -> Dual {
        Dual::new(self.value + o.value, self.derivative + o.derivative)
    }
    fn sub(&self, o: &Dual) -> Dual {
        Dual::new(self.value - o.value, self.derivative - o.derivative)
    }
    fn mul(&self, o: &Dual) -> Dual {
        Dual::new(self.value * o.value, self.value * o.derivative + self.derivative * o.value)
    }
    fn div(&self, o: &Dual) -> Dual {
        let q = self.value / o.value;
        Dual::new(q, (self.derivative - q * o.derivative) / o.value)
    }
    fn neg(&self) -> Dual {
        Dual::new(-self.value, -self.derivative)
    }
    fn sin(&self) -> Dual {
        self.chain(math::sin(self.value), math::cos(self.value))
    }
    fn cos(&self) -> Dual {
        self.chain(math::cos(self.value), -math::sin(self.value))
    }
    fn exp(&self) -> Dual {
        let e = math::exp(self.value);
        self.chain(e, e)
    }
    fn ln(&self) -> Dual {
        self.chain(math::ln(self.value), 1.0 / self.value)
    }
    fn sqrt(&self) -> Dual {
        let s = math::sqrt(self.value);
        self.chain(s, 0.5 / s)
    }
    fn powi(&self, k: i32) -> Dual {
        match k {
            0 => Dual::constant(1.0),
            1 => *self,
            _ => self.chain(math::powi(self.value, k), k as f64 * math::powi(self.value, k - 1)),
        }
    }
    fn powf(&self, c: f64) -> Dual {
        if c == 0.0 {
            return Dual::constant(1.0);
        }
        if c == 1.0 {
            return *self;
        }
        self.chain(math::pow(self.value, c), c * math::pow(self.value, c - 1.0))
    }
}
