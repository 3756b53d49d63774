//! Second-order forward-mode jets in two variables.
//!
//! A [`Jet2`] carries a value with its gradient and Hessian with respect to two
//! chart parameters. Arithmetic propagates all three exactly, so immersions written
//! once in terms of jets yield exact tangents and second derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// `(f, ∂f, ∂²f)` with the Hessian stored as `[f_11, f_12, f_22]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; 2],
    pub h: [f64; 3],
}

impl Jet2 {
    pub const fn constant(v: f64) -> Self {
        Self {
            v,
            g: [0.0; 2],
            h: [0.0; 3],
        }
    }

    /// The coordinate function `u^i` with value `v`.
    pub const fn variable(v: f64, i: usize) -> Self {
        let mut g = [0.0; 2];
        g[i] = 1.0;
        Self { v, g, h: [0.0; 3] }
    }

    /// Hessian entry `∂_i∂_j f`.
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.h[0],
            (1, 1) => self.h[2],
            _ => self.h[1],
        }
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let g = self.g;
        Self {
            v: f0,
            g: [f1 * g[0], f1 * g[1]],
            h: [
                f1 * self.h[0] + f2 * g[0] * g[0],
                f1 * self.h[1] + f2 * g[0] * g[1],
                f1 * self.h[2] + f2 * g[1] * g[1],
            ],
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            v: a * self.v,
            g: [a * self.g[0], a * self.g[1]],
            h: [a * self.h[0], a * self.h[1], a * self.h[2]],
        }
    }

    pub fn recip(&self) -> Self {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn atan(&self) -> Self {
        let x = self.v;
        let d = 1.0 / (1.0 + x * x);
        self.chain(x.atan(), d, -2.0 * x * d * d)
    }

    pub fn atanh(&self) -> Self {
        let x = self.v;
        let d = 1.0 / (1.0 - x * x);
        self.chain(x.atanh(), d, 2.0 * x * d * d)
    }

    pub fn powi(&self, n: i32) -> Self {
        let x = self.v;
        match n {
            0 => Self::constant(1.0),
            1 => *self,
            _ => self.chain(
                x.powi(n),
                n as f64 * x.powi(n - 1),
                (n * (n - 1)) as f64 * x.powi(n - 2),
            ),
        }
    }

    pub fn powf(&self, p: f64) -> Self {
        let x = self.v;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            g: [self.g[0] + o.g[0], self.g[1] + o.g[1]],
            h: [self.h[0] + o.h[0], self.h[1] + o.h[1], self.h[2] + o.h[2]],
        }
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self, o);
        Self {
            v: a.v * b.v,
            g: [a.g[0] * b.v + a.v * b.g[0], a.g[1] * b.v + a.v * b.g[1]],
            h: [
                a.h[0] * b.v + 2.0 * a.g[0] * b.g[0] + a.v * b.h[0],
                a.h[1] * b.v + a.g[0] * b.g[1] + a.g[1] * b.g[0] + a.v * b.h[1],
                a.h[2] * b.v + 2.0 * a.g[1] * b.g[1] + a.v * b.h[2],
            ],
        }
    }
}

impl Div for Jet2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.v += o;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.v -= o;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        self.scale(o)
    }
}

impl Div<f64> for Jet2 {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self.scale(1.0 / o)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        o + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        -o + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        o.scale(self)
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        o.recip().scale(self)
    }
}
