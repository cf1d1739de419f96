//! Truncated forward-mode derivative arithmetic.
//!
//! [`Deriv3`] carries a scalar value together with its first three derivatives
//! with respect to a single curve parameter. Arithmetic propagates derivatives
//! exactly (Leibniz through third order, Faà di Bruno for composition), which
//! is what lets the metric catalog supply closed-form order-3 jets without any
//! hand-derived third derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// A value and its first three derivatives along one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deriv3 {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Deriv3 {
    pub const fn constant(c: f64) -> Self {
        Deriv3 { f: c, d1: 0.0, d2: 0.0, d3: 0.0 }
    }

    /// The identity function evaluated at `x`.
    pub const fn var(x: f64) -> Self {
        Deriv3 { f: x, d1: 1.0, d2: 0.0, d3: 0.0 }
    }

    /// Derivative of order `k` (0 ≤ k ≤ 3).
    pub fn order(&self, k: usize) -> f64 {
        match k {
            0 => self.f,
            1 => self.d1,
            2 => self.d2,
            3 => self.d3,
            _ => panic!("Deriv3 carries derivatives up to order 3, asked for {k}"),
        }
    }

    /// Compose an outer function with known derivatives at `self.f`.
    ///
    /// `g0..g3` are g(u), g'(u), g''(u), g'''(u) at u = self.f; the chain rule
    /// through third order gives the derivatives of g(u(x)).
    fn compose(self, g0: f64, g1: f64, g2: f64, g3: f64) -> Self {
        let u = self;
        Deriv3 {
            f: g0,
            d1: g1 * u.d1,
            d2: g2 * u.d1 * u.d1 + g1 * u.d2,
            d3: g3 * u.d1 * u.d1 * u.d1 + 3.0 * g2 * u.d1 * u.d2 + g1 * u.d3,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.f.exp();
        self.compose(e, e, e, e)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.f.sin_cos();
        self.compose(s, c, -s, -c)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.f.sin_cos();
        self.compose(c, -s, -c, s)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.f.sinh(), self.f.cosh());
        self.compose(s, c, s, c)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.f.sinh(), self.f.cosh());
        self.compose(c, s, c, s)
    }

    /// Real power, valid for positive base.
    pub fn powf(self, p: f64) -> Self {
        let u = self.f;
        self.compose(
            u.powf(p),
            p * u.powf(p - 1.0),
            p * (p - 1.0) * u.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * u.powf(p - 3.0),
        )
    }

    pub fn recip(self) -> Self {
        let u = self.f;
        let u2 = u * u;
        self.compose(1.0 / u, -1.0 / u2, 2.0 / (u2 * u), -6.0 / (u2 * u2))
    }

    pub fn squared(self) -> Self {
        self * self
    }
}

impl Add for Deriv3 {
    type Output = Deriv3;
    fn add(self, o: Deriv3) -> Deriv3 {
        Deriv3 { f: self.f + o.f, d1: self.d1 + o.d1, d2: self.d2 + o.d2, d3: self.d3 + o.d3 }
    }
}

impl Sub for Deriv3 {
    type Output = Deriv3;
    fn sub(self, o: Deriv3) -> Deriv3 {
        Deriv3 { f: self.f - o.f, d1: self.d1 - o.d1, d2: self.d2 - o.d2, d3: self.d3 - o.d3 }
    }
}

impl Neg for Deriv3 {
    type Output = Deriv3;
    fn neg(self) -> Deriv3 {
        Deriv3 { f: -self.f, d1: -self.d1, d2: -self.d2, d3: -self.d3 }
    }
}

impl Mul for Deriv3 {
    type Output = Deriv3;
    fn mul(self, o: Deriv3) -> Deriv3 {
        // Leibniz through third order
        Deriv3 {
            f: self.f * o.f,
            d1: self.d1 * o.f + self.f * o.d1,
            d2: self.d2 * o.f + 2.0 * self.d1 * o.d1 + self.f * o.d2,
            d3: self.d3 * o.f + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.f * o.d3,
        }
    }
}

impl Mul<f64> for Deriv3 {
    type Output = Deriv3;
    fn mul(self, c: f64) -> Deriv3 {
        Deriv3 { f: self.f * c, d1: self.d1 * c, d2: self.d2 * c, d3: self.d3 * c }
    }
}

impl Div for Deriv3 {
    type Output = Deriv3;
    fn div(self, o: Deriv3) -> Deriv3 {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_derivatives() {
        let x = Deriv3::var(0.7);
        let e = x.exp();
        let v = 0.7f64.exp();
        assert_relative_eq!(e.f, v, epsilon = 1e-14);
        assert_relative_eq!(e.d1, v, epsilon = 1e-14);
        assert_relative_eq!(e.d2, v, epsilon = 1e-14);
        assert_relative_eq!(e.d3, v, epsilon = 1e-14);
    }

    #[test]
    fn sin_derivatives() {
        let x = Deriv3::var(1.1);
        let s = x.sin();
        assert_relative_eq!(s.f, 1.1f64.sin(), epsilon = 1e-14);
        assert_relative_eq!(s.d1, 1.1f64.cos(), epsilon = 1e-14);
        assert_relative_eq!(s.d2, -1.1f64.sin(), epsilon = 1e-14);
        assert_relative_eq!(s.d3, -1.1f64.cos(), epsilon = 1e-14);
    }

    #[test]
    fn power_derivatives() {
        // t^(2/3) at t = 1.5
        let p = 2.0 / 3.0;
        let t = 1.5f64;
        let q = Deriv3::var(t).powf(p);
        assert_relative_eq!(q.f, t.powf(p), epsilon = 1e-14);
        assert_relative_eq!(q.d1, p * t.powf(p - 1.0), epsilon = 1e-14);
        assert_relative_eq!(q.d2, p * (p - 1.0) * t.powf(p - 2.0), epsilon = 1e-14);
        assert_relative_eq!(q.d3, p * (p - 1.0) * (p - 2.0) * t.powf(p - 3.0), epsilon = 1e-14);
    }

    #[test]
    fn product_rule_matches_expansion() {
        // (sin x · e^x)''' = e^x(2cos x - 2 sin x)  etc.; compare against
        // symbolically expanded derivatives at a generic point.
        let x = 0.4;
        let v = Deriv3::var(x);
        let prod = v.sin() * v.exp();
        let (s, c, e) = (x.sin(), x.cos(), x.exp());
        assert_relative_eq!(prod.f, s * e, epsilon = 1e-14);
        assert_relative_eq!(prod.d1, e * (s + c), epsilon = 1e-14);
        assert_relative_eq!(prod.d2, 2.0 * e * c, epsilon = 1e-14);
        assert_relative_eq!(prod.d3, 2.0 * e * (c - s), epsilon = 1e-14);
    }

    #[test]
    fn quotient_and_chain() {
        // 1/(1 - 2/r) at r = 10 (a Schwarzschild-style factor)
        let r = 10.0;
        let f = (Deriv3::constant(1.0) - Deriv3::constant(2.0) * Deriv3::var(r).recip()).recip();
        let u = 1.0 - 2.0 / r;
        assert_relative_eq!(f.f, 1.0 / u, epsilon = 1e-14);
        // d/dr u = 2/r^2, so f' = -(2/r^2)/u^2
        assert_relative_eq!(f.d1, -(2.0 / (r * r)) / (u * u), epsilon = 1e-14);
        // finite-difference cross-check of the higher orders
        let h = 1e-4;
        let g = |r: f64| 1.0 / (1.0 - 2.0 / r);
        let d2_fd = (g(r + h) - 2.0 * g(r) + g(r - h)) / (h * h);
        assert_relative_eq!(f.d2, d2_fd, epsilon = 1e-6);
        let d3_fd = (g(r + 2.0 * h) - 2.0 * g(r + h) + 2.0 * g(r - h) - g(r - 2.0 * h))
            / (2.0 * h * h * h);
        assert_relative_eq!(f.d3, d3_fd, max_relative = 1e-4);
    }

    #[test]
    fn squared_of_sin_is_sin_sq() {
        let x = 0.9;
        let s2 = Deriv3::var(x).sin().squared();
        assert_relative_eq!(s2.f, x.sin().powi(2), epsilon = 1e-14);
        assert_relative_eq!(s2.d1, 2.0 * x.sin() * x.cos(), epsilon = 1e-14);
        assert_relative_eq!(s2.d2, 2.0 * (2.0 * x).cos(), epsilon = 1e-14);
        assert_relative_eq!(s2.d3, -4.0 * (2.0 * x).sin(), epsilon = 1e-14);
    }
}
