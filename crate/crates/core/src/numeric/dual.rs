//! First-order dual numbers for forward-mode differentiation.
//!
//! A [`DualScalar`] carries a value and one tangent payload; arithmetic obeys
//! the product rule `(a, a') * (b, b') = (a b, a' b + a b')`. Analytic fields
//! written generically over [`Scalar`] can be evaluated with `f64` (plain
//! value) or with `DualScalar` (value plus exact partial derivative along a
//! seeded axis).

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value plus first-order tangent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualScalar {
    pub value: f64,
    pub deriv: f64,
}

impl DualScalar {
    pub fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv }
    }

    /// A constant: derivative zero.
    pub fn constant(value: f64) -> Self {
        Self { value, deriv: 0.0 }
    }

    /// The differentiation variable: derivative one.
    pub fn variable(value: f64) -> Self {
        Self { value, deriv: 1.0 }
    }
}

impl From<f64> for DualScalar {
    fn from(x: f64) -> Self {
        DualScalar::constant(x)
    }
}

impl Add for DualScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for DualScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for DualScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.value * rhs.value,
            self.deriv * rhs.value + self.value * rhs.deriv,
        )
    }
}

impl Div for DualScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.value;
        Self::new(
            self.value * inv,
            (self.deriv - self.value * rhs.deriv * inv) * inv,
        )
    }
}

impl Neg for DualScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.deriv)
    }
}

/// Scalar abstraction shared by `f64` and [`DualScalar`].
///
/// Analytic metric entries, constraint coefficients and potentials are written
/// against this trait so the same expression serves plain evaluation and
/// forward-mode differentiation, including through pivoted linear solves.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// The value part (primal) of the scalar.
    fn value(self) -> f64;
    /// Magnitude of the value part; used for pivot selection.
    fn abs_val(self) -> f64 {
        self.value().abs()
    }
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

impl Scalar for DualScalar {
    fn from_f64(x: f64) -> Self {
        DualScalar::constant(x)
    }
    fn value(self) -> f64 {
        self.value
    }
    fn sin(self) -> Self {
        Self::new(self.value.sin(), self.deriv * self.value.cos())
    }
    fn cos(self) -> Self {
        Self::new(self.value.cos(), -self.deriv * self.value.sin())
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, self.deriv * e)
    }
    fn ln(self) -> Self {
        Self::new(self.value.ln(), self.deriv / self.value)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        Self::new(s, 0.5 * self.deriv / s)
    }
    fn powi(self, n: i32) -> Self {
        Self::new(
            self.value.powi(n),
            f64::from(n) * self.value.powi(n - 1) * self.deriv,
        )
    }
}

/// Seed a chart point for differentiation along `axis`.
pub fn seed_point(q: &[f64], axis: usize) -> Vec<DualScalar> {
    q.iter()
        .enumerate()
        .map(|(i, &x)| {
            if i == axis {
                DualScalar::variable(x)
            } else {
                DualScalar::constant(x)
            }
        })
        .collect()
}
