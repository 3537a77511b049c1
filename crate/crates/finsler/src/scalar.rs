//! Scalar abstraction over which all metric and field formulas are written.
//!
//! Every coefficient function in this crate (metrics, conformal factors,
//! expression trees) is generic over [`Scalar`], so the same formula
//! evaluates to a plain `f64` or to a truncated Taylor polynomial
//! ([`crate::diffengine::Jet`]). That is what lets the engine take exact
//! high-order derivatives of quantities like the spray or the Christoffel
//! symbols: the whole pipeline simply runs in jet arithmetic.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + Sized
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// The value part (0-th Taylor coefficient).
    fn value(&self) -> f64;

    /// A constant with the same shape as `self`.
    fn lift(&self, c: f64) -> Self;

    /// Multiplication by a plain constant.
    fn scale(&self, k: f64) -> Self {
        self.clone() * self.lift(k)
    }

    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
    fn powf(&self, e: f64) -> Self;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }

    fn lift(&self, c: f64) -> Self {
        c
    }

    fn scale(&self, k: f64) -> Self {
        self * k
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn sin(&self) -> Self {
        f64::sin(*self)
    }

    fn cos(&self) -> Self {
        f64::cos(*self)
    }

    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }

    fn powf(&self, e: f64) -> Self {
        f64::powf(*self, e)
    }
}
