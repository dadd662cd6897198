//! Finite Laurent series in `p` over a declared exponent window.

use std::fmt::Debug;

use num_complex::Complex64;
use num_traits::{FromPrimitive, Num, ToPrimitive};

use crate::error::{Error, Result};

/// Coefficient ring: `f64` for residual work, `BigRational` for exact identities.
pub trait Coeff: Clone + Num + FromPrimitive + Debug + PartialEq {}

impl<T: Clone + Num + FromPrimitive + Debug + PartialEq> Coeff for T {}

/// Which part of a series to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proj {
    /// Strictly positive powers.
    Pos,
    /// Strictly negative powers.
    Neg,
    /// The coefficient of `p^m` as a constant series.
    At(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries<T> {
    window: (i64, i64),
    lo: i64,
    coeffs: Vec<T>,
}

impl<T: Coeff> LaurentSeries<T> {
    pub fn zero(window: (i64, i64)) -> Self {
        LaurentSeries { window, lo: 0, coeffs: Vec::new() }
    }

    pub fn from_coeffs(window: (i64, i64), lo: i64, coeffs: Vec<T>) -> Result<Self> {
        let s = LaurentSeries { window, lo, coeffs };
        s.normalized()
    }

    pub fn monomial(window: (i64, i64), power: i64, c: T) -> Result<Self> {
        Self::from_coeffs(window, power, vec![c])
    }

    fn normalized(mut self) -> Result<Self> {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.lo += lead as i64;
        if self.coeffs.is_empty() {
            self.lo = 0;
            return Ok(self);
        }
        for power in [self.lo, self.hi()] {
            if power < self.window.0 || power > self.window.1 {
                return Err(Error::WindowViolation { lo: self.window.0, hi: self.window.1, power });
            }
        }
        Ok(self)
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest power carried (0 for the zero series).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest power carried (−1 for the zero series).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, m: i64) -> T {
        if m < self.lo || m > self.hi() {
            return T::zero();
        }
        self.coeffs[(m - self.lo) as usize].clone()
    }

    fn hull(&self, other: &Self) -> (i64, i64) {
        (self.window.0.min(other.window.0), self.window.1.max(other.window.1))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        let window = self.hull(other);
        if self.is_zero() && other.is_zero() {
            return Ok(Self::zero(window));
        }
        let lo = match (self.is_zero(), other.is_zero()) {
            (true, _) => other.lo,
            (_, true) => self.lo,
            _ => self.lo.min(other.lo),
        };
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi).map(|m| f(self.coeff(m), other.coeff(m))).collect();
        Self::from_coeffs(window, lo, coeffs)
    }

    pub fn scale(&self, c: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.clone() * c.clone()).collect();
        Self::from_coeffs(self.window, self.lo, coeffs).expect("scaling keeps the support")
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let window = self.hull(other);
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(window));
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(window, self.lo + other.lo, coeffs)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::monomial(self.window, 0, T::one())?;
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Truncation `( )_{>0}`, `( )_{<0}` or `( )_m`.
    pub fn proj(&self, which: Proj) -> Result<Self> {
        let keep = |m: i64| match which {
            Proj::Pos => m > 0,
            Proj::Neg => m < 0,
            Proj::At(k) => m == k,
        };
        if let Proj::At(m) = which {
            if m < self.window.0 || m > self.window.1 {
                return Err(Error::WindowViolation { lo: self.window.0, hi: self.window.1, power: m });
            }
            return Self::monomial(self.window, 0, self.coeff(m));
        }
        let coeffs = (self.lo..=self.hi())
            .map(|m| if keep(m) { self.coeff(m) } else { T::zero() })
            .collect();
        Self::from_coeffs(self.window, self.lo, coeffs)
    }

    /// `d/dp`.
    pub fn d_dp(&self) -> Self {
        let coeffs = (self.lo..=self.hi())
            .map(|m| T::from_i64(m).unwrap() * self.coeff(m))
            .collect();
        Self::from_coeffs((self.window.0 - 1, self.window.1), self.lo - 1, coeffs)
            .expect("derivative stays inside the widened window")
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> LaurentSeries<U> {
        LaurentSeries::from_coeffs(self.window, self.lo, self.coeffs.iter().map(f).collect())
            .expect("support is unchanged")
    }
}

impl<T: Coeff + ToPrimitive> LaurentSeries<T> {
    pub fn eval(&self, p: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in self.lo..=self.hi() {
            let c = self.coeff(m).to_f64().unwrap();
            if c != 0.0 {
                acc += c * p.powi(m as i32);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: (i64, i64) = (-6, 6);

    fn s(lo: i64, c: &[f64]) -> LaurentSeries<f64> {
        LaurentSeries::from_coeffs(W, lo, c.to_vec()).unwrap()
    }

    #[test]
    fn truncations() {
        let x = s(-1, &[1.0, 2.0, 1.0]);
        assert_eq!(x.proj(Proj::Pos).unwrap(), s(1, &[1.0]));
        let re = x
            .proj(Proj::Pos)
            .unwrap()
            .add(&x.proj(Proj::Neg).unwrap())
            .unwrap()
            .add(&x.proj(Proj::At(0)).unwrap())
            .unwrap();
        assert_eq!(re, x);
    }

    #[test]
    fn square_has_no_minus_one_mode() {
        let x = s(-1, &[1.0, 0.0, 1.0]);
        assert_eq!(x.pow(2).unwrap().coeff(-1), 0.0);
    }

    #[test]
    fn window_is_enforced() {
        let x = s(-1, &[1.0, 0.0, 1.0]);
        assert!(matches!(x.pow(7), Err(Error::WindowViolation { .. })));
        assert!(matches!(x.proj(Proj::At(9)), Err(Error::WindowViolation { .. })));
    }

    #[test]
    fn derivative() {
        let x = s(-1, &[1.0, 3.0, 2.0]);
        let d = x.d_dp();
        assert_eq!((d.coeff(-2), d.coeff(-1), d.coeff(0)), (-1.0, 0.0, 2.0));
    }
}
