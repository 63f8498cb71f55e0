//! Dense univariate polynomials over `BigRational`.
//!
//! Coefficients are stored in ascending degree order. The representation is
//! canonical: the zero polynomial is the empty vector and otherwise the last
//! coefficient is nonzero.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    /// The generator `t`.
    pub fn t() -> Self {
        Poly {
            coeffs: vec![BigRational::zero(), BigRational::one()],
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigRational, degree: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = c;
        Poly { coeffs }
    }

    /// Builds a polynomial from ascending coefficients; trailing zeros are stripped.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Formal derivative with respect to `t`.
    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Euclidean division over Q: returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let d_deg = divisor
            .degree()
            .ok_or_else(|| Error::Arithmetic("polynomial division by zero".into()))?;
        let Some(n_deg) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if n_deg < d_deg {
            return Ok((Poly::zero(), self.clone()));
        }
        let lc_inv = divisor.coeffs[d_deg].recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); n_deg - d_deg + 1];
        for k in (0..=n_deg - d_deg).rev() {
            let c = &rem[k + d_deg] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(d_deg);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Monic greatest common divisor, computed by a primitive (fraction-free)
    /// remainder sequence over Z. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = IntPoly::primitive_of(self);
        let mut b = IntPoly::primitive_of(other);
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a.to_poly().monic()
    }

    /// Horner evaluation at an exact rational point.
    pub fn eval(&self, at: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * at + c)
    }

    /// Horner evaluation in binary64.
    pub fn eval_f64(&self, at: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * at + rational_to_f64(c))
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

/// Nearest binary64 value of a rational, robust to numerators and
/// denominators that individually overflow `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    // Shift both parts down to 64 significant bits before dividing.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (r.numer() >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> ds as usize).to_f64().unwrap_or(1.0);
    (n / d) * 2f64.powi((ns - ds) as i32)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        Poly::from_coeffs(coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

/// Integer-coefficient polynomial used only inside the gcd.
#[derive(Clone, Debug)]
struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Clears denominators and removes the content.
    fn primitive_of(p: &Poly) -> IntPoly {
        let lcm = p
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let coeffs = p
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        IntPoly { coeffs }.primitive()
    }

    fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(mut self) -> IntPoly {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    fn primitive(self) -> IntPoly {
        let mut p = self.trim();
        let content = p.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !content.is_zero() && !content.is_one() {
            for c in &mut p.coeffs {
                *c /= &content;
            }
        }
        if p.coeffs.last().is_some_and(|c| c.is_negative()) {
            for c in &mut p.coeffs {
                *c = -&*c;
            }
        }
        p
    }

    /// Pseudo-remainder `prem(self, divisor)`, i.e. the remainder of
    /// `lc(divisor)^(m-n+1) * self` divided by `divisor`.
    fn pseudo_rem(&self, divisor: &IntPoly) -> IntPoly {
        let d_deg = divisor.degree().expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        let lc = &divisor.coeffs[d_deg];
        while rem.len() > d_deg {
            let top = rem.len() - 1;
            let lead = rem[top].clone();
            for c in rem.iter_mut() {
                *c *= lc;
            }
            let shift = top - d_deg;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] -= &lead * dc;
            }
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        IntPoly { coeffs: rem }.trim()
    }

    fn to_poly(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }
}
