//! Elements of the rational-function field Q(t) in canonical form.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;
use crate::error::{Error, Result};

/// Default bound on numerator and denominator degree.
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Default evaluation point for admissibility tests.
pub const DEFAULT_TAU: f64 = 0.7390851332151607;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// `num / den` with `gcd(num, den) = 1` and `den` monic, so equality of
/// field elements is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    num: Poly,
    den: Poly,
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        FieldElement::constant(BigRational::one())
    }

    pub fn t() -> Self {
        FieldElement {
            num: Poly::t(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        FieldElement {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        FieldElement::constant(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_poly(p: Poly) -> Self {
        FieldElement {
            num: p,
            den: Poly::one(),
        }
    }

    /// Canonicalizes `num / den` under the default degree cap.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        FieldElement::with_cap(num, den, DEFAULT_DEGREE_CAP)
    }

    pub fn with_cap(num: Poly, den: Poly, cap: usize) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(FieldElement::zero());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g)?.0, den.div_rem(&g)?.0)
        };
        let lc = den.leading().expect("nonzero denominator").clone();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        for p in [&num, &den] {
            let degree = p.degree().unwrap_or(0);
            if degree > cap {
                return Err(Error::DegreeCap { degree, cap });
            }
        }
        Ok(FieldElement { num, den })
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True for elements of Q (degree-0 numerator and denominator).
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The rational value of a constant element.
    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.is_constant() {
            return None;
        }
        Some(
            self.num
                .coeffs()
                .first()
                .cloned()
                .unwrap_or_else(BigRational::zero),
        )
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> FieldElement {
        if c.is_zero() {
            return FieldElement::zero();
        }
        FieldElement {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::Arithmetic("inverse of the zero element".into()));
        }
        FieldElement::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_add(&self, rhs: &FieldElement) -> Result<FieldElement> {
        field_arith(self, rhs, FieldOp::Add)
    }

    pub fn checked_sub(&self, rhs: &FieldElement) -> Result<FieldElement> {
        field_arith(self, rhs, FieldOp::Sub)
    }

    pub fn checked_mul(&self, rhs: &FieldElement) -> Result<FieldElement> {
        field_arith(self, rhs, FieldOp::Mul)
    }

    pub fn checked_div(&self, rhs: &FieldElement) -> Result<FieldElement> {
        field_arith(self, rhs, FieldOp::Div)
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, exp: i32) -> Result<FieldElement> {
        let base = if exp < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let e = exp.unsigned_abs();
        FieldElement::new(base.num.pow(e), base.den.pow(e))
    }

    /// `num(tau) / den(tau)` in binary64.
    pub fn approx_value(&self, tau: f64) -> Result<f64> {
        let d = self.den.eval_f64(tau);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Evaluation(format!(
                "denominator of {self} vanishes at tau = {tau}"
            )));
        }
        let v = self.num.eval_f64(tau) / d;
        if !v.is_finite() {
            return Err(Error::Evaluation(format!(
                "{self} is not finite at tau = {tau}"
            )));
        }
        Ok(v)
    }

    /// Whether the value at `tau` lies in ]0,1[.
    pub fn in_open_unit(&self, tau: f64) -> Result<bool> {
        let v = self.approx_value(tau)?;
        Ok(v > 0.0 && v < 1.0)
    }

    /// Whether the value at `tau` lies in ]0,1].
    pub fn in_half_open_unit(&self, tau: f64) -> Result<bool> {
        if *self == FieldElement::one() {
            return Ok(true);
        }
        let v = self.approx_value(tau)?;
        Ok(v > 0.0 && v <= 1.0)
    }
}

pub fn field_arith(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement> {
    field_arith_capped(a, b, op, DEFAULT_DEGREE_CAP)
}

pub fn field_arith_capped(
    a: &FieldElement,
    b: &FieldElement,
    op: FieldOp,
    cap: usize,
) -> Result<FieldElement> {
    match op {
        FieldOp::Add | FieldOp::Sub => {
            let rhs = if op == FieldOp::Add {
                b.num.clone()
            } else {
                -&b.num
            };
            if a.den == b.den {
                return FieldElement::with_cap(&a.num + &rhs, a.den.clone(), cap);
            }
            let num = &(&a.num * &b.den) + &(&rhs * &a.den);
            FieldElement::with_cap(num, &a.den * &b.den, cap)
        }
        FieldOp::Mul => FieldElement::with_cap(&a.num * &b.num, &a.den * &b.den, cap),
        FieldOp::Div => {
            if b.is_zero() {
                return Err(Error::Arithmetic("division by the zero element".into()));
            }
            FieldElement::with_cap(&a.num * &b.den, &a.den * &b.num, cap)
        }
    }
}

impl fmt::Display for FieldElement {
    /// Prints `num` alone when the denominator is 1, else `(num)/(den)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", PolyDisplay(&self.num))
        } else {
            write!(
                f,
                "({})/({})",
                PolyDisplay(&self.num),
                PolyDisplay(&self.den)
            )
        }
    }
}

struct PolyDisplay<'a>(&'a Poly);

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = self.0.coeffs();
        if coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = *c < BigRational::zero();
            let abs = if negative { -c } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let var = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            if var.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{abs}*{var}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_terms_add() {
        let t = FieldElement::t();
        let two_t = FieldElement::from_poly(Poly::from_i64(&[0, 2]));
        assert_eq!(t.checked_add(&t).unwrap(), two_t);
    }

    #[test]
    fn multiplicative_inverse() {
        let t = FieldElement::t();
        assert_eq!(
            t.checked_mul(&t.inverse().unwrap()).unwrap(),
            FieldElement::one()
        );
    }

    #[test]
    fn division_cancels_common_factor() {
        // (t^2 - 1) / (t - 1) = t + 1
        let a = FieldElement::from_poly(Poly::from_i64(&[-1, 0, 1]));
        let b = FieldElement::from_poly(Poly::from_i64(&[-1, 1]));
        let q = field_arith(&a, &b, FieldOp::Div).unwrap();
        assert_eq!(q, FieldElement::from_poly(Poly::from_i64(&[1, 1])));
    }

    #[test]
    fn division_by_zero_element_fails() {
        let err = field_arith(&FieldElement::t(), &FieldElement::zero(), FieldOp::Div);
        assert!(matches!(err, Err(Error::Arithmetic(_))));
        assert!(FieldElement::zero().inverse().is_err());
    }

    #[test]
    fn denominator_becomes_monic() {
        let x = FieldElement::new(Poly::from_i64(&[2]), Poly::from_i64(&[0, 4])).unwrap();
        assert!(x.denominator().leading().unwrap().is_one());
        assert_eq!(x.to_string(), "(1/2)/(t)");
    }

    #[test]
    fn degree_cap_is_enforced() {
        let big = FieldElement::from_poly(Poly::monomial(BigRational::one(), 40));
        let err = field_arith(&big, &big, FieldOp::Mul).unwrap_err();
        assert_eq!(
            err,
            Error::DegreeCap {
                degree: 80,
                cap: 64
            }
        );
        assert!(field_arith_capped(&big, &big, FieldOp::Mul, 100).is_ok());
    }

    #[test]
    fn approx_value_examples() {
        assert_eq!(
            FieldElement::from_ratio(1, 2).approx_value(0.3).unwrap(),
            0.5
        );
        assert_eq!(FieldElement::t().approx_value(0.739).unwrap(), 0.739);
        let x = FieldElement::t()
            .checked_div(&FieldElement::from_poly(Poly::from_i64(&[1, 1])))
            .unwrap();
        let expected = 0.739 / 1.739;
        assert!((x.approx_value(0.739).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.42495).abs() < 1e-5);
    }

    #[test]
    fn pole_is_an_evaluation_error() {
        let x = FieldElement::t().inverse().unwrap();
        assert!(matches!(x.approx_value(0.0), Err(Error::Evaluation(_))));
    }

    #[test]
    fn negative_powers() {
        let t = FieldElement::t();
        let inv_sq = t.powi(-2).unwrap();
        assert_eq!(
            inv_sq.checked_mul(&t.powi(2).unwrap()).unwrap(),
            FieldElement::one()
        );
        assert_eq!(t.powi(0).unwrap(), FieldElement::one());
    }

    #[test]
    fn display_forms() {
        let p = FieldElement::from_poly(Poly::from_i64(&[-1, 0, 2]));
        assert_eq!(p.to_string(), "2*t^2 - 1");
        assert_eq!(FieldElement::zero().to_string(), "0");
        assert_eq!(FieldElement::from_ratio(-3, 4).to_string(), "-3/4");
    }
}
