//! The formal derivation d/dt on Q(t).
//!
//! `d` is Q-linear, satisfies `d(xy) = x d(y) + y d(x)`, vanishes exactly on
//! Q and is normalized by `d(t) = scale`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::FieldElement;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    scale: BigRational,
}

impl Default for Derivation {
    fn default() -> Self {
        Derivation {
            scale: BigRational::one(),
        }
    }
}

impl Derivation {
    pub fn new(scale: BigRational) -> Self {
        Derivation { scale }
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    /// Quotient rule: `d(p/q) = scale * (p'q - pq') / q^2`.
    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        if self.scale.is_zero() || x.is_constant() {
            return Ok(FieldElement::zero());
        }
        let p = x.numerator();
        let q = x.denominator();
        let num = &(&p.derivative() * q) - &(p * &q.derivative());
        FieldElement::new(num.scale(&self.scale), q * q)
    }
}

/// `d(x)` for the derivation normalized by `d(t) = 1`.
pub fn derivation_apply(x: &FieldElement) -> Result<FieldElement> {
    Derivation::default().apply(x)
}
