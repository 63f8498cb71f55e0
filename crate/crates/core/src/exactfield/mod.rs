//! Exact arithmetic over Q and the rational-function field Q(t), with the
//! formal derivation used to realize non-regular solutions exactly.

mod derivation;
mod field;
mod parse;
mod poly;

use num_bigint::BigInt;
use rand::Rng;

pub use derivation::{derivation_apply, Derivation};
pub use field::{
    field_arith, field_arith_capped, FieldElement, FieldOp, DEFAULT_DEGREE_CAP, DEFAULT_TAU,
};
pub use num_rational::BigRational;
pub use parse::parse_field_element;
pub use poly::{rational_to_f64, Poly};

use crate::error::{Error, Result};

/// Parses `p/q`, an integer, or a plain decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational literal: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(Error::Input(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(digits, denom);
    Ok(if negative { -r } else { r })
}

/// A random element `p(t)/q(t)` with integer coefficients in `-height..=height`
/// and degrees at most `max_degree`, conditioned on its value at `tau` lying in
/// ]0,1[. Generation is rejection-based; `None` after 10 000 failed draws.
pub fn random_open_unit_element<R: Rng + ?Sized>(
    rng: &mut R,
    max_degree: usize,
    height: i64,
    tau: f64,
) -> Option<FieldElement> {
    for _ in 0..10_000 {
        let num = random_poly(rng, max_degree, height);
        let den = random_poly(rng, max_degree, height);
        let Ok(x) = FieldElement::new(num, den) else {
            continue;
        };
        if x.in_open_unit(tau).unwrap_or(false) {
            return Some(x);
        }
    }
    None
}

fn random_poly<R: Rng + ?Sized>(rng: &mut R, max_degree: usize, height: i64) -> Poly {
    let degree = rng.gen_range(0..=max_degree);
    let coeffs: Vec<i64> = (0..=degree)
        .map(|_| rng.gen_range(-height..=height))
        .collect();
    Poly::from_i64(&coeffs)
}
