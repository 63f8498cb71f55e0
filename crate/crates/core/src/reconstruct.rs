//! Recovery of solutions of `f(xy) = g(y)·f(x) + g(x)·f(y)` from a single
//! known value, and classification of solutions of the two-parameter
//! equation, where `g(x) = (x^α + x^β)/2`.
//!
//! Evaluating `f(xyz)` in both groupings gives, for any y, z,
//!
//! ```text
//! [g(y)g(z) − g(yz)]·f(x) = [g(x)g(y) − g(xy)]·f(z)
//! ```
//!
//! With `y = t2`, `z = t1` and `f(t1)` known:
//!
//! ```text
//! f(x) = [g(t2·x) − g(t2)·g(x)]·f(t1) / [g(t1·t2) − g(t1)·g(t2)]
//! ```
//!
//! The denominator vanishes for every pair exactly when g is multiplicative.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, Poly};
use crate::families::SolutionFamily;

#[derive(Clone)]
pub enum GeneratorFunction {
    /// `g(x) = (x^α + x^β)/2`.
    PowerMean {
        alpha: f64,
        beta: f64,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for GeneratorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorFunction::PowerMean { alpha, beta } => f
                .debug_struct("PowerMean")
                .field("alpha", alpha)
                .field("beta", beta)
                .finish(),
            GeneratorFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl GeneratorFunction {
    pub fn power_mean(alpha: f64, beta: f64) -> Self {
        GeneratorFunction::PowerMean { alpha, beta }
    }

    pub fn custom(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        GeneratorFunction::Custom(Arc::new(g))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            GeneratorFunction::PowerMean { alpha, beta } => 0.5 * (x.powf(*alpha) + x.powf(*beta)),
            GeneratorFunction::Custom(g) => g(x),
        }
    }

    /// `g(t1·t2) − g(t1)·g(t2)`.
    pub fn gap(&self, t1: f64, t2: f64) -> f64 {
        self.eval(t1 * t2) - self.eval(t1) * self.eval(t2)
    }

    fn is_degenerate(&self, t1: f64, t2: f64) -> bool {
        let gap = self.gap(t1, t2);
        !(gap.abs() >= 1e-9 * (1.0 + (self.eval(t1) * self.eval(t2)).abs()))
    }
}

fn require_unit(name: &str, t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {t} is outside ]0,1]")))
    }
}

/// Anchor points with the known value `f(t1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionAnchors {
    t1: f64,
    t2: f64,
    f_t1: f64,
}

impl ReconstructionAnchors {
    /// Rejects pairs where `|g(t1t2) − g(t1)g(t2)| < 1e-9·(1 + |g(t1)g(t2)|)`.
    pub fn new(g: &GeneratorFunction, t1: f64, t2: f64, f_t1: f64) -> Result<Self> {
        require_unit("t1", t1)?;
        require_unit("t2", t2)?;
        if !f_t1.is_finite() {
            return Err(Error::Input(format!("f(t1) must be finite, got {f_t1}")));
        }
        if g.is_degenerate(t1, t2) {
            return Err(Error::Anchor(format!(
                "g is multiplicative at (t1, t2) = ({t1}, {t2}): gap {}",
                g.gap(t1, t2)
            )));
        }
        Ok(ReconstructionAnchors { t1, t2, f_t1 })
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn f_t1(&self) -> f64 {
        self.f_t1
    }
}

pub fn vincze_reconstruct(
    g: &GeneratorFunction,
    anchors: &ReconstructionAnchors,
    x: f64,
) -> Result<f64> {
    require_unit("x", x)?;
    let ReconstructionAnchors { t1, t2, f_t1 } = *anchors;
    let numerator = g.eval(t2 * x) - g.eval(t2) * g.eval(x);
    Ok(numerator * f_t1 / g.gap(t1, t2))
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnchorChoice {
    Pair {
        t1: f64,
        t2: f64,
        gap: f64,
    },
    /// Every candidate pair is degenerate.
    Multiplicative,
}

/// Searches all ordered pairs (diagonal included) for the largest |gap|;
/// the first maximizer in candidate order wins.
pub fn find_anchors(g: &GeneratorFunction, candidates: &[f64]) -> Result<AnchorChoice> {
    if candidates.is_empty() {
        return Err(Error::Input("no anchor candidates".into()));
    }
    for &t in candidates {
        require_unit("candidate", t)?;
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for &t1 in candidates {
        for &t2 in candidates {
            if g.is_degenerate(t1, t2) {
                continue;
            }
            let gap = g.gap(t1, t2);
            if best.is_none_or(|(_, _, b)| gap.abs() > b.abs()) {
                best = Some((t1, t2, gap));
            }
        }
    }
    Ok(match best {
        Some((t1, t2, gap)) => AnchorChoice::Pair { t1, t2, gap },
        None => AnchorChoice::Multiplicative,
    })
}

/// A classified solution of the two-parameter equation. The logarithmic
/// factor of the α = β branch is taken to be `ln`; non-regular logarithmic
/// maps are not representable, hence `regular_branch` is always set.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub family: SolutionFamily,
    pub regular_branch: bool,
}

/// α ≠ β gives `c(x^α − x^β)` with `c = f(t1)/(t1^α − t1^β)`; α = β gives
/// `c·x^α·ln x` with `c = f(t1)/(t1^α·ln t1)`.
pub fn classify_eq2_solution(alpha: f64, beta: f64, f_t1: f64, t1: f64) -> Result<Classification> {
    if !(t1 > 0.0 && t1 < 1.0) {
        return Err(Error::Domain(format!("t1 = {t1} is outside ]0,1[")));
    }
    if !(alpha.is_finite() && beta.is_finite() && f_t1.is_finite()) {
        return Err(Error::Input("alpha, beta and f(t1) must be finite".into()));
    }
    let family = if alpha != beta {
        if (alpha - beta).abs() * t1.ln().abs() < 1e-12 {
            return Err(Error::IllConditioned(format!(
                "t1^alpha and t1^beta are indistinguishable at t1 = {t1}"
            )));
        }
        SolutionFamily::power_diff(f_t1 / (t1.powf(alpha) - t1.powf(beta)), alpha, beta)?
    } else {
        SolutionFamily::power_log(f_t1 / (t1.powf(alpha) * t1.ln()), alpha)?
    };
    Ok(Classification {
        family,
        regular_branch: true,
    })
}

fn generator_exact(alpha: i32, beta: i32, x: &FieldElement) -> Result<FieldElement> {
    let half = FieldElement::from_ratio(1, 2);
    x.powi(alpha)?
        .checked_add(&x.powi(beta)?)?
        .checked_mul(&half)
}

/// Exact `g(t1·t2) − g(t1)·g(t2)` for integer exponents.
pub fn anchor_gap_exact(
    alpha: i32,
    beta: i32,
    t1: &BigRational,
    t2: &BigRational,
) -> Result<BigRational> {
    let c = |r: &BigRational| FieldElement::constant(r.clone());
    let (a, b) = (c(t1), c(t2));
    let gap = generator_exact(alpha, beta, &a.checked_mul(&b)?)?.checked_sub(
        &generator_exact(alpha, beta, &a)?.checked_mul(&generator_exact(alpha, beta, &b)?)?,
    )?;
    Ok(gap.as_rational().expect("constant arithmetic stays in Q"))
}

/// Exact reconstruction on Q(t) with integer exponents and rational anchors.
/// Passing `x = t` yields the reconstructed function as a rational function.
pub fn vincze_reconstruct_exact(
    alpha: i32,
    beta: i32,
    t1: &BigRational,
    t2: &BigRational,
    f_t1: &BigRational,
    x: &FieldElement,
) -> Result<FieldElement> {
    let gap = anchor_gap_exact(alpha, beta, t1, t2)?;
    if gap.is_zero() {
        return Err(Error::Anchor(format!(
            "g is multiplicative at (t1, t2) = ({t1}, {t2})"
        )));
    }
    let t2e = FieldElement::constant(t2.clone());
    let numerator = generator_exact(alpha, beta, &t2e.checked_mul(x)?)?.checked_sub(
        &generator_exact(alpha, beta, &t2e)?.checked_mul(&generator_exact(alpha, beta, x)?)?,
    )?;
    Ok(numerator.scale(&(f_t1 / gap)))
}

/// `c·(t^α − t^β)` in Q(t) for integer exponents.
pub fn power_diff_exact(c: &BigRational, alpha: i32, beta: i32) -> Result<FieldElement> {
    let t = FieldElement::from_poly(Poly::t());
    Ok(t.powi(alpha)?.checked_sub(&t.powi(beta)?)?.scale(c))
}
