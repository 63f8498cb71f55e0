//! Closed-form solution families on ]0,1] and the entropies they generate.
//!
//! | family | f(x) |
//! |--------|------|
//! | `PowerAffine` | c*·x + c·x^q (q ≠ 1) |
//! | `XLogX` | c·x·ln x + c*·x |
//! | `PowerDiff` | c·(x^α − x^β), α < β |
//! | `PowerLog` | c·x^α·ln x |
//! | `ExactDerivationAffine` | c*·x + scale·d(x) on Q(t) |
//! | `Custom` | any user map |
//!
//! Only some parameter choices solve the equations; see [`crate::equations`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactfield::{parse_rational, rational_to_f64, Derivation, FieldElement};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(&FieldElement) -> Result<FieldElement> + Send + Sync>;

/// A named candidate map, optionally with an exact evaluator on Q(t).
#[derive(Clone)]
pub struct CustomMap {
    name: String,
    real: RealFn,
    exact: Option<ExactFn>,
}

impl CustomMap {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CustomMap {
            name: name.into(),
            real: Arc::new(f),
            exact: None,
        }
    }

    pub fn with_exact(
        mut self,
        g: impl Fn(&FieldElement) -> Result<FieldElement> + Send + Sync + 'static,
    ) -> Self {
        self.exact = Some(Arc::new(g));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.real)(x)
    }

    pub fn eval_exact(&self, x: &FieldElement) -> Result<FieldElement> {
        match &self.exact {
            Some(g) => g(x),
            None => Err(Error::Input(format!(
                "custom map {:?} has no exact evaluator",
                self.name
            ))),
        }
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }
}

impl fmt::Debug for CustomMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMap")
            .field("name", &self.name)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl PartialEq for CustomMap {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.real, &other.real)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionFamily {
    PowerAffine {
        c_star: f64,
        c: f64,
        q: f64,
    },
    XLogX {
        c: f64,
        c_star: f64,
    },
    PowerDiff {
        c: f64,
        alpha: f64,
        beta: f64,
    },
    PowerLog {
        c: f64,
        alpha: f64,
    },
    ExactDerivationAffine {
        c_star: BigRational,
        scale: BigRational,
    },
    Custom(CustomMap),
}

fn require_finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::Input(format!(
                "parameter {name} must be finite, got {v}"
            )));
        }
    }
    Ok(())
}

impl SolutionFamily {
    /// `c*·x + c·x^q`; q = 1 is rejected since the two basis functions coincide.
    pub fn power_affine(c_star: f64, c: f64, q: f64) -> Result<Self> {
        require_finite(&[("c_star", c_star), ("c", c), ("q", q)])?;
        if q == 1.0 {
            return Err(Error::Branch(
                "power-affine requires q != 1; use xlogx or exact-derivation for q = 1".into(),
            ));
        }
        Ok(SolutionFamily::PowerAffine { c_star, c, q })
    }

    /// The continuous entropy form `c*·(x − x^q)`.
    pub fn tsallis_form(c_star: f64, q: f64) -> Result<Self> {
        SolutionFamily::power_affine(c_star, -c_star, q)
    }

    pub fn xlogx(c: f64, c_star: f64) -> Result<Self> {
        require_finite(&[("c", c), ("c_star", c_star)])?;
        Ok(SolutionFamily::XLogX { c, c_star })
    }

    /// `c·(x^α − x^β)`, stored with α < β (swapping negates c).
    pub fn power_diff(c: f64, alpha: f64, beta: f64) -> Result<Self> {
        require_finite(&[("c", c), ("alpha", alpha), ("beta", beta)])?;
        if alpha == beta {
            return Err(Error::Branch(
                "power-diff requires alpha != beta; use power-log for alpha = beta".into(),
            ));
        }
        Ok(if alpha < beta {
            SolutionFamily::PowerDiff { c, alpha, beta }
        } else {
            SolutionFamily::PowerDiff {
                c: -c,
                alpha: beta,
                beta: alpha,
            }
        })
    }

    pub fn power_log(c: f64, alpha: f64) -> Result<Self> {
        require_finite(&[("c", c), ("alpha", alpha)])?;
        Ok(SolutionFamily::PowerLog { c, alpha })
    }

    pub fn exact_derivation(c_star: BigRational, scale: BigRational) -> Self {
        SolutionFamily::ExactDerivationAffine { c_star, scale }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SolutionFamily::Custom(CustomMap::new(name, f))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SolutionFamily::PowerAffine { .. } => "power-affine",
            SolutionFamily::XLogX { .. } => "xlogx",
            SolutionFamily::PowerDiff { .. } => "power-diff",
            SolutionFamily::PowerLog { .. } => "power-log",
            SolutionFamily::ExactDerivationAffine { .. } => "exact-derivation",
            SolutionFamily::Custom(_) => "custom",
        }
    }

    /// Named real parameters, in literal order. Exact parameters are rounded.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match self {
            SolutionFamily::PowerAffine { c_star, c, q } => {
                vec![("c_star", *c_star), ("c", *c), ("q", *q)]
            }
            SolutionFamily::XLogX { c, c_star } => vec![("c", *c), ("c_star", *c_star)],
            SolutionFamily::PowerDiff { c, alpha, beta } => {
                vec![("c", *c), ("alpha", *alpha), ("beta", *beta)]
            }
            SolutionFamily::PowerLog { c, alpha } => vec![("c", *c), ("alpha", *alpha)],
            SolutionFamily::ExactDerivationAffine { c_star, scale } => vec![
                ("c_star", rational_to_f64(c_star)),
                ("scale", rational_to_f64(scale)),
            ],
            SolutionFamily::Custom(_) => Vec::new(),
        }
    }

    /// Evaluates at `x ∈ ]0,1]`.
    ///
    /// Every binary64 input is rational, so the derivation part of
    /// `ExactDerivationAffine` vanishes and the result is `c*·x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("{x} is outside ]0,1]")));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the domain check; callers guarantee `x > 0`.
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            SolutionFamily::PowerAffine { c_star, c, q } => c_star * x + c * x.powf(*q),
            SolutionFamily::XLogX { c, c_star } => c * x * x.ln() + c_star * x,
            SolutionFamily::PowerDiff { c, alpha, beta } => c * (x.powf(*alpha) - x.powf(*beta)),
            SolutionFamily::PowerLog { c, alpha } => c * x.powf(*alpha) * x.ln(),
            SolutionFamily::ExactDerivationAffine { c_star, .. } => rational_to_f64(c_star) * x,
            SolutionFamily::Custom(m) => m.eval(x),
        }
    }

    /// Exact evaluation on Q(t); available for `ExactDerivationAffine` and
    /// custom maps carrying an exact evaluator.
    pub fn eval_exact(&self, x: &FieldElement) -> Result<FieldElement> {
        match self {
            SolutionFamily::ExactDerivationAffine { c_star, scale } => {
                let linear = x.scale(c_star);
                if scale.is_zero() {
                    return Ok(linear);
                }
                let dx = Derivation::new(scale.clone()).apply(x)?;
                linear.checked_add(&dx)
            }
            SolutionFamily::Custom(m) => m.eval_exact(x),
            other => Err(Error::Input(format!(
                "{} has no exact evaluator",
                other.kind()
            ))),
        }
    }
}

pub fn family_eval(fam: &SolutionFamily, x: f64) -> Result<f64> {
    fam.eval(x)
}

/// Parses a real literal: a decimal such as `-0.25`, or a ratio `p/q`.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| bad_real(s))?;
        let d: f64 = d.trim().parse().map_err(|_| bad_real(s))?;
        n / d
    } else {
        s.parse().map_err(|_| bad_real(s))?
    };
    if !v.is_finite() {
        return Err(bad_real(s));
    }
    Ok(v)
}

fn bad_real(s: &str) -> Error {
    Error::Input(format!("not a real literal: {s:?}"))
}

/// Named custom maps available from literal syntax.
fn named_custom(name: &str, params: &[(String, String)]) -> Result<SolutionFamily> {
    let get = |key: &str| -> Result<f64> {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| parse_real(v))
            .unwrap_or_else(|| Err(Error::Input(format!("{name} needs parameter {key}"))))
    };
    let map = match name {
        "custom-square" => CustomMap::new(name, |x| x * x).with_exact(|x| x.checked_mul(x)),
        "custom-identity" => CustomMap::new(name, |x| x).with_exact(|x| Ok(x.clone())),
        "custom-zero" => CustomMap::new(name, |_| 0.0).with_exact(|_| Ok(FieldElement::zero())),
        "custom-log" => CustomMap::new(name, f64::ln),
        "custom-linear" => {
            let c = get("c")?;
            CustomMap::new(name, move |x| c * x)
        }
        "custom-power" => {
            let p = get("p")?;
            CustomMap::new(name, move |x| x.powf(p))
        }
        _ => return Err(Error::Input(format!("unknown family {name:?}"))),
    };
    Ok(SolutionFamily::Custom(map))
}

impl FromStr for SolutionFamily {
    type Err = Error;

    /// Literal syntax: `kind:key=value,...`, e.g. `power-affine:c_star=1,c=-1,q=2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params: Vec<(String, String)> = Vec::new();
        for item in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("expected key=value, got {item:?}")))?;
            let k = k.trim().to_string();
            if params.iter().any(|(existing, _)| *existing == k) {
                return Err(Error::Input(format!("duplicate parameter {k:?}")));
            }
            params.push((k, v.trim().to_string()));
        }
        let allowed: &[&str] = match kind {
            "power-affine" => &["c_star", "c", "q"],
            "xlogx" => &["c", "c_star"],
            "power-diff" => &["c", "alpha", "beta"],
            "power-log" => &["c", "alpha"],
            "exact-derivation" => &["c_star", "scale"],
            _ => return named_custom(kind, &params),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::Input(format!("{kind} has no parameter {k:?}")));
        }
        let raw = |key: &str| -> Result<&str> {
            params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Input(format!("{kind} needs parameter {key}")))
        };
        let real = |key: &str| raw(key).and_then(parse_real);
        match kind {
            "power-affine" => SolutionFamily::power_affine(real("c_star")?, real("c")?, real("q")?),
            "xlogx" => SolutionFamily::xlogx(real("c")?, real("c_star")?),
            "power-diff" => SolutionFamily::power_diff(real("c")?, real("alpha")?, real("beta")?),
            "power-log" => SolutionFamily::power_log(real("c")?, real("alpha")?),
            _ => Ok(SolutionFamily::exact_derivation(
                parse_rational(raw("c_star")?)?,
                parse_rational(raw("scale")?)?,
            )),
        }
    }
}

impl fmt::Display for SolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionFamily::ExactDerivationAffine { c_star, scale } => {
                write!(f, "exact-derivation:c_star={c_star},scale={scale}")
            }
            SolutionFamily::Custom(m) => write!(f, "{}", m.name()),
            other => {
                write!(f, "{}:", other.kind())?;
                let parts: Vec<String> = other
                    .parameters()
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

/// A discrete distribution with entries in ]0,1] summing to 1 within 1e-12.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::Domain(format!("probability {p} is outside ]0,1]")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(ProbVector(probabilities))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Σ f(p_i) for any family.
pub fn entropy_sum(f: &SolutionFamily, p: &ProbVector) -> Result<f64> {
    p.0.iter().map(|&x| f.eval(x)).sum()
}

/// `−Σ p_i ln p_i`, generated by `x ↦ −x ln x`.
pub fn shannon_entropy(p: &ProbVector) -> f64 {
    let f = SolutionFamily::XLogX {
        c: -1.0,
        c_star: 0.0,
    };
    p.0.iter().map(|&x| f.eval_unchecked(x)).sum()
}

/// `(1 − Σ p_i^q)/(q − 1)`, summed termwise as `−p·expm1((q−1)·ln p)/(q−1)`
/// so that q near 1 does not cancel. `|q − 1| < 1e-12` is an error.
pub fn tsallis_entropy(p: &ProbVector, q: f64) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::Input(format!("q must be finite, got {q}")));
    }
    let k = q - 1.0;
    if k.abs() < 1e-12 {
        return Err(Error::Branch(
            "Tsallis entropy is undefined at q = 1; use shannon_entropy".into(),
        ));
    }
    Ok(p.0.iter().map(|&x| -x * (k * x.ln()).exp_m1() / k).sum())
}
