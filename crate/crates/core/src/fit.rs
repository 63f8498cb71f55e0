//! Least-squares recovery of regular solution parameters from samples.
//!
//! Only the regular branch is fittable: pathological additive parts and
//! derivations are invisible to finitely many floating-point samples, so
//! every result carries `regular_branch = true`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::families::SolutionFamily;

/// Half-width of the band around q = 1 excluded from the power basis.
pub const Q_EXCLUSION: f64 = 1e-6;
/// Search interval for unknown q.
pub const Q_SEARCH_RANGE: (f64, f64) = (-8.0, 8.0);
/// Relative tolerance of the continuity test `c* + c ≈ 0`.
pub const CONTINUITY_TOL: f64 = 1e-8;

const COARSE_STEPS: usize = 160;
const GOLDEN_TOL: f64 = 1e-12;
/// Singular-value ratio below which a design is treated as rank deficient.
const RANK_TOL: f64 = 1e-13;
/// Singular-value ratio below which parameters are flagged non-identifiable.
const IDENTIFIABLE_TOL: f64 = 1e-8;

/// Samples `(x, f(x))` with distinct `x ∈ ]0,1]` and finite values.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    points: Vec<(f64, f64)>,
}

impl SampleSet {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(x, fx)) in points.iter().enumerate() {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::Domain(format!(
                    "sample {i}: x = {x} is outside ]0,1]"
                )));
            }
            if !fx.is_finite() {
                return Err(Error::Input(format!(
                    "sample {i}: f(x) = {fx} is not finite"
                )));
            }
        }
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        if let Some(w) = xs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Input(format!("duplicate sample at x = {}", w[0])));
        }
        Ok(SampleSet { points })
    }

    /// Samples `f` at the given abscissae.
    pub fn from_family(f: &SolutionFamily, xs: &[f64]) -> Result<Self> {
        let points = xs
            .iter()
            .map(|&x| Ok((x, f.eval(x)?)))
            .collect::<Result<Vec<_>>>()?;
        SampleSet::new(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn rms_residual(&self, family: &SolutionFamily) -> f64 {
        let sum: f64 = self
            .points
            .iter()
            .map(|&(x, fx)| {
                let r = fx - family.eval_unchecked(x);
                r * r
            })
            .sum();
        (sum / self.points.len() as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Continuity {
    /// `f(1⁻) = 0`: the family was rewritten to its entropy form.
    Continuous,
    /// The fitted family tends to `limit ≠ 0` at 1.
    Discontinuous { limit: f64 },
}

/// A competing candidate reported alongside the primary fit.
#[derive(Clone, Debug, PartialEq)]
pub struct Alternative {
    pub family: SolutionFamily,
    pub residual_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub family: SolutionFamily,
    /// Root-mean-square of `f(x) − family(x)` over the samples.
    pub residual_norm: f64,
    pub identifiable: bool,
    pub regular_branch: bool,
    pub notes: Vec<String>,
    pub alternatives: Vec<Alternative>,
    pub continuity: Option<Continuity>,
}

impl FitResult {
    fn new(family: SolutionFamily, samples: &SampleSet, identifiable: bool) -> Self {
        let residual_norm = samples.rms_residual(&family);
        FitResult {
            family,
            residual_norm,
            identifiable,
            regular_branch: true,
            notes: vec!["regular-branch".to_string()],
            alternatives: Vec::new(),
            continuity: None,
        }
    }

    fn note(&mut self, text: String) {
        if !self.notes.contains(&text) {
            self.notes.push(text);
        }
    }
}

struct LinearFit {
    coeffs: Vec<f64>,
    rss: f64,
    identifiable: bool,
}

/// Least squares through an SVD of the column-normalized design.
fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<LinearFit> {
    let n = y.len();
    let k = columns.len();
    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if norms.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned("basis column overflows".into()));
    }
    if norms.contains(&0.0) {
        return Err(Error::Input(
            "rank-deficient design: a basis column vanishes".into(),
        ));
    }
    let a = DMatrix::from_fn(n, k, |i, j| columns[j][i] / norms[j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOL * smax) {
        return Err(Error::Input(format!(
            "rank-deficient design (singular values {smax:e}, {smin:e})"
        )));
    }
    let z = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let rss = (&a * &z - &b).norm_squared();
    Ok(LinearFit {
        coeffs: z.iter().zip(&norms).map(|(v, s)| v / s).collect(),
        rss,
        identifiable: smin > IDENTIFIABLE_TOL * smax,
    })
}

fn split(samples: &SampleSet) -> (Vec<f64>, Vec<f64>) {
    samples.points.iter().copied().unzip()
}

fn fit_power(samples: &SampleSet, q: f64) -> Result<(LinearFit, SolutionFamily)> {
    let (xs, ys) = split(samples);
    let xq: Vec<f64> = xs.iter().map(|x| x.powf(q)).collect();
    let fit = least_squares(&[xs, xq], &ys)?;
    let fam = SolutionFamily::power_affine(fit.coeffs[0], fit.coeffs[1], q)?;
    Ok((fit, fam))
}

fn fit_log(samples: &SampleSet) -> Result<(LinearFit, SolutionFamily)> {
    let (xs, ys) = split(samples);
    let xlx: Vec<f64> = xs.iter().map(|x| x * x.ln()).collect();
    let fit = least_squares(&[xlx, xs], &ys)?;
    let fam = SolutionFamily::xlogx(fit.coeffs[0], fit.coeffs[1])?;
    Ok((fit, fam))
}

/// Profiled residual sum of squares over the power basis at a fixed q.
fn profile(samples: &SampleSet, q: f64) -> f64 {
    fit_power(samples, q).map_or(f64::INFINITY, |(f, _)| f.rss)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > GOLDEN_TOL * (1.0 + a.abs() + b.abs()) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coarse scan of `[lo, hi]` followed by golden-section refinement of the
/// best bracket. Returns `(q, rss)`.
fn search_interval(samples: &SampleSet, lo: f64, hi: f64) -> (f64, f64) {
    let step = (hi - lo) / COARSE_STEPS as f64;
    let grid: Vec<f64> = (0..=COARSE_STEPS).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&q| profile(samples, q)).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(COARSE_STEPS)];
    let (q, v) = golden_section(|q| profile(samples, q), a, b);
    if v <= values[best] {
        (q, v)
    } else {
        (grid[best], values[best])
    }
}

/// Fits `c*·x + c·x^q` (q ≠ 1) or `c·x·ln x + c*·x` (q = 1). With `q = None`
/// the exponent is searched on `[−8, 8]` minus the band around 1, and the
/// q = 1 fit is reported as the competing candidate.
pub fn fit_eq1(samples: &SampleSet, q: Option<f64>) -> Result<FitResult> {
    match q {
        Some(q) => {
            if samples.len() < 3 {
                return Err(Error::Input(format!(
                    "at least 3 samples are required, got {}",
                    samples.len()
                )));
            }
            if !q.is_finite() {
                return Err(Error::Input(format!("q must be finite, got {q}")));
            }
            if q == 1.0 {
                let (fit, fam) = fit_log(samples)?;
                return Ok(FitResult::new(fam, samples, fit.identifiable));
            }
            if (q - 1.0).abs() < Q_EXCLUSION {
                return Err(Error::Branch(format!(
                    "q = {q} lies within {Q_EXCLUSION:e} of 1 where x and x^q are \
                     indistinguishable; fit with q = 1 (basis x ln x, x) instead"
                )));
            }
            let (fit, fam) = fit_power(samples, q)?;
            Ok(FitResult::new(fam, samples, fit.identifiable))
        }
        None => {
            if samples.len() < 8 {
                return Err(Error::Input(format!(
                    "at least 8 samples are required when q is unknown, got {}",
                    samples.len()
                )));
            }
            let (lo, hi) = Q_SEARCH_RANGE;
            let left = search_interval(samples, lo, 1.0 - Q_EXCLUSION);
            let right = search_interval(samples, 1.0 + Q_EXCLUSION, hi);
            let (q_best, _) = if right.1 < left.1 { right } else { left };
            let (fit, fam) = fit_power(samples, q_best)?;
            let power = FitResult::new(fam, samples, fit.identifiable);
            let mut out = match fit_log(samples) {
                Ok((lfit, lfam)) => {
                    let log = FitResult::new(lfam, samples, lfit.identifiable);
                    let (mut primary, other) = if log.residual_norm < power.residual_norm {
                        (log, power)
                    } else {
                        (power, log)
                    };
                    primary.alternatives.push(Alternative {
                        family: other.family,
                        residual_norm: other.residual_norm,
                    });
                    primary
                }
                Err(_) => power,
            };
            out.note(format!(
                "q searched on [{lo}, {hi}] excluding |q - 1| < {Q_EXCLUSION:e}"
            ));
            Ok(out)
        }
    }
}

/// Fits the single coefficient of `c·(x^α − x^β)` (α ≠ β) or `c·x^α·ln x`.
pub fn fit_eq2(samples: &SampleSet, alpha: f64, beta: f64) -> Result<FitResult> {
    if samples.is_empty() {
        return Err(Error::Input("at least one sample is required".into()));
    }
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::Input("alpha and beta must be finite".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut largest_basis = 0.0f64;
    let mut largest_term = 0.0f64;
    for &(x, fx) in samples.points() {
        let (b, scale) = if alpha != beta {
            let (a, c) = (x.powf(alpha), x.powf(beta));
            (a - c, a.abs().max(c.abs()))
        } else {
            let a = x.powf(alpha);
            (a * x.ln(), a.abs())
        };
        num += b * fx;
        den += b * b;
        largest_basis = largest_basis.max(b.abs());
        largest_term = largest_term.max(scale);
    }
    if !(largest_basis > 1e-14 * largest_term) || den == 0.0 || !den.is_finite() {
        return Err(Error::IllConditioned(
            "the basis column is numerically zero on every sample".into(),
        ));
    }
    let c = num / den;
    let family = if alpha != beta {
        SolutionFamily::power_diff(c, alpha, beta)?
    } else {
        SolutionFamily::power_log(c, alpha)?
    };
    Ok(FitResult::new(family, samples, true))
}

/// Tests `lim_{x→1⁻} f(x) = f(1) = 0` for an eq1 fit.
///
/// The power family tends to `c* + c`; when this is negligible the family is
/// rewritten with the shared coefficient `k = (c* − c)/2` as `k·(x − x^q)`.
/// The logarithmic family tends to `c*`, which is then set to zero.
/// Applying the filter twice gives the same result.
pub fn continuity_filter(result: FitResult) -> FitResult {
    let mut out = result;
    match out.family {
        SolutionFamily::PowerAffine { c_star, c, q } => {
            let limit = c_star + c;
            if limit.abs() <= CONTINUITY_TOL * (1.0 + c_star.abs().max(c.abs())) {
                let k = (c_star - c) / 2.0;
                out.family = SolutionFamily::PowerAffine {
                    c_star: k,
                    c: -k,
                    q,
                };
                out.continuity = Some(Continuity::Continuous);
                out.note(format!(
                    "continuous at 1: entropy form c*(x - x^q) with c* = {k}, q = {q}"
                ));
            } else {
                out.continuity = Some(Continuity::Discontinuous { limit });
                out.note(format!("not continuous at 1, limit c*+c = {limit}"));
            }
        }
        SolutionFamily::XLogX { c, c_star } => {
            if c_star.abs() <= CONTINUITY_TOL * (1.0 + c.abs()) {
                out.family = SolutionFamily::XLogX { c, c_star: 0.0 };
                out.continuity = Some(Continuity::Continuous);
                out.note(format!(
                    "continuous at 1: entropy form c*x*ln(x) with c = {c}"
                ));
            } else {
                out.continuity = Some(Continuity::Discontinuous { limit: c_star });
                out.note(format!("not continuous at 1, limit c* = {c_star}"));
            }
        }
        _ => {
            out.note("continuity filter applies only to eq1 fits; family unchanged".to_string());
            return out;
        }
    }
    out
}

/// Like [`continuity_filter`] but recomputes the residual on `samples`.
pub fn continuity_filter_on(result: FitResult, samples: &SampleSet) -> FitResult {
    let mut out = continuity_filter(result);
    out.residual_norm = samples.rms_residual(&out.family);
    out
}
