//! Residuals of the two functional equations and of the additive,
//! multiplicative and logarithmic equations on restricted domains, plus
//! grid scanning into [`ResidualReport`]s.
//!
//! The degree-q equation, for x ∈ ]0,1[ and y ∈ ]0,1]:
//!
//! ```text
//! f(xy) + f((1−x)y) − f(y) = (f(x) + f(1−x))·y^q
//! ```
//!
//! The two-parameter equation, for x, y ∈ ]0,1]:
//!
//! ```text
//! f(xy) = ((x^α + x^β)/2)·f(y) + ((y^α + y^β)/2)·f(x)
//! ```
//!
//! Note that `c*·x + c·x^q` solves the first equation only when `c* = −c`
//! (and `c·x·ln x + c*·x` only when `c* = 0`): for y < 1 the residual of the
//! general form is `−(c* + c)·y^q`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::families::SolutionFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    pub fn and(self, other: Verdict) -> Verdict {
        if self.passed() && other.passed() {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Aggregate of pointwise residuals over a grid.
///
/// `tolerance` is the effective (already scale-adjusted) bound and
/// `verdict` is `Pass` iff `max_abs_residual <= tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    pub mean_abs_residual: f64,
    /// Argument tuple attaining the maximum.
    pub witness: Vec<f64>,
    /// Signed residual at the witness.
    pub residual_at_witness: f64,
    pub tolerance: f64,
    pub points: usize,
    pub verdict: Verdict,
}

/// One pointwise evaluation: the residual and the largest |f| value it used.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PointResidual {
    pub residual: f64,
    pub magnitude: f64,
}

/// Evaluates `eval` at every point (in parallel) and reduces in point order.
///
/// The effective tolerance is `tol·(1 + max magnitude)`. Non-finite residuals
/// count as infinite. Ties for the maximum go to the lexicographically
/// smallest witness, so reports do not depend on scheduling.
pub(crate) fn scan<F>(points: &[Vec<f64>], tol: f64, eval: F) -> Result<ResidualReport>
where
    F: Fn(&[f64]) -> Result<PointResidual> + Sync,
{
    if points.is_empty() {
        return Err(Error::Input("empty grid".into()));
    }
    let evaluated: Vec<PointResidual> = points
        .par_iter()
        .map(|p| eval(p))
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0usize;
    let mut best_abs = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut scale = 0.0f64;
    for (i, r) in evaluated.iter().enumerate() {
        let abs = if r.residual.is_finite() {
            r.residual.abs()
        } else {
            f64::INFINITY
        };
        sum += abs;
        if r.magnitude.is_finite() {
            scale = scale.max(r.magnitude);
        }
        let better =
            abs > best_abs || (abs == best_abs && lexicographic_lt(&points[i], &points[best]));
        if better {
            best = i;
            best_abs = abs;
        }
    }
    let tolerance = tol * (1.0 + scale);
    Ok(ResidualReport {
        max_abs_residual: best_abs,
        mean_abs_residual: sum / points.len() as f64,
        witness: points[best].clone(),
        residual_at_witness: evaluated[best].residual,
        tolerance,
        points: points.len(),
        verdict: if best_abs <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    })
}

fn lexicographic_lt(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x < y)
}

/// The interior points `k/(n+1)`, `k = 1..=n`.
pub fn open_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

/// Grid size `NxM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize) -> Self {
        GridSpec { nx, ny }
    }

    pub fn square(n: usize) -> Self {
        GridSpec { nx: n, ny: n }
    }

    pub fn product_points(&self) -> Vec<Vec<f64>> {
        let ys = open_grid(self.ny);
        open_grid(self.nx)
            .into_iter()
            .flat_map(|x| ys.iter().map(move |&y| vec![x, y]))
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("grid must look like NxM, got {s:?}"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let nx: usize = a.trim().parse().map_err(|_| bad())?;
        let ny: usize = b.trim().parse().map_err(|_| bad())?;
        Ok(GridSpec { nx, ny })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.nx, self.ny)
    }
}

/// Points of `D_n`: every coordinate and the coordinate sum lie in ]0,1[.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainDn {
    n: usize,
    points: Vec<Vec<f64>>,
}

impl DomainDn {
    pub fn new(n: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("D_n needs n >= 2, got {n}")));
        }
        for p in &points {
            if p.len() != n {
                return Err(Error::Input(format!("point {p:?} is not a {n}-tuple")));
            }
            let sum: f64 = p.iter().sum();
            let inside = |v: f64| v > 0.0 && v < 1.0;
            if !p.iter().all(|&v| inside(v)) || !inside(sum) {
                return Err(Error::Domain(format!("point {p:?} is not in D_{n}")));
            }
        }
        Ok(DomainDn { n, points })
    }

    /// All tuples `(i_1, …, i_n)/(m+1)` with every `i_k >= 1` and `Σ i_k <= m`.
    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        fn extend(prefix: &mut Vec<usize>, n: usize, budget: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            let reserved = n - prefix.len() - 1;
            for i in 1..=budget.saturating_sub(reserved) {
                prefix.push(i);
                extend(prefix, n, budget - i, out);
                prefix.pop();
            }
        }
        let mut tuples = Vec::new();
        if n >= 2 && m >= n {
            extend(&mut Vec::with_capacity(n), n, m, &mut tuples);
        }
        let denom = (m + 1) as f64;
        let points = tuples
            .into_iter()
            .map(|t| t.into_iter().map(|i| i as f64 / denom).collect())
            .collect();
        DomainDn::new(n, points)
    }

    /// Pairs of a product grid whose sum stays below 1.
    pub fn d2_from_spec(spec: GridSpec) -> Result<Self> {
        let points = spec
            .product_points()
            .into_iter()
            .filter(|p| p[0] + p[1] < 1.0 - 1e-12)
            .collect();
        DomainDn::new(2, points)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn eq1_terms(f: &SolutionFamily, x: f64, y: f64, q: f64) -> Result<PointResidual> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} is outside ]0,1[")));
    }
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!("y = {y} is outside ]0,1]")));
    }
    let fxy = f.eval(x * y)?;
    let fxy_c = f.eval((1.0 - x) * y)?;
    let fy = f.eval(y)?;
    let fx = f.eval(x)?;
    let fx_c = f.eval(1.0 - x)?;
    // Grouped so that y = 1 yields exactly −f(1).
    let residual = ((fxy + fxy_c) - (fx + fx_c) * y.powf(q)) - fy;
    let magnitude = [fxy, fxy_c, fy, fx, fx_c]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(PointResidual {
        residual,
        magnitude,
    })
}

/// `f(xy) + f((1−x)y) − f(y) − (f(x) + f(1−x))·y^q`.
pub fn eq1_residual(f: &SolutionFamily, x: f64, y: f64, q: f64) -> Result<f64> {
    eq1_terms(f, x, y, q).map(|r| r.residual)
}

/// The q = 1 residual computed in Q(t). Admissibility of `x`, `1 − x` and `y`
/// is decided by their values at `tau`.
pub fn eq1_residual_exact(
    f: &SolutionFamily,
    x: &FieldElement,
    y: &FieldElement,
    tau: f64,
) -> Result<FieldElement> {
    let one = FieldElement::one();
    let x_c = one.checked_sub(x)?;
    if !x.in_open_unit(tau)? || !x_c.in_open_unit(tau)? {
        return Err(Error::Domain(format!(
            "x = {x} is not admissible at tau = {tau}"
        )));
    }
    if !y.in_half_open_unit(tau)? {
        return Err(Error::Domain(format!(
            "y = {y} is not admissible at tau = {tau}"
        )));
    }
    let lhs = f
        .eval_exact(&x.checked_mul(y)?)?
        .checked_add(&f.eval_exact(&x_c.checked_mul(y)?)?)?;
    let rhs = f
        .eval_exact(x)?
        .checked_add(&f.eval_exact(&x_c)?)?
        .checked_mul(y)?;
    lhs.checked_sub(&rhs)?.checked_sub(&f.eval_exact(y)?)
}

fn eq2_terms(f: &SolutionFamily, x: f64, y: f64, alpha: f64, beta: f64) -> Result<PointResidual> {
    for (name, v) in [("x", x), ("y", y)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::Domain(format!("{name} = {v} is outside ]0,1]")));
        }
    }
    let g = |v: f64| 0.5 * (v.powf(alpha) + v.powf(beta));
    let fxy = f.eval(x * y)?;
    let fx = f.eval(x)?;
    let fy = f.eval(y)?;
    let residual = fxy - g(x) * fy - g(y) * fx;
    Ok(PointResidual {
        residual,
        magnitude: fxy.abs().max(fx.abs()).max(fy.abs()),
    })
}

/// `f(xy) − ((x^α+x^β)/2)·f(y) − ((y^α+y^β)/2)·f(x)`.
pub fn eq2_residual(f: &SolutionFamily, x: f64, y: f64, alpha: f64, beta: f64) -> Result<f64> {
    eq2_terms(f, x, y, alpha, beta).map(|r| r.residual)
}

/// `a(x + y) − a(x) − a(y)` over a D₂ grid.
pub fn check_additive_on_d2(
    a: &SolutionFamily,
    grid: &DomainDn,
    tol: f64,
) -> Result<ResidualReport> {
    if grid.n() != 2 {
        return Err(Error::Input("additivity is checked on D_2".into()));
    }
    scan(grid.points(), tol, |p| {
        let (x, y) = (p[0], p[1]);
        let (ax, ay, axy) = (a.eval(x)?, a.eval(y)?, a.eval(x + y)?);
        Ok(PointResidual {
            residual: axy - ax - ay,
            magnitude: ax.abs().max(ay.abs()).max(axy.abs()),
        })
    })
}

fn check_points(points: &[Vec<f64>]) -> Result<()> {
    for p in points {
        if p.len() != 2 || !p.iter().all(|&v| v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!("point {p:?} is not in ]0,1[²")));
        }
    }
    Ok(())
}

/// `μ(xy) − μ(x)·μ(y)` over pairs in ]0,1[².
pub fn check_multiplicative(
    mu: &SolutionFamily,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<ResidualReport> {
    check_points(points)?;
    scan(points, tol, |p| {
        let (mx, my, mxy) = (mu.eval(p[0])?, mu.eval(p[1])?, mu.eval(p[0] * p[1])?);
        Ok(PointResidual {
            residual: mxy - mx * my,
            magnitude: mx.abs().max(my.abs()).max(mxy.abs()),
        })
    })
}

/// `ℓ(xy) − ℓ(x) − ℓ(y)` over pairs in ]0,1[².
pub fn check_logarithmic(
    l: &SolutionFamily,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<ResidualReport> {
    check_points(points)?;
    scan(points, tol, |p| {
        let (lx, ly, lxy) = (l.eval(p[0])?, l.eval(p[1])?, l.eval(p[0] * p[1])?);
        Ok(PointResidual {
            residual: lxy - lx - ly,
            magnitude: lx.abs().max(ly.abs()).max(lxy.abs()),
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Equation {
    /// The degree-q equation with its fixed q.
    Eq1 {
        q: f64,
    },
    /// The two-parameter equation with fixed (α, β).
    Eq2 {
        alpha: f64,
        beta: f64,
    },
    Additive,
    Multiplicative,
    Logarithmic,
}

/// Result of [`grid_scan`]. For the degree-q equation the y = 1 boundary is
/// probed separately from the open interior grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridScan {
    pub interior: ResidualReport,
    pub boundary_probe: Option<ResidualReport>,
}

impl GridScan {
    pub fn verdict(&self) -> Verdict {
        let probe = self
            .boundary_probe
            .as_ref()
            .map_or(Verdict::Pass, |p| p.verdict);
        self.interior.verdict.and(probe)
    }

    /// The failing component (interior first), or the interior report.
    pub fn decisive(&self) -> &ResidualReport {
        match &self.boundary_probe {
            Some(p) if self.interior.verdict.passed() && !p.verdict.passed() => p,
            _ => &self.interior,
        }
    }
}

/// Scans `f` over the interior grid `k/(N+1) × k/(M+1)`. Additivity uses
/// only the pairs inside D₂; the degree-q equation also probes `(x, 1)`
/// for every grid `x`.
pub fn grid_scan(eq: Equation, f: &SolutionFamily, spec: GridSpec, tol: f64) -> Result<GridScan> {
    if spec.nx == 0 || spec.ny == 0 {
        return Err(Error::Input(format!("empty grid {spec}")));
    }
    match eq {
        Equation::Eq1 { q } => {
            let interior = scan(&spec.product_points(), tol, |p| eq1_terms(f, p[0], p[1], q))?;
            let probe_points: Vec<Vec<f64>> = open_grid(spec.nx)
                .into_iter()
                .map(|x| vec![x, 1.0])
                .collect();
            let probe = scan(&probe_points, tol, |p| eq1_terms(f, p[0], p[1], q))?;
            Ok(GridScan {
                interior,
                boundary_probe: Some(probe),
            })
        }
        Equation::Eq2 { alpha, beta } => Ok(GridScan {
            interior: scan(&spec.product_points(), tol, |p| {
                eq2_terms(f, p[0], p[1], alpha, beta)
            })?,
            boundary_probe: None,
        }),
        Equation::Additive => {
            let d2 = DomainDn::d2_from_spec(spec)?;
            Ok(GridScan {
                interior: check_additive_on_d2(f, &d2, tol)?,
                boundary_probe: None,
            })
        }
        Equation::Multiplicative => Ok(GridScan {
            interior: check_multiplicative(f, &spec.product_points(), tol)?,
            boundary_probe: None,
        }),
        Equation::Logarithmic => Ok(GridScan {
            interior: check_logarithmic(f, &spec.product_points(), tol)?,
            boundary_probe: None,
        }),
    }
}

/// Like [`grid_scan`] over explicit argument pairs. For the degree-q
/// equation the pairs with `y = 1` form the boundary probe.
pub fn point_scan(
    eq: Equation,
    f: &SolutionFamily,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<GridScan> {
    if points.is_empty() {
        return Err(Error::Input("no evaluation points".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != 2) {
        return Err(Error::Input(format!("expected argument pairs, got {p:?}")));
    }
    let single = |interior| GridScan {
        interior,
        boundary_probe: None,
    };
    match eq {
        Equation::Eq1 { q } => {
            let (probe, interior): (Vec<Vec<f64>>, Vec<Vec<f64>>) =
                points.iter().cloned().partition(|p| p[1] == 1.0);
            let run = |pts: &[Vec<f64>]| scan(pts, tol, |p| eq1_terms(f, p[0], p[1], q));
            if interior.is_empty() {
                return Ok(single(run(&probe)?));
            }
            Ok(GridScan {
                interior: run(&interior)?,
                boundary_probe: if probe.is_empty() {
                    None
                } else {
                    Some(run(&probe)?)
                },
            })
        }
        Equation::Eq2 { alpha, beta } => Ok(single(scan(points, tol, |p| {
            eq2_terms(f, p[0], p[1], alpha, beta)
        })?)),
        Equation::Additive => Ok(single(check_additive_on_d2(
            f,
            &DomainDn::new(2, points.to_vec())?,
            tol,
        )?)),
        Equation::Multiplicative => Ok(single(check_multiplicative(f, points, tol)?)),
        Equation::Logarithmic => Ok(single(check_logarithmic(f, points, tol)?)),
    }
}
