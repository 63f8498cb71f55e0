//! Cauchy-difference and scaled-symmetric maps on D₂, and a verifier for the
//! symmetric, cocycle and μ-homogeneity system with μ(t) = t^q.
//!
//! Substituting `x = u/(u+v)`, `y = u+v` turns the degree-q equation into
//! `C_f(u,v) = R_f(u,v)` where
//!
//! ```text
//! C_f(u,v) = f(u) + f(v) − f(u+v)
//! R_f(u,v) = [f(u/(u+v)) + f(v/(u+v))]·(u+v)^q
//! ```
//!
//! so the degree-q residual at `(x, y)` equals `C_f − R_f` at `(xy, (1−x)y)`.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{rngs::StdRng, Rng, SeedableRng};

use crate::equations::{scan, DomainDn, PointResidual, ResidualReport, Verdict};
use crate::error::{Error, Result};
use crate::families::SolutionFamily;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Built from a one-variable function (`C_f` or `R_f`).
    DerivedFromF(String),
    Custom(String),
}

/// A real function on D₂.
#[derive(Clone)]
pub struct CocycleMap {
    evaluator: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    provenance: Provenance,
}

impl fmt::Debug for CocycleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CocycleMap")
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl CocycleMap {
    pub fn custom(
        name: impl Into<String>,
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CocycleMap {
            evaluator: Arc::new(g),
            provenance: Provenance::Custom(name.into()),
        }
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Value at `(u, v)`; callers are expected to stay inside D₂.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        (self.evaluator)(u, v)
    }
}

/// `(u, v) ↦ f(u) + f(v) − f(u+v)`.
pub fn cf_map(f: &SolutionFamily) -> CocycleMap {
    let f = f.clone();
    let name = format!("C_f for {f}");
    CocycleMap {
        evaluator: Arc::new(move |u, v| {
            let e = |x: f64| f.eval(x).unwrap_or(f64::NAN);
            e(u) + e(v) - e(u + v)
        }),
        provenance: Provenance::DerivedFromF(name),
    }
}

/// `(u, v) ↦ [f(u/(u+v)) + f(v/(u+v))]·(u+v)^q`.
pub fn rf_map(f: &SolutionFamily, q: f64) -> CocycleMap {
    let f = f.clone();
    let name = format!("R_f for {f}, q = {q}");
    CocycleMap {
        evaluator: Arc::new(move |u, v| {
            let e = |x: f64| f.eval(x).unwrap_or(f64::NAN);
            let s = u + v;
            (e(u / s) + e(v / s)) * s.powf(q)
        }),
        provenance: Provenance::DerivedFromF(name),
    }
}

/// Sub-reports for the three equations of the system.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleReport {
    /// `G(x,y) = G(y,x)` on D₂.
    pub symmetry: ResidualReport,
    /// `G(x,y) + G(x+y,z) = G(y,z) + G(x,y+z)` on D₃.
    pub cocycle: ResidualReport,
    /// `G(tx,ty) = t^q·G(x,y)`, witnesses are `(t, x, y)`.
    pub homogeneity: ResidualReport,
}

impl CocycleReport {
    pub fn verdict(&self) -> Verdict {
        self.symmetry
            .verdict
            .and(self.cocycle.verdict)
            .and(self.homogeneity.verdict)
    }
}

const HOMOGENEITY_SEED: u64 = 0x5eed_0001;

/// Fixed scaling factors plus five seeded random ones in ]0,1[.
pub fn homogeneity_factors() -> Vec<f64> {
    let mut ts = vec![0.2, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.9];
    let mut rng = StdRng::seed_from_u64(HOMOGENEITY_SEED);
    ts.extend((0..5).map(|_| rng.gen_range(0.01..0.99)));
    ts
}

fn abs_max(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn check_cocycle_system(
    g: &CocycleMap,
    mu_q: f64,
    d2: &DomainDn,
    d3: &DomainDn,
    tol: f64,
) -> Result<CocycleReport> {
    if d2.n() != 2 || d3.n() != 3 {
        return Err(Error::Input("expected a D_2 and a D_3 grid".into()));
    }
    if d2.is_empty() || d3.is_empty() {
        return Err(Error::Input("empty grid".into()));
    }
    let symmetry = scan(d2.points(), tol, |p| {
        let (a, b) = (g.eval(p[0], p[1]), g.eval(p[1], p[0]));
        Ok(PointResidual {
            residual: a - b,
            magnitude: abs_max(&[a, b]),
        })
    })?;
    let cocycle = scan(d3.points(), tol, |p| {
        let (x, y, z) = (p[0], p[1], p[2]);
        let terms = [
            g.eval(x, y),
            g.eval(x + y, z),
            g.eval(y, z),
            g.eval(x, y + z),
        ];
        Ok(PointResidual {
            residual: (terms[0] + terms[1]) - (terms[2] + terms[3]),
            magnitude: abs_max(&terms),
        })
    })?;
    let scaled: Vec<Vec<f64>> = homogeneity_factors()
        .into_iter()
        .flat_map(|t| d2.points().iter().map(move |p| vec![t, p[0], p[1]]))
        .collect();
    let homogeneity = scan(&scaled, tol, |p| {
        let (t, x, y) = (p[0], p[1], p[2]);
        let (a, b) = (g.eval(t * x, t * y), g.eval(x, y));
        Ok(PointResidual {
            residual: a - t.powf(mu_q) * b,
            magnitude: abs_max(&[a, b]),
        })
    })?;
    Ok(CocycleReport {
        symmetry,
        cocycle,
        homogeneity,
    })
}

/// A proposed decomposition of a cocycle.
#[derive(Clone, Debug)]
pub enum Decomposition {
    /// `G(x,y) = c·[x^q + y^q − (x+y)^q]`, for q ≠ 1.
    Scalar(f64),
    /// `G(x,y) = φ(x) + φ(y) − φ(x+y)`, for q = 1.
    Phi(SolutionFamily),
}

/// Checks `G` against a proposed decomposition on a D₂ grid. The branch must
/// match q: a scalar for q ≠ 1, a function φ for q = 1.
pub fn ng_decomposition_check(
    g: &CocycleMap,
    q: f64,
    proposal: &Decomposition,
    d2: &DomainDn,
    tol: f64,
) -> Result<ResidualReport> {
    if d2.n() != 2 {
        return Err(Error::Input("decompositions are checked on D_2".into()));
    }
    match (proposal, q == 1.0) {
        (Decomposition::Scalar(_), true) => Err(Error::Branch(
            "q = 1 decompositions are given by a function phi, not a scalar".into(),
        )),
        (Decomposition::Phi(_), false) => Err(Error::Branch(
            "q != 1 decompositions are given by a scalar c, not a function".into(),
        )),
        (Decomposition::Scalar(c), false) => scan(d2.points(), tol, |p| {
            let (x, y) = (p[0], p[1]);
            let lhs = g.eval(x, y);
            let rhs = c * (x.powf(q) + y.powf(q) - (x + y).powf(q));
            Ok(PointResidual {
                residual: lhs - rhs,
                magnitude: abs_max(&[lhs, rhs]),
            })
        }),
        (Decomposition::Phi(phi), true) => scan(d2.points(), tol, |p| {
            let (x, y) = (p[0], p[1]);
            let lhs = g.eval(x, y);
            let rhs = phi.eval(x)? + phi.eval(y)? - phi.eval(x + y)?;
            Ok(PointResidual {
                residual: lhs - rhs,
                magnitude: abs_max(&[lhs, rhs]),
            })
        }),
    }
}

fn require_d2(u: f64, v: f64) -> Result<()> {
    let inside = |t: f64| t > 0.0 && t < 1.0;
    if inside(u) && inside(v) && inside(u + v) {
        Ok(())
    } else {
        Err(Error::Domain(format!("({u}, {v}) is not in D_2")))
    }
}

/// `(u, v) ↦ (u/(u+v), u+v)`, from D₂ onto ]0,1[².
pub fn substitution_transform(u: f64, v: f64) -> Result<(f64, f64)> {
    require_d2(u, v)?;
    let s = u + v;
    Ok((u / s, s))
}

/// `(x, y) ↦ (xy, (1−x)y)`, the inverse of [`substitution_transform`].
pub fn substitution_inverse(x: f64, y: f64) -> Result<(f64, f64)> {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!("({x}, {y}) is not in ]0,1[²")));
    }
    Ok((x * y, (1.0 - x) * y))
}

fn rational_inside(r: &BigRational) -> bool {
    *r > BigRational::zero() && *r < BigRational::one()
}

pub fn substitution_transform_exact(
    u: &BigRational,
    v: &BigRational,
) -> Result<(BigRational, BigRational)> {
    let s = u + v;
    if !(rational_inside(u) && rational_inside(v) && rational_inside(&s)) {
        return Err(Error::Domain(format!("({u}, {v}) is not in D_2")));
    }
    Ok((u / &s, s))
}

pub fn substitution_inverse_exact(
    x: &BigRational,
    y: &BigRational,
) -> Result<(BigRational, BigRational)> {
    if !(rational_inside(x) && rational_inside(y)) {
        return Err(Error::Domain(format!("({x}, {y}) is not in ]0,1[²")));
    }
    Ok((x * y, (BigRational::one() - x) * y))
}
