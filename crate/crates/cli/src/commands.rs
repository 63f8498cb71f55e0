//! Subcommand implementations. Each returns a [`RunReport`]; input problems
//! are reported as `Err(message)` and turned into exit code 2 by the caller.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};

use entrofunc::cocycle::{cf_map, check_cocycle_system, rf_map};
use entrofunc::equations::{
    eq1_residual_exact, grid_scan, open_grid, point_scan, DomainDn, Equation, GridScan, GridSpec,
};
use entrofunc::exactfield::{parse_rational, random_open_unit_element, BigRational, FieldElement};
use entrofunc::families::{parse_real, CustomMap, SolutionFamily};
use entrofunc::fit::{continuity_filter, fit_eq1, fit_eq2, Continuity, FitResult, SampleSet};
use entrofunc::reconstruct::{
    anchor_gap_exact, classify_eq2_solution, vincze_reconstruct, vincze_reconstruct_exact,
    GeneratorFunction, ReconstructionAnchors,
};

use crate::csvio;
use crate::report::{family_parameters, residual_json, witness_values, Outcome, RunReport};

pub type CmdResult = Result<RunReport, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EquationKind {
    Eq1,
    Eq2,
    Cocycle,
    Additive,
    Multiplicative,
    Logarithmic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CocycleSource {
    /// `f(u) + f(v) − f(u+v)`
    Cf,
    /// `[f(u/(u+v)) + f(v/(u+v))]·(u+v)^q`
    Rf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FitEquation {
    Eq1,
    Eq2,
}

pub struct CheckArgs {
    pub equation: EquationKind,
    pub target: String,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub grid: GridSpec,
    pub tol: f64,
    pub exact: bool,
    pub seed: u64,
    pub trials: usize,
    pub map: CocycleSource,
    pub tau: f64,
}

fn required(name: &str, v: Option<f64>, equation: &str) -> Result<f64, String> {
    v.ok_or_else(|| format!("{equation} requires --{name}"))
}

fn is_file_target(target: &str) -> bool {
    Path::new(target).is_file() || target.ends_with(".csv")
}

fn parse_family(literal: &str) -> Result<SolutionFamily, String> {
    literal
        .parse()
        .map_err(|e| format!("invalid family literal {literal:?}: {e}"))
}

pub fn check_inputs(a: &CheckArgs) -> Value {
    json!({
        "equation": format!("{:?}", a.equation).to_lowercase(),
        "target": a.target,
        "q": a.q,
        "alpha": a.alpha,
        "beta": a.beta,
        "grid": a.grid.to_string(),
        "tol": a.tol,
        "exact": a.exact,
        "seed": a.seed,
        "trials": a.trials,
        "map": format!("{:?}", a.map).to_lowercase(),
        "tau": a.tau,
    })
}

fn to_equation(a: &CheckArgs) -> Result<Equation, String> {
    Ok(match a.equation {
        EquationKind::Eq1 => Equation::Eq1 {
            q: required("q", a.q, "eq1")?,
        },
        EquationKind::Eq2 => Equation::Eq2 {
            alpha: required("alpha", a.alpha, "eq2")?,
            beta: required("beta", a.beta, "eq2")?,
        },
        EquationKind::Additive => Equation::Additive,
        EquationKind::Multiplicative => Equation::Multiplicative,
        EquationKind::Logarithmic => Equation::Logarithmic,
        EquationKind::Cocycle => unreachable!("handled separately"),
    })
}

fn scan_report(mut report: RunReport, scan: &GridScan) -> RunReport {
    let decisive = scan.decisive();
    report.max_abs_residual = Some(decisive.max_abs_residual);
    report.witness = Some(witness_values(&decisive.witness));
    if !scan.verdict().passed() {
        let location = if scan
            .boundary_probe
            .as_ref()
            .is_some_and(|p| std::ptr::eq(p, decisive))
        {
            "y=1 boundary probe"
        } else {
            "interior grid"
        };
        report.notes.push(format!(
            "residual {} at {:?} ({location}) exceeds tolerance {:e}",
            decisive.residual_at_witness, decisive.witness, decisive.tolerance
        ));
    }
    report.details = json!({
        "interior": residual_json(&scan.interior),
        "boundary_probe": scan.boundary_probe.as_ref().map(residual_json),
    });
    report.with_outcome(scan.verdict().into())
}

pub fn check(a: &CheckArgs) -> CmdResult {
    let report = RunReport::new("check", check_inputs(a));
    if a.exact {
        return check_exact(a, report);
    }
    if a.equation == EquationKind::Cocycle {
        return check_cocycle(a, report);
    }
    let eq = to_equation(a)?;
    if is_file_target(&a.target) {
        let rows = csvio::read_samples(Path::new(&a.target))?;
        let table = Tabulated::new(&rows)?;
        let points = table.points_for(eq);
        if points.is_empty() {
            return Err(format!(
                "{}: no argument pairs whose required values are all tabulated",
                a.target
            ));
        }
        let f = table.family(&a.target);
        let scan = point_scan(eq, &f, &points, a.tol).map_err(|e| e.to_string())?;
        let mut report = scan_report(report, &scan);
        report
            .notes
            .push(format!("{} tabulated argument pairs checked", points.len()));
        Ok(report)
    } else {
        let f = parse_family(&a.target)?;
        let scan = grid_scan(eq, &f, a.grid, a.tol).map_err(|e| e.to_string())?;
        let mut report = scan_report(report, &scan);
        report.parameters = family_parameters(&f);
        Ok(report)
    }
}

fn check_cocycle(a: &CheckArgs, mut report: RunReport) -> CmdResult {
    if is_file_target(&a.target) {
        return Err(
            "cocycle checks need a family literal; scaled arguments cannot be tabulated".into(),
        );
    }
    let q = required("q", a.q, "cocycle")?;
    let f = parse_family(&a.target)?;
    let g = match a.map {
        CocycleSource::Cf => cf_map(&f),
        CocycleSource::Rf => rf_map(&f, q),
    };
    let m = a.grid.nx.max(3);
    let d2 = DomainDn::uniform(2, m).map_err(|e| e.to_string())?;
    let d3 = DomainDn::uniform(3, m).map_err(|e| e.to_string())?;
    let r = check_cocycle_system(&g, q, &d2, &d3, a.tol).map_err(|e| e.to_string())?;
    let parts = [
        ("symmetry", &r.symmetry),
        ("cocycle", &r.cocycle),
        ("homogeneity", &r.homogeneity),
    ];
    let decisive = parts
        .iter()
        .find(|(_, p)| !p.verdict.passed())
        .unwrap_or(&parts[0]);
    report.max_abs_residual = Some(
        parts
            .iter()
            .map(|(_, p)| p.max_abs_residual)
            .fold(0.0, f64::max),
    );
    report.witness = Some(witness_values(&decisive.1.witness));
    for (name, p) in &parts {
        report.notes.push(format!("{name}: {}", p.verdict));
    }
    report.parameters = family_parameters(&f);
    report.details = json!({
        "symmetry": residual_json(&r.symmetry),
        "cocycle": residual_json(&r.cocycle),
        "homogeneity": residual_json(&r.homogeneity),
    });
    Ok(report.with_outcome(r.verdict().into()))
}

/// Float samples used as a function: lookups match tabulated abscissae to
/// within 1e-12.
struct Tabulated {
    rows: Vec<(f64, f64)>,
}

const MATCH_TOL: f64 = 1e-12;

impl Tabulated {
    fn new(rows: &[(f64, f64)]) -> Result<Self, String> {
        let set = SampleSet::new(rows.to_vec()).map_err(|e| e.to_string())?;
        let mut rows = set.points().to_vec();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Tabulated { rows })
    }

    fn lookup(rows: &[(f64, f64)], x: f64) -> Option<f64> {
        let i = rows.partition_point(|r| r.0 < x);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter_map(|j| rows.get(j))
            .find(|r| (r.0 - x).abs() <= MATCH_TOL)
            .map(|r| r.1)
    }

    fn has(&self, x: f64) -> bool {
        Tabulated::lookup(&self.rows, x).is_some()
    }

    fn family(&self, name: &str) -> SolutionFamily {
        let rows = Arc::new(self.rows.clone());
        SolutionFamily::Custom(CustomMap::new(format!("table:{name}"), move |x| {
            Tabulated::lookup(&rows, x).unwrap_or(f64::NAN)
        }))
    }

    fn points_for(&self, eq: Equation) -> Vec<Vec<f64>> {
        let xs: Vec<f64> = self.rows.iter().map(|r| r.0).collect();
        let mut out = Vec::new();
        for &x in &xs {
            for &y in &xs {
                let ok = match eq {
                    Equation::Eq1 { .. } => {
                        x < 1.0 && self.has(1.0 - x) && self.has(x * y) && self.has((1.0 - x) * y)
                    }
                    Equation::Eq2 { .. } => self.has(x * y),
                    Equation::Additive => x + y < 1.0 && self.has(x + y),
                    Equation::Multiplicative | Equation::Logarithmic => {
                        x < 1.0 && y < 1.0 && self.has(x * y)
                    }
                };
                if ok {
                    out.push(vec![x, y]);
                }
            }
        }
        out
    }
}

fn check_exact(a: &CheckArgs, mut report: RunReport) -> CmdResult {
    if a.equation != EquationKind::Eq1 {
        return Err("--exact supports eq1 only".into());
    }
    if a.q.is_some_and(|q| q != 1.0) {
        return Err("--exact supports q = 1 only".into());
    }
    let (f, pairs) = if is_file_target(&a.target) {
        let rows = csvio::read_exact_samples(Path::new(&a.target))?;
        exact_table(&rows, a.tau)?
    } else {
        let f = parse_family(&a.target)?;
        let probe = FieldElement::from_ratio(1, 2);
        if let Err(e) = f.eval_exact(&probe) {
            return Err(format!("{}: {e}", a.target));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        (f, random_pairs(&mut rng, a.trials, a.tau)?)
    };
    let summary = exact_residuals(&f, &pairs, a.tau)?;
    report.parameters = family_parameters(&f);
    fill_exact(&mut report, &summary);
    Ok(report)
}

struct ExactSummary {
    zeros: usize,
    total: usize,
    first_nonzero: Option<(FieldElement, FieldElement, FieldElement)>,
}

fn exact_residuals(
    f: &SolutionFamily,
    pairs: &[(FieldElement, FieldElement)],
    tau: f64,
) -> Result<ExactSummary, String> {
    let mut s = ExactSummary {
        zeros: 0,
        total: pairs.len(),
        first_nonzero: None,
    };
    for (x, y) in pairs {
        let r = eq1_residual_exact(f, x, y, tau).map_err(|e| e.to_string())?;
        if r.is_zero() {
            s.zeros += 1;
        } else if s.first_nonzero.is_none() {
            s.first_nonzero = Some((x.clone(), y.clone(), r));
        }
    }
    Ok(s)
}

fn fill_exact(report: &mut RunReport, s: &ExactSummary) {
    report.notes.push(format!(
        "{}/{} residuals are the canonical zero element",
        s.zeros, s.total
    ));
    report.max_abs_residual = None;
    report.witness = s
        .first_nonzero
        .as_ref()
        .map(|(x, y, _)| vec![Value::from(x.to_string()), Value::from(y.to_string())]);
    report.details = json!({
        "zero_residuals": s.zeros,
        "trials": s.total,
        "first_nonzero": s.first_nonzero.as_ref().map(|(x, y, r)| json!({
            "x": x.to_string(), "y": y.to_string(), "residual": r.to_string()
        })),
    });
    let outcome = if s.zeros == s.total && s.total > 0 {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    let taken = std::mem::replace(report, RunReport::new("", Value::Null));
    *report = taken.with_outcome(outcome);
}

fn random_pairs(
    rng: &mut ChaCha8Rng,
    n: usize,
    tau: f64,
) -> Result<Vec<(FieldElement, FieldElement)>, String> {
    (0..n)
        .map(|_| {
            let x = random_open_unit_element(rng, 3, 9, tau);
            let y = random_open_unit_element(rng, 3, 9, tau);
            x.zip(y)
                .ok_or_else(|| format!("no admissible random elements at tau = {tau}"))
        })
        .collect()
}

/// Exact rows as a function with an exact evaluator, plus every admissible
/// pair whose required arguments are tabulated.
fn exact_table(
    rows: &[(FieldElement, FieldElement)],
    tau: f64,
) -> Result<(SolutionFamily, Vec<(FieldElement, FieldElement)>), String> {
    let mut table: HashMap<FieldElement, FieldElement> = HashMap::new();
    for (x, fx) in rows {
        if let Some(prev) = table.insert(x.clone(), fx.clone()) {
            if &prev != fx {
                return Err(format!("conflicting values for x = {x}"));
            }
        }
    }
    let one = FieldElement::one();
    let mut pairs = Vec::new();
    for x in table.keys() {
        if !x.in_open_unit(tau).unwrap_or(false) {
            continue;
        }
        let xc = one.checked_sub(x).map_err(|e| e.to_string())?;
        if !table.contains_key(&xc) {
            continue;
        }
        for y in table.keys() {
            if !y.in_half_open_unit(tau).unwrap_or(false) {
                continue;
            }
            let needed = [x.checked_mul(y), xc.checked_mul(y)];
            if needed
                .iter()
                .all(|v| v.as_ref().is_ok_and(|v| table.contains_key(v)))
            {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    if pairs.is_empty() {
        return Err("no admissible pairs whose required values are all tabulated".into());
    }
    // deterministic order independent of hashing
    pairs.sort_by_key(|(x, y)| (x.to_string(), y.to_string()));
    let table = Arc::new(table);
    let map = CustomMap::new("exact-table", |_| f64::NAN).with_exact(move |x| {
        table
            .get(x)
            .cloned()
            .ok_or_else(|| entrofunc::Error::Input(format!("{x} is not tabulated")))
    });
    Ok((SolutionFamily::Custom(map), pairs))
}

pub struct ReconstructArgs {
    pub alpha: String,
    pub beta: String,
    pub t1: String,
    pub t2: String,
    pub f_t1: String,
    pub points: usize,
    pub exact: bool,
}

pub fn reconstruct_inputs(a: &ReconstructArgs) -> Value {
    json!({
        "alpha": a.alpha, "beta": a.beta, "t1": a.t1, "t2": a.t2, "f_t1": a.f_t1,
        "points": a.points, "exact": a.exact,
    })
}

fn real(name: &str, s: &str) -> Result<f64, String> {
    parse_real(s).map_err(|e| format!("--{name}: {e}"))
}

pub fn reconstruct(a: &ReconstructArgs) -> CmdResult {
    let mut report = RunReport::new("reconstruct", reconstruct_inputs(a));
    let (alpha, beta) = (real("alpha", &a.alpha)?, real("beta", &a.beta)?);
    let (t1, t2, f_t1) = (
        real("t1", &a.t1)?,
        real("t2", &a.t2)?,
        real("f-t1", &a.f_t1)?,
    );
    let g = GeneratorFunction::power_mean(alpha, beta);
    let anchors = ReconstructionAnchors::new(&g, t1, t2, f_t1).map_err(|e| {
        format!("{e}; g(x) = (x^{alpha} + x^{beta})/2 is multiplicative here, so the value at t1 does not determine f")
    })?;
    let xs = open_grid(a.points.max(1));
    let mut table = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = vincze_reconstruct(&g, &anchors, x).map_err(|e| e.to_string())?;
        table.push(json!({ "x": x, "f": v }));
    }
    let class = classify_eq2_solution(alpha, beta, f_t1, t1).map_err(|e| e.to_string())?;
    let deviation = xs
        .iter()
        .zip(&table)
        .map(|(&x, row)| {
            (row["f"].as_f64().unwrap_or(f64::NAN) - class.family.eval(x).unwrap_or(f64::NAN)).abs()
        })
        .fold(0.0f64, f64::max);
    report.max_abs_residual = Some(deviation);
    report.parameters = family_parameters(&class.family);
    report.notes.push(format!("classified as {}", class.family));
    report.notes.push(format!(
        "max |reconstruction - classified family| over the grid: {deviation:e}"
    ));
    if f_t1 == 0.0 {
        report.notes.push("f(t1) = 0 gives the zero family".into());
    }
    let mut details = json!({
        "family": class.family.to_string(),
        "kind": class.family.kind(),
        "regular_branch": class.regular_branch,
        "denominator": g.gap(t1, t2),
        "table": table,
    });
    if a.exact {
        let int = |name: &str, v: f64| -> Result<i32, String> {
            if v.fract() == 0.0 && v.abs() <= 64.0 {
                Ok(v as i32)
            } else {
                Err(format!(
                    "--exact needs integer --{name} with |{name}| <= 64"
                ))
            }
        };
        let (ai, bi) = (int("alpha", alpha)?, int("beta", beta)?);
        let rat = |name: &str, s: &str| -> Result<BigRational, String> {
            parse_rational(s).map_err(|e| format!("--{name}: {e}"))
        };
        let (r1, r2, rf) = (rat("t1", &a.t1)?, rat("t2", &a.t2)?, rat("f-t1", &a.f_t1)?);
        let gap = anchor_gap_exact(ai, bi, &r1, &r2).map_err(|e| e.to_string())?;
        let f = vincze_reconstruct_exact(ai, bi, &r1, &r2, &rf, &FieldElement::t())
            .map_err(|e| e.to_string())?;
        details["exact"] = json!({ "denominator": gap.to_string(), "f(t)": f.to_string() });
        report
            .notes
            .push(format!("exact reconstruction f(t) = {f}"));
    }
    report.details = details;
    Ok(report.with_outcome(Outcome::Pass))
}

pub struct FitArgs {
    pub equation: FitEquation,
    pub file: PathBuf,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

pub fn fit_inputs(a: &FitArgs) -> Value {
    json!({
        "equation": format!("{:?}", a.equation).to_lowercase(),
        "file": a.file.display().to_string(),
        "q": a.q, "alpha": a.alpha, "beta": a.beta,
    })
}

fn continuity_json(c: &Option<Continuity>) -> Value {
    match c {
        None => Value::Null,
        Some(Continuity::Continuous) => json!({ "continuous": true, "limit": 0.0 }),
        Some(Continuity::Discontinuous { limit }) => json!({ "continuous": false, "limit": limit }),
    }
}

pub fn fit(a: &FitArgs) -> CmdResult {
    let mut report = RunReport::new("fit", fit_inputs(a));
    let rows = csvio::read_samples(&a.file)?;
    let samples = SampleSet::new(rows).map_err(|e| format!("{}: {e}", a.file.display()))?;
    let result: FitResult = match a.equation {
        FitEquation::Eq1 => {
            let r = fit_eq1(&samples, a.q).map_err(|e| e.to_string())?;
            continuity_filter(r)
        }
        FitEquation::Eq2 => {
            let alpha = required("alpha", a.alpha, "eq2")?;
            let beta = required("beta", a.beta, "eq2")?;
            fit_eq2(&samples, alpha, beta).map_err(|e| e.to_string())?
        }
    };
    report.parameters = family_parameters(&result.family);
    report.residual_norm = Some(result.residual_norm);
    report.notes = result.notes.clone();
    report.details = json!({
        "family": result.family.to_string(),
        "kind": result.family.kind(),
        "identifiable": result.identifiable,
        "regular_branch": result.regular_branch,
        "continuity": continuity_json(&result.continuity),
        "alternatives": result.alternatives.iter().map(|alt| json!({
            "family": alt.family.to_string(),
            "parameters": family_parameters(&alt.family),
            "residual_norm": alt.residual_norm,
        })).collect::<Vec<_>>(),
        "samples": samples.len(),
    });
    let outcome = if result.identifiable {
        Outcome::Pass
    } else {
        report
            .notes
            .push("parameters are not identifiable from these samples".into());
        Outcome::Fail
    };
    Ok(report.with_outcome(outcome))
}

pub struct DemoArgs {
    pub seed: u64,
    pub trials: usize,
    pub c_star: String,
    pub scale: String,
    pub tau: f64,
}

pub fn demo_inputs(a: &DemoArgs) -> Value {
    json!({ "seed": a.seed, "trials": a.trials, "c_star": a.c_star, "scale": a.scale, "tau": a.tau })
}

/// `f = c*·x + d` with `d = scale·d/dt` on Q(t), checked exactly at q = 1.
pub fn demo_pathological(a: &DemoArgs) -> CmdResult {
    let mut report = RunReport::new("demo-pathological", demo_inputs(a));
    let c_star = parse_rational(&a.c_star).map_err(|e| format!("--c-star: {e}"))?;
    let scale = parse_rational(&a.scale).map_err(|e| format!("--scale: {e}"))?;
    let c_star_is_zero = FieldElement::constant(c_star.clone()).is_zero();
    let f = SolutionFamily::exact_derivation(c_star, scale);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let pairs = random_pairs(&mut rng, a.trials, a.tau)?;
    let summary = exact_residuals(&f, &pairs, a.tau)?;
    report.parameters = family_parameters(&f);
    fill_exact(&mut report, &summary);
    report.notes.push(format!(
        "f = {f}; derivation d/dt on Q(t), point admissibility decided at tau = {}",
        a.tau
    ));
    if !c_star_is_zero {
        report.notes.push(
            "the c*·x term leaves the exact residual −c*·y; only c* = 0 gives a solution".into(),
        );
    }
    Ok(report)
}

pub struct SampleArgs {
    pub family: String,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
    pub exact: bool,
    pub tau: f64,
}

/// Produces CSV text for `sample`.
pub fn sample_csv(a: &SampleArgs) -> Result<Vec<u8>, String> {
    let f = parse_family(&a.family)?;
    let mut buf = Vec::new();
    if a.exact {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let one = FieldElement::one();
        let mut rows: Vec<(FieldElement, FieldElement)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (x, y) in random_pairs(&mut rng, a.n, a.tau)? {
            let xc = one.checked_sub(&x).map_err(|e| e.to_string())?;
            let args = [
                x.checked_mul(&y).map_err(|e| e.to_string())?,
                xc.checked_mul(&y).map_err(|e| e.to_string())?,
                x,
                xc,
                y,
            ];
            for v in args {
                if seen.insert(v.clone()) {
                    let fv = f.eval_exact(&v).map_err(|e| e.to_string())?;
                    rows.push((v, fv));
                }
            }
        }
        csvio::write_exact_samples(&mut buf, &rows).map_err(|e| e.to_string())?;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let noise = Normal::new(0.0, a.noise).map_err(|e| format!("--noise: {e}"))?;
        let n = a.n.max(1);
        let mut rows = Vec::with_capacity(n);
        for i in 1..=n {
            let x = i as f64 / n as f64;
            let mut v = f.eval(x).map_err(|e| e.to_string())?;
            if a.noise > 0.0 {
                v += noise.sample(&mut rng);
            }
            rows.push((x, v));
        }
        csvio::write_samples(&mut buf, &rows).map_err(|e| e.to_string())?;
    }
    Ok(buf)
}
