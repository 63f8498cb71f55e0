//! Worked examples checked against independently computed values: hand
//! arithmetic in exact rationals or closed forms evaluated directly here,
//! never through the code under test.

use num_bigint::BigInt;
use num_rational::BigRational;

use entrofunc::cocycle::{
    cf_map, check_cocycle_system, rf_map, substitution_inverse_exact, substitution_transform_exact,
    CocycleMap,
};
use entrofunc::equations::{
    check_additive_on_d2, eq1_residual, eq1_residual_exact, eq2_residual, grid_scan, DomainDn,
    Equation, GridSpec,
};
use entrofunc::exactfield::{derivation_apply, Poly};
use entrofunc::families::{entropy_sum, shannon_entropy, tsallis_entropy, CustomMap};
use entrofunc::fit::{continuity_filter, fit_eq1, fit_eq2, Continuity, SampleSet};
use entrofunc::reconstruct::{
    anchor_gap_exact, classify_eq2_solution, find_anchors, vincze_reconstruct_exact, AnchorChoice,
};
use entrofunc::{FieldElement, ProbVector, SolutionFamily};

const TAU: f64 = 0.7390851332151607;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fe(s: &str) -> FieldElement {
    s.parse().unwrap()
}

fn exact_square() -> SolutionFamily {
    SolutionFamily::Custom(CustomMap::new("x^2", |x| x * x).with_exact(|x| x.checked_mul(x)))
}

#[test]
fn rational_function_arithmetic() {
    assert_eq!(fe("t").checked_add(&fe("t")).unwrap(), fe("2*t"));
    assert_eq!(
        fe("t").checked_mul(&fe("1/t")).unwrap(),
        FieldElement::one()
    );
    let quotient = fe("t^2 - 1").checked_div(&fe("t - 1")).unwrap();
    assert_eq!(quotient.numerator(), &Poly::from_i64(&[1, 1]));
    assert!(quotient.denominator().is_one());
}

#[test]
fn formal_derivative_examples() {
    assert!(derivation_apply(&FieldElement::constant(q(-7, 3)))
        .unwrap()
        .is_zero());
    assert_eq!(derivation_apply(&fe("t^2")).unwrap(), fe("2*t"));
    assert_eq!(derivation_apply(&fe("1/t")).unwrap(), fe("-1/t^2"));
}

#[test]
fn approximate_values() {
    assert_eq!(
        FieldElement::from_ratio(1, 2).approx_value(0.1).unwrap(),
        0.5
    );
    assert_eq!(fe("t").approx_value(0.739).unwrap(), 0.739);
    let v = fe("t/(1+t)").approx_value(0.739).unwrap();
    assert!((v - 0.739 / 1.739).abs() < 1e-15);
    assert!((v - 0.42495).abs() < 1e-5);
}

#[test]
fn family_values() {
    let xlogx = SolutionFamily::xlogx(1.0, 0.0).unwrap();
    assert_eq!(xlogx.eval(1.0).unwrap(), 0.0);
    let diff = SolutionFamily::power_diff(1.0, 1.0, 2.0).unwrap();
    assert!((diff.eval(0.5).unwrap() - 0.25).abs() < 1e-16);
    let affine = SolutionFamily::power_affine(1.0, -1.0, 2.0).unwrap();
    assert_eq!(affine.eval(1.0).unwrap(), 0.0);
}

#[test]
fn entropies() {
    let ln2 = std::f64::consts::LN_2;
    let half = ProbVector::new(vec![0.5, 0.5]).unwrap();
    let skew = ProbVector::new(vec![0.5, 0.25, 0.25]).unwrap();
    let point = ProbVector::new(vec![1.0]).unwrap();
    assert!((shannon_entropy(&half) - ln2).abs() < 1e-15);
    assert!((shannon_entropy(&skew) - 1.5 * ln2).abs() < 1e-15);
    assert_eq!(shannon_entropy(&point), 0.0);
    assert!((tsallis_entropy(&half, 2.0).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(tsallis_entropy(&point, 3.5).unwrap(), 0.0);
    assert!((tsallis_entropy(&half, 1.0 + 1e-6).unwrap() - ln2).abs() < 1e-4);
    // Σ −p ln p via the x ln x family with c = −1
    let h = SolutionFamily::xlogx(-1.0, 0.0).unwrap();
    assert!((entropy_sum(&h, &skew).unwrap() - 1.5 * ln2).abs() < 1e-15);
}

#[test]
fn eq1_float_examples() {
    let affine = SolutionFamily::power_affine(1.0, -1.0, 2.0).unwrap();
    assert!(eq1_residual(&affine, 0.25, 0.5, 2.0).unwrap().abs() < 1e-16);
    // x²,  q = 1 at (1/2, 1/2): LHS 1/16 + 1/16 − 1/4 = −1/8, RHS (1/4 + 1/4)·1/2 = 1/4
    let sq = SolutionFamily::custom("x^2", |x| x * x);
    assert_eq!(eq1_residual(&sq, 0.5, 0.5, 1.0).unwrap(), -0.375);
    // y = 1 probe returns −f(1)
    let shifted = SolutionFamily::custom("x + 2", |x| x + 2.0);
    assert_eq!(eq1_residual(&shifted, 0.3, 1.0, 1.7).unwrap(), -3.0);
}

#[test]
fn eq1_exact_examples() {
    let pure = SolutionFamily::exact_derivation(q(0, 1), q(1, 1));
    let x = fe("t/2");
    let half = FieldElement::from_ratio(1, 2);
    assert!(eq1_residual_exact(&pure, &x, &half, TAU).unwrap().is_zero());

    // the c*·x part contributes xy + (1−x)y − y − (x + 1 − x)·y = −y
    let shifted = SolutionFamily::exact_derivation(q(1, 1), q(1, 1));
    let y = fe("t/(t+3)");
    let r = eq1_residual_exact(&shifted, &x, &y, TAU).unwrap();
    assert_eq!(r, y.neg());

    let r = eq1_residual_exact(&exact_square(), &half, &half, TAU).unwrap();
    assert_eq!(r.as_rational(), Some(q(-3, 8)));
}

#[test]
fn eq2_examples() {
    let diff = SolutionFamily::power_diff(1.0, 1.0, 2.0).unwrap();
    let grid = GridSpec::square(10);
    for p in grid.product_points() {
        assert!(eq2_residual(&diff, p[0], p[1], 1.0, 2.0).unwrap().abs() < 1e-14);
    }
    let plog = SolutionFamily::power_log(1.0, 1.0).unwrap();
    assert!(eq2_residual(&plog, 0.5, 0.5, 1.0, 1.0).unwrap().abs() < 1e-14);
    // f = x: xy − (x + x²)y/2 − (y + y²)x/2 at (1/2, 1/2) = 1/4 − 3/16 − 3/16
    let id = SolutionFamily::custom("x", |x| x);
    assert!((eq2_residual(&id, 0.5, 0.5, 1.0, 2.0).unwrap() + 0.125).abs() < 1e-16);
}

#[test]
fn additive_square_at_quarter() {
    // (1/2)² − (1/4)² − (1/4)² = 1/8
    let sq = SolutionFamily::custom("x^2", |x| x * x);
    let d2 = DomainDn::new(2, vec![vec![0.25, 0.25]]).unwrap();
    let r = check_additive_on_d2(&sq, &d2, 1e-12).unwrap();
    assert_eq!(r.residual_at_witness, 0.125);
    assert!(!r.verdict.passed());
}

#[test]
fn square_scan_finds_witness_with_magnitude_three_eighths() {
    let sq = SolutionFamily::custom("x^2", |x| x * x);
    let scan = grid_scan(Equation::Eq1 { q: 1.0 }, &sq, GridSpec::square(1), 1e-10).unwrap();
    assert_eq!(scan.interior.witness, vec![0.5, 0.5]);
    assert_eq!(scan.interior.max_abs_residual, 0.375);
    // on a finer grid the largest violation sits elsewhere, still a failure
    let fine = grid_scan(Equation::Eq1 { q: 1.0 }, &sq, GridSpec::square(100), 1e-10).unwrap();
    assert!(!fine.verdict().passed());
}

#[test]
fn cocycle_maps_of_square() {
    let sq = SolutionFamily::custom("x^2", |x| x * x);
    let cf = cf_map(&sq).eval(0.25, 0.25);
    let rf = rf_map(&sq, 1.0).eval(0.25, 0.25);
    assert_eq!(cf, -0.125);
    assert_eq!(rf, 0.25);
    let power = SolutionFamily::custom("x^3", |x| x * x * x);
    let (u, v) = (0.2f64, 0.3f64);
    let expected = u.powi(3) + v.powi(3) - (u + v).powi(3);
    assert!((cf_map(&power).eval(u, v) - expected).abs() < 1e-16);
}

#[test]
fn product_map_is_a_cocycle() {
    // xy + (x+y)z and yz + x(y+z) both expand to xy + xz + yz
    let (x, y, z) = (1.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0);
    assert_eq!(x * y + (x + y) * z, y * z + x * (y + z));
    let g = CocycleMap::custom("uv", |u, v| u * v);
    let d2 = DomainDn::uniform(2, 12).unwrap();
    let d3 = DomainDn::uniform(3, 12).unwrap();
    let report = check_cocycle_system(&g, 2.0, &d2, &d3, 1e-12).unwrap();
    assert!(report.symmetry.verdict.passed());
    assert!(report.cocycle.verdict.passed());
    assert!(report.homogeneity.verdict.passed());
}

#[test]
fn substitution_examples() {
    assert_eq!(
        substitution_transform_exact(&q(1, 4), &q(1, 4)).unwrap(),
        (q(1, 2), q(1, 2))
    );
    assert_eq!(
        substitution_inverse_exact(&q(1, 3), &q(3, 4)).unwrap(),
        (q(1, 4), q(1, 2))
    );
}

#[test]
fn reconstruction_of_x_minus_x_squared() {
    // g(1/4) − g(1/2)² = 5/32 − 9/64
    assert_eq!(
        anchor_gap_exact(1, 2, &q(1, 2), &q(1, 2)).unwrap(),
        q(1, 64)
    );
    let x = fe("t");
    let f = vincze_reconstruct_exact(1, 2, &q(1, 2), &q(1, 2), &q(1, 4), &x).unwrap();
    assert_eq!(f, fe("t - t^2"));
    let at_quarter = vincze_reconstruct_exact(
        1,
        2,
        &q(1, 2),
        &q(1, 2),
        &q(1, 4),
        &FieldElement::from_ratio(1, 4),
    )
    .unwrap();
    assert_eq!(at_quarter.as_rational(), Some(q(3, 16)));
    let at_one =
        vincze_reconstruct_exact(1, 2, &q(1, 2), &q(1, 2), &q(1, 4), &FieldElement::one()).unwrap();
    assert!(at_one.is_zero());
    let zero = vincze_reconstruct_exact(1, 2, &q(1, 2), &q(1, 2), &q(0, 1), &x).unwrap();
    assert!(zero.is_zero());
}

#[test]
fn anchor_selection() {
    use entrofunc::reconstruct::GeneratorFunction;
    let g = GeneratorFunction::power_mean(1.0, 2.0);
    match find_anchors(&g, &[0.5, 1.0 / 3.0, 0.25]).unwrap() {
        AnchorChoice::Pair { gap, .. } => assert!(gap.abs() >= 1.0 / 64.0 - 1e-15),
        AnchorChoice::Multiplicative => panic!("(1,2) is not multiplicative"),
    }
    for (a, b) in [(2.0, 2.0), (1.0, 1.0)] {
        let g = GeneratorFunction::power_mean(a, b);
        assert_eq!(
            find_anchors(&g, &[0.5, 1.0 / 3.0, 0.25]).unwrap(),
            AnchorChoice::Multiplicative
        );
    }
}

#[test]
fn classification_examples() {
    let c = classify_eq2_solution(1.0, 2.0, 0.25, 0.5).unwrap();
    assert_eq!(c.family, SolutionFamily::power_diff(1.0, 1.0, 2.0).unwrap());
    assert!(c.regular_branch);
    let f_half = -0.5 * std::f64::consts::LN_2;
    let c = classify_eq2_solution(1.0, 1.0, f_half, 0.5).unwrap();
    match c.family {
        SolutionFamily::PowerLog { c, alpha } => {
            assert!((c - 1.0).abs() < 1e-15);
            assert_eq!(alpha, 1.0);
        }
        other => panic!("unexpected {other:?}"),
    }
    let c = classify_eq2_solution(1.0, 3.0, 0.0, 0.5).unwrap();
    assert!(c
        .family
        .parameters()
        .iter()
        .any(|&(k, v)| k == "c" && v == 0.0));
}

fn grid_xs(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

#[test]
fn eq1_fit_examples() {
    let xs = grid_xs(40);
    let truth = |x: f64| 2.0 * x - 3.0 * x.sqrt();
    let s = SampleSet::new(xs.iter().map(|&x| (x, truth(x))).collect()).unwrap();
    let r = fit_eq1(&s, Some(0.5)).unwrap();
    match r.family {
        SolutionFamily::PowerAffine { c_star, c, .. } => {
            assert!((c_star - 2.0).abs() < 1e-8 && (c + 3.0).abs() < 1e-8);
        }
        other => panic!("unexpected {other:?}"),
    }
    let s = SampleSet::new(xs.iter().map(|&x| (x, -x * x.ln())).collect()).unwrap();
    match fit_eq1(&s, Some(1.0)).unwrap().family {
        SolutionFamily::XLogX { c, c_star } => {
            assert!((c + 1.0).abs() < 1e-8 && c_star.abs() < 1e-8);
        }
        other => panic!("unexpected {other:?}"),
    }
    let s = SampleSet::new(xs.iter().map(|&x| (x, 0.0)).collect()).unwrap();
    let r = fit_eq1(&s, Some(2.0)).unwrap();
    assert!(r
        .family
        .parameters()
        .iter()
        .all(|&(k, v)| k == "q" || v == 0.0));
    assert_eq!(r.residual_norm, 0.0);
}

#[test]
fn eq1_fit_with_unknown_q() {
    let xs = grid_xs(64);
    let s = SampleSet::new(xs.iter().map(|&x| (x, 2.0 * x - 3.0 * x.sqrt())).collect()).unwrap();
    match fit_eq1(&s, None).unwrap().family {
        SolutionFamily::PowerAffine { c_star, c, q } => {
            assert!((c_star - 2.0).abs() < 1e-6, "c* = {c_star}");
            assert!((c + 3.0).abs() < 1e-6, "c = {c}");
            assert!((q - 0.5).abs() < 1e-6, "q = {q}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn eq2_fit_examples() {
    let xs = grid_xs(30);
    let s = SampleSet::new(xs.iter().map(|&x| (x, 4.0 * (x - x.powi(3)))).collect()).unwrap();
    match fit_eq2(&s, 1.0, 3.0).unwrap().family {
        SolutionFamily::PowerDiff { c, .. } => assert!((c - 4.0).abs() < 1e-10),
        other => panic!("unexpected {other:?}"),
    }
    let s = SampleSet::new(xs.iter().map(|&x| (x, -2.0 * x * x * x.ln())).collect()).unwrap();
    match fit_eq2(&s, 2.0, 2.0).unwrap().family {
        SolutionFamily::PowerLog { c, .. } => assert!((c + 2.0).abs() < 1e-10),
        other => panic!("unexpected {other:?}"),
    }
    let s = SampleSet::new(vec![(0.4, 0.0)]).unwrap();
    match fit_eq2(&s, 1.0, 2.0).unwrap().family {
        SolutionFamily::PowerDiff { c, .. } => assert_eq!(c, 0.0),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn continuity_filter_examples() {
    let xs = grid_xs(30);
    let s = SampleSet::new(xs.iter().map(|&x| (x, 3.0 * (x - x * x))).collect()).unwrap();
    let r = continuity_filter(fit_eq1(&s, Some(2.0)).unwrap());
    assert_eq!(r.continuity, Some(Continuity::Continuous));
    match r.family {
        SolutionFamily::PowerAffine { c_star, c, .. } => {
            assert!((c_star - 3.0).abs() < 1e-8 && (c + 3.0).abs() < 1e-8);
        }
        other => panic!("unexpected {other:?}"),
    }

    // x + x² tends to 2 at 1
    let s = SampleSet::new(xs.iter().map(|&x| (x, x + x * x)).collect()).unwrap();
    let r = continuity_filter(fit_eq1(&s, Some(2.0)).unwrap());
    match r.continuity {
        Some(Continuity::Discontinuous { limit }) => assert!((limit - 2.0).abs() < 1e-8),
        other => panic!("unexpected {other:?}"),
    }
    assert!(r.notes.iter().any(|n| n.contains("not continuous at 1")));
}
