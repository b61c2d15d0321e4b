use critlimit::critsys::{ObjectiveSpec, VarietySpec};
use critlimit::limitlab::{
    ed_degree, ed_limit, generic_crit_count, limit_crit, milnor_multiplicity, verify_main_theorem, EulerInput,
    LimitConfig, StratumSpec, DEFAULT_DEGREE_CAP,
};
use critlimit::pointset::PointSet;
use critlimit::poly::{parse_polynomial, Polynomial, VariableTable};
use critlimit::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn polys(v: &VariableTable, src: &[&str]) -> Vec<Polynomial> {
    src.iter().map(|s| parse_polynomial(s, v).unwrap()).collect()
}

fn ci(v: &VariableTable, ideal: &[&str]) -> VarietySpec {
    VarietySpec::complete_intersection(v.clone(), polys(v, ideal)).unwrap()
}

fn stratum(v: &VariableTable, name: &str, ideal: &[&str], excl: &[&[&str]]) -> StratumSpec {
    StratumSpec::new(name, ci(v, ideal), excl.iter().map(|e| polys(v, e)).collect())
}

fn mult_near(set: &PointSet, p: &[Complex64], tol: f64) -> usize {
    set.multiplicity_at(p, tol)
}

#[test]
fn univariate_morsification() {
    let v = VariableTable::new(&["x"]).unwrap();
    let x = VarietySpec::ambient(v.clone());
    let obj = ObjectiveSpec::new(parse_polynomial("x^4-4*x^3", &v).unwrap(), parse_polynomial("x", &v).unwrap()).unwrap();
    let cfg = LimitConfig::with_seed(1);
    let run = limit_crit(&x, &obj, &cfg).unwrap();
    assert_eq!(run.generic_count, 3);
    assert_eq!(run.infinity_count, 0);
    assert!(run.is_conserved());
    assert_eq!(run.limit.len(), 2);
    assert_eq!(mult_near(&run.limit, &[c(0.0)], 1e-8), 2);
    assert_eq!(mult_near(&run.limit, &[c(3.0)], 1e-8), 1);

    let strata = vec![
        stratum(&v, "X0", &[], &[&["x"], &["x-3"]]),
        stratum(&v, "X1", &["x"], &[]),
        stratum(&v, "X2", &["x-3"], &[]),
    ];
    let rep = verify_main_theorem(&x, &obj, &strata, &cfg).unwrap();
    assert!(rep.theorem_verified, "{rep:?}");
    let n: Vec<_> = rep.strata_reports.iter().map(|r| r.n).collect();
    assert_eq!(n, vec![Some(0), Some(2), Some(1)]);
    assert!(rep.strata_reports[0].vacuous);
}

#[test]
fn umbrella_like_example() {
    let v = VariableTable::new(&["x", "y", "z"]).unwrap();
    let x = VarietySpec::ambient(v.clone());
    let f = parse_polynomial("x*y^2-(z-x^2)^2", &v).unwrap();
    let obj = ObjectiveSpec::with_random_g(f, 7);
    let cfg = LimitConfig::with_seed(7);
    let strata = vec![
        stratum(&v, "X0", &[], &[&["y", "z-x^2"]]),
        stratum(&v, "X1", &["y", "z-x^2"], &[&["x", "y", "z"]]),
        stratum(&v, "X2", &["x", "y", "z"], &[]),
    ];
    let rep = verify_main_theorem(&x, &obj, &strata, &cfg).unwrap();
    assert!(rep.theorem_verified, "{rep:?}");
    let n: Vec<_> = rep.strata_reports.iter().map(|r| r.n).collect();
    assert_eq!(n, vec![Some(0), Some(1), Some(2)]);
    assert_eq!(rep.generic_count, 3);
    assert_eq!(rep.infinity_count, 0);

    // Q is where g(x, 0, x^2) = a x + c x^2 is critical: a + 2 c x = 0.
    let a = obj.g.coefficient(&[1, 0, 0]);
    let cc = obj.g.coefficient(&[0, 0, 1]);
    let qx = -a / (cc * 2.0);
    let q = [qx, c(0.0), qx * qx];
    assert_eq!(mult_near(&rep.lhs_limit, &q, 1e-8), 1);
    assert_eq!(mult_near(&rep.lhs_limit, &[c(0.0); 3], 1e-8), 2);
}

#[test]
fn elliptic_curve_counts() {
    let v = VariableTable::new(&["x", "y"]).unwrap();
    let x = ci(&v, &["-x^3-3*x^2-2*y^2+x+3"]);
    let obj = ObjectiveSpec::with_random_g(parse_polynomial("-x", &v).unwrap(), 11);
    let cfg = LimitConfig::with_seed(11);
    let gc = generic_crit_count(&x, &obj, Some(EulerInput::SmoothCurve { chi: -1 }), &cfg).unwrap();
    assert_eq!(gc.count, 4);
    assert_eq!(gc.level_points, Some(3));
    assert_eq!(gc.expected, Some(4));
    assert_eq!(gc.agrees, Some(true));

    let strata = vec![
        stratum(&v, "rest", &["-x^3-3*x^2-2*y^2+x+3"], &[&["x+3", "y"], &["x+1", "y"], &["x-1", "y"]]),
        stratum(&v, "P1", &["x+3", "y"], &[]),
        stratum(&v, "P2", &["x+1", "y"], &[]),
        stratum(&v, "P3", &["x-1", "y"], &[]),
    ];
    let rep = verify_main_theorem(&x, &obj, &strata, &cfg).unwrap();
    assert!(rep.theorem_verified, "{rep:?}");
    assert_eq!(rep.infinity_count, 1);
    assert_eq!(rep.generic_count, 4);
    for p in [-3.0, -1.0, 1.0] {
        assert_eq!(mult_near(&rep.lhs_limit, &[c(p), c(0.0)], 1e-8), 1);
    }
    // the rest stratum: four critical points of g, none of them limits
    assert_eq!(rep.strata_reports[0].crit_g.cardinality(), 4);
    assert_eq!(rep.strata_reports[0].n, Some(0));
}

#[test]
fn circle_with_centre_data() {
    let v = VariableTable::new(&["x", "y"]).unwrap();
    let x = ci(&v, &["x^2+y^2-1"]);
    let cfg = LimitConfig::with_seed(3);
    assert_eq!(ed_degree(&x, &cfg).unwrap().degree, 2);
    let strata = vec![stratum(&v, "circle", &["x^2+y^2-1"], &[])];
    let rep = ed_limit(&x, &[c(0.0), c(0.0)], &strata, &cfg).unwrap();
    assert!(rep.theorem_verified, "{rep:?}");
    assert_eq!(rep.lhs_limit.len(), 2);
    assert_eq!(rep.infinity_count, 0);
    assert_eq!(rep.strata_reports[0].n, Some(1));
    // Crit(g|circle) for g = 2(e1 x + e2 y) is +-(e1, e2)/sqrt(e1^2 + e2^2)
    let eps = critlimit::limitlab::ed_objective(&x, &[c(0.0), c(0.0)], &cfg).unwrap().g;
    let (e1, e2) = (eps.coefficient(&[1, 0]) / 2.0, eps.coefficient(&[0, 1]) / 2.0);
    let r = (e1 * e1 + e2 * e2).sqrt();
    for s in [1.0, -1.0] {
        assert_eq!(mult_near(&rep.lhs_limit, &[e1 / r * s, e2 / r * s], 1e-8), 1);
    }
}

#[test]
fn cardioid_limit() {
    let v = VariableTable::new(&["x", "y"]).unwrap();
    let q = "(x^2+y^2)^2+4*x*(x^2+y^2)-4*y^2";
    let x = ci(&v, &[q]);
    let cfg = LimitConfig::with_seed(5);
    assert_eq!(ed_degree(&x, &cfg).unwrap().degree, 3);
    // on y = 0 the curve is x^3 (x + 4): cusp at 0, far point at -4
    let strata = vec![
        stratum(&v, "smooth", &[q], &[&["x", "y"], &["x+4", "y"]]),
        stratum(&v, "P2", &["x+4", "y"], &[]),
        stratum(&v, "P1", &["x", "y"], &[]),
    ];
    let rep = ed_limit(&x, &[c(0.0), c(0.0)], &strata, &cfg).unwrap();
    assert!(rep.theorem_verified, "{rep:?}");
    assert_eq!(rep.generic_count, 3);
    assert_eq!(mult_near(&rep.lhs_limit, &[c(0.0), c(0.0)], 1e-6), 2);
    assert_eq!(mult_near(&rep.lhs_limit, &[c(-4.0), c(0.0)], 1e-8), 1);
    let n: Vec<_> = rep.strata_reports.iter().map(|r| r.n).collect();
    assert_eq!(n, vec![Some(0), Some(1), Some(2)]);
}

#[test]
fn milnor_matches_limit_multiplicity() {
    for (vars, f) in [(&["x"][..], "x^4-4*x^3"), (&["x"][..], "x^2"), (&["x", "y"][..], "x^3+y^3")] {
        let v = VariableTable::new(vars).unwrap();
        let f = parse_polynomial(f, &v).unwrap();
        let origin = vec![c(0.0); vars.len()];
        let mu = milnor_multiplicity(&f, &origin, DEFAULT_DEGREE_CAP).unwrap();
        let run = limit_crit(&VarietySpec::ambient(v), &ObjectiveSpec::with_random_g(f, 2), &LimitConfig::with_seed(2)).unwrap();
        assert_eq!(mult_near(&run.limit, &origin, 1e-6), mu);
    }
}

#[test]
fn counts_do_not_depend_on_seed() {
    let v = VariableTable::new(&["x", "y"]).unwrap();
    let x = ci(&v, &["-x^3-3*x^2-2*y^2+x+3"]);
    let f = parse_polynomial("-x", &v).unwrap();
    let mut seen = Vec::new();
    for seed in [21, 22, 23] {
        let run = limit_crit(&x, &ObjectiveSpec::with_random_g(f.clone(), seed), &LimitConfig::with_seed(seed)).unwrap();
        let mut mults: Vec<usize> = run.limit.atoms().iter().map(|a| a.multiplicity).collect();
        mults.sort_unstable();
        seen.push((run.generic_count, run.infinity_count, run.limit.cardinality(), mults));
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]), "{seen:?}");
}
