//! End-to-end acceptance checks. Runs the `critlimit` binary on the bundled
//! problems and prints one PASS/FAIL line per criterion.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use critlimit::critsys::{FamilyChart, ObjectiveSpec, VarietySpec};
use critlimit::limitlab::{limit_crit, milnor_multiplicity, LimitConfig, DEFAULT_DEGREE_CAP};
use critlimit::pointset::{multiset_equal, multiset_geq, pushforward, Atom, PointSet};
use critlimit::poly::{parse_polynomial, PolySystem, Polynomial, VariableTable};
use critlimit::tracker::{solve_system, PathStatus, SolveConfig};
use critlimit::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const TRIALS: usize = 100;

type Point = Vec<Complex64>;
type Suite = fn() -> (bool, String);
type Criterion = (&'static str, fn() -> Check);

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(format!("{name}.json"))
}

struct Run {
    code: i32,
    stdout: Vec<u8>,
    json: Value,
    secs: f64,
}

fn critlimit(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_critlimit"))
        .args(args)
        .output()
        .expect("spawn critlimit");
    let secs = start.elapsed().as_secs_f64();
    if !out.stderr.is_empty() {
        eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    }
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        json,
        secs,
    }
}

fn cmd(sub: &str, name: &str, extra: &[&str]) -> Run {
    let file = problem(name);
    let mut args = vec![sub, file.to_str().unwrap()];
    args.extend_from_slice(extra);
    critlimit(&args)
}

fn point(v: &Value) -> Point {
    v.as_array()
        .unwrap()
        .iter()
        .map(|z| Complex64::new(z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect()
}

fn atoms(v: &Value) -> Vec<(Point, usize)> {
    v.as_array()
        .map(|a| {
            a.iter()
                .map(|a| (point(&a["coordinates"]), a["multiplicity"].as_u64().unwrap() as usize))
                .collect()
        })
        .unwrap_or_default()
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn real(xs: &[f64]) -> Point {
    xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// The limit equals `expected` atom for atom, each within `tol`.
fn same_limit(got: &[(Point, usize)], expected: &[(Point, usize)], tol: f64) -> bool {
    got.len() == expected.len()
        && expected
            .iter()
            .all(|(p, m)| got.iter().any(|(q, k)| k == m && dist(p, q) < tol))
}

fn count(v: &Value, key: &str) -> Option<u64> {
    v["result"][key].as_u64()
}

fn strata_n(v: &Value) -> Vec<Option<u64>> {
    v["result"]["strata_reports"]
        .as_array()
        .map(|s| s.iter().map(|r| r["n"].as_u64()).collect())
        .unwrap_or_default()
}

fn verified(r: &Run) -> bool {
    r.code == 0 && r.json["result"]["theorem_verified"] == Value::Bool(true)
}

struct Check {
    ok: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(what.into());
        }
    }

    fn timed(&mut self, label: &str, secs: f64, limit: f64) {
        self.notes.push(format!("{label} {secs:.2}s"));
        self.expect(secs < limit, format!("{label} over {limit}s"));
    }
}

fn univariate_morsification() -> Check {
    let mut c = Check::new();
    let r = cmd("limit", "univariate_quartic", &[]);
    c.expect(r.code == 0, format!("exit {}", r.code));
    let lim = atoms(&r.json["result"]["lhs_limit"]);
    c.expect(
        same_limit(&lim, &[(real(&[0.0]), 2), (real(&[3.0]), 1)], 1e-8),
        format!("limit {lim:?}"),
    );
    c.expect(count(&r.json, "infinity_count") == Some(0), "paths at infinity");
    c.timed("limit", r.secs, 1.0);
    c
}

fn parabola_crease() -> Check {
    let mut c = Check::new();
    let r = cmd("limit", "parabola_crease", &[]);
    let v = cmd("verify", "parabola_crease", &[]);
    c.expect(r.code == 0, format!("limit exit {}", r.code));
    c.expect(verified(&v), "not verified");
    let vars = VariableTable::new(&["x", "y", "z"]).unwrap();
    let g = parse_polynomial(v.json["result"]["provenance"]["g"].as_str().unwrap_or("0"), &vars).unwrap();
    let (alpha, gamma) = (g.coefficient(&[1, 0, 0]), g.coefficient(&[0, 0, 1]));
    let lim = atoms(&r.json["result"]["lhs_limit"]);
    c.expect(lim.len() == 2, format!("{} atoms", lim.len()));
    let origin = lim.iter().find(|(p, _)| dist(p, &real(&[0.0; 3])) < 1e-8);
    c.expect(origin.map(|a| a.1) == Some(2), "origin is not a double point");
    let q = lim.iter().find(|(p, _)| dist(p, &real(&[0.0; 3])) >= 1e-8);
    match q {
        Some((q, m)) => {
            let (x, y, z) = (q[0], q[1], q[2]);
            c.expect(*m == 1, "Q is not simple");
            c.expect(y.norm() < 1e-8, "Q off y = 0");
            c.expect((z - x * x).norm() < 1e-8, "Q off z = x^2");
            c.expect((alpha + gamma * x * 2.0).norm() < 1e-8, "Q off alpha + 2 gamma x = 0");
        }
        None => c.expect(false, "no Q"),
    }
    c.expect(strata_n(&v.json) == vec![Some(0), Some(1), Some(2)], format!("n = {:?}", strata_n(&v.json)));
    c.timed("limit", r.secs, 5.0);
    c.timed("verify", v.secs, 5.0);
    c
}

fn elliptic_boundary() -> Check {
    let mut c = Check::new();
    let r = cmd("verify", "elliptic_boundary", &[]);
    c.expect(verified(&r), format!("exit {}", r.code));
    let res = &r.json["result"];
    c.expect(count(&r.json, "generic_count") == Some(4), "generic count");
    c.expect(count(&r.json, "infinity_count") == Some(1), "infinity count");
    let lim = atoms(&res["lhs_limit"]);
    // y = 0 forces -x^3 - 3x^2 + x + 3 = -(x + 3)(x + 1)(x - 1) = 0
    let slice = |x: f64| -x * x * x - 3.0 * x * x + x + 3.0;
    c.expect(
        lim.iter().all(|(p, _)| p[1].norm() < 1e-8 && p[0].im.abs() < 1e-8 && slice(p[0].re).abs() < 1e-8),
        "limit off the y = 0 slice",
    );
    let expected: Vec<_> = [-3.0, -1.0, 1.0].iter().map(|&x| (real(&[x, 0.0]), 1)).collect();
    c.expect(same_limit(&lim, &expected, 1e-8), format!("limit {lim:?}"));
    let e = &res["euler_check"];
    c.expect(e["count"].as_u64() == Some(4), "euler count");
    c.expect(e["expected"].as_u64() == Some(4), "euler expected");
    c.expect(e["agrees"] == Value::Bool(true), "euler disagrees");
    c.timed("verify", r.secs, 5.0);
    c
}

fn write_temp(name: &str, v: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("critlimit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

/// The problem with its data point and strata removed.
fn degree_problem(name: &str) -> PathBuf {
    let text = std::fs::read_to_string(problem(name)).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let obj = v.as_object_mut().unwrap();
    obj.remove("data");
    obj.remove("strata");
    write_temp(&format!("{name}_degree"), &v)
}

fn circle() -> Check {
    let mut c = Check::new();
    let file = degree_problem("circle");
    let d = critlimit(&["ed", file.to_str().unwrap()]);
    c.expect(d.code == 0 && d.json["result"]["degree"].as_u64() == Some(2), "ED degree is not 2");
    let r = cmd("ed", "circle", &[]);
    c.expect(verified(&r), format!("exit {}", r.code));
    let res = &r.json["result"];
    let lim = atoms(&res["lhs_limit"]);
    let crit: Vec<_> = res["strata_reports"].as_array().map(|s| atoms(&s[0]["crit_g"])).unwrap_or_default();
    c.expect(lim.len() == 2 && lim.iter().all(|a| a.1 == 1), "not two simple points");
    c.expect(same_limit(&lim, &crit, 1e-8), "limit differs from Crit(g|X)");
    c.timed("degree", d.secs, 1.0);
    c.timed("limit", r.secs, 1.0);
    c
}

fn cardioid() -> Check {
    let mut c = Check::new();
    let r = cmd("ed", "cardioid", &[]);
    c.expect(verified(&r), format!("exit {}", r.code));
    c.expect(count(&r.json, "generic_count") == Some(3), "generic count");
    let lim = atoms(&r.json["result"]["lhs_limit"]);
    let expected = [(real(&[0.0, 0.0]), 2), (real(&[-4.0, 0.0]), 1)];
    c.expect(same_limit(&lim, &expected, 1e-6), format!("limit {lim:?}"));
    c.timed("ed", r.secs, 5.0);
    c
}

fn diag(d: [f64; 3]) -> Point {
    real(&[d[0], 0.0, 0.0, 0.0, d[1], 0.0, 0.0, 0.0, d[2]])
}

fn rank_one(p: &[Complex64]) -> bool {
    let m = |i: usize, j: usize| p[3 * i + j];
    let mut minors = 0.0f64;
    for (i1, i2) in [(0, 1), (0, 2), (1, 2)] {
        for (j1, j2) in [(0, 1), (0, 2), (1, 2)] {
            minors = minors.max((m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1)).norm());
        }
    }
    minors < 1e-6 && p.iter().any(|z| z.norm() > 1e-3)
}

fn data(name: &str) -> [f64; 3] {
    let text = std::fs::read_to_string(problem(name)).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let u: Vec<f64> = v["data"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    [u[0], u[4], u[8]]
}

fn eckart_young() -> Check {
    let mut c = Check::new();
    let td = cmd("ed", "det3", &[]);
    c.expect(td.code == 0 && td.json["result"]["degree"].as_u64() == Some(3), "ED degree is not 3");
    c.timed("degree", td.secs, 600.0);
    let mh = cmd("ed", "det3", &["--multihom"]);
    c.expect(mh.code == 0 && mh.json["result"]["degree"].as_u64() == Some(3), "ED degree is not 3 (multihom)");
    c.timed("degree multihom", mh.secs, 120.0);

    // the nearest rank-2 matrices to a diagonal one zero out one entry
    let u1 = data("det3_u1");
    let r = cmd("ed", "det3_u1", &["--multihom"]);
    c.expect(verified(&r), "u1 not verified");
    let expected: Vec<_> = (0..3)
        .map(|k| {
            let mut d = u1;
            d[k] = 0.0;
            (diag(d), 1)
        })
        .collect();
    let lim = atoms(&r.json["result"]["lhs_limit"]);
    c.expect(same_limit(&lim, &expected, 1e-6), format!("u1 limit {lim:?}"));
    c.timed("u1", r.secs, 120.0);

    let r = cmd("ed", "det3_u2", &["--multihom"]);
    c.expect(verified(&r), "u2 not verified");
    let lim = atoms(&r.json["result"]["lhs_limit"]);
    let ones = lim.iter().filter(|(p, _)| rank_one(p)).count();
    c.expect(ones >= 2, format!("u2 has {ones} rank-1 points"));
    c.timed("u2", r.secs, 120.0);

    let r = cmd("ed", "det3_u4", &["--multihom"]);
    c.expect(verified(&r), "u4 not verified");
    let lim = atoms(&r.json["result"]["lhs_limit"]);
    c.expect(
        same_limit(&lim, &[(diag([0.0; 3]), 1), (diag([1.0, 0.0, 0.0]), 2)], 1e-6),
        format!("u4 limit {lim:?}"),
    );
    c.timed("u4", r.secs, 120.0);
    c
}

fn milnor_oracle() -> Check {
    let mut c = Check::new();
    for (name, vars, f, mu) in [
        ("univariate_quartic", &["x"][..], "x^4-4*x^3", 2),
        ("morse_square", &["x"][..], "x^2", 1),
        ("cusp_sum", &["x", "y"][..], "x^3+y^3", 4),
    ] {
        let v = VariableTable::new(vars).unwrap();
        let origin = vec![Complex64::new(0.0, 0.0); vars.len()];
        let m = milnor_multiplicity(&parse_polynomial(f, &v).unwrap(), &origin, DEFAULT_DEGREE_CAP);
        c.expect(m.as_ref().ok() == Some(&mu), format!("milnor({f}) = {m:?}"));
        let r = cmd("limit", name, &[]);
        let at_origin: usize = atoms(&r.json["result"]["lhs_limit"])
            .iter()
            .filter(|(p, _)| dist(p, &origin) < 1e-6)
            .map(|a| a.1)
            .sum();
        c.expect(r.code == 0 && at_origin == mu, format!("{name}: cluster multiplicity {at_origin}"));
    }
    c
}

fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Dense polynomial of degree `d` in `n` variables; with `top = false` the
/// top-degree part is dropped except for `x0^d`, pushing roots to infinity.
fn random_poly(rng: &mut ChaCha8Rng, n: usize, d: u16, top: bool) -> Polynomial {
    let mut terms = Vec::new();
    let mut e = vec![0u16; n];
    loop {
        let deg: u16 = e.iter().sum();
        if deg <= d && (top || deg < d || e[0] == d) {
            terms.push((e.clone(), rand_c(rng)));
        }
        let mut i = 0;
        while i < n {
            e[i] += 1;
            if e[i] <= d {
                break;
            }
            e[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Polynomial::from_terms(n, terms)
}

fn path_conservation() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let vars = VariableTable::new(&["x", "y"]).unwrap();
    let chart = FamilyChart::Lagrange {
        ambient: 2,
        multipliers: 0,
    };
    let mut infinite = 0;
    for trial in 0..TRIALS {
        let (d1, d2) = (rng.random_range(1..=3u16), rng.random_range(1..=3u16));
        let top = trial % 2 == 0;
        let eqs = vec![random_poly(&mut rng, 2, d1, top), random_poly(&mut rng, 2, d2, top)];
        let sys = PolySystem::new(vars.clone(), 2, eqs).unwrap();
        let cfg = SolveConfig {
            seed: trial as u64,
            ..SolveConfig::default()
        };
        let rep = match solve_system(&sys, &chart, &[], &cfg) {
            Ok(r) => r,
            Err(e) => return (false, format!("trial {trial}: {e}")),
        };
        let total = rep.count(PathStatus::Finite) + rep.count(PathStatus::AtInfinity) + rep.count(PathStatus::TrackFailure);
        infinite += rep.count(PathStatus::AtInfinity);
        if total != (d1 * d2) as usize || rep.path_count != total {
            return (false, format!("trial {trial}: {total} of {} paths", d1 * d2));
        }
    }
    (true, format!("{infinite} paths at infinity"))
}

/// `f` with critical points of prescribed multiplicity: univariate
/// `(x - a)^p (x - b)^q`, or `x^p + y^q` with Milnor number `(p-1)(q-1)`.
fn seeded_problem(rng: &mut ChaCha8Rng, trial: usize) -> (VarietySpec, Polynomial) {
    if trial.is_multiple_of(2) {
        let v = VariableTable::new(&["x"]).unwrap();
        let (a, b) = (rng.random_range(-3..=0), rng.random_range(1..=3));
        let (p, q) = (rng.random_range(2..=4), rng.random_range(1..=3));
        let f = parse_polynomial(&format!("(x - ({a}))^{p} * (x - {b})^{q}"), &v).unwrap();
        (VarietySpec::ambient(v), f)
    } else {
        let v = VariableTable::new(&["x", "y"]).unwrap();
        let (p, q) = (rng.random_range(2..=3), rng.random_range(2..=3));
        let f = parse_polynomial(&format!("x^{p} + y^{q}"), &v).unwrap();
        (VarietySpec::ambient(v), f)
    }
}

fn seed_invariance() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..TRIALS {
        let (x, f) = seeded_problem(&mut rng, trial);
        let mut seen = Vec::new();
        for k in 0..3 {
            let seed = 1000 + 3 * trial as u64 + k;
            let run = match limit_crit(&x, &ObjectiveSpec::with_random_g(f.clone(), seed), &LimitConfig::with_seed(seed)) {
                Ok(r) => r,
                Err(e) => return (false, format!("trial {trial} seed {seed}: {e}")),
            };
            let mut mults: Vec<usize> = run.limit.atoms().iter().map(|a| a.multiplicity).collect();
            mults.sort_unstable();
            seen.push((run.generic_count, run.infinity_count, run.failure_count, mults));
        }
        if !seen.windows(2).all(|w| w[0] == w[1]) {
            return (false, format!("trial {trial}: {seen:?}"));
        }
    }
    (true, String::new())
}

/// Atoms on a half-integer grid, so they are well separated.
fn random_set(rng: &mut ChaCha8Rng, dim: usize, max_atoms: usize) -> PointSet {
    let mut atoms: Vec<Atom> = Vec::new();
    for _ in 0..rng.random_range(0..=max_atoms) {
        let point: Point = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-4..=4) as f64 * 0.5, rng.random_range(-2..=2) as f64 * 0.5))
            .collect();
        if atoms.iter().all(|a| dist(&a.point, &point) > 0.1) {
            atoms.push(Atom {
                point,
                multiplicity: rng.random_range(1..=4),
            });
        }
    }
    PointSet::from_atoms(atoms, 1e-5).unwrap()
}

fn pushforward_mass() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..TRIALS {
        let m = random_set(&mut rng, 2, 6);
        let phi: Vec<Polynomial> = (0..rng.random_range(1..=3))
            .map(|_| {
                let d = rng.random_range(1..=2u16);
                random_poly(&mut rng, 2, d, true)
            })
            .collect();
        // a projection merges atoms that share a first coordinate
        let proj = vec![Polynomial::var(2, 0)];
        for map in [&phi, &proj] {
            match pushforward(map, &m) {
                Ok(img) if img.cardinality() == m.cardinality() => {}
                Ok(img) => return (false, format!("trial {trial}: mass {} -> {}", m.cardinality(), img.cardinality())),
                Err(e) => return (false, format!("trial {trial}: {e}")),
            }
        }
    }
    (true, String::new())
}

/// A sub-multiset of `a`, each point moved by less than `jitter`.
fn below(rng: &mut ChaCha8Rng, a: &PointSet, jitter: f64) -> PointSet {
    let mut atoms = Vec::new();
    for at in a.atoms() {
        if rng.random_bool(0.7) {
            atoms.push(Atom {
                point: at.point.iter().map(|z| z + rand_c(rng) * (jitter / 2.0)).collect(),
                multiplicity: rng.random_range(1..=at.multiplicity),
            });
        }
    }
    PointSet::from_atoms(atoms, a.cluster_radius()).unwrap()
}

fn order_laws() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tol = 1e-6;
    for trial in 0..TRIALS {
        let a = random_set(&mut rng, 2, 6);
        let b = below(&mut rng, &a, 1e-8);
        let c = below(&mut rng, &b, 1e-8);
        let d = random_set(&mut rng, 2, 6);
        let geq = |x: &PointSet, y: &PointSet| multiset_geq(x, y, tol).unwrap();
        let eq = |x: &PointSet, y: &PointSet| multiset_equal(x, y, tol).unwrap();
        let laws = [
            ("reflexive", geq(&a, &a) && eq(&a, &a)),
            ("sub-multiset", geq(&a, &b) && geq(&b, &c)),
            ("transitive", geq(&a, &c)),
            ("antisymmetric", !(geq(&a, &d) && geq(&d, &a)) || eq(&a, &d)),
            ("sum", geq(&a.sum(&d).unwrap(), &a) && geq(&a.sum(&d).unwrap(), &d)),
            ("scaled", geq(&a.scaled(2), &a)),
            ("strict", b.cardinality() == a.cardinality() || !geq(&b, &a)),
        ];
        if let Some((law, _)) = laws.iter().find(|l| !l.1) {
            return (false, format!("trial {trial}: {law}"));
        }
    }
    (true, String::new())
}

fn determinism() -> (bool, String) {
    let cases = [
        ("limit", "univariate_quartic"),
        ("verify", "morse_pair"),
        ("verify", "elliptic_boundary"),
        ("ed", "circle"),
    ];
    let dir = std::env::temp_dir().join(format!("critlimit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for trial in 0..TRIALS {
        let (sub, name) = cases[trial % cases.len()];
        let seed = (500 + trial).to_string();
        let first = cmd(sub, name, &["--seed", &seed]);
        let second = cmd(sub, name, &["--seed", &seed]);
        if first.code != second.code || first.stdout != second.stdout {
            return (false, format!("trial {trial}: {sub} {name} differs"));
        }
        if trial % cases.len() == 0 {
            let out = dir.join("determinism.json");
            let third = cmd(sub, name, &["--seed", &seed, "--json-out", out.to_str().unwrap()]);
            if third.code != first.code || std::fs::read(&out).unwrap() != first.stdout {
                return (false, format!("trial {trial}: --json-out differs from stdout"));
            }
        }
    }
    (true, String::new())
}

fn properties() -> Check {
    let mut c = Check::new();
    let suites: [(&str, Suite); 5] = [
        ("path conservation", path_conservation),
        ("seed invariance", seed_invariance),
        ("pushforward mass", pushforward_mass),
        ("order laws", order_laws),
        ("determinism", determinism),
    ];
    for (name, suite) in suites {
        let start = Instant::now();
        let (ok, note) = suite();
        let secs = start.elapsed().as_secs_f64();
        c.notes.push(format!("{name} {} {secs:.1}s {note}", if ok { "ok" } else { "FAILED" }).trim_end().to_string());
        c.ok &= ok;
    }
    c
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("univariate morsification", univariate_morsification),
        ("parabola crease in C^3", parabola_crease),
        ("elliptic boundary", elliptic_boundary),
        ("circle", circle),
        ("cardioid", cardioid),
        ("Eckart-Young", eckart_young),
        ("Milnor oracle", milnor_oracle),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let c = check();
        let verdict = if c.ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {name}: {verdict} ({:.1}s) {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            c.notes.join("; ")
        );
        failed += usize::from(!c.ok);
    }
    let _ = std::fs::remove_dir_all(std::env::temp_dir().join(format!("critlimit-acceptance-{}", std::process::id())));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
