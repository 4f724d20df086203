//! Acceptance criteria, one verdict line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use ncsphere::coaction::{coaction_suite, expected_invariants, ActionKind, Coaction, HTensor, MixedElement};
use ncsphere::homology::{chern_suite, ChainSpace, ChernConfig};
use ncsphere::linalg::{kernel, rank, SparseVec};
use ncsphere::ncalg::{confluence_check, Algebra, NCPoly};
use ncsphere::report::{catalog, run, sweep, Backend, RunSpec};
use ncsphere::rmatrix::{build_r_quaternionic, check_all_conditions, DeformParams};
use ncsphere::scalars::parse_rational;
use ncsphere::spheres::{
    build_projection, check_normality, compute_y, diagonalize_lambda, three_sphere_context, verify_three_sphere,
    verify_y_relations, SphereAlgebra, SphereKind,
};
use ncsphere::{ConditionReport, GaussRational as G, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(text: &str) -> DeformParams<G> {
    DeformParams::parse(text).unwrap()
}

fn algebra(text: &str) -> Arc<Algebra<G>> {
    Arc::new(Algebra::quaternionic(&params(text)).unwrap())
}

fn seven(alg: &Arc<Algebra<G>>) -> SphereAlgebra<G> {
    SphereAlgebra::new(alg.clone(), SphereKind::SevenSphere).unwrap()
}

struct Verdict {
    title: String,
    elapsed: Duration,
    problems: Vec<String>,
    notes: Vec<String>,
}

fn verdict(title: &str, elapsed: Duration, problems: Vec<String>) -> Verdict {
    Verdict { title: title.to_string(), elapsed, problems, notes: Vec::new() }
}

/// Failing checks of `report`, and passing ones with a nonzero residual.
fn inexact(point: &str, prefix: &str, report: &ConditionReport) -> Vec<String> {
    report
        .checks
        .iter()
        .filter(|(_, c)| !c.pass || c.max_residual != 0.0)
        .map(|(name, c)| format!("{point} {prefix}{name}: residual {}, witness {}", c.max_residual, c.witness))
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

fn criterion_1_r_matrix_conditions() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    let required = ["reality", "symmetry", "quadratic_l", "quadratic_r", "involutive", "yang_baxter"];
    for p in catalog() {
        let report = check_all_conditions(&build_r_quaternionic(&params(&p)).unwrap());
        for name in required {
            if report.get(name).is_none() {
                problems.push(format!("{p}: check {name} missing"));
            }
        }
        problems.extend(inexact(&p, "", &report));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        problems.push(format!("runtime {elapsed:.2?} exceeds 10 s"));
    }
    verdict("R-matrix conditions exact at every catalog point", elapsed, problems)
}

fn criterion_2_pbw_and_confluence() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    for p in ["3/5,4/5,0", "1/3,2/3,2/3"] {
        let conf = confluence_check(&algebra(p), 5, 200, 2024);
        let expected: Vec<usize> = (1..=5).map(|n| binomial(n + 7, 7)).collect();
        if conf.dims != expected {
            problems.push(format!("{p}: dims {:?}, expected {expected:?}", conf.dims));
        }
        if conf.report.get("random_orders").is_none() {
            problems.push(format!("{p}: random reduction orders not compared"));
        }
        problems.extend(inexact(p, "", &conf.report));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        problems.push(format!("runtime {elapsed:.2?} exceeds 60 s"));
    }
    verdict("Hilbert series C(n+7,7) for n <= 5 and 200 random orders agree", elapsed, problems)
}

fn criterion_3_centrality() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    for p in catalog() {
        let alg = algebra(&p);
        for (name, f) in [("x1^2", alg.x1_squared()), ("x2^2", alg.x2_squared()), ("x^2", alg.x_squared())] {
            for g in alg.generators() {
                if !alg.commutator(&f, &g).is_zero() {
                    problems.push(format!("{p}: {name} does not commute with {}", alg.format(&g)));
                }
            }
        }
    }
    verdict("norms commute with all generators", start.elapsed(), problems)
}

fn criterion_4_projection() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    for p in catalog() {
        let alg = algebra(&p);
        let s = seven(&alg);
        let ys = compute_y(&alg, &params(&p));
        let report = build_projection(&alg).check(&s, &ys);
        for name in ["hermitian", "idempotent", "trace_zero"] {
            if report.get(name).is_none() {
                problems.push(format!("{p}: check {name} missing"));
            }
        }
        problems.extend(inexact(&p, "", &report));
    }
    verdict("p* = p, p^2 = p modulo x^2 - 1, <p - 1/2> = 0", start.elapsed(), problems)
}

fn criterion_5_y_system() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    for p in catalog() {
        let dp = params(&p);
        let alg = algebra(&p);
        let s = seven(&alg);
        let ys = compute_y(&alg, &dp);
        problems.extend(inexact(&p, "y.", &verify_y_relations(&s, &ys)));
        let three = three_sphere_context(alg.clone()).unwrap();
        problems.extend(inexact(&p, "three_sphere.", &verify_three_sphere(&three, &ys)));
        if !dp.is_classical() {
            let normality = check_normality(&s, &ys);
            for mu in 0..4 {
                match normality.get(&format!("non_normal_{mu}")) {
                    Some(c) if c.pass => {}
                    _ => problems.push(format!("{p}: Y{mu} is normal, [Y{mu}*, Y{mu}] = 0")),
                }
            }
        }
    }
    let phase = diagonalize_lambda(&params("3/5,4/5,0")).unwrap().phase;
    let want = G::new(parse_rational("-7/25").unwrap(), parse_rational("24/25").unwrap());
    if phase != want {
        problems.push(format!("e^(i theta) at (3/5,4/5,0) is {phase}, expected {want}"));
    }
    verdict("Y-system relations, Lambda, theta and non-normality", start.elapsed(), problems)
}

fn criterion_6_homology() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    let p = "3/5,4/5,0";
    let alg = algebra(p);
    let s = seven(&alg);
    let space = ChainSpace::new(&s);
    let pool = space.monomial_pool(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..50 {
        let degree = 1 + i % 3;
        let c = space.random_chain(degree, 4, &pool, &mut rng);
        let bb = space.b(&space.b(&c).unwrap());
        if let Ok(bb) = bb {
            if !bb.is_zero() {
                problems.push(format!("chain {i}: b^2 != 0"));
            }
        }
        if !space.big_b(&space.big_b(&c)).is_zero() {
            problems.push(format!("chain {i}: B^2 != 0"));
        }
        let mixed = space.b(&space.big_b(&c)).unwrap().add(&space.big_b(&space.b(&c).unwrap()));
        if !mixed.is_zero() {
            problems.push(format!("chain {i}: bB + Bb != 0"));
        }
    }
    let ys = compute_y(&alg, &params(p));
    let three = three_sphere_context(alg.clone()).unwrap();
    let suite = chern_suite(&s, &three, &build_projection(&alg), &ys, &ChernConfig::default()).unwrap();
    for name in [
        "ch0_vanishes",
        "ch_half_vanishes",
        "ch1_vanishes",
        "ch2_nonzero",
        "ch2_cycle",
        "ch_three_halves_nonzero",
        "ch_three_halves_cycle",
        "transgression_0",
        "transgression_1",
    ] {
        match suite.report.get(name) {
            Some(c) if c.pass => {}
            Some(c) => problems.push(format!("{name}: witness {}", c.witness)),
            None => problems.push(format!("{name}: missing")),
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        problems.push(format!("runtime {elapsed:.2?} exceeds 5 min"));
    }
    verdict("b^2 = B^2 = bB + Bb = 0 and the Chern character components", elapsed, problems)
}

/// Coinvariants of degree `n` computed straight from `delta(f) = f (x) 1`.
fn coinvariants_by_coaction(delta: &Coaction<'_, G>, alg: &Algebra<G>, n: usize) -> Vec<NCPoly<G>> {
    let basis = alg.basis(n);
    let mut rows: BTreeMap<_, SparseVec<usize, G>> = BTreeMap::new();
    for (j, m) in basis.iter().enumerate() {
        let f = NCPoly::monomial(*m, G::one());
        let diff: MixedElement<G> = delta.apply(&f).sub(&delta.ring().reduce(&MixedElement::pure(&f, &HTensor::one(1))));
        for (key, c) in diff.terms() {
            rows.entry(key.clone()).or_default().insert(j, c.clone());
        }
    }
    kernel(rows.into_values(), basis.len())
        .into_iter()
        .map(|v| NCPoly::from_terms(v.into_iter().map(|(j, c)| (basis[j], c))))
        .collect()
}

fn poly_rank(polys: &[NCPoly<G>]) -> usize {
    rank(polys.iter().map(|f| f.terms().iter().map(|(m, c)| (*m, c.clone())).collect::<SparseVec<_, _>>()))
}

fn criterion_7_coaction() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut notes = Vec::new();
    for p in catalog() {
        let alg = algebra(&p);
        let s = seven(&alg);
        let ys = compute_y(&alg, &params(&p));
        let delta = Coaction::new(&s, ActionKind::Diagonal);
        if let Some(c) = delta.check_comodule_algebra().get("relations_preserved").filter(|c| !c.pass) {
            problems.push(format!("{p}: diagonal action breaks {}", c.witness));
        }
        let suite = coaction_suite(&s, &ys, 2).unwrap();
        for name in ["derivations_kill_y", "coinvariants_match_y_span", "canonical_witness"] {
            if !suite.report.passed(name) {
                problems.push(format!("{p}: {name} fails"));
            }
        }
        let direct = coinvariants_by_coaction(&delta, &alg, 2);
        let expected = expected_invariants(&alg, &ys);
        let mut joint = direct.clone();
        joint.extend(expected.iter().cloned());
        if direct.len() != 6 || poly_rank(&expected) != 6 || poly_rank(&joint) != 6 {
            problems.push(format!("{p}: coaction kernel has dimension {}, expected span{{Y, Y4, x^2}}", direct.len()));
        }
    }
    let alg = algebra("3/5,4/5,0");
    let s = seven(&alg);
    let one_sided = Coaction::new(&s, ActionKind::LeftOnFirst).check_comodule_algebra();
    match one_sided.get("relations_preserved") {
        Some(c) if !c.pass && !c.witness.is_empty() => notes.push(format!("one-sided action breaks: {}", c.witness)),
        _ => problems.push("one-sided action preserves the relations at (3/5,4/5,0)".into()),
    }
    Verdict { notes, ..verdict("diagonal coaction, invariants, coinvariants and the canonical witness", start.elapsed(), problems) }
}

fn criterion_8_float_exact_agreement() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    let exact = run(&RunSpec { params: "3/5,4/5,0".into(), ..RunSpec::default() }).unwrap();
    let float = run(&RunSpec { params: "0.6,0.8,0".into(), backend: Backend::Float, ..RunSpec::default() }).unwrap();
    let mut compared = 0;
    for (task, rep) in &exact.tasks {
        for name in rep.checks.checks.iter().filter(|(_, c)| c.pass).map(|(n, _)| n) {
            match float.tasks.get(task).and_then(|t| t.checks.get(name)) {
                Some(f) if f.pass && f.max_residual <= 1e-9 => compared += 1,
                Some(f) => problems.push(format!("{task}.{name}: float residual {}", f.max_residual)),
                None => problems.push(format!("{task}.{name}: missing from the float run")),
            }
        }
    }
    if compared == 0 {
        problems.push("nothing compared".into());
    }
    verdict(&format!("float residuals <= 1e-9 on {compared} exact-passing identities"), start.elapsed(), problems)
}

fn criterion_9_determinism() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    let base = RunSpec::default();
    let first = sweep(&catalog(), &base).unwrap();
    let second = sweep(&catalog(), &base).unwrap();
    let (a, b) = (first.to_json().unwrap(), second.to_json().unwrap());
    if a != b {
        problems.push("sweep JSON differs between runs".into());
    }
    if first.csv != second.csv {
        problems.push("sweep CSV differs between runs".into());
    }
    let points: BTreeSet<_> = first.reports.iter().map(|r| r.spec.params.clone()).collect();
    if points.len() != catalog().len() {
        problems.push("sweep lost points".into());
    }
    verdict(&format!("two catalog sweeps give identical JSON ({} bytes)", a.len()), start.elapsed(), problems)
}

fn main() {
    let criteria: [fn() -> Verdict; 9] = [
        criterion_1_r_matrix_conditions,
        criterion_2_pbw_and_confluence,
        criterion_3_centrality,
        criterion_4_projection,
        criterion_5_y_system,
        criterion_6_homology,
        criterion_7_coaction,
        criterion_8_float_exact_agreement,
        criterion_9_determinism,
    ];
    let handles: Vec<_> = criteria.into_iter().map(std::thread::spawn).collect();
    let mut failed = 0;
    for (i, h) in handles.into_iter().enumerate() {
        let v = h.join().unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict("(panicked)", Duration::ZERO, vec![msg.unwrap_or_default()])
        });
        let status = if v.problems.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {} [{:.2?}]", i + 1, v.title, v.elapsed);
        for line in v.notes.iter().chain(&v.problems) {
            println!("    {line}");
        }
        failed += usize::from(!v.problems.is_empty());
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
