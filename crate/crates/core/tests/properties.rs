use std::sync::{Arc, OnceLock};

use ncsphere::coaction::{coinvariants, derivation_action, ActionKind, Coaction, HTensor, MixedElement};
use ncsphere::homology::{chern_suite, ChainSpace, ChernConfig};
use ncsphere::linalg::{kernel, rank, SparseVec};
use ncsphere::ncalg::{Algebra, Monomial, NCPoly};
use ncsphere::quatlin::{embed_m2, is_special_orthogonal, left_mult_matrix, right_mult_matrix, Matrix4, Quat};
use ncsphere::ring::{RingMatrix, ScalarRing, StarRing};
use ncsphere::rmatrix::{build_r_quaternionic, check_all_conditions, gauge_rotate, DeformParams, Slot};
use ncsphere::spheres::{build_projection, compute_y, lambda_matrix, three_sphere_context, SphereAlgebra, SphereKind};
use ncsphere::{GaussRational as G, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frac(n: i64, d: i64) -> G {
    G::from_fracs(n, d, 0, 1)
}

/// Rational point on the unit 2-sphere by inverse stereographic projection of `(a/q, b/q)`.
fn sphere_point(a: i64, b: i64, q: i64) -> DeformParams<G> {
    let d = q * q + a * a + b * b;
    DeformParams::new(frac(q * q - a * a - b * b, d), frac(2 * a * q, d), frac(2 * b * q, d)).unwrap()
}

fn point() -> impl Strategy<Value = DeformParams<G>> {
    (-3i64..=3, -3i64..=3, 1i64..=3).prop_map(|(a, b, q)| sphere_point(a, b, q))
}

fn gauss() -> impl Strategy<Value = G> {
    (-9i64..=9, 1i64..=6, -9i64..=9, 1i64..=6).prop_map(|(a, b, c, d)| G::from_fracs(a, b, c, d))
}

fn algebra(p: &DeformParams<G>) -> Arc<Algebra<G>> {
    Arc::new(Algebra::quaternionic(p).unwrap())
}

/// Random combination of normal-form monomials of degree at most `max_degree`.
fn poly(alg: &Algebra<G>, max_degree: usize, coeffs: &[(usize, i64, i64)]) -> NCPoly<G> {
    let basis: Vec<Monomial> = alg.basis_upto(max_degree);
    NCPoly::from_terms(coeffs.iter().map(|&(k, re, im)| (basis[k % basis.len()], G::from_fracs(re, 1, im, 1))))
}

fn coeffs() -> impl Strategy<Value = Vec<(usize, i64, i64)>> {
    prop::collection::vec((0usize..1000, -3i64..=3, -2i64..=2), 1..5)
}

/// Seven-sphere contexts at a few fixed points, built once.
fn contexts() -> &'static [SphereAlgebra<G>] {
    static CTX: OnceLock<Vec<SphereAlgebra<G>>> = OnceLock::new();
    CTX.get_or_init(|| {
        ["3/5,4/5,0", "1/3,2/3,2/3", "3/5,0,4/5"]
            .iter()
            .map(|p| SphereAlgebra::new(algebra(&DeformParams::parse(p).unwrap()), SphereKind::SevenSphere).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_rationals_form_a_field(a in gauss(), b in gauss(), c in gauss()) {
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        if let Some(inv) = a.inv() {
            prop_assert_eq!(a.clone() * inv, G::one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn conjugation_and_modulus(a in gauss(), b in gauss()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((a.clone() * b.clone()).conj(), a.conj() * b.conj());
        prop_assert_eq!((a.clone() * b.clone()).norm_sqr(), a.norm_sqr() * b.norm_sqr());
    }

    #[test]
    fn unit_quaternions_give_rotations(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4, q in 1i64..=4) {
        // inverse stereographic projection of (a, b, c)/q onto the unit 3-sphere
        let d = q * q + a * a + b * b + c * c;
        let unit = Quat::new([frac(q * q - a * a - b * b - c * c, d), frac(2 * a * q, d), frac(2 * b * q, d), frac(2 * c * q, d)]);
        prop_assert!(is_special_orthogonal(&right_mult_matrix(&unit)).pass);
        prop_assert!(is_special_orthogonal(&left_mult_matrix(&unit)).pass);
    }

    #[test]
    fn quaternion_embedding_is_injective(c in prop::array::uniform4(gauss())) {
        let ring = ScalarRing::<G>::new();
        let q = Quat::new(c);
        let m = embed_m2(&ring, &q);
        let zero = RingMatrix::from_fn(2, |_, _| G::zero());
        prop_assert_eq!(m == zero, q.c.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn lambda_is_symmetric_and_unitary(p in point()) {
        let l = lambda_matrix(&p);
        prop_assert_eq!(l.transpose(), l.clone());
        let l_bar = Matrix4::from_fn(|i, j| l.get(i, j).conj());
        prop_assert_eq!(l.mul(&l_bar), Matrix4::identity());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conditions_hold_on_the_rational_sphere(p in point()) {
        let report = check_all_conditions(&build_r_quaternionic(&p).unwrap());
        prop_assert!(report.all_pass(), "{}", report);
    }

    #[test]
    fn gauge_rotation_moves_parameters_and_keeps_conditions(p in point(), c in -3i64..=3, s in -3i64..=3) {
        prop_assume!(c != 0 || s != 0);
        let n = c * c + s * s;
        let (cos, sin) = (frac(c * c - s * s, n), frac(2 * c * s, n));
        let r = build_r_quaternionic(&p).unwrap();
        let rotated = gauge_rotate(&r, Slot::Second, &Quat::new([G::from_i64(c), G::zero(), G::zero(), G::from_i64(s)]));
        let moved = DeformParams::new(
            p.u0.clone(),
            p.u1.clone() * cos.clone() - p.u2.clone() * sin.clone(),
            p.u1.clone() * sin + p.u2.clone() * cos,
        ).unwrap();
        prop_assert_eq!(&rotated, &build_r_quaternionic(&moved).unwrap());
        prop_assert!(check_all_conditions(&rotated).all_pass());
    }

    #[test]
    fn star_reverses_products(p in point(), f in coeffs(), g in coeffs()) {
        let alg = algebra(&p);
        let (f, g) = (poly(&alg, 2, &f), poly(&alg, 2, &g));
        prop_assert_eq!(alg.star(&alg.multiply(&f, &g)), alg.multiply(&alg.star(&g), &alg.star(&f)));
    }

    #[test]
    fn cross_rewrite_is_involutive(p in point(), l in 0usize..4, a in 0usize..4) {
        let alg = algebra(&p);
        let mut back = NCPoly::zero();
        for b in 0..4u8 {
            for m in 0..4u8 {
                let c = alg.r().get(l, a, usize::from(b), usize::from(m)).clone();
                back = back.add(&alg.normal_form(&[4 + b, m]).scale(&c));
            }
        }
        prop_assert_eq!(back, alg.multiply(&alg.x1(l), &alg.x2(a)));
    }

    #[test]
    fn sphere_reduction_is_a_projection(idx in 0usize..3, f in coeffs()) {
        let ctx = &contexts()[idx];
        let f = poly(ctx.algebra(), 4, &f);
        let once = ctx.reduce(&f).unwrap();
        prop_assert_eq!(ctx.reduce(&once).unwrap(), once.clone());
        // f - reduce(f) lies in the ideal, so it reduces to zero
        prop_assert!(ctx.reduce(&f.sub(&once)).unwrap().is_zero());
    }

    #[test]
    fn central_sums_commute_with_generators(p in point()) {
        let alg = algebra(&p);
        let ys = compute_y(&alg, &p);
        let mut star_first = NCPoly::zero();
        let mut star_last = NCPoly::zero();
        for mu in 0..4 {
            star_first = star_first.add(&alg.multiply(&ys.y_star[mu], &ys.y[mu]));
            star_last = star_last.add(&alg.multiply(&ys.y[mu], &ys.y_star[mu]));
        }
        prop_assert!(alg.is_central(&star_first));
        prop_assert!(alg.is_central(&star_last));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn boundaries_square_to_zero(idx in 0usize..3, degree in 2usize..=4, seed in any::<u64>()) {
        let space = ChainSpace::new(&contexts()[idx]);
        let pool = space.monomial_pool(2).unwrap();
        let c = space.random_chain(degree, 3, &pool, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(space.b(&space.b(&c).unwrap()).unwrap().is_zero());
        prop_assert!(space.big_b(&space.big_b(&c)).is_zero());
    }

    #[test]
    fn boundaries_anticommute(idx in 0usize..3, degree in 1usize..=3, seed in any::<u64>()) {
        let space = ChainSpace::new(&contexts()[idx]);
        let pool = space.monomial_pool(2).unwrap();
        let c = space.random_chain(degree, 3, &pool, &mut ChaCha8Rng::seed_from_u64(seed));
        let anti = space.b(&space.big_b(&c)).unwrap().add(&space.big_b(&space.b(&c).unwrap()));
        prop_assert!(anti.is_zero());
    }

    #[test]
    fn traces_are_invariant_under_constant_unitary_conjugation(
        idx in 0usize..3,
        u in prop::array::uniform4(-3i64..=3),
        entries in prop::collection::vec(coeffs(), 12),
    ) {
        prop_assume!(u.iter().any(|x| *x != 0));
        let ctx = &contexts()[idx];
        let alg = ctx.algebra();
        let ring = ctx.ring();
        let norm: i64 = u.iter().map(|x| x * x).sum();
        let q = embed_m2(&ScalarRing::<G>::new(), &Quat::new(u.map(G::from_i64)));
        let unitary = q.map(|c| NCPoly::constant(c.clone()));
        let unitary_star = unitary.star(ring).scale(ring, &frac(1, norm));
        let factors: Vec<RingMatrix<NCPoly<G>>> = entries
            .chunks(4)
            .map(|e| RingMatrix::from_fn(2, |i, j| ctx.reduce(&poly(alg, 1, &e[2 * i + j])).unwrap()))
            .collect();
        let conjugated: Vec<_> = factors.iter().map(|m| unitary.mul(ring, &m.mul(ring, &unitary_star))).collect();
        let space = ChainSpace::new(ctx);
        let before = space.trace_chain(&factors).unwrap();
        let after = space.trace_chain(&conjugated).unwrap();
        prop_assert!(before.sub(&after).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn chern_verdicts_do_not_depend_on_normalization(
        idx in 0usize..3,
        even in prop::array::uniform3(gauss()),
        odd in prop::array::uniform2(gauss()),
    ) {
        prop_assume!(even.iter().chain(odd.iter()).all(|x| !x.is_zero()));
        let seven = &contexts()[idx];
        let alg = seven.algebra();
        let p = DeformParams::parse(["3/5,4/5,0", "1/3,2/3,2/3", "3/5,0,4/5"][idx]).unwrap();
        let ys = compute_y(alg, &p);
        let three = three_sphere_context(alg.clone()).unwrap();
        let proj = build_projection(alg);
        let base = chern_suite(seven, &three, &proj, &ys, &ChernConfig::default()).unwrap();
        let scaled = chern_suite(seven, &three, &proj, &ys, &ChernConfig { even, odd }).unwrap();
        for name in ["ch0_vanishes", "ch1_vanishes", "ch2_nonzero", "ch2_cycle", "ch_half_vanishes", "ch_three_halves_nonzero", "ch_three_halves_cycle"] {
            prop_assert_eq!(base.report.passed(name), scaled.report.passed(name), "{}", name);
        }
    }

    #[test]
    fn coaction_is_multiplicative(idx in 0usize..3, f in coeffs(), g in coeffs()) {
        let ctx = &contexts()[idx];
        let alg = ctx.algebra();
        let delta = Coaction::new(ctx, ActionKind::Diagonal);
        let (f, g) = (poly(alg, 2, &f), poly(alg, 2, &g));
        let lhs = delta.apply(&alg.multiply(&f, &g));
        let rhs = delta.ring().mul(&delta.apply(&f), &delta.apply(&g));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn derivation_kernel_equals_coinvariants(idx in 0usize..3) {
        let ctx = &contexts()[idx];
        let alg = ctx.algebra();
        let delta = Coaction::new(ctx, ActionKind::Diagonal);
        let basis = alg.basis(2);
        let mut rows: std::collections::BTreeMap<_, SparseVec<usize, G>> = Default::default();
        for (j, m) in basis.iter().enumerate() {
            let f = NCPoly::monomial(*m, G::one());
            let diff = delta.apply(&f).sub(&delta.ring().reduce(&MixedElement::pure(&f, &HTensor::one(1))));
            for (key, c) in diff.terms() {
                rows.entry(key.clone()).or_default().insert(j, c.clone());
            }
        }
        let by_coaction = kernel(rows.into_values(), basis.len());
        let by_derivations = coinvariants(alg, 2, 4).unwrap();
        for f in &by_derivations {
            for a in 1..=3 {
                prop_assert!(derivation_action(alg, a, f).is_zero());
            }
        }
        let as_vec = |f: &NCPoly<G>| -> SparseVec<Monomial, G> { f.terms().iter().map(|(m, c)| (*m, c.clone())).collect() };
        let coaction_polys: Vec<SparseVec<Monomial, G>> = by_coaction
            .iter()
            .map(|v| v.iter().map(|(j, c)| (basis[*j], c.clone())).collect())
            .collect();
        let derivation_polys: Vec<_> = by_derivations.iter().map(as_vec).collect();
        let joint = rank(coaction_polys.iter().cloned().chain(derivation_polys.iter().cloned()));
        prop_assert_eq!(coaction_polys.len(), derivation_polys.len());
        prop_assert_eq!(joint, derivation_polys.len());
    }
}
