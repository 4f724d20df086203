//! Quaternion linear algebra on R^4.
//!
//! Quaternions `q = q0 e0 + q1 e1 + q2 e2 + q3 e3` are identified with their
//! component vectors. `J+_a` is left multiplication by the imaginary unit
//! `e_a` and `J-_a` is minus right multiplication by `e_a`; both families
//! square to `-1`, multiply like the imaginary units and commute with each
//! other. The Levi-Civita symbol uses `eps_123 = +1`, so `e1 e2 = e3`.

use crate::conditions::{Check, ConditionReport, Residuals};
use crate::ring::{RingMatrix, StarRing};
use crate::scalars::Scalar;

/// Which of the two commuting quaternionic families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// Totally antisymmetric symbol on `{1,2,3}`, `eps(1,2,3) = 1`.
pub fn epsilon(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (1, 3, 2) | (3, 2, 1) | (2, 1, 3) => -1,
        _ => 0,
    }
}

/// The `c` with `eps(a,b,c) != 0`, for distinct `a, b` in `1..=3`.
pub fn third(a: usize, b: usize) -> usize {
    6 - a - b
}

/// 4x4 matrix indexed by `mu, nu` in `0..4`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix4<S>(pub [[S; 4]; 4]);

impl<S: Scalar> Matrix4<S> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| S::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.0[i][j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| {
            (0..4).fold(S::zero(), |acc, k| acc + self.0[i][k].mul_ref(&o.0[k][j]))
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].add_ref(&o.0[i][j]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].sub_ref(&o.0[i][j]))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_fn(|i, j| s.mul_ref(&self.0[i][j]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn trace(&self) -> S {
        (0..4).fold(S::zero(), |acc, i| acc + self.0[i][i].clone())
    }

    /// Determinant by cofactor expansion.
    pub fn det(&self) -> S {
        fn det3<S: Scalar>(m: &[[S; 4]; 4], rows: [usize; 3], cols: [usize; 3]) -> S {
            let e = |r: usize, c: usize| &m[rows[r]][cols[c]];
            e(0, 0).mul_ref(&(e(1, 1).mul_ref(e(2, 2)) - e(1, 2).mul_ref(e(2, 1))))
                - e(0, 1).mul_ref(&(e(1, 0).mul_ref(e(2, 2)) - e(1, 2).mul_ref(e(2, 0))))
                + e(0, 2).mul_ref(&(e(1, 0).mul_ref(e(2, 1)) - e(1, 1).mul_ref(e(2, 0))))
        }
        let mut acc = S::zero();
        for c in 0..4 {
            let cols: Vec<usize> = (0..4).filter(|&k| k != c).collect();
            let minor = det3(&self.0, [1, 2, 3], [cols[0], cols[1], cols[2]]);
            let term = self.0[0][c].mul_ref(&minor);
            acc = if c % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    /// Largest entry modulus of `self - other`, with the offending index.
    pub fn max_diff(&self, o: &Self) -> (f64, Option<(usize, usize)>) {
        let mut best = (0.0, None);
        for i in 0..4 {
            for j in 0..4 {
                let d = self.0[i][j].sub_ref(&o.0[i][j]);
                if !d.is_zero() && (best.1.is_none() || d.magnitude() > best.0) {
                    best = (d.magnitude(), Some((i, j)));
                }
            }
        }
        best
    }
}

/// `J+_a` (left multiplication by `e_a`) or `J-_a` (minus right
/// multiplication by `e_a`), for `a` in `1..=3`:
///
/// `(J±_a)_{mu nu} = ∓(d_{0 mu} d_{a nu} - d_{a mu} d_{0 nu}) - eps_{abc} d_{b mu} d_{c nu}`.
pub fn build_j<S: Scalar>(sign: Sign, a: usize) -> Matrix4<S> {
    assert!((1..=3).contains(&a), "imaginary unit index must be 1..=3, got {a}");
    let s = match sign {
        Sign::Plus => -1,
        Sign::Minus => 1,
    };
    Matrix4::from_fn(|mu, nu| {
        let d = |x: usize, y: usize| i64::from(x == y);
        let mut v = s * (d(0, mu) * d(a, nu) - d(a, mu) * d(0, nu));
        if mu >= 1 && nu >= 1 {
            v -= epsilon(a, mu, nu);
        }
        S::from_i64(v)
    })
}

/// The three matrices of one family.
pub fn j_family<S: Scalar>(sign: Sign) -> [Matrix4<S>; 3] {
    [build_j(sign, 1), build_j(sign, 2), build_j(sign, 3)]
}

/// `q0 1 + q^a J+_a`: left multiplication by `q`.
pub fn left_mult_matrix<S: Scalar>(q: &Quat<S>) -> Matrix4<S> {
    let jp = j_family::<S>(Sign::Plus);
    (0..3).fold(Matrix4::identity().scale(&q.c[0]), |acc, a| acc.add(&jp[a].scale(&q.c[a + 1])))
}

/// `q0 1 - q^a J-_a`: right multiplication by `q`.
pub fn right_mult_matrix<S: Scalar>(q: &Quat<S>) -> Matrix4<S> {
    let jm = j_family::<S>(Sign::Minus);
    (0..3).fold(Matrix4::identity().scale(&q.c[0]), |acc, a| acc.sub(&jm[a].scale(&q.c[a + 1])))
}

/// Checks the quaternionic identities of the two `J` families.
#[allow(clippy::needless_range_loop)]
pub fn check_quaternion_matrix_relations<S: Scalar>(
    plus: &[Matrix4<S>; 3],
    minus: &[Matrix4<S>; 3],
) -> ConditionReport {
    let mut report = ConditionReport::new();
    let fams = [("plus", plus), ("minus", minus)];

    let mut anti = Residuals::<S>::new();
    for (name, fam) in fams {
        for (a, j) in fam.iter().enumerate() {
            let (d, at) = j.transpose().add(j).max_diff(&Matrix4::zero());
            if let Some(at) = at {
                anti.observe_fail(d, || format!("{name} a={} entry={at:?}", a + 1));
            }
        }
    }
    report.insert("antisymmetric", anti.finish());

    let mut comm = Residuals::<S>::new();
    for a in 0..3 {
        for b in 0..3 {
            let (d, at) = plus[a].mul(&minus[b]).max_diff(&minus[b].mul(&plus[a]));
            if let Some(at) = at {
                comm.observe_fail(d, || format!("a={} b={} entry={at:?}", a + 1, b + 1));
            }
        }
    }
    report.insert("plus_minus_commute", comm.finish());

    for (name, fam) in fams {
        let mut alg = Residuals::<S>::new();
        let mut tr = Residuals::<S>::new();
        for a in 1..=3 {
            for b in 1..=3 {
                let prod = fam[a - 1].mul(&fam[b - 1]);
                let mut expect = Matrix4::zero();
                if a == b {
                    expect = expect.sub(&Matrix4::identity());
                } else {
                    let c = third(a, b);
                    expect = expect.add(&fam[c - 1].scale(&S::from_i64(epsilon(a, b, c))));
                }
                let (d, at) = prod.max_diff(&expect);
                if let Some(at) = at {
                    alg.observe_fail(d, || format!("a={a} b={b} entry={at:?}"));
                }
                let t = prod.trace().mul_ref(&S::from_rational(&crate::scalars::Rational::new(
                    (-1).into(),
                    4.into(),
                )));
                let want = S::from_i64(i64::from(a == b));
                tr.observe(&t.sub_ref(&want), || format!("a={a} b={b}"));
            }
        }
        report.insert(format!("algebra_{name}"), alg.finish());
        report.insert(format!("trace_orthonormal_{name}"), tr.finish());
    }
    report
}

/// The standard check on the matrices produced by [`build_j`].
pub fn check_standard_relations<S: Scalar>() -> ConditionReport {
    check_quaternion_matrix_relations::<S>(&j_family(Sign::Plus), &j_family(Sign::Minus))
}

/// Orthogonal with determinant one.
pub fn is_special_orthogonal<S: Scalar>(m: &Matrix4<S>) -> Check {
    let (d, at) = m.mul(&m.transpose()).max_diff(&Matrix4::identity());
    if let Some(at) = at {
        return Check { pass: false, max_residual: d, witness: format!("{at:?}") };
    }
    let det = m.det() - S::one();
    Check::from_bool(det.is_zero(), "det")
}

/// Quaternion with components in an arbitrary ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Quat<T> {
    pub c: [T; 4],
}

impl<T: Clone> Quat<T> {
    pub fn new(c: [T; 4]) -> Self {
        Self { c }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Quat<U> {
        Quat { c: self.c.each_ref().map(f) }
    }
}

impl<T: Clone> Quat<T> {
    /// The basis element `e_mu` in a ring.
    pub fn unit<R: StarRing<Elem = T>>(ring: &R, mu: usize) -> Self {
        Self { c: std::array::from_fn(|k| if k == mu { ring.one() } else { ring.zero() }) }
    }

    pub fn add<R: StarRing<Elem = T>>(&self, ring: &R, o: &Self) -> Self {
        Self { c: std::array::from_fn(|k| ring.add(&self.c[k], &o.c[k])) }
    }

    pub fn sub<R: StarRing<Elem = T>>(&self, ring: &R, o: &Self) -> Self {
        Self { c: std::array::from_fn(|k| ring.sub(&self.c[k], &o.c[k])) }
    }

    pub fn scale<R: StarRing<Elem = T>>(&self, ring: &R, s: &R::Scalar) -> Self {
        self.map(|x| ring.scale(s, x))
    }

    /// `(c0*, -c1*, -c2*, -c3*)`.
    pub fn star<R: StarRing<Elem = T>>(&self, ring: &R) -> Self {
        Self {
            c: std::array::from_fn(|k| {
                let s = ring.star(&self.c[k]);
                if k == 0 {
                    s
                } else {
                    ring.neg(&s)
                }
            }),
        }
    }

    pub fn is_zero<R: StarRing<Elem = T>>(&self, ring: &R) -> bool {
        self.c.iter().all(|x| ring.is_zero(x))
    }
}

/// Quaternion product with `e_a e_b = -delta_ab + eps_abc e_c`; component
/// order within each product is preserved, so noncommuting components are
/// handled correctly.
pub fn quat_multiply<R: StarRing>(ring: &R, p: &Quat<R::Elem>, q: &Quat<R::Elem>) -> Quat<R::Elem> {
    let m = |i: usize, j: usize| ring.mul(&p.c[i], &q.c[j]);
    let mut c0 = m(0, 0);
    for a in 1..4 {
        c0 = ring.sub(&c0, &m(a, a));
    }
    let mut out = [c0, ring.zero(), ring.zero(), ring.zero()];
    for (c, slot) in out.iter_mut().enumerate().skip(1) {
        let mut acc = ring.add(&m(0, c), &m(c, 0));
        for a in 1..4 {
            for b in 1..4 {
                match epsilon(a, b, c) {
                    1 => acc = ring.add(&acc, &m(a, b)),
                    -1 => acc = ring.sub(&acc, &m(a, b)),
                    _ => {}
                }
            }
        }
        *slot = acc;
    }
    Quat { c: out }
}

/// `q0 + q1 e1 + q2 e2 + q3 e3 -> [[q0 + i q1, q2 + i q3], [-q2 + i q3, q0 - i q1]]`.
pub fn embed_m2<R: StarRing>(ring: &R, q: &Quat<R::Elem>) -> RingMatrix<R::Elem> {
    let i = R::Scalar::i();
    let iq = |k: usize| ring.scale(&i, &q.c[k]);
    RingMatrix {
        n: 2,
        entries: vec![
            ring.add(&q.c[0], &iq(1)),
            ring.add(&q.c[2], &iq(3)),
            ring.add(&ring.neg(&q.c[2]), &iq(3)),
            ring.sub(&q.c[0], &iq(1)),
        ],
    }
}

/// Applies a 4x4 scalar matrix to the components: `(M q)^mu = M_{mu nu} q^nu`.
pub fn apply_matrix<R: StarRing>(ring: &R, m: &Matrix4<R::Scalar>, q: &Quat<R::Elem>) -> Quat<R::Elem> {
    Quat {
        c: std::array::from_fn(|mu| {
            let terms: Vec<R::Elem> = (0..4)
                .filter(|&nu| !m.0[mu][nu].is_zero())
                .map(|nu| ring.scale(&m.0[mu][nu], &q.c[nu]))
                .collect();
            ring.sum(terms.iter())
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ScalarRing;
    use crate::scalars::GaussRational as G;

    fn g(n: i64) -> G {
        G::from_i64(n)
    }

    #[test]
    fn j_entries() {
        let jp1 = build_j::<G>(Sign::Plus, 1);
        assert_eq!(jp1.get(0, 1), &g(-1));
        assert_eq!(jp1.get(1, 0), &g(1));
        assert_eq!(jp1.get(2, 3), &g(-1));
        let jm1 = build_j::<G>(Sign::Minus, 1);
        assert_eq!(jm1.get(0, 1), &g(1));
        assert_eq!(jm1.get(2, 3), &g(-1));
        for sign in [Sign::Plus, Sign::Minus] {
            for j in j_family::<G>(sign) {
                assert_eq!(j.transpose(), j.scale(&g(-1)));
            }
        }
    }

    #[test]
    fn j_plus_is_left_multiplication() {
        let ring = ScalarRing::<G>::new();
        for a in 1..=3 {
            for mu in 0..4 {
                let e_a = Quat::unit(&ring, a);
                let e_mu = Quat::unit(&ring, mu);
                let left = quat_multiply(&ring, &e_a, &e_mu);
                let right = quat_multiply(&ring, &e_mu, &e_a);
                assert_eq!(apply_matrix(&ring, &build_j(Sign::Plus, a), &e_mu), left);
                let minus = apply_matrix(&ring, &build_j(Sign::Minus, a), &e_mu);
                assert_eq!(minus, right.scale(&ring, &g(-1)));
            }
        }
    }

    #[test]
    fn standard_relations_pass() {
        let r = check_standard_relations::<G>();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn flipped_sign_is_caught() {
        let mut plus = j_family::<G>(Sign::Plus);
        plus[0].0[2][3] = -plus[0].0[2][3].clone();
        let r = check_quaternion_matrix_relations(&plus, &j_family(Sign::Minus));
        assert!(!r.passed("algebra_plus"));
        assert!(!r.get("algebra_plus").unwrap().witness.is_empty());
    }

    #[test]
    fn imaginary_units_square_to_minus_one() {
        for sign in [Sign::Plus, Sign::Minus] {
            let j2 = build_j::<G>(sign, 2);
            assert_eq!(j2.mul(&j2), Matrix4::identity().scale(&g(-1)));
        }
    }

    #[test]
    fn quaternion_table() {
        let ring = ScalarRing::<G>::new();
        let e = |k| Quat::unit(&ring, k);
        assert_eq!(quat_multiply(&ring, &e(1), &e(2)), e(3));
        assert_eq!(quat_multiply(&ring, &e(2), &e(3)), e(1));
        assert_eq!(quat_multiply(&ring, &e(2), &e(1)), e(3).scale(&ring, &g(-1)));
        let q = Quat::new([g(1), g(1), g(0), g(0)]);
        assert_eq!(quat_multiply(&ring, &q, &q.star(&ring)), e(0).scale(&ring, &g(2)));
    }

    #[test]
    fn embedding_basics() {
        let ring = ScalarRing::<G>::new();
        assert_eq!(embed_m2(&ring, &Quat::unit(&ring, 0)), RingMatrix::identity(&ring, 2));
        for a in 1..4 {
            assert!(embed_m2(&ring, &Quat::unit(&ring, a)).trace(&ring).is_zero());
        }
    }

    #[test]
    fn unit_quaternion_rotation_is_special_orthogonal() {
        let q = Quat::new([G::from_fracs(3, 5, 0, 1), G::from_fracs(4, 5, 0, 1), g(0), g(0)]);
        assert!(is_special_orthogonal(&right_mult_matrix(&q)).pass);
        assert!(is_special_orthogonal(&left_mult_matrix(&q)).pass);
        let h = G::from_fracs(1, 2, 0, 1);
        let q = Quat::new([h.clone(), h.clone(), h.clone(), h]);
        assert!(is_special_orthogonal(&right_mult_matrix(&q)).pass);
    }
}
