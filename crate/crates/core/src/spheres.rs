//! Sphere quotients of `A_R`, the projection `p = |psi><psi|`, the
//! four-sphere coordinates `Y^mu`, `Y^4` and their `*`-structure.

use std::sync::Arc;

use crate::conditions::{Check, ConditionReport, Residuals};
use crate::error::{Error, Result};
use crate::ncalg::{Algebra, CentralRelations, NCPoly, Quotient};
use crate::quatlin::{embed_m2, epsilon, quat_multiply, Matrix4, Quat};
use crate::ring::RingMatrix;
use crate::rmatrix::DeformParams;
use crate::scalars::Scalar;

/// Degree cap used by sphere contexts.
pub const SPHERE_DEGREE_CAP: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereKind {
    /// `x^2 = 1`.
    SevenSphere,
    /// `(x1)^2 = (x2)^2 = 1`.
    Torus,
    /// `(x1)^2 = (x2)^2 = 1/2`, where `Y^4 = 0` and the `Y^mu` satisfy the
    /// three-sphere relation.
    Equator,
}

impl SphereKind {
    pub fn relations<S: Scalar>(self, alg: &Algebra<S>) -> CentralRelations<S> {
        match self {
            Self::SevenSphere => CentralRelations::seven_sphere(alg),
            Self::Torus => CentralRelations::torus(alg),
            Self::Equator => CentralRelations::equator(alg),
        }
    }
}

/// `A_R` modulo central relations; equality means equal canonical remainders.
pub struct SphereAlgebra<S: Scalar> {
    pub kind: SphereKind,
    quotient: Quotient<S>,
}

impl<S: Scalar> SphereAlgebra<S> {
    pub fn new(alg: Arc<Algebra<S>>, kind: SphereKind) -> Result<Self> {
        Self::with_cap(alg, kind, SPHERE_DEGREE_CAP)
    }

    pub fn with_cap(alg: Arc<Algebra<S>>, kind: SphereKind, cap: usize) -> Result<Self> {
        let rels = kind.relations(&alg);
        Ok(Self { kind, quotient: Quotient::new(alg, &rels, cap)? })
    }

    /// The central relations `c_j = s_j` defining this quotient.
    pub fn relations(&self) -> CentralRelations<S> {
        self.kind.relations(self.algebra())
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        self.quotient.algebra()
    }

    /// The quotient as a ring; products and stars come back reduced.
    pub fn ring(&self) -> &Quotient<S> {
        &self.quotient
    }

    pub fn reduce(&self, f: &NCPoly<S>) -> Result<NCPoly<S>> {
        self.quotient.reducer.reduce(f)
    }

    /// Feeds the reduced coefficients of `f` into `res`.
    pub fn observe_zero(&self, res: &mut Residuals<S>, f: &NCPoly<S>, witness: impl Fn() -> String) {
        match self.reduce(f) {
            Ok(r) => {
                for c in r.terms().values() {
                    res.observe(c, &witness);
                }
            }
            Err(e) => res.observe_fail(f64::INFINITY, || format!("{}: {e}", witness())),
        }
    }

    /// Check that `f` reduces to zero.
    pub fn zero_check(&self, f: &NCPoly<S>, witness: &str) -> Check {
        let mut res = Residuals::new();
        self.observe_zero(&mut res, f, || witness.to_string());
        res.finish()
    }

    /// Check that `f` commutes with every generator modulo the relations.
    pub fn central_check(&self, f: &NCPoly<S>, name: &str) -> Check {
        let alg = self.algebra();
        let mut res = Residuals::new();
        for i in 0..alg.n_vars() {
            let c = alg.commutator(f, &alg.generator(i));
            self.observe_zero(&mut res, &c, || format!("[{name}, {}]", alg.var_name(i)));
        }
        res.finish()
    }
}

fn quat_of<S: Scalar>(alg: &Algebra<S>, offset: usize) -> Quat<NCPoly<S>> {
    Quat::new(std::array::from_fn(|mu| alg.generator(offset + mu)))
}

/// `|psi> = (x2, x1)` as a column of quaternions.
#[derive(Clone, Debug)]
pub struct PsiVector<S: Scalar> {
    pub upper: Quat<NCPoly<S>>,
    pub lower: Quat<NCPoly<S>>,
}

impl<S: Scalar> PsiVector<S> {
    pub fn new(alg: &Algebra<S>) -> Self {
        assert_eq!((alg.n1(), alg.n2()), (4, 4), "quaternionic generators need N1 = N2 = 4");
        Self { upper: quat_of(alg, 4), lower: quat_of(alg, 0) }
    }

    /// `<psi|psi> = x2* x2 + x1* x1`, as a quaternion over `A_R`.
    pub fn norm(&self, alg: &Algebra<S>) -> Quat<NCPoly<S>> {
        let a = quat_multiply(alg, &self.upper.star(alg), &self.upper);
        let b = quat_multiply(alg, &self.lower.star(alg), &self.lower);
        a.add(alg, &b)
    }
}

/// `p = |psi><psi|` as a 2x2 matrix of quaternions over `A_R`.
#[derive(Clone, Debug)]
pub struct Projection<S: Scalar> {
    pub blocks: [[Quat<NCPoly<S>>; 2]; 2],
}

pub fn build_projection<S: Scalar>(alg: &Algebra<S>) -> Projection<S> {
    let psi = PsiVector::new(alg);
    let col = [&psi.upper, &psi.lower];
    Projection {
        blocks: std::array::from_fn(|i| std::array::from_fn(|j| quat_multiply(alg, col[i], &col[j].star(alg)))),
    }
}

impl<S: Scalar> Projection<S> {
    /// The 4x4 matrix over `A_R` obtained by embedding each quaternion block into `M_2(C)`.
    pub fn to_complex(&self, alg: &Algebra<S>) -> RingMatrix<NCPoly<S>> {
        let emb: Vec<Vec<RingMatrix<NCPoly<S>>>> =
            self.blocks.iter().map(|row| row.iter().map(|q| embed_m2(alg, q)).collect()).collect();
        RingMatrix::from_fn(4, |i, j| emb[i / 2][j / 2].get(i % 2, j % 2).clone())
    }

    /// `p*`, `p^2 = p`, `<p - 1/2> = 0` and the `Y` form of the blocks.
    #[allow(clippy::needless_range_loop)]
    pub fn check(&self, s: &SphereAlgebra<S>, ys: &YSystem<S>) -> ConditionReport {
        let alg = s.algebra();
        let p = self.to_complex(alg);
        let mut report = ConditionReport::new();

        let diff = p.star(alg.as_ref()).sub(alg.as_ref(), &p);
        let mut res = Residuals::new();
        for (k, e) in diff.entries.iter().enumerate() {
            for c in e.terms().values() {
                res.observe(c, || format!("entry ({}, {})", k / 4, k % 4));
            }
        }
        report.insert("hermitian", res.finish());

        let sq = p.mul(alg.as_ref(), &p).sub(alg.as_ref(), &p);
        let mut res = Residuals::new();
        for (k, e) in sq.entries.iter().enumerate() {
            s.observe_zero(&mut res, e, || format!("entry ({}, {})", k / 4, k % 4));
        }
        report.insert("idempotent", res.finish());

        let half = S::half();
        let shifted = p.sub(alg.as_ref(), &RingMatrix::identity(alg.as_ref(), 4).scale(alg.as_ref(), &half));
        report.insert("trace_zero", s.zero_check(&shifted.trace(alg.as_ref()), "<p - 1/2>"));

        // p = 1/2 [[1 + Y4, Y], [Y*, 1 - Y4]]
        let one = NCPoly::one();
        let y = Quat::new(ys.y.clone());
        let y_star = y.star(alg.as_ref());
        let scalar = |f: NCPoly<S>| Quat::new([f, NCPoly::zero(), NCPoly::zero(), NCPoly::zero()]);
        let expected = [
            [scalar(one.add(&ys.y4)), y.clone()],
            [y_star, scalar(one.sub(&ys.y4))],
        ];
        let mut res = Residuals::new();
        for i in 0..2 {
            for j in 0..2 {
                for mu in 0..4 {
                    let d = self.blocks[i][j].c[mu].sub(&expected[i][j].c[mu].scale(&half));
                    s.observe_zero(&mut res, &d, || format!("block ({i}, {j}) component {mu}"));
                }
            }
        }
        report.insert("y_form", res.finish());
        report
    }
}

/// The four-sphere generators and the matrix `Lambda` with `Y^{mu*} = Lambda Y`.
#[derive(Clone, Debug)]
pub struct YSystem<S: Scalar> {
    pub params: DeformParams<S>,
    pub y: [NCPoly<S>; 4],
    pub y4: NCPoly<S>,
    /// `(Y^mu)*` computed in the algebra.
    pub y_star: [NCPoly<S>; 4],
    pub lambda: Matrix4<S>,
}

/// `Lambda` for the quaternionic family: the block
/// `[[u0 + i u1, i u2], [i u2, u0 - i u1]]` on `(Y0, Y3)` and on `(Y1, Y2)`.
pub fn lambda_matrix<S: Scalar>(params: &DeformParams<S>) -> Matrix4<S> {
    let a = params.u0.add_ref(&params.u1.times_i());
    let d = params.u0.sub_ref(&params.u1.times_i());
    let b = params.u2.times_i();
    let z = S::zero;
    Matrix4([
        [a.clone(), z(), z(), b.clone()],
        [z(), a, b.clone(), z()],
        [z(), b.clone(), d.clone(), z()],
        [b, z(), z(), d],
    ])
}

/// `Y = 2 x2 x1*`, `Y^4 = (x2)^2 - (x1)^2`, their stars and `Lambda`.
pub fn compute_y<S: Scalar>(alg: &Algebra<S>, params: &DeformParams<S>) -> YSystem<S> {
    let psi = PsiVector::new(alg);
    let two = S::from_i64(2);
    let y = quat_multiply(alg, &psi.upper, &psi.lower.star(alg)).scale(alg, &two);
    let y_star = y.c.each_ref().map(|f| alg.star(f));
    YSystem {
        params: params.clone(),
        y: y.c,
        y4: alg.x2_squared().sub(&alg.x1_squared()),
        y_star,
        lambda: lambda_matrix(params),
    }
}

/// The coordinate formulas for `Y^mu` and `Y^{mu*}` written out letter by letter.
pub fn y_expansions<S: Scalar>(alg: &Algebra<S>) -> ([NCPoly<S>; 4], [NCPoly<S>; 4]) {
    let x1 = |m: usize| alg.x1(m);
    let x2 = |m: usize| alg.x2(m);
    let two = S::from_i64(2);
    let mut y: [NCPoly<S>; 4] = Default::default();
    let mut ys: [NCPoly<S>; 4] = Default::default();
    for mu in 0..4 {
        y[0] = y[0].add(&alg.multiply(&x2(mu), &x1(mu)));
        ys[0] = ys[0].add(&alg.multiply(&x1(mu), &x2(mu)));
    }
    for k in 1..4 {
        let mut a = alg.multiply(&x2(k), &x1(0)).sub(&alg.multiply(&x2(0), &x1(k)));
        let mut b = alg.multiply(&x1(0), &x2(k)).sub(&alg.multiply(&x1(k), &x2(0)));
        for n in 1..4 {
            for m in 1..4 {
                let e = epsilon(k, n, m);
                if e != 0 {
                    let es = S::from_i64(e);
                    a = a.sub(&alg.multiply(&x2(n), &x1(m)).scale(&es));
                    b = b.add(&alg.multiply(&x1(n), &x2(m)).scale(&es));
                }
            }
        }
        y[k] = a;
        ys[k] = b;
    }
    (y.map(|f| f.scale(&two)), ys.map(|f| f.scale(&two)))
}

/// Solves `Y^{mu*} = L^mu_nu Y^nu` for `L` from coefficient matching.
/// Returns `None` if no such matrix exists.
pub fn solve_lambda<S: Scalar>(ys: &YSystem<S>) -> Option<Matrix4<S>> {
    let mut monos: Vec<_> = ys.y.iter().flat_map(|f| f.terms().keys().copied()).collect();
    for f in &ys.y_star {
        monos.extend(f.terms().keys().copied());
    }
    monos.sort();
    monos.dedup();
    // Columns of the system are the Y^nu; the same 4 unknowns per row mu.
    let cols: Vec<Vec<S>> = ys.y.iter().map(|f| monos.iter().map(|m| f.coeff(m)).collect()).collect();
    let mut out = Matrix4::zero();
    for mu in 0..4 {
        let rhs: Vec<S> = monos.iter().map(|m| ys.y_star[mu].coeff(m)).collect();
        let sol = solve_least(&cols, &rhs)?;
        out.0[mu].clone_from_slice(&sol[..4]);
    }
    Some(out)
}

/// Solves `sum_j x_j cols[j] = rhs` when the columns are independent and a
/// solution exists.
fn solve_least<S: Scalar>(cols: &[Vec<S>], rhs: &[S]) -> Option<Vec<S>> {
    let n = cols.len();
    let rows = rhs.len();
    let mut a: Vec<Vec<S>> = (0..rows).map(|r| (0..n).map(|j| cols[j][r].clone()).chain([rhs[r].clone()]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let p = (row..rows).max_by(|&x, &y| a[x][col].magnitude().total_cmp(&a[y][col].magnitude()))?;
        if a[p][col].is_zero() {
            return None;
        }
        a.swap(row, p);
        let inv = a[row][col].inv()?;
        for x in a[row].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        let pivot = a[row].clone();
        for (r, line) in a.iter_mut().enumerate() {
            if r != row && !line[col].is_zero() {
                let f = line[col].clone();
                for (x, p) in line.iter_mut().zip(&pivot) {
                    *x = x.sub_ref(&f.mul_ref(p));
                }
            }
        }
        pivots.push(row);
        row += 1;
    }
    if a[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| a[r][n].clone()).collect())
}

impl<S: Scalar> YSystem<S> {
    /// `sum_nu Lambda^mu_nu Y^nu`.
    pub fn lambda_y(&self, mu: usize) -> NCPoly<S> {
        (0..4).fold(NCPoly::zero(), |acc, nu| acc.add(&self.y[nu].scale(&self.lambda.0[mu][nu])))
    }

    pub fn quat(&self) -> Quat<NCPoly<S>> {
        Quat::new(self.y.clone())
    }

    /// `Y*` as a quaternion: `(Y^{0*}, -Y^{1*}, -Y^{2*}, -Y^{3*})`.
    pub fn quat_star(&self) -> Quat<NCPoly<S>> {
        Quat::new(std::array::from_fn(|k| if k == 0 { self.y_star[0].clone() } else { self.y_star[k].neg() }))
    }
}

/// The two families of commutation identities, for `k = 1, 2, 3`:
/// `-(Z0* Zk - Zk* Z0) + eps_kmn Zm* Zn` and `Z0 Zk* - Zk Z0* + eps_kmn Zm Zn*`.
fn commutation_family<S: Scalar>(
    alg: &Algebra<S>,
    z: &[NCPoly<S>; 4],
    zs: &[NCPoly<S>; 4],
    sign0: i64,
) -> ([NCPoly<S>; 3], [NCPoly<S>; 3]) {
    let m = |a: &NCPoly<S>, b: &NCPoly<S>| alg.multiply(a, b);
    let s0 = S::from_i64(sign0);
    let mut first: [NCPoly<S>; 3] = Default::default();
    let mut second: [NCPoly<S>; 3] = Default::default();
    for k in 1..4 {
        let mut f = m(&zs[0], &z[k]).sub(&m(&zs[k], &z[0])).scale(&-s0.clone());
        let mut g = m(&z[0], &zs[k]).sub(&m(&z[k], &zs[0])).scale(&s0);
        for a in 1..4 {
            for b in 1..4 {
                let e = epsilon(k, a, b);
                if e != 0 {
                    let es = S::from_i64(e);
                    f = f.add(&m(&zs[a], &z[b]).scale(&es));
                    g = g.add(&m(&z[a], &zs[b]).scale(&es));
                }
            }
        }
        first[k - 1] = f;
        second[k - 1] = g;
    }
    (first, second)
}

/// The six explicit commutation relations in terms of `Y^mu` and `(u0, u1, u2)`.
pub fn explicit_relations<S: Scalar>(alg: &Algebra<S>, ys: &YSystem<S>) -> [NCPoly<S>; 6] {
    let y = &ys.y;
    let m = |a: usize, b: usize| alg.multiply(&y[a], &y[b]);
    let (u0, u1, u2) = (&ys.params.u0, &ys.params.u1, &ys.params.u2);
    let iu1 = u1.times_i();
    let iu2 = u2.times_i();
    let p = u0.add_ref(&iu1);
    let q = u0.sub_ref(&iu1);
    [
        m(1, 0).sub(&m(0, 1)).scale(&p).add(&m(1, 3).sub(&m(0, 2)).scale(&iu2)),
        m(3, 2).sub(&m(2, 3)).scale(&q).add(&m(3, 1).sub(&m(2, 0)).scale(&iu2)),
        m(2, 0).sub(&m(0, 2)).scale(u0).sub(&m(1, 3).add(&m(3, 1)).scale(&iu1)).add(&m(1, 0).sub(&m(3, 2)).scale(&iu2)),
        m(3, 1).sub(&m(1, 3)).scale(u0).sub(&m(0, 2).add(&m(2, 0)).scale(&iu1)).add(&m(0, 1).sub(&m(2, 3)).scale(&iu2)),
        m(3, 0).sub(&m(0, 3)).scale(u0).add(&m(1, 2).add(&m(2, 1)).scale(&iu1)).add(&m(2, 2).sub(&m(1, 1)).scale(&iu2)),
        m(2, 1).sub(&m(1, 2)).scale(u0).add(&m(0, 3).add(&m(3, 0)).scale(&iu1)).add(&m(3, 3).sub(&m(0, 0)).scale(&iu2)),
    ]
}

fn matrix_check<S: Scalar>(m: &Matrix4<S>, target: &Matrix4<S>) -> Check {
    let mut res = Residuals::<S>::new();
    for i in 0..4 {
        for j in 0..4 {
            res.observe(&m.get(i, j).sub_ref(target.get(i, j)), || format!("entry ({i}, {j})"));
        }
    }
    res.finish()
}

/// Every identity satisfied by the `Y` generators, each tested modulo the
/// relations of `s`.
pub fn verify_y_relations<S: Scalar>(s: &SphereAlgebra<S>, ys: &YSystem<S>) -> ConditionReport {
    let alg = s.algebra().as_ref();
    let mut report = ConditionReport::new();
    let mul = |a: &NCPoly<S>, b: &NCPoly<S>| alg.multiply(a, b);

    let (ex, ex_star) = y_expansions(alg);
    let mut res = Residuals::new();
    for mu in 0..4 {
        for (m, c) in ys.y[mu].sub(&ex[mu]).terms() {
            res.observe(c, || format!("Y{mu} at {}", alg.fmt_monomial(m)));
        }
        for (m, c) in ys.y_star[mu].sub(&ex_star[mu]).terms() {
            res.observe(c, || format!("Y{mu}* at {}", alg.fmt_monomial(m)));
        }
    }
    report.insert("y_expansion", res.finish());

    let mut res = Residuals::new();
    for mu in 0..4 {
        for (m, c) in ys.y_star[mu].sub(&ys.lambda_y(mu)).terms() {
            res.observe(c, || format!("Y{mu}* at {}", alg.fmt_monomial(m)));
        }
    }
    report.insert("lambda_star", res.finish());
    report.insert("lambda_symmetric", matrix_check(&ys.lambda, &ys.lambda.transpose()));
    let conj = Matrix4::from_fn(|i, j| ys.lambda.get(i, j).conj());
    report.insert("lambda_unitary", matrix_check(&ys.lambda.mul(&conj.transpose()), &Matrix4::identity()));
    report.insert("lambda_involution", matrix_check(&ys.lambda.mul(&conj), &Matrix4::identity()));

    let y = ys.quat();
    let yst = ys.quat_star();
    let y4sq = mul(&ys.y4, &ys.y4);
    let unit_check = |q: Quat<NCPoly<S>>, name: &str| {
        let mut res = Residuals::new();
        for mu in 0..4 {
            let mut d = q.c[mu].clone();
            if mu == 0 {
                d = d.add(&y4sq).sub(&NCPoly::one());
            }
            s.observe_zero(&mut res, &d, || format!("{name} component {mu}"));
        }
        res.finish()
    };
    let yy = quat_multiply(alg, &y, &yst);
    let yy_rev = quat_multiply(alg, &yst, &y);
    report.insert("norm_y_ystar", unit_check(yy.clone(), "Y Y* + (Y4)^2 - 1"));
    report.insert("norm_ystar_y", unit_check(yy_rev.clone(), "Y* Y + (Y4)^2 - 1"));

    let mut res = Residuals::new();
    for mu in 0..4 {
        let a = mul(&y.c[mu], &ys.y4).sub(&mul(&ys.y4, &y.c[mu]));
        s.observe_zero(&mut res, &a, || format!("[Y{mu}, Y4]"));
        let b = mul(&yst.c[mu], &ys.y4).sub(&mul(&ys.y4, &yst.c[mu]));
        s.observe_zero(&mut res, &b, || format!("[Y{mu}*, Y4]"));
    }
    report.insert("y4_commutes_with_y", res.finish());
    report.insert("y4_central", s.central_check(&ys.y4, "Y4"));
    let mut res = Residuals::new();
    for (m, c) in alg.star(&ys.y4).sub(&ys.y4).terms() {
        res.observe(c, || alg.fmt_monomial(m));
    }
    report.insert("y4_hermitian", res.finish());

    let mut res = Residuals::new();
    for mu in 0..4 {
        s.observe_zero(&mut res, &yy.c[mu].sub(&yy_rev.c[mu]), || format!("component {mu}"));
    }
    report.insert("y_normal_quaternion", res.finish());

    let (f1, f2) = commutation_family(alg, &ys.y, &ys.y_star, 1);
    let mut res1 = Residuals::new();
    let mut res2 = Residuals::new();
    for k in 0..3 {
        s.observe_zero(&mut res1, &f1[k], || format!("k = {}", k + 1));
        s.observe_zero(&mut res2, &f2[k], || format!("k = {}", k + 1));
    }
    report.insert("commutation_star_first", res1.finish());
    report.insert("commutation_star_last", res2.finish());

    let mut star_first = NCPoly::zero();
    let mut star_last = NCPoly::zero();
    for mu in 0..4 {
        star_first = star_first.add(&mul(&ys.y_star[mu], &ys.y[mu]));
        star_last = star_last.add(&mul(&ys.y[mu], &ys.y_star[mu]));
    }
    report.insert("sum_commutator", s.zero_check(&star_first.sub(&star_last), "sum Y*Y - Y Y*"));
    let one = NCPoly::one();
    report.insert("four_sphere_star_first", s.zero_check(&star_first.add(&y4sq).sub(&one), "sum Y*Y + Y4^2 - 1"));
    report.insert("four_sphere_star_last", s.zero_check(&star_last.add(&y4sq).sub(&one), "sum Y Y* + Y4^2 - 1"));
    report.insert("central_sum_star_first", s.central_check(&star_first, "sum Y*Y"));
    report.insert("central_sum_star_last", s.central_check(&star_last, "sum Y Y*"));

    let mut res = Residuals::new();
    for (i, r) in explicit_relations(alg, ys).iter().enumerate() {
        s.observe_zero(&mut res, r, || format!("relation {}", i + 1));
    }
    report.insert("explicit_relations", res.finish());

    // Y0 -> -Y0 carries the two families onto the variant with the opposite
    // sign on the Y0 terms.
    let flip = |a: &[NCPoly<S>; 4]| std::array::from_fn(|k| if k == 0 { a[0].neg() } else { a[k].clone() });
    let (g1, g2) = commutation_family(alg, &flip(&ys.y), &flip(&ys.y_star), -1);
    let mut res = Residuals::new();
    for k in 0..3 {
        for (m, c) in g1[k].sub(&f1[k]).terms().iter().chain(g2[k].sub(&f2[k]).terms()) {
            res.observe(c, || format!("k = {} at {}", k + 1, alg.fmt_monomial(m)));
        }
    }
    report.insert("sign_change_variant", res.finish());
    report
}

/// Non-normality of each `Y^mu` together with the vanishing of the total sum.
pub fn check_normality<S: Scalar>(s: &SphereAlgebra<S>, ys: &YSystem<S>) -> ConditionReport {
    let alg = s.algebra();
    let mut report = ConditionReport::new();
    let classical = ys.params.is_classical();
    let mut total = NCPoly::zero();
    let mut all_vanish = true;
    for mu in 0..4 {
        let c = alg.multiply(&ys.y_star[mu], &ys.y[mu]).sub(&alg.multiply(&ys.y[mu], &ys.y_star[mu]));
        total = total.add(&c);
        let vanishes = s.reduce(&c).map(|r| r.is_zero()).unwrap_or(false);
        all_vanish &= vanishes;
        if !classical {
            report.insert(format!("non_normal_{mu}"), Check::from_bool(!vanishes, format!("Y{mu}* Y{mu} = Y{mu} Y{mu}*")));
        }
    }
    if classical {
        report.insert("classical_degeneracy", Check::from_bool(all_vanish, "a commutator survives at the classical point"));
    }
    report.insert("sum_vanishes", s.zero_check(&total, "sum of commutators"));
    report
}

/// Eigen-decomposition of the `2x2` block of `Lambda`.
#[derive(Clone, Debug)]
pub struct LambdaDiagonal<S> {
    /// `(lambda_+, lambda_-) = u0 +- i sqrt(u1^2 + u2^2)`.
    pub eigenvalues: (S, S),
    /// `e^{i theta} = lambda_+ / lambda_- = lambda_+^2`.
    pub phase: S,
    pub theta: f64,
    /// Real rotation with `R^t Lambda' R = diag(lambda_-, lambda_+)`; columns are eigenvectors.
    pub rotation: [[f64; 2]; 2],
}

pub fn diagonalize_lambda<S: Scalar>(params: &DeformParams<S>) -> Result<LambdaDiagonal<S>> {
    let s2 = params.u1.mul_ref(&params.u1).add_ref(&params.u2.mul_ref(&params.u2));
    let s = s2.sqrt_real().map_err(|_| Error::IrrationalEigenvalue(s2.to_string()))?;
    let plus = params.u0.add_ref(&s.times_i());
    let minus = params.u0.sub_ref(&s.times_i());
    let phase = plus.mul_ref(&plus);
    let (re, im) = phase.to_f64_pair();
    let (u1, u2) = (params.u1.to_f64_pair().0, params.u2.to_f64_pair().0);
    // eigenvector of u1 sigma_z + u2 sigma_x for +s is (cos h, sin h) with tan 2h = u2/u1
    let h = 0.5 * u2.atan2(u1);
    let (c, sn) = (h.cos(), h.sin());
    Ok(LambdaDiagonal {
        eigenvalues: (plus, minus),
        phase,
        theta: im.atan2(re),
        rotation: [[-sn, -c], [c, -sn]],
    })
}

/// The three-sphere context: `Y^4` vanishes and `sum Y*Y = sum Y Y* = 1`.
pub fn three_sphere_context<S: Scalar>(alg: Arc<Algebra<S>>) -> Result<SphereAlgebra<S>> {
    SphereAlgebra::new(alg, SphereKind::Equator)
}

/// The three-sphere relations in `ctx` and the vanishing of `Y^4` there.
pub fn verify_three_sphere<S: Scalar>(ctx: &SphereAlgebra<S>, ys: &YSystem<S>) -> ConditionReport {
    let alg = ctx.algebra();
    let mut report = ConditionReport::new();
    let mut a = NCPoly::zero();
    let mut b = NCPoly::zero();
    for mu in 0..4 {
        a = a.add(&alg.multiply(&ys.y_star[mu], &ys.y[mu]));
        b = b.add(&alg.multiply(&ys.y[mu], &ys.y_star[mu]));
    }
    let one = NCPoly::one();
    report.insert("three_sphere_star_first", ctx.zero_check(&a.sub(&one), "sum Y*Y - 1"));
    report.insert("three_sphere_star_last", ctx.zero_check(&b.sub(&one), "sum Y Y* - 1"));
    report.insert("suspension_coordinate_vanishes", ctx.zero_check(&ys.y4, "Y4"));
    report
}
