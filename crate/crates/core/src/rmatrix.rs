//! Deformation tensors `R^{la al}_{be mu}` and the structural conditions
//! they must satisfy.
//!
//! Storage order of [`RTensor`] is `(lambda, alpha, beta, mu)`: the
//! relation it encodes is `x1^lambda x2^alpha = R^{lambda alpha}_{beta mu} x2^beta x1^mu`.
//! The big exchange matrix [`BigR`] has row `(a, b)` and column `(c, d)` with
//! `x^a x^b = BigR^{ab}_{cd} x^c x^d`, where `x^lambda = x1^lambda` and
//! `x^{N1 + alpha} = x2^alpha`.

use serde::{Deserialize, Serialize};

use crate::conditions::{Check, ConditionReport, Residuals};
use crate::error::{Error, Result};
use crate::quatlin::{build_j, left_mult_matrix, Matrix4, Quat, Sign};
use crate::scalars::{parse_rational, rational_to_f64, FloatComplex, GaussRational, Rational, Scalar};

/// Point `(u0, u1, u2)` on the unit two-sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformParams<S> {
    pub u0: S,
    pub u1: S,
    pub u2: S,
}

impl<S: Scalar> DeformParams<S> {
    /// Validates `u0^2 + u1^2 + u2^2 = 1` (exactly, or within tolerance).
    pub fn new(u0: S, u1: S, u2: S) -> Result<Self> {
        let p = Self { u0, u1, u2 };
        let defect = p.u0.mul_ref(&p.u0) + p.u1.mul_ref(&p.u1) + p.u2.mul_ref(&p.u2) - S::one();
        let non_real = [&p.u0, &p.u1, &p.u2].iter().any(|u| {
            let (_, im) = u.to_f64_pair();
            im != 0.0
        });
        let off = if S::EXACT {
            !defect.is_zero()
        } else {
            defect.magnitude() > FloatComplex::tolerance()
        };
        if off || non_real {
            return Err(Error::ParamsNotOnSphere(defect.to_string()));
        }
        Ok(p)
    }

    pub fn classical() -> Self {
        Self { u0: S::one(), u1: S::zero(), u2: S::zero() }
    }

    /// `true` at the commutative point `(1, 0, 0)`.
    pub fn is_classical(&self) -> bool {
        self.u1.is_zero() && self.u2.is_zero() && (self.u0.clone() - S::one()).is_zero()
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [self.u0.to_f64_pair().0, self.u1.to_f64_pair().0, self.u2.to_f64_pair().0]
    }
}

impl DeformParams<GaussRational> {
    pub fn from_rationals(u0: Rational, u1: Rational, u2: Rational) -> Result<Self> {
        Self::new(GaussRational::real(u0), GaussRational::real(u1), GaussRational::real(u2))
    }

    /// Parses `"p/q,p/q,p/q"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::MalformedNumber(text.to_string()));
        }
        Self::from_rationals(parse_rational(parts[0])?, parse_rational(parts[1])?, parse_rational(parts[2])?)
    }

    pub fn rationals(&self) -> [Rational; 3] {
        [self.u0.re.clone(), self.u1.re.clone(), self.u2.re.clone()]
    }

    pub fn to_float(&self) -> DeformParams<FloatComplex> {
        let [a, b, c] = self.rationals().map(|q| FloatComplex::new(rational_to_f64(&q), 0.0));
        DeformParams { u0: a, u1: b, u2: c }
    }

    /// `"p/q,p/q,p/q"`.
    pub fn label(&self) -> String {
        self.rationals().iter().map(crate::scalars::fmt_rational).collect::<Vec<_>>().join(",")
    }
}

impl DeformParams<FloatComplex> {
    pub fn from_f64(u0: f64, u1: f64, u2: f64) -> Result<Self> {
        Self::new(FloatComplex::new(u0, 0.0), FloatComplex::new(u1, 0.0), FloatComplex::new(u2, 0.0))
    }

    /// Parses three comma-separated decimals or fractions.
    pub fn parse_float(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::MalformedNumber(text.to_string()));
        }
        let mut u = [0.0; 3];
        for (slot, p) in u.iter_mut().zip(&parts) {
            let z = FloatComplex::parse_scalar(p)?;
            if z.im != 0.0 {
                return Err(Error::MalformedNumber(p.to_string()));
            }
            *slot = z.re;
        }
        Self::from_f64(u[0], u[1], u[2])
    }
}

/// Dense rank-4 tensor of shape `N1 x N2 x N2 x N1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RTensor<S> {
    pub n1: usize,
    pub n2: usize,
    pub entries: Vec<S>,
}

impl<S: Scalar> RTensor<S> {
    pub fn from_fn(n1: usize, n2: usize, mut f: impl FnMut(usize, usize, usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(n1 * n2 * n2 * n1);
        for l in 0..n1 {
            for a in 0..n2 {
                for b in 0..n2 {
                    for m in 0..n1 {
                        entries.push(f(l, a, b, m));
                    }
                }
            }
        }
        Self { n1, n2, entries }
    }

    #[inline]
    fn idx(&self, l: usize, a: usize, b: usize, m: usize) -> usize {
        ((l * self.n2 + a) * self.n2 + b) * self.n1 + m
    }

    /// `R^{l a}_{b m}`.
    #[inline]
    pub fn get(&self, l: usize, a: usize, b: usize, m: usize) -> &S {
        &self.entries[self.idx(l, a, b, m)]
    }

    pub fn set(&mut self, l: usize, a: usize, b: usize, m: usize, v: S) {
        let i = self.idx(l, a, b, m);
        self.entries[i] = v;
    }

    /// The classical solution `delta^l_m delta^a_b`.
    pub fn classical(n1: usize, n2: usize) -> Self {
        Self::from_fn(n1, n2, |l, a, b, m| S::from_i64(i64::from(l == m && a == b)))
    }

    /// Contraction inverse: `sum_{l,a} Rinv^{b m}_{l a} R^{l a}_{g n} = delta^b_g delta^m_n`,
    /// returned as a matrix with row `(b, m)` and column `(l, a)`.
    pub fn contraction_inverse(&self) -> Option<Vec<Vec<S>>> {
        let (n1, n2) = (self.n1, self.n2);
        let n = n1 * n2;
        // Row (l, a), column (g, n) as b*n1 + m ordering for (V2 x V1).
        let mat: Vec<Vec<S>> = (0..n)
            .map(|row| {
                let (l, a) = (row / n2, row % n2);
                (0..n).map(|col| self.get(l, a, col / n1, col % n1).clone()).collect()
            })
            .collect();
        invert(mat)
    }
}

/// Gauss-Jordan inverse of a square matrix; `None` when singular.
pub fn invert<S: Scalar>(mut a: Vec<Vec<S>>) -> Option<Vec<Vec<S>>> {
    let n = a.len();
    let mut inv: Vec<Vec<S>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
    for col in 0..n {
        let pivot = if S::EXACT {
            (col..n).find(|&r| !a[r][col].is_zero())?
        } else {
            let p = (col..n).max_by(|&x, &y| a[x][col].magnitude().total_cmp(&a[y][col].magnitude()))?;
            if a[p][col].is_zero() {
                return None;
            }
            p
        };
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pinv = a[col][col].inv()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul_ref(&pinv);
            inv[col][j] = inv[col][j].mul_ref(&pinv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = f.mul_ref(&a[col][j]);
                a[r][j] = a[r][j].sub_ref(&t);
                let t = f.mul_ref(&inv[col][j]);
                inv[r][j] = inv[r][j].sub_ref(&t);
            }
        }
    }
    Some(inv)
}

/// `u0 d^l_m d^a_b + i (J+_1)^l_m (u1 J+_1 + u2 J+_2)^a_b`.
pub fn build_r_quaternionic<S: Scalar>(params: &DeformParams<S>) -> Result<RTensor<S>> {
    let params = DeformParams::new(params.u0.clone(), params.u1.clone(), params.u2.clone())?;
    let j1 = build_j::<S>(Sign::Plus, 1);
    let k = build_j::<S>(Sign::Plus, 1).scale(&params.u1).add(&build_j(Sign::Plus, 2).scale(&params.u2));
    Ok(RTensor::from_fn(4, 4, |l, a, b, m| {
        let mut v = if l == m && a == b { params.u0.clone() } else { S::zero() };
        let jk = j1.get(l, m).mul_ref(k.get(a, b));
        if !jk.is_zero() {
            v = v + jk.times_i();
        }
        v
    }))
}

/// Square real matrix used in the `A, B, C, D` representation.
pub type DenseMatrix<S> = Vec<Vec<S>>;

/// `hat R = sum_r A_r (x) B_r + i sum_a C_a (x) D_a`.
#[derive(Clone, Debug)]
pub struct AbcdForm<S> {
    pub n1: usize,
    pub n2: usize,
    pub a: Vec<DenseMatrix<S>>,
    pub b: Vec<DenseMatrix<S>>,
    pub c: Vec<DenseMatrix<S>>,
    pub d: Vec<DenseMatrix<S>>,
}

fn dm_from4<S: Scalar>(m: &Matrix4<S>) -> DenseMatrix<S> {
    (0..4).map(|i| (0..4).map(|j| m.get(i, j).clone()).collect()).collect()
}

fn dm_mul<S: Scalar>(x: &DenseMatrix<S>, y: &DenseMatrix<S>) -> DenseMatrix<S> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).fold(S::zero(), |acc, k| acc + x[i][k].mul_ref(&y[k][j]))).collect())
        .collect()
}

fn dm_first_diff<S: Scalar>(x: &DenseMatrix<S>, y: &DenseMatrix<S>) -> Option<(usize, usize)> {
    let n = x.len();
    (0..n * n).map(|k| (k / n, k % n)).find(|&(i, j)| !x[i][j].sub_ref(&y[i][j]).is_zero())
}

fn dm_identity<S: Scalar>(n: usize) -> DenseMatrix<S> {
    (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect()
}

fn dm_scale<S: Scalar>(x: &DenseMatrix<S>, s: &S) -> DenseMatrix<S> {
    x.iter().map(|r| r.iter().map(|v| v.mul_ref(s)).collect()).collect()
}

impl<S: Scalar> AbcdForm<S> {
    /// `A = {1}`, `B = {u0 1}`, `C = {J+_v}`, `D = {J+_u}` with `u = (u1, u2, u3)`.
    pub fn quaternionic(u0: &S, v: [S; 3], u: [S; 3]) -> Self {
        let jv = (0..3).fold(Matrix4::zero(), |acc, k| acc.add(&build_j(Sign::Plus, k + 1).scale(&v[k])));
        let ju = (0..3).fold(Matrix4::zero(), |acc, k| acc.add(&build_j(Sign::Plus, k + 1).scale(&u[k])));
        Self {
            n1: 4,
            n2: 4,
            a: vec![dm_identity(4)],
            b: vec![dm_scale(&dm_identity(4), u0)],
            c: vec![dm_from4(&jv)],
            d: vec![dm_from4(&ju)],
        }
    }

    /// Commutativity families and normalization.
    pub fn validate(&self) -> Result<()> {
        let comm = |xs: &[DenseMatrix<S>], ys: &[DenseMatrix<S>], what: &str| -> Result<()> {
            for (i, x) in xs.iter().enumerate() {
                for (j, y) in ys.iter().enumerate() {
                    if let Some(at) = dm_first_diff(&dm_mul(x, y), &dm_mul(y, x)) {
                        return Err(Error::CommutativityViolated(format!("{what}[{i},{j}] at {at:?}")));
                    }
                }
            }
            Ok(())
        };
        comm(&self.a, &self.a, "[A,A]")?;
        comm(&self.a, &self.c, "[A,C]")?;
        comm(&self.c, &self.c, "[C,C]")?;
        comm(&self.b, &self.b, "[B,B]")?;
        comm(&self.b, &self.d, "[B,D]")?;
        comm(&self.d, &self.d, "[D,D]")?;

        // sum A_r A_s (x) B_r B_s + sum C_a C_b (x) D_a D_b = 1 (x) 1
        let (n1, n2) = (self.n1, self.n2);
        let mut total = vec![vec![S::zero(); n1 * n2]; n1 * n2];
        let mut acc = |x: &DenseMatrix<S>, y: &DenseMatrix<S>| {
            for i in 0..n1 {
                for j in 0..n1 {
                    if x[i][j].is_zero() {
                        continue;
                    }
                    for k in 0..n2 {
                        for l in 0..n2 {
                            let t = x[i][j].mul_ref(&y[k][l]);
                            let cell = &mut total[i * n2 + k][j * n2 + l];
                            *cell = cell.add_ref(&t);
                        }
                    }
                }
            }
        };
        for r in 0..self.a.len() {
            for s in 0..self.a.len() {
                acc(&dm_mul(&self.a[r], &self.a[s]), &dm_mul(&self.b[r], &self.b[s]));
            }
        }
        for a in 0..self.c.len() {
            for b in 0..self.c.len() {
                acc(&dm_mul(&self.c[a], &self.c[b]), &dm_mul(&self.d[a], &self.d[b]));
            }
        }
        if let Some(at) = dm_first_diff(&total, &dm_identity(n1 * n2)) {
            return Err(Error::NormalizationViolated(format!("entry {at:?}")));
        }
        Ok(())
    }
}

/// Builds `R^{l a}_{b m} = hat R^{l a}_{m b}` from the `A, B, C, D` data.
pub fn build_r_general<S: Scalar>(form: &AbcdForm<S>) -> Result<RTensor<S>> {
    form.validate()?;
    Ok(RTensor::from_fn(form.n1, form.n2, |l, a, b, m| {
        let mut v = S::zero();
        for (x, y) in form.a.iter().zip(&form.b) {
            v = v + x[l][m].mul_ref(&y[a][b]);
        }
        let mut w = S::zero();
        for (x, y) in form.c.iter().zip(&form.d) {
            w = w + x[l][m].mul_ref(&y[a][b]);
        }
        v + w.times_i()
    }))
}

/// Which generator family a gauge rotation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

/// Transforms `R` under the change of generators `x_slot -> O x_slot` with
/// `O = E+_q / |q|` (left multiplication by the unit quaternion `q/|q|`).
/// `q` need not be normalized; the result only involves `E+_q (.) E+_q^t / |q|^2`.
pub fn gauge_rotate<S: Scalar>(r: &RTensor<S>, slot: Slot, q: &Quat<S>) -> RTensor<S> {
    assert_eq!((r.n1, r.n2), (4, 4), "gauge rotation needs N1 = N2 = 4");
    let e = left_mult_matrix(q);
    let norm = q.c.iter().fold(S::zero(), |acc, x| acc + x.mul_ref(x));
    let inv = norm.inv().expect("nonzero quaternion");
    RTensor::from_fn(4, 4, |l, a, b, m| {
        let mut v = S::zero();
        match slot {
            Slot::First => {
                for lp in 0..4 {
                    for mp in 0..4 {
                        let w = e.get(l, lp).mul_ref(e.get(m, mp));
                        if !w.is_zero() {
                            v = v + w.mul_ref(r.get(lp, a, b, mp));
                        }
                    }
                }
            }
            Slot::Second => {
                for ap in 0..4 {
                    for bp in 0..4 {
                        let w = e.get(a, ap).mul_ref(e.get(b, bp));
                        if !w.is_zero() {
                            v = v + w.mul_ref(r.get(l, ap, bp, m));
                        }
                    }
                }
            }
        }
        v.mul_ref(&inv)
    })
}

/// The exchange matrix on `(A_R)_1 (x) (A_R)_1`.
#[derive(Clone, Debug)]
pub struct BigR<S> {
    pub n: usize,
    /// Row-major `(a*n + b) * n^2 + (c*n + d)`.
    pub entries: Vec<S>,
}

impl<S: Scalar> BigR<S> {
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &S {
        let n = self.n;
        &self.entries[(a * n + b) * n * n + c * n + d]
    }

    fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: S) {
        let n = self.n;
        self.entries[(a * n + b) * n * n + c * n + d] = v;
    }

    /// Nonzero entries of each column `(c, d)`, as `((a, b), value)`.
    fn columns(&self) -> Vec<Vec<(usize, S)>> {
        let nn = self.n * self.n;
        let mut cols = vec![Vec::new(); nn];
        for row in 0..nn {
            for (col, cell) in cols.iter_mut().enumerate() {
                let v = &self.entries[row * nn + col];
                if !v.is_zero() {
                    cell.push((row, v.clone()));
                }
            }
        }
        cols
    }

    /// Flip operator `x^a x^b -> x^b x^a`.
    pub fn flip(n: usize) -> Self {
        let mut m = Self { n, entries: vec![S::zero(); n.pow(4)] };
        for a in 0..n {
            for b in 0..n {
                m.set(a, b, b, a, S::one());
            }
        }
        m
    }

    pub fn square(&self) -> Self {
        let nn = self.n * self.n;
        let mut out = vec![S::zero(); nn * nn];
        for i in 0..nn {
            for k in 0..nn {
                let x = &self.entries[i * nn + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..nn {
                    let y = &self.entries[k * nn + j];
                    if !y.is_zero() {
                        out[i * nn + j] = out[i * nn + j].add_ref(&x.mul_ref(y));
                    }
                }
            }
        }
        Self { n: self.n, entries: out }
    }

    /// Residuals of `(R (x) I)(I (x) R)(R (x) I) = (I (x) R)(R (x) I)(I (x) R)`.
    pub fn yang_baxter_residuals(&self) -> Check {
        let n = self.n;
        let cols = self.columns();
        // Apply (M (x) I) or (I (x) M) to a sparse vector over (a, b, c).
        let apply = |v: &[(usize, S)], left: bool| -> Vec<(usize, S)> {
            let mut out: std::collections::BTreeMap<usize, S> = Default::default();
            for (idx, x) in v {
                let (a, b, c) = (idx / (n * n), (idx / n) % n, idx % n);
                let (pair, rest) = if left { (a * n + b, c) } else { (b * n + c, a) };
                for (row, m) in &cols[pair] {
                    let (p, q) = (row / n, row % n);
                    let target = if left { (p * n + q) * n + rest } else { (rest * n + p) * n + q };
                    let e = out.entry(target).or_insert_with(S::zero);
                    *e = e.add_ref(&m.mul_ref(x));
                }
            }
            out.into_iter().filter(|(_, v)| !v.is_zero()).collect()
        };
        let mut res = Residuals::<S>::new();
        for basis in 0..n * n * n {
            let e = vec![(basis, S::one())];
            let lhs = apply(&apply(&apply(&e, true), false), true);
            let rhs = apply(&apply(&apply(&e, false), true), false);
            let mut diff: std::collections::BTreeMap<usize, S> = lhs.into_iter().collect();
            for (k, v) in rhs {
                let e = diff.entry(k).or_insert_with(S::zero);
                *e = e.sub_ref(&v);
            }
            for (k, v) in diff {
                res.observe(&v, || {
                    let t = |i: usize| (i / (n * n), (i / n) % n, i % n);
                    format!("column {:?} row {:?}", t(basis), t(k))
                });
            }
        }
        res.finish()
    }
}

/// Assembles the exchange matrix from the commutation relations.
pub fn build_bigr<S: Scalar>(r: &RTensor<S>) -> BigR<S> {
    let (n1, n2) = (r.n1, r.n2);
    let n = n1 + n2;
    let mut m = BigR { n, entries: vec![S::zero(); n.pow(4)] };
    for l in 0..n1 {
        for mu in 0..n1 {
            m.set(l, mu, mu, l, S::one());
        }
    }
    for a in 0..n2 {
        for b in 0..n2 {
            m.set(n1 + a, n1 + b, n1 + b, n1 + a, S::one());
        }
    }
    for l in 0..n1 {
        for a in 0..n2 {
            for b in 0..n2 {
                for mu in 0..n1 {
                    let v = r.get(l, a, b, mu);
                    if v.is_zero() {
                        continue;
                    }
                    // x1^l x2^a = R x2^b x1^mu
                    m.set(l, n1 + a, n1 + b, mu, v.clone());
                    // x2^a x1^l = conj(R) x1^mu x2^b
                    m.set(n1 + a, l, mu, n1 + b, v.conj());
                }
            }
        }
    }
    m
}

/// Every structural condition on `R`.
pub fn check_all_conditions<S: Scalar>(r: &RTensor<S>) -> ConditionReport {
    let (n1, n2) = (r.n1, r.n2);
    let mut report = ConditionReport::new();

    // conj(R^{l a}_{b m}) R^{m b}_{g n} = d^l_n d^a_g
    let mut reality = Residuals::<S>::new();
    for l in 0..n1 {
        for a in 0..n2 {
            for g in 0..n2 {
                for nu in 0..n1 {
                    let mut s = S::zero();
                    for b in 0..n2 {
                        for m in 0..n1 {
                            let x = r.get(l, a, b, m);
                            if !x.is_zero() {
                                s = s + x.conj().mul_ref(r.get(m, b, g, nu));
                            }
                        }
                    }
                    if l == nu && a == g {
                        s = s - S::one();
                    }
                    reality.observe(&s, || format!("({l},{a},{g},{nu})"));
                }
            }
        }
    }
    report.insert("reality", reality.finish());

    // R^{l b}_{a m} = R^{m a}_{b l} = conj(R^{m b}_{a l}) = (R^-1)^{b m}_{l a}
    let inverse = r.contraction_inverse();
    let mut sym = Residuals::<S>::new();
    if inverse.is_none() {
        sym.observe_fail(f64::INFINITY, || "R is not invertible".into());
    }
    for l in 0..n1 {
        for b in 0..n2 {
            for a in 0..n2 {
                for m in 0..n1 {
                    let base = r.get(l, b, a, m);
                    let w = || format!("({l},{b},{a},{m})");
                    sym.observe(&base.sub_ref(r.get(m, a, b, l)), w);
                    sym.observe(&base.sub_ref(&r.get(m, b, a, l).conj()), w);
                    if let Some(inv) = &inverse {
                        sym.observe(&base.sub_ref(&inv[b * n1 + m][l * n2 + a]), w);
                    }
                }
            }
        }
    }
    report.insert("symmetry", sym.finish());

    // R^{l b}_{a r} R^{r d}_{g m} = R^{l d}_{g r} R^{r b}_{a m}
    let mut ql = Residuals::<S>::new();
    for l in 0..n1 {
        for m in 0..n1 {
            for b in 0..n2 {
                for a in 0..n2 {
                    for d in 0..n2 {
                        for g in 0..n2 {
                            let mut s = S::zero();
                            for rho in 0..n1 {
                                s = s + r.get(l, b, a, rho).mul_ref(r.get(rho, d, g, m))
                                    - r.get(l, d, g, rho).mul_ref(r.get(rho, b, a, m));
                            }
                            ql.observe(&s, || format!("({l},{b},{a},{d},{g},{m})"));
                        }
                    }
                }
            }
        }
    }
    report.insert("quadratic_l", ql.finish());

    // R^{l b}_{g n} R^{m g}_{a r} = R^{m b}_{g r} R^{l g}_{a n}
    let mut qr = Residuals::<S>::new();
    for l in 0..n1 {
        for m in 0..n1 {
            for nu in 0..n1 {
                for rho in 0..n1 {
                    for b in 0..n2 {
                        for a in 0..n2 {
                            let mut s = S::zero();
                            for g in 0..n2 {
                                s = s + r.get(l, b, g, nu).mul_ref(r.get(m, g, a, rho))
                                    - r.get(m, b, g, rho).mul_ref(r.get(l, g, a, nu));
                            }
                            qr.observe(&s, || format!("({l},{m},{nu},{rho},{b},{a})"));
                        }
                    }
                }
            }
        }
    }
    report.insert("quadratic_r", qr.finish());

    let big = build_bigr(r);
    let sq = big.square();
    let mut inv = Residuals::<S>::new();
    let n = big.n;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = sq.get(a, b, c, d).clone();
                    if a == c && b == d {
                        v = v - S::one();
                    }
                    inv.observe(&v, || format!("({a},{b},{c},{d})"));
                }
            }
        }
    }
    report.insert("involutive", inv.finish());
    report.insert("yang_baxter", big.yang_baxter_residuals());
    report
}

/// JSON form: nested arrays `[lambda][alpha][beta][mu]` of `"(re,im)"` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RTensorJson {
    pub n1: usize,
    pub n2: usize,
    pub entries: Vec<Vec<Vec<Vec<String>>>>,
}

impl From<&RTensor<GaussRational>> for RTensorJson {
    fn from(r: &RTensor<GaussRational>) -> Self {
        let entries = (0..r.n1)
            .map(|l| {
                (0..r.n2)
                    .map(|a| (0..r.n2).map(|b| (0..r.n1).map(|m| r.get(l, a, b, m).to_string()).collect()).collect())
                    .collect()
            })
            .collect();
        Self { n1: r.n1, n2: r.n2, entries }
    }
}

impl TryFrom<&RTensorJson> for RTensor<GaussRational> {
    type Error = Error;
    fn try_from(j: &RTensorJson) -> Result<Self> {
        let mut r = RTensor::classical(j.n1, j.n2);
        for l in 0..j.n1 {
            for a in 0..j.n2 {
                for b in 0..j.n2 {
                    for m in 0..j.n1 {
                        let cell = j
                            .entries
                            .get(l)
                            .and_then(|x| x.get(a))
                            .and_then(|x| x.get(b))
                            .and_then(|x| x.get(m))
                            .ok_or_else(|| Error::MalformedNumber(format!("missing entry ({l},{a},{b},{m})")))?;
                        r.set(l, a, b, m, GaussRational::parse(cell)?);
                    }
                }
            }
        }
        Ok(r)
    }
}
