//! The classical `SU(2)` symmetry: the Hopf algebra `H` of polynomial
//! functions on unit quaternions, its coaction on the sphere algebras, the
//! infinitesimal generators, coinvariants and the canonical-map witness.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::conditions::{Check, ConditionReport, Residuals};
use crate::error::{Error, Result};
use crate::linalg::{self, add_into, SparseVec};
use crate::ncalg::{Algebra, Monomial, NCPoly};
use crate::quatlin::{epsilon, j_family, left_mult_matrix, quat_multiply, right_mult_matrix, Matrix4, Quat, Sign};
use crate::ring::StarRing;
use crate::scalars::Scalar;
use crate::spheres::{SphereAlgebra, YSystem};

/// Exponents of `w0, w1, w2, w3`; canonical forms have `w3` degree at most one.
pub type HMono = [u8; 4];

fn h_mul(a: &HMono, b: &HMono) -> HMono {
    std::array::from_fn(|i| a[i] + b[i])
}

/// Canonical form of a monomial under `w3^2 = 1 - w0^2 - w1^2 - w2^2`.
fn h_reduce_mono<S: Scalar>(m: HMono) -> Vec<(HMono, S)> {
    if m[3] < 2 {
        return vec![(m, S::one())];
    }
    let mut lowered = m;
    lowered[3] -= 2;
    let mut out: BTreeMap<HMono, S> = BTreeMap::new();
    for (k, c) in h_reduce_mono::<S>(lowered) {
        add_into(&mut out, k, c.clone());
        for i in 0..3 {
            let mut k2 = k;
            k2[i] += 2;
            for (r, d) in h_reduce_mono::<S>(k2) {
                add_into(&mut out, r, -c.mul_ref(&d));
            }
        }
    }
    out.into_iter().collect()
}

/// Element of `H^{(x) k}`: sparse map from `k`-tuples of canonical monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct HTensor<S> {
    pub arity: usize,
    terms: BTreeMap<Vec<HMono>, S>,
}

/// An element of `H` itself.
pub type HPoly<S> = HTensor<S>;

impl<S: Scalar> HTensor<S> {
    pub fn zero(arity: usize) -> Self {
        Self { arity, terms: BTreeMap::new() }
    }

    pub fn scalar(arity: usize, c: S) -> Self {
        let mut t = Self::zero(arity);
        t.add_term(vec![[0; 4]; arity], c);
        t
    }

    pub fn one(arity: usize) -> Self {
        Self::scalar(arity, S::one())
    }

    /// `w^mu` in `H`.
    pub fn w(mu: usize) -> Self {
        let mut m = [0; 4];
        m[mu] = 1;
        let mut t = Self::zero(1);
        t.add_term(vec![m], S::one());
        t
    }

    pub fn terms(&self) -> &BTreeMap<Vec<HMono>, S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c` times the tuple after reducing each slot.
    pub fn add_term(&mut self, key: Vec<HMono>, c: S) {
        debug_assert_eq!(key.len(), self.arity);
        let mut parts: Vec<(Vec<HMono>, S)> = vec![(Vec::new(), c)];
        for m in key {
            let red = h_reduce_mono::<S>(m);
            parts = parts
                .iter()
                .flat_map(|(k, c)| {
                    red.iter().map(move |(r, d)| {
                        let mut k = k.clone();
                        k.push(*r);
                        (k, c.mul_ref(d))
                    })
                })
                .collect();
        }
        for (k, c) in parts {
            add_into(&mut self.terms, k, c);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            add_into(&mut out.terms, k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.arity);
        for (k, c) in &self.terms {
            add_into(&mut out.terms, k.clone(), c.mul_ref(s));
        }
        out
    }

    /// Slotwise product.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity);
        let mut out = Self::zero(self.arity);
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                out.add_term(a.iter().zip(b).map(|(x, y)| h_mul(x, y)).collect(), c.mul_ref(d));
            }
        }
        out
    }

    /// `a (x) b`.
    pub fn tensor(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.arity + o.arity);
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                let mut k = a.clone();
                k.extend_from_slice(b);
                add_into(&mut out.terms, k, c.mul_ref(d));
            }
        }
        out
    }

    /// Conjugates coefficients; the `w^mu` are hermitian.
    pub fn star(&self) -> Self {
        Self { arity: self.arity, terms: self.terms.iter().map(|(k, c)| (k.clone(), c.conj())).collect() }
    }

    /// Replaces slot `i` by the image of its monomial under `f`.
    pub fn apply_at(&self, i: usize, f: impl Fn(&HMono) -> HTensor<S>) -> Self {
        let mut cache: HashMap<HMono, HTensor<S>> = HashMap::new();
        let mut out: Option<Self> = None;
        for (k, c) in &self.terms {
            let img = cache.entry(k[i]).or_insert_with(|| f(&k[i])).clone();
            let left = Self::from_key(k[..i].to_vec(), c.clone());
            let right = Self::from_key(k[i + 1..].to_vec(), S::one());
            let piece = left.tensor(&img).tensor(&right);
            out = Some(match out {
                None => piece,
                Some(acc) => acc.add(&piece),
            });
        }
        out.unwrap_or_else(|| Self::zero(self.arity + f(&[0; 4]).arity - 1))
    }

    fn from_key(key: Vec<HMono>, c: S) -> Self {
        let mut t = Self::zero(key.len());
        add_into(&mut t.terms, key, c);
        t
    }

    /// Multiplies adjacent slots `i` and `i + 1`.
    pub fn multiply_slots(&self, i: usize) -> Self {
        let mut out = Self::zero(self.arity - 1);
        for (k, c) in &self.terms {
            let mut key = k[..i].to_vec();
            key.push(h_mul(&k[i], &k[i + 1]));
            key.extend_from_slice(&k[i + 2..]);
            out.add_term(key, c.clone());
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

fn pow_of<S: Scalar>(m: &HMono, gen: impl Fn(usize) -> HTensor<S>, unit: HTensor<S>) -> HTensor<S> {
    let mut out = unit;
    for (mu, &e) in m.iter().enumerate() {
        for _ in 0..e {
            out = out.mul(&gen(mu));
        }
    }
    out
}

/// The quaternion multiplication rule read as a coproduct.
pub struct HopfSU2;

impl HopfSU2 {
    /// `Delta(w^mu)`: component `mu` of the quaternion product `w (x) 1 . 1 (x) w`.
    pub fn coproduct_gen<S: Scalar>(mu: usize) -> HTensor<S> {
        let pair = |a: usize, b: usize| HTensor::<S>::w(a).tensor(&HTensor::w(b));
        if mu == 0 {
            (1..4).fold(pair(0, 0), |acc, a| acc.sub(&pair(a, a)))
        } else {
            let mut out = pair(0, mu).add(&pair(mu, 0));
            for a in 1..4 {
                for b in 1..4 {
                    let e = epsilon(a, b, mu);
                    if e != 0 {
                        out = out.add(&pair(a, b).scale(&S::from_i64(e)));
                    }
                }
            }
            out
        }
    }

    pub fn coproduct_mono<S: Scalar>(m: &HMono) -> HTensor<S> {
        pow_of(m, Self::coproduct_gen, HTensor::one(2))
    }

    pub fn counit_mono<S: Scalar>(m: &HMono) -> HTensor<S> {
        let v = if m[1] + m[2] + m[3] == 0 { S::one() } else { S::zero() };
        HTensor::scalar(0, v)
    }

    pub fn antipode_mono<S: Scalar>(m: &HMono) -> HTensor<S> {
        let sign = if (m[1] + m[2] + m[3]).is_multiple_of(2) { S::one() } else { -S::one() };
        HTensor::from_key(vec![*m], S::one()).scale(&sign).reduce_all()
    }

    pub fn coproduct<S: Scalar>(h: &HPoly<S>) -> HTensor<S> {
        h.apply_at(0, Self::coproduct_mono)
    }

    /// Coassociativity, counit and antipode laws plus compatibility with
    /// the defining relation, on generators and on their degree-2 products.
    pub fn check_axioms<S: Scalar>() -> ConditionReport {
        let mut samples: Vec<(String, HPoly<S>)> = (0..4).map(|mu| (format!("w{mu}"), HTensor::w(mu))).collect();
        for mu in 0..4 {
            for nu in mu..4 {
                samples.push((format!("w{mu}w{nu}"), HTensor::w(mu).mul(&HTensor::w(nu))));
            }
        }
        let mut coassoc = Residuals::<S>::new();
        let mut counit = Residuals::<S>::new();
        let mut antipode = Residuals::<S>::new();
        for (name, h) in &samples {
            let d = Self::coproduct(h);
            let left = d.apply_at(0, Self::coproduct_mono);
            let right = d.apply_at(1, Self::coproduct_mono);
            observe_h(&mut coassoc, &left.sub(&right), name);
            let eps_h = h.apply_at(0, Self::counit_mono);
            let el = d.apply_at(0, Self::counit_mono);
            let er = d.apply_at(1, Self::counit_mono);
            observe_h(&mut counit, &el.sub(h), name);
            observe_h(&mut counit, &er.sub(h), name);
            let unit = eps_h.tensor(&HTensor::one(1));
            let sl = d.apply_at(0, Self::antipode_mono).multiply_slots(0);
            let sr = d.apply_at(1, Self::antipode_mono).multiply_slots(0);
            observe_h(&mut antipode, &sl.sub(&unit), name);
            observe_h(&mut antipode, &sr.sub(&unit), name);
        }
        let norm = (0..4).fold(HTensor::<S>::zero(1), |acc, mu| acc.add(&HTensor::w(mu).mul(&HTensor::w(mu))));
        let rel = Self::coproduct(&norm).sub(&HTensor::one(2));
        let mut report = ConditionReport::new();
        report.insert("coassociativity", coassoc.finish());
        report.insert("counit", counit.finish());
        report.insert("antipode", antipode.finish());
        report.insert("coproduct_respects_norm", Check::from_bool(rel.is_zero(), "Delta(sum w^2) != 1 (x) 1"));
        report
    }
}

impl<S: Scalar> HTensor<S> {
    fn reduce_all(&self) -> Self {
        let mut out = Self::zero(self.arity);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

fn observe_h<S: Scalar>(res: &mut Residuals<S>, t: &HTensor<S>, name: &str) {
    for c in t.terms.values() {
        res.observe(c, || name.to_string());
    }
}

/// Element of `A (x) H^{(x) k}` with the `A` slot in canonical remainder form.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedElement<S> {
    pub arity: usize,
    terms: BTreeMap<(Monomial, Vec<HMono>), S>,
}

impl<S: Scalar> MixedElement<S> {
    pub fn zero(arity: usize) -> Self {
        Self { arity, terms: BTreeMap::new() }
    }

    /// `f (x) h`.
    pub fn pure(f: &NCPoly<S>, h: &HTensor<S>) -> Self {
        let mut out = Self::zero(h.arity);
        for (m, c) in f.terms() {
            for (k, d) in h.terms() {
                add_into(&mut out.terms, (*m, k.clone()), c.mul_ref(d));
            }
        }
        out
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, Vec<HMono>), S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            add_into(&mut out.terms, k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.arity);
        for (k, c) in &self.terms {
            add_into(&mut out.terms, k.clone(), c.mul_ref(s));
        }
        out
    }

    /// Applies `(id (x) eps)` on an element of `A (x) H`.
    pub fn counit(&self) -> NCPoly<S> {
        let mut out = NCPoly::zero();
        for ((m, k), c) in &self.terms {
            let e = HopfSU2::counit_mono::<S>(&k[0]);
            if let Some(v) = e.terms().get(&Vec::new()) {
                out.add_term(*m, c.mul_ref(v));
            }
        }
        out
    }

    fn observe(&self, res: &mut Residuals<S>, alg: &Algebra<S>, name: &str) {
        for ((m, _), c) in &self.terms {
            res.observe(c, || format!("{name} at {}", alg.fmt_monomial(m)));
        }
    }
}

/// `A (x) H` as a `*`-ring, with the `A` slot reduced in a sphere context.
pub struct MixedRing<'a, S: Scalar> {
    ctx: &'a SphereAlgebra<S>,
    products: RwLock<HashMap<(Monomial, Monomial), NCPoly<S>>>,
}

impl<'a, S: Scalar> MixedRing<'a, S> {
    pub fn new(ctx: &'a SphereAlgebra<S>) -> Self {
        Self { ctx, products: RwLock::default() }
    }

    fn product(&self, a: &Monomial, b: &Monomial) -> NCPoly<S> {
        if let Some(p) = self.products.read().unwrap().get(&(*a, *b)) {
            return p.clone();
        }
        let alg = self.ctx.algebra();
        let raw = alg.multiply(&NCPoly::monomial(*a, S::one()), &NCPoly::monomial(*b, S::one()));
        let p = self.ctx.reduce(&raw).expect("product within the degree cap");
        self.products.write().unwrap().insert((*a, *b), p.clone());
        p
    }

    /// Reduces the `A` slot.
    pub fn reduce(&self, x: &MixedElement<S>) -> MixedElement<S> {
        let mut out = MixedElement::zero(x.arity);
        for ((m, k), c) in &x.terms {
            let f = self.ctx.reduce(&NCPoly::monomial(*m, c.clone())).expect("within the degree cap");
            for (r, d) in f.terms() {
                add_into(&mut out.terms, (*r, k.clone()), d.clone());
            }
        }
        out
    }
}

impl<S: Scalar> StarRing for MixedRing<'_, S> {
    type Elem = MixedElement<S>;
    type Scalar = S;

    fn zero(&self) -> MixedElement<S> {
        MixedElement::zero(1)
    }
    fn one(&self) -> MixedElement<S> {
        MixedElement::pure(&NCPoly::one(), &HTensor::one(1))
    }
    fn add(&self, a: &MixedElement<S>, b: &MixedElement<S>) -> MixedElement<S> {
        a.add(b)
    }
    fn mul(&self, a: &MixedElement<S>, b: &MixedElement<S>) -> MixedElement<S> {
        let mut out = MixedElement::zero(a.arity);
        for ((m1, k1), c1) in &a.terms {
            for ((m2, k2), c2) in &b.terms {
                let h = HTensor::from_key(k1.clone(), c1.mul_ref(c2)).mul(&HTensor::from_key(k2.clone(), S::one()));
                out = out.add(&MixedElement::pure(&self.product(m1, m2), &h));
            }
        }
        out
    }
    fn scale(&self, s: &S, a: &MixedElement<S>) -> MixedElement<S> {
        a.scale(s)
    }
    fn star(&self, a: &MixedElement<S>) -> MixedElement<S> {
        let alg = self.ctx.algebra();
        let mut out = MixedElement::zero(a.arity);
        for ((m, k), c) in &a.terms {
            let f = self.ctx.reduce(&alg.star(&NCPoly::monomial(*m, c.clone()))).expect("within the degree cap");
            out = out.add(&MixedElement::pure(&f, &HTensor::from_key(k.clone(), S::one()).star()));
        }
        out
    }
    fn is_zero(&self, a: &MixedElement<S>) -> bool {
        a.is_zero()
    }
}

/// How `w` acts on the two quaternions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    /// `x1 -> x1 w`, `x2 -> x2 w`.
    Diagonal,
    /// `x1 -> w x1`, `x2 -> x2`.
    LeftOnFirst,
}

impl ActionKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Diagonal => "diagonal",
            Self::LeftOnFirst => "left_on_first",
        }
    }
}

/// The coaction `delta: A -> A (x) H` in one sphere context.
pub struct Coaction<'a, S: Scalar> {
    pub kind: ActionKind,
    ring: MixedRing<'a, S>,
    images: Vec<MixedElement<S>>,
}

impl<'a, S: Scalar> Coaction<'a, S> {
    pub fn new(ctx: &'a SphereAlgebra<S>, kind: ActionKind) -> Self {
        let alg = ctx.algebra();
        let n1 = alg.n1();
        let units: Vec<Quat<S>> = (0..4)
            .map(|rho| Quat::new(std::array::from_fn(|mu| if mu == rho { S::one() } else { S::zero() })))
            .collect();
        let right: Vec<Matrix4<S>> = units.iter().map(right_mult_matrix).collect();
        let left: Vec<Matrix4<S>> = units.iter().map(left_mult_matrix).collect();
        let images = (0..alg.n_vars())
            .map(|g| {
                let (block, mu) = if g < n1 { (0, g) } else { (1, g - n1) };
                let mats = match (kind, block) {
                    (ActionKind::Diagonal, _) => &right,
                    (ActionKind::LeftOnFirst, 0) => &left,
                    (ActionKind::LeftOnFirst, _) => {
                        return MixedElement::pure(&alg.generator(g), &HTensor::one(1));
                    }
                };
                let offset = block * n1;
                let mut out = MixedElement::zero(1);
                for nu in 0..4 {
                    let mut h = HTensor::zero(1);
                    for (rho, m) in mats.iter().enumerate() {
                        h = h.add(&HTensor::w(rho).scale(m.get(mu, nu)));
                    }
                    out = out.add(&MixedElement::pure(&alg.generator(offset + nu), &h));
                }
                out
            })
            .collect();
        Self { kind, ring: MixedRing::new(ctx), images }
    }

    pub fn ring(&self) -> &MixedRing<'a, S> {
        &self.ring
    }

    pub fn context(&self) -> &'a SphereAlgebra<S> {
        self.ring.ctx
    }

    /// `delta` of a single generator.
    pub fn generator_image(&self, g: usize) -> &MixedElement<S> {
        &self.images[g]
    }

    fn word_image(&self, letters: &[u8]) -> MixedElement<S> {
        letters
            .iter()
            .fold(self.ring.one(), |acc, &l| self.ring.mul(&acc, &self.images[usize::from(l)]))
    }

    /// `delta(f)`, multiplicative on words and reduced in the context.
    pub fn apply(&self, f: &NCPoly<S>) -> MixedElement<S> {
        let mut out = MixedElement::zero(1);
        for (m, c) in f.terms() {
            out = out.add(&self.word_image(&m.letters()).scale(c));
        }
        self.ring.reduce(&out)
    }

    /// `(delta (x) id) x`.
    fn delta_first(&self, x: &MixedElement<S>) -> MixedElement<S> {
        let mut out = MixedElement::zero(x.arity + 1);
        for ((m, k), c) in &x.terms {
            let img = self.word_image(&m.letters());
            for ((m2, k2), d) in &img.terms {
                let mut key = k2.clone();
                key.extend_from_slice(k);
                add_into(&mut out.terms, (*m2, key), c.mul_ref(d));
            }
        }
        out
    }

    /// `(id (x) Delta) x`.
    fn coproduct_last(x: &MixedElement<S>) -> MixedElement<S> {
        let mut out = MixedElement::zero(x.arity + 1);
        for ((m, k), c) in &x.terms {
            let d = HopfSU2::coproduct_mono::<S>(&k[0]);
            for (k2, e) in d.terms() {
                add_into(&mut out.terms, (*m, k2.clone()), c.mul_ref(e));
            }
        }
        out
    }

    /// Relation preservation, `*`-compatibility, coassociativity and the counit law.
    pub fn check_comodule_algebra(&self) -> ConditionReport {
        let ctx = self.context();
        let alg = ctx.algebra();
        let n = alg.n_vars();
        let mut rel = Residuals::<S>::new();
        for g in 0..n {
            for h in 0..n {
                let nf = alg.multiply(&alg.generator(g), &alg.generator(h));
                let lhs = self.word_image(&[g as u8, h as u8]);
                let rhs = self.apply(&nf);
                let name = format!("{} {} relation", alg.var_name(g), alg.var_name(h));
                self.ring.reduce(&lhs).sub(&rhs).observe(&mut rel, alg, &name);
            }
        }
        for (c, s) in ctx.relations().relations {
            let lhs = self.apply(&c);
            let rhs = MixedElement::pure(&NCPoly::constant(s), &HTensor::one(1));
            lhs.sub(&rhs).observe(&mut rel, alg, "central relation");
        }

        let mut star = Residuals::<S>::new();
        let mut coassoc = Residuals::<S>::new();
        let mut counit = Residuals::<S>::new();
        for g in 0..n {
            let x = alg.generator(g);
            let name = alg.var_name(g);
            let a = self.apply(&alg.star(&x));
            let b = self.ring.star(&self.apply(&x));
            a.sub(&b).observe(&mut star, alg, &name);
            let d = self.apply(&x);
            self.delta_first(&d).sub(&Self::coproduct_last(&d)).observe(&mut coassoc, alg, &name);
            let back = d.counit().sub(&x);
            for c in back.terms().values() {
                counit.observe(c, || name.clone());
            }
        }
        let mut report = ConditionReport::new();
        report.insert("relations_preserved", rel.finish());
        report.insert("star_compatible", star.finish());
        report.insert("coassociative", coassoc.finish());
        report.insert("counit", counit.finish());
        report
    }

    /// `T = <psi| delta(|psi>) = sum_i x_i* delta(x_i)` as a quaternion over `A (x) H`.
    pub fn canonical_element(&self) -> Quat<MixedElement<S>> {
        let alg = self.context().algebra();
        let n1 = alg.n1();
        let mut total = Quat::new(std::array::from_fn(|_| MixedElement::zero(1)));
        for offset in [0, n1] {
            let x = Quat::new(std::array::from_fn(|mu| {
                MixedElement::pure(&alg.generator(offset + mu), &HTensor::one(1))
            }));
            let dx = Quat::new(std::array::from_fn(|mu| self.images[offset + mu].clone()));
            let prod = quat_multiply(&self.ring, &x.star(&self.ring), &dx);
            total = total.add(&self.ring, &prod);
        }
        total.map(|e| self.ring.reduce(e))
    }

    /// `T^mu = c (1 (x) w^mu)`, where `c` is the value of `x^2` in the context.
    pub fn canonical_witness(&self) -> Check {
        let ctx = self.context();
        let alg = ctx.algebra();
        let c = match ctx.reduce(&alg.x_squared()) {
            Ok(r) if r.degree().unwrap_or(0) == 0 => r.coeff(&Monomial::ONE),
            _ => return Check::failed("x^2 is not a constant in this context"),
        };
        let t = self.canonical_element();
        let mut res = Residuals::<S>::new();
        for mu in 0..4 {
            let target = MixedElement::pure(&NCPoly::constant(c.clone()), &HTensor::w(mu));
            t.c[mu].sub(&target).observe(&mut res, alg, &format!("T{mu}"));
        }
        res.finish()
    }
}

/// `D_a(x_i) = J-_a x_i` on generators, extended by the Leibniz rule.
pub fn derivation_action<S: Scalar>(alg: &Algebra<S>, a: usize, f: &NCPoly<S>) -> NCPoly<S> {
    assert!((1..=3).contains(&a), "derivation index must be 1..=3");
    let j = &j_family::<S>(Sign::Minus)[a - 1];
    let n1 = alg.n1();
    let gen_image = |g: usize| -> NCPoly<S> {
        let (offset, mu) = if g < n1 { (0, g) } else { (n1, g - n1) };
        let mut out = NCPoly::zero();
        for nu in 0..4 {
            out.add_term(Monomial::var(offset + nu), j.get(mu, nu).clone());
        }
        out
    };
    let mut out = NCPoly::zero();
    for (m, c) in f.terms() {
        let letters = m.letters();
        for k in 0..letters.len() {
            let mut w = NCPoly::constant(c.clone());
            for (i, &l) in letters.iter().enumerate() {
                let factor = if i == k { gen_image(usize::from(l)) } else { alg.generator(usize::from(l)) };
                w = alg.multiply(&w, &factor);
            }
            out = out.add(&w);
        }
    }
    out
}

/// Structure constants with `[D_a, D_b] = sum_c C[a][b][c] D_c`, read from
/// the generator matrices.
pub fn su2_constants<S: Scalar>() -> [[[S; 3]; 3]; 3] {
    let j = j_family::<S>(Sign::Minus);
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            // D_a D_b acts on generators by the matrix J_b J_a.
            let comm = j[b].mul(&j[a]).sub(&j[a].mul(&j[b]));
            std::array::from_fn(|c| {
                let dot = |x: &Matrix4<S>, y: &Matrix4<S>| {
                    (0..4).flat_map(|i| (0..4).map(move |k| (i, k))).fold(S::zero(), |acc, (i, k)| {
                        acc.add_ref(&x.get(i, k).mul_ref(y.get(i, k)))
                    })
                };
                dot(&comm, &j[c]).mul_ref(&dot(&j[c], &j[c]).inv().expect("nonzero"))
            })
        })
    })
}

/// Checks `[D_a, D_b] = C_ab^c D_c` on every degree-2 monomial.
pub fn check_su2<S: Scalar>(alg: &Algebra<S>) -> Check {
    let consts = su2_constants::<S>();
    let mut res = Residuals::<S>::new();
    for m in alg.basis(2) {
        let f = NCPoly::monomial(m, S::one());
        for a in 1..=3 {
            for b in 1..=3 {
                let lhs = derivation_action(alg, a, &derivation_action(alg, b, &f))
                    .sub(&derivation_action(alg, b, &derivation_action(alg, a, &f)));
                let rhs = (1..=3).fold(NCPoly::zero(), |acc, c| {
                    acc.add(&derivation_action(alg, c, &f).scale(&consts[a - 1][b - 1][c - 1]))
                });
                for (k, v) in lhs.sub(&rhs).terms() {
                    res.observe(v, || format!("[D{a}, D{b}] on {} at {}", alg.fmt_monomial(&m), alg.fmt_monomial(k)));
                }
            }
        }
    }
    res.finish()
}

/// Default largest degree accepted by [`coinvariants`].
pub const COINVARIANT_DEGREE_CAP: usize = 4;

/// Basis of `{f in (A_R)_n : D_a f = 0 for a = 1, 2, 3}`, in reduced row echelon order.
pub fn coinvariants<S: Scalar>(alg: &Algebra<S>, n: usize, cap: usize) -> Result<Vec<NCPoly<S>>> {
    if n > cap {
        return Err(Error::DegreeOverflow { degree: n, cap });
    }
    let basis = alg.basis(n);
    let index: HashMap<Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut rows: Vec<BTreeMap<usize, S>> = (0..3 * basis.len()).map(|_| BTreeMap::new()).collect();
    for (col, m) in basis.iter().enumerate() {
        let f = NCPoly::monomial(*m, S::one());
        for a in 1..=3 {
            for (k, c) in derivation_action(alg, a, &f).terms() {
                let r = (a - 1) * basis.len() + index[k];
                rows[r].insert(col, c.clone());
            }
        }
    }
    let kernel = linalg::kernel(rows, basis.len());
    Ok(kernel
        .into_iter()
        .map(|v| NCPoly::from_terms(v.into_iter().map(|(i, c)| (basis[i], c))))
        .collect())
}

/// Rank of a set of polynomials.
fn poly_rank<S: Scalar>(polys: &[NCPoly<S>]) -> usize {
    linalg::rank(polys.iter().map(|f| f.terms().iter().map(|(m, c)| (*m, c.clone())).collect::<SparseVec<_, _>>()))
}

/// The invariant polynomials of degree two predicted by the symmetry.
pub fn expected_invariants<S: Scalar>(alg: &Algebra<S>, ys: &YSystem<S>) -> Vec<NCPoly<S>> {
    let mut v: Vec<NCPoly<S>> = ys.y.to_vec();
    v.push(ys.y4.clone());
    v.push(alg.x_squared());
    v
}

/// Summary for JSON reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoactionSummary {
    pub action: String,
    pub relations_preserved: bool,
    pub coinvariant_dims: BTreeMap<String, usize>,
    pub canonical_witness: bool,
}

/// All coaction checks at one parameter point.
pub struct CoactionResults {
    pub report: ConditionReport,
    pub summary: CoactionSummary,
}

/// Runs the Hopf axioms, comodule-algebra checks, derivation invariance,
/// coinvariants up to `max_degree`, the witness, and the failure of the
/// one-sided action when the algebra is noncommutative.
pub fn coaction_suite<S: Scalar>(
    seven: &SphereAlgebra<S>,
    ys: &YSystem<S>,
    max_degree: usize,
) -> Result<CoactionResults> {
    let alg = seven.algebra();
    let mut report = ConditionReport::new();
    report.extend_prefixed("hopf", HopfSU2::check_axioms::<S>());

    let delta = Coaction::new(seven, ActionKind::Diagonal);
    let comodule = delta.check_comodule_algebra();
    let relations_preserved = comodule.passed("relations_preserved");
    report.extend_prefixed("diagonal", comodule);

    let mut inv = Residuals::<S>::new();
    for a in 1..=3 {
        for (mu, y) in ys.y.iter().chain(std::iter::once(&ys.y4)).enumerate() {
            for c in derivation_action(alg, a, y).terms().values() {
                inv.observe(c, || format!("D{a} Y{mu}"));
            }
        }
    }
    report.insert("derivations_kill_y", inv.finish());
    report.insert("su2_bracket", check_su2(alg));

    let mut dims = BTreeMap::new();
    for n in 1..=max_degree {
        let basis = coinvariants(alg, n, max_degree.max(COINVARIANT_DEGREE_CAP))?;
        let mut fixed = Residuals::<S>::new();
        for f in &basis {
            let lhs = delta.apply(f);
            let rhs = delta.ring().reduce(&MixedElement::pure(f, &HTensor::one(1)));
            lhs.sub(&rhs).observe(&mut fixed, alg, &format!("degree {n} coinvariant"));
        }
        report.insert(format!("coinvariants_fixed_{n}"), fixed.finish());
        if n == 2 {
            let expected = expected_invariants(alg, ys);
            let r_expected = poly_rank(&expected);
            let mut joint = basis.clone();
            joint.extend(expected.iter().cloned());
            let ok = r_expected == basis.len() && poly_rank(&joint) == basis.len();
            report.insert(
                "coinvariants_match_y_span",
                Check::from_bool(ok, format!("kernel dim {}, Y-span rank {r_expected}", basis.len())),
            );
            let mut with_star = basis.clone();
            with_star.extend(ys.y_star.iter().cloned());
            report.insert(
                "y_star_in_span",
                Check::from_bool(poly_rank(&with_star) == basis.len(), "some Y* leaves the invariant span"),
            );
        }
        dims.insert(n.to_string(), basis.len());
    }

    let witness = delta.canonical_witness();
    let canonical_witness = witness.pass;
    report.insert("canonical_witness", witness);

    if !ys.params.is_classical() {
        let one_sided = Coaction::new(seven, ActionKind::LeftOnFirst).check_comodule_algebra();
        let check = one_sided.get("relations_preserved").cloned().unwrap_or_else(Check::passed);
        let witness = check.witness.clone();
        report.insert(
            "one_sided_action_breaks_relations",
            if check.pass { Check::failed("one-sided action preserved every relation") } else { Check::passed_with(witness) },
        );
    }

    let summary = CoactionSummary {
        action: ActionKind::Diagonal.label().to_string(),
        relations_preserved,
        coinvariant_dims: dims,
        canonical_witness,
    };
    Ok(CoactionResults { report, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::DeformParams;
    use crate::scalars::GaussRational as G;
    use crate::spheres::{compute_y, SphereKind};
    use std::sync::Arc;

    fn seven(text: &str) -> (SphereAlgebra<G>, DeformParams<G>) {
        let p = DeformParams::parse(text).unwrap();
        let alg = Arc::new(Algebra::quaternionic(&p).unwrap());
        (SphereAlgebra::new(alg, SphereKind::SevenSphere).unwrap(), p)
    }

    #[test]
    fn reduction_of_w3_square() {
        let t = HTensor::<G>::w(3).mul(&HTensor::w(3));
        let expect = (0..3).fold(HTensor::one(1), |acc, mu| acc.sub(&HTensor::w(mu).mul(&HTensor::w(mu))));
        assert_eq!(t, expect);
    }

    #[test]
    fn hopf_axioms() {
        let rep = HopfSU2::check_axioms::<G>();
        assert!(rep.all_pass(), "{rep}");
    }

    #[test]
    fn generator_image_has_four_terms() {
        let (ctx, _) = seven("3/5,4/5,0");
        let d = Coaction::new(&ctx, ActionKind::Diagonal);
        let img = d.generator_image(0);
        assert_eq!(img.terms().len(), 4);
        let back = img.counit();
        assert_eq!(back, ctx.algebra().generator(0));
    }

    #[test]
    fn quadratic_form_is_invariant() {
        let (ctx, _) = seven("3/5,4/5,0");
        let alg = ctx.algebra();
        let d = Coaction::new(&ctx, ActionKind::Diagonal);
        let x1sq = alg.x1_squared();
        let expect = d.ring().reduce(&MixedElement::pure(&x1sq, &HTensor::one(1)));
        assert_eq!(d.apply(&x1sq), expect);
    }

    #[test]
    fn diagonal_action_is_a_comodule_algebra() {
        for text in ["3/5,4/5,0", "1/3,2/3,2/3"] {
            let (ctx, _) = seven(text);
            let rep = Coaction::new(&ctx, ActionKind::Diagonal).check_comodule_algebra();
            assert!(rep.all_pass(), "{text}: {rep}");
        }
    }

    #[test]
    fn one_sided_action_breaks_relations_only_when_noncommutative() {
        let (ctx, _) = seven("3/5,4/5,0");
        let rep = Coaction::new(&ctx, ActionKind::LeftOnFirst).check_comodule_algebra();
        assert!(!rep.passed("relations_preserved"));
        assert!(!rep.get("relations_preserved").unwrap().witness.is_empty());
        let (ctx, _) = seven("1,0,0");
        let rep = Coaction::new(&ctx, ActionKind::LeftOnFirst).check_comodule_algebra();
        assert!(rep.passed("relations_preserved"), "{rep}");
    }

    #[test]
    fn derivation_on_generator() {
        let (ctx, _) = seven("3/5,4/5,0");
        let alg = ctx.algebra();
        assert_eq!(derivation_action(alg, 1, &alg.x1(0)), alg.x1(1));
    }

    #[test]
    fn derivations_close_and_kill_y() {
        let (ctx, p) = seven("1/3,2/3,2/3");
        let alg = ctx.algebra();
        assert!(check_su2(alg).pass);
        let ys = compute_y(alg, &p);
        for a in 1..=3 {
            for y in ys.y.iter().chain([&ys.y4]) {
                assert!(derivation_action(alg, a, y).is_zero());
            }
        }
    }

    #[test]
    fn coinvariant_dimensions() {
        let (ctx, _) = seven("3/5,4/5,0");
        let alg = ctx.algebra();
        assert!(coinvariants(alg, 1, 4).unwrap().is_empty());
        assert_eq!(coinvariants(alg, 2, 4).unwrap().len(), 6);
        assert!(matches!(coinvariants(alg, 5, 4), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn witness_in_each_context() {
        for kind in [SphereKind::SevenSphere, SphereKind::Torus] {
            let p = DeformParams::parse("1/3,2/3,2/3").unwrap();
            let alg = Arc::new(Algebra::quaternionic(&p).unwrap());
            let ctx = SphereAlgebra::new(alg, kind).unwrap();
            assert!(Coaction::new(&ctx, ActionKind::Diagonal).canonical_witness().pass, "{kind:?}");
        }
    }

    #[test]
    fn suite_at_catalog_point() {
        let (ctx, p) = seven("3/5,4/5,0");
        let ys = compute_y(ctx.algebra(), &p);
        let r = coaction_suite(&ctx, &ys, 2).unwrap();
        assert!(r.report.all_pass(), "{}", r.report);
        assert_eq!(r.summary.coinvariant_dims["1"], 0);
        assert_eq!(r.summary.coinvariant_dims["2"], 6);
        assert!(r.summary.relations_preserved && r.summary.canonical_witness);
    }
}
