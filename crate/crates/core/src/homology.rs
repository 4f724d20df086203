//! Normalized Hochschild chains `A (x) Abar^{(x) n}` over a sphere quotient,
//! the boundaries `b` and `B`, matrix traces of tensor products and the
//! Chern character components of idempotents and unitaries.
//!
//! A [`ChainSpace`] keeps a registry of reduced polynomials with distinct
//! leading monomials, starting with the unit. Every slot of a chain is
//! expanded in that registry, so a chain is a sparse map from tuples of
//! registry ids to coefficients. The registry elements other than the unit
//! stay independent modulo constants, which makes the normalized quotient
//! `Abar = A / C1` a matter of dropping tuples with the unit past slot 0.
//! Digests re-express a chain in a basis that depends only on the chain.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conditions::{Check, ConditionReport, Residuals};
use crate::error::{Error, Result};
use crate::linalg::{add_into, Echelon, SparseVec};
use crate::ncalg::{Monomial, NCPoly};
use crate::quatlin::{embed_m2, Matrix4, Quat};
use crate::ring::RingMatrix;
use crate::scalars::Scalar;
use crate::spheres::{Projection, SphereAlgebra, YSystem};

/// Index of a registered element of the algebra.
pub type ElemId = u32;

/// The registry id of the constant `1`.
pub const UNIT: ElemId = 0;

/// A chain of degree `n`: terms `a0 (x) a1 (x) ... (x) an` over registry ids.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorChain<S> {
    pub degree: usize,
    terms: BTreeMap<Vec<ElemId>, S>,
}

impl<S: Scalar> TensorChain<S> {
    pub fn zero(degree: usize) -> Self {
        Self { degree, terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<ElemId>, S> {
        &self.terms
    }

    /// Number of registry tuples.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c` times the tuple, dropping it if a slot past the first is the unit.
    pub fn add_term(&mut self, key: Vec<ElemId>, c: S) {
        debug_assert_eq!(key.len(), self.degree + 1);
        if key[1..].contains(&UNIT) {
            return;
        }
        add_into(&mut self.terms, key, c);
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "chain degrees differ");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            add_into(&mut out.terms, k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.degree);
        for (k, c) in &self.terms {
            add_into(&mut out.terms, k.clone(), c.mul_ref(s));
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

/// Summary of a chain for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDigest {
    pub degree: usize,
    /// Terms of the canonical form.
    pub n_terms: usize,
    pub is_zero: bool,
    pub sha256: String,
}

/// A chain written in a basis determined by the chain alone: slot `s`
/// uses the reduced row echelon basis (over standard monomials, without
/// the unit past slot 0) of the smallest subspace containing that slot.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalChain<S> {
    pub bases: Vec<Vec<NCPoly<S>>>,
    pub terms: BTreeMap<Vec<u32>, S>,
}

type ProductCache<S> = HashMap<(ElemId, ElemId), Arc<Vec<(ElemId, S)>>>;

struct Registry<S> {
    elems: Vec<NCPoly<S>>,
    by_lead: HashMap<Monomial, ElemId>,
    products: ProductCache<S>,
}

/// Chains over one sphere context.
///
/// Cost follows the size of the registry expansion: a space whose registry
/// was seeded with single monomials expands later inputs monomial by
/// monomial, so heavy computations should start from a fresh space.
pub struct ChainSpace<'a, S: Scalar> {
    ctx: &'a SphereAlgebra<S>,
    registry: RwLock<Registry<S>>,
}

impl<'a, S: Scalar> ChainSpace<'a, S> {
    pub fn new(ctx: &'a SphereAlgebra<S>) -> Self {
        let registry = Registry {
            elems: vec![NCPoly::one()],
            by_lead: HashMap::from([(Monomial::ONE, UNIT)]),
            products: HashMap::new(),
        };
        Self { ctx, registry: RwLock::new(registry) }
    }

    pub fn context(&self) -> &'a SphereAlgebra<S> {
        self.ctx
    }

    /// The registered polynomial with this id.
    pub fn element(&self, id: ElemId) -> NCPoly<S> {
        self.registry.read().unwrap().elems[id as usize].clone()
    }

    pub fn registry_len(&self) -> usize {
        self.registry.read().unwrap().elems.len()
    }

    /// Coordinates of `f` (reduced first) in the registry, registering a new
    /// element when `f` leaves the current span.
    pub fn decompose(&self, f: &NCPoly<S>) -> Result<Vec<(ElemId, S)>> {
        let r = self.ctx.reduce(f)?;
        Ok(self.decompose_reduced(r))
    }

    fn decompose_reduced(&self, mut r: NCPoly<S>) -> Vec<(ElemId, S)> {
        let mut reg = self.registry.write().unwrap();
        let mut out = SparseVec::new();
        while let Some((m, c)) = r.leading().map(|(m, c)| (*m, c.clone())) {
            if let Some(&id) = reg.by_lead.get(&m) {
                r = r.sub(&reg.elems[id as usize].scale(&c));
                add_into(&mut out, id, c);
            } else {
                let id = reg.elems.len() as ElemId;
                reg.elems.push(r.scale(&c.inv().expect("nonzero leading coefficient")));
                reg.by_lead.insert(m, id);
                add_into(&mut out, id, c);
                break;
            }
        }
        out.into_iter().collect()
    }

    fn product(&self, a: ElemId, b: ElemId) -> Result<Arc<Vec<(ElemId, S)>>> {
        if let Some(hit) = self.registry.read().unwrap().products.get(&(a, b)) {
            return Ok(hit.clone());
        }
        let raw = self.ctx.algebra().multiply(&self.element(a), &self.element(b));
        let prod = Arc::new(self.decompose(&raw)?);
        self.registry.write().unwrap().products.insert((a, b), prod.clone());
        Ok(prod)
    }

    /// `f0 (x) f1 (x) ... (x) fn` with every slot reduced.
    pub fn tensor(&self, slots: &[NCPoly<S>]) -> Result<TensorChain<S>> {
        assert!(!slots.is_empty(), "a chain has at least one slot");
        let mut partial: BTreeMap<Vec<ElemId>, S> = BTreeMap::from([(Vec::new(), S::one())]);
        for (i, f) in slots.iter().enumerate() {
            let coords = self.decompose(f)?;
            let mut next = BTreeMap::new();
            for (k, c) in &partial {
                for (id, d) in &coords {
                    if i > 0 && *id == UNIT {
                        continue;
                    }
                    let mut key = k.clone();
                    key.push(*id);
                    add_into(&mut next, key, c.mul_ref(d));
                }
            }
            partial = next;
        }
        Ok(TensorChain { degree: slots.len() - 1, terms: partial })
    }

    /// The chain as a map from standard-monomial tuples.
    pub fn expand(&self, c: &TensorChain<S>) -> BTreeMap<Vec<Monomial>, S> {
        let reg = self.registry.read().unwrap();
        let mut out = BTreeMap::new();
        for (key, coeff) in &c.terms {
            let mut partial: Vec<(Vec<Monomial>, S)> = vec![(Vec::new(), coeff.clone())];
            for (slot, id) in key.iter().enumerate() {
                let e = &reg.elems[*id as usize];
                partial = partial
                    .iter()
                    .flat_map(|(k, c)| {
                        e.terms().iter().filter(move |(m, _)| slot == 0 || !m.is_one()).map(move |(m, d)| {
                            let mut k = k.clone();
                            k.push(*m);
                            (k, c.mul_ref(d))
                        })
                    })
                    .collect();
            }
            for (k, v) in partial {
                add_into(&mut out, k, v);
            }
        }
        out
    }

    /// Hochschild boundary.
    pub fn b(&self, c: &TensorChain<S>) -> Result<TensorChain<S>> {
        let n = c.degree;
        if n == 0 {
            return Err(Error::DegreeZero);
        }
        let mut out = TensorChain::zero(n - 1);
        for (key, coeff) in &c.terms {
            for i in 0..n {
                let sign = if i % 2 == 0 { coeff.clone() } else { -coeff.clone() };
                for (id, d) in self.product(key[i], key[i + 1])?.iter() {
                    let mut k = Vec::with_capacity(n);
                    k.extend_from_slice(&key[..i]);
                    k.push(*id);
                    k.extend_from_slice(&key[i + 2..]);
                    out.add_term(k, sign.mul_ref(d));
                }
            }
            let sign = if n.is_multiple_of(2) { coeff.clone() } else { -coeff.clone() };
            for (id, d) in self.product(key[n], key[0])?.iter() {
                let mut k = Vec::with_capacity(n);
                k.push(*id);
                k.extend_from_slice(&key[1..n]);
                out.add_term(k, sign.mul_ref(d));
            }
        }
        Ok(out)
    }

    /// Connes boundary on normalized chains.
    pub fn big_b(&self, c: &TensorChain<S>) -> TensorChain<S> {
        let n = c.degree;
        let mut out = TensorChain::zero(n + 1);
        for (key, coeff) in &c.terms {
            for i in 0..=n {
                let sign = if (n * i).is_multiple_of(2) { coeff.clone() } else { -coeff.clone() };
                let mut k = Vec::with_capacity(n + 2);
                k.push(UNIT);
                k.extend_from_slice(&key[i..]);
                k.extend_from_slice(&key[..i]);
                out.add_term(k, sign);
            }
        }
        out
    }

    /// `sum M1_{i0 i1} (x) M2_{i1 i2} (x) ... (x) Mk_{i(k-1) i0}` over all indices.
    pub fn trace_chain(&self, factors: &[RingMatrix<NCPoly<S>>]) -> Result<TensorChain<S>> {
        assert!(!factors.is_empty(), "at least one factor");
        let n = factors[0].n;
        let coords: Vec<Vec<Vec<(ElemId, S)>>> = factors
            .iter()
            .map(|f| f.entries.iter().map(|e| self.decompose(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut out = TensorChain::zero(factors.len() - 1);
        for i0 in 0..n {
            // state[j]: partial products ending at row index j
            let mut state: Vec<BTreeMap<Vec<ElemId>, S>> = (0..n)
                .map(|j| coords[0][i0 * n + j].iter().map(|(id, c)| (vec![*id], c.clone())).collect())
                .collect();
            for entries in &coords[1..] {
                let mut next: Vec<BTreeMap<Vec<ElemId>, S>> = vec![BTreeMap::new(); n];
                for (i, part) in state.iter().enumerate() {
                    for (j, acc) in next.iter_mut().enumerate() {
                        for (id, d) in entries[i * n + j].iter().filter(|(id, _)| *id != UNIT) {
                            for (k, c) in part {
                                let mut key = Vec::with_capacity(k.len() + 1);
                                key.extend_from_slice(k);
                                key.push(*id);
                                add_into(acc, key, c.mul_ref(d));
                            }
                        }
                    }
                }
                state = next;
            }
            for (k, c) in std::mem::take(&mut state[i0]) {
                out.add_term(k, c);
            }
        }
        Ok(out)
    }

    /// Text form of one tuple, slots separated by `" (x) "`.
    pub fn fmt_key(&self, key: &[ElemId]) -> String {
        let alg = self.ctx.algebra();
        key.iter().map(|id| format!("[{}]", alg.format(&self.element(*id)))).collect::<Vec<_>>().join(" (x) ")
    }

    /// Every coefficient as a residual of the claim that the chain vanishes.
    pub fn zero_check(&self, c: &TensorChain<S>) -> Check {
        let mut res = Residuals::<S>::new();
        for (k, v) in &c.terms {
            res.observe(v, || self.fmt_key(k));
        }
        res.finish()
    }

    /// Rewrites `c` in the chain-determined basis described on [`CanonicalChain`].
    pub fn canonical_form(&self, c: &TensorChain<S>) -> CanonicalChain<S> {
        let slots = c.degree + 1;
        let mut bases = Vec::with_capacity(slots);
        let mut terms: BTreeMap<Vec<u32>, S> = BTreeMap::new();
        let mut pivots: Vec<Vec<ElemId>> = Vec::with_capacity(slots);
        let mut changes: Vec<Vec<Vec<S>>> = Vec::with_capacity(slots);
        for s in 0..slots {
            let ids: BTreeSet<ElemId> = c.terms.keys().map(|k| k[s]).collect();
            let mut columns: BTreeMap<Vec<ElemId>, SparseVec<ElemId, S>> = BTreeMap::new();
            for (k, v) in &c.terms {
                let mut rest = k.clone();
                let id = rest.remove(s);
                add_into(columns.entry(rest).or_default(), id, v.clone());
            }
            let mut id_space = Echelon::new();
            for col in columns.values() {
                if id_space.rank() == ids.len() {
                    break;
                }
                id_space.insert(col);
            }
            let piv: Vec<ElemId> = id_space.rows().keys().copied().collect();
            let polys: Vec<SparseVec<Monomial, S>> = id_space
                .rows()
                .values()
                .map(|row| {
                    let mut p = SparseVec::new();
                    for (id, a) in row {
                        for (m, d) in self.element(*id).terms() {
                            if s == 0 || !m.is_one() {
                                add_into(&mut p, *m, a.mul_ref(d));
                            }
                        }
                    }
                    p
                })
                .collect();
            let mut mono_space = Echelon::new();
            for p in &polys {
                mono_space.insert(p);
            }
            let change: Vec<Vec<S>> = polys
                .iter()
                .map(|p| mono_space.rows().keys().map(|q| p.get(q).cloned().unwrap_or_else(S::zero)).collect())
                .collect();
            bases.push(
                mono_space.rows().values().map(|r| NCPoly::from_terms(r.iter().map(|(m, c)| (*m, c.clone())))).collect(),
            );
            pivots.push(piv);
            changes.push(change);
        }
        // restriction to pivot ids gives coordinates on the id-space rows
        for (k, v) in &c.terms {
            let idx: Option<Vec<u32>> = k
                .iter()
                .zip(&pivots)
                .map(|(id, piv)| piv.iter().position(|p| p == id).map(|j| j as u32))
                .collect();
            if let Some(idx) = idx {
                add_into(&mut terms, idx, v.clone());
            }
        }
        for (s, change) in changes.iter().enumerate() {
            let mut next = BTreeMap::new();
            for (k, v) in &terms {
                for (l, g) in change[k[s] as usize].iter().enumerate() {
                    let mut key = k.clone();
                    key[s] = l as u32;
                    add_into(&mut next, key, v.mul_ref(g));
                }
            }
            terms = next;
        }
        CanonicalChain { bases, terms }
    }

    /// Degree, canonical size, and a SHA-256 of the canonical form.
    pub fn digest(&self, c: &TensorChain<S>) -> ChainDigest {
        let alg = self.ctx.algebra();
        let canon = self.canonical_form(c);
        let mut h = Sha256::new();
        h.update(format!("degree {}\n", c.degree).as_bytes());
        for (s, basis) in canon.bases.iter().enumerate() {
            for (l, p) in basis.iter().enumerate() {
                h.update(format!("slot {s} basis {l}: {}\n", alg.format(p)).as_bytes());
            }
        }
        for (k, v) in &canon.terms {
            let idx: Vec<String> = k.iter().map(u32::to_string).collect();
            h.update(format!("{v}|{}\n", idx.join(",")).as_bytes());
        }
        let sha256 = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        ChainDigest { degree: c.degree, n_terms: canon.terms.len(), is_zero: c.is_zero(), sha256 }
    }

    /// Registry ids of the standard monomials of degree at most `max_degree`
    /// (monomials that are their own remainder).
    pub fn monomial_pool(&self, max_degree: usize) -> Result<Vec<ElemId>> {
        let alg = self.ctx.algebra();
        let mut out = Vec::new();
        for m in alg.basis_upto(max_degree) {
            let f = NCPoly::monomial(m, S::one());
            let r = self.ctx.reduce(&f)?;
            if r == f {
                if let [(id, _)] = self.decompose_reduced(r).as_slice() {
                    out.push(*id);
                }
            }
        }
        Ok(out)
    }

    /// Random chain with `n_terms` tuples drawn from `pool` and small Gaussian integer coefficients.
    pub fn random_chain(&self, degree: usize, n_terms: usize, pool: &[ElemId], rng: &mut impl Rng) -> TensorChain<S> {
        let non_unit: Vec<ElemId> = pool.iter().copied().filter(|id| *id != UNIT).collect();
        let mut c = TensorChain::zero(degree);
        for _ in 0..n_terms {
            let mut key = vec![*pool.choose(rng).expect("nonempty pool")];
            key.extend((0..degree).map(|_| *non_unit.choose(rng).expect("nonempty pool")));
            let coeff = S::from_i64(rng.gen_range(-3..=3)).add_ref(&S::from_i64(rng.gen_range(-3..=3)).times_i());
            c.add_term(key, coeff);
        }
        c
    }
}

/// Normalization constants `lambda_k` of the Chern components.
#[derive(Clone, Debug)]
pub struct ChernConfig<S> {
    /// `even[k]` scales `ch_k(e)`.
    pub even: [S; 3],
    /// `odd[k]` scales `ch_{k + 1/2}(U)`.
    pub odd: [S; 2],
}

impl<S: Scalar> Default for ChernConfig<S> {
    fn default() -> Self {
        Self { even: [S::one(), S::one(), S::one()], odd: [S::one(), S::one()] }
    }
}

impl<S: Scalar> ChernConfig<S> {
    pub fn uniform(lambda: S) -> Self {
        Self { even: [lambda.clone(), lambda.clone(), lambda.clone()], odd: [lambda.clone(), lambda] }
    }
}

/// `lambda_k <(e - 1/2) (x) e^{(x) 2k}>`, `k = 0, 1, 2`.
pub fn chern_even<S: Scalar>(
    space: &ChainSpace<S>,
    e: &RingMatrix<NCPoly<S>>,
    k: usize,
    cfg: &ChernConfig<S>,
) -> Result<TensorChain<S>> {
    let alg = space.context().algebra().as_ref();
    let shifted = e.sub(alg, &RingMatrix::identity(alg, e.n).scale(alg, &S::half()));
    let mut factors = vec![shifted];
    factors.extend(std::iter::repeat_n(e.clone(), 2 * k));
    Ok(space.trace_chain(&factors)?.scale(&cfg.even[k]))
}

/// Which odd component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfDegree {
    Half,
    ThreeHalves,
}

impl HalfDegree {
    fn index(self) -> usize {
        match self {
            Self::Half => 0,
            Self::ThreeHalves => 1,
        }
    }
}

/// `<U (x) U* (x) ... - U* (x) U (x) ...>` with `2(k+1)` alternating factors.
///
/// Requires `U U*` and `U* U` to agree and to be a central multiple of the
/// identity matrix modulo the context relations.
pub fn chern_odd<S: Scalar>(
    space: &ChainSpace<S>,
    u: &RingMatrix<NCPoly<S>>,
    half: HalfDegree,
    cfg: &ChernConfig<S>,
) -> Result<TensorChain<S>> {
    let ctx = space.context();
    let alg = ctx.algebra().as_ref();
    let us = u.star(alg);
    let left = u.mul(alg, &us);
    let right = us.mul(alg, u);
    for i in 0..u.n {
        for j in 0..u.n {
            let d = ctx.reduce(&left.get(i, j).sub(right.get(i, j)))?;
            if !d.is_zero() {
                return Err(Error::NotUnitaryEnough(format!("U U* != U* U at ({i}, {j})")));
            }
            let target = if i == j { left.get(0, 0).clone() } else { NCPoly::zero() };
            if !ctx.reduce(&left.get(i, j).sub(&target))?.is_zero() {
                return Err(Error::NotUnitaryEnough(format!("U U* is not scalar at ({i}, {j})")));
            }
        }
    }
    if !ctx.central_check(left.get(0, 0), "U U*").pass {
        return Err(Error::NotUnitaryEnough("U U* is not central".into()));
    }
    let k = half.index();
    let len = 2 * (k + 1);
    let a: Vec<_> = (0..len).map(|i| if i % 2 == 0 { u.clone() } else { us.clone() }).collect();
    let b: Vec<_> = (0..len).map(|i| if i % 2 == 0 { us.clone() } else { u.clone() }).collect();
    let chain = space.trace_chain(&a)?.sub(&space.trace_chain(&b)?);
    Ok(chain.scale(&cfg.odd[k]))
}

/// `Y` as a `2 x 2` complex matrix over the algebra.
pub fn y_matrix<S: Scalar>(space: &ChainSpace<S>, ys: &YSystem<S>) -> RingMatrix<NCPoly<S>> {
    embed_m2(space.context().algebra().as_ref(), &Quat::new(ys.y.clone()))
}

/// All Chern character verdicts for one parameter point.
#[derive(Clone, Debug)]
pub struct ChernResults<S> {
    pub ch0: TensorChain<S>,
    pub ch1: TensorChain<S>,
    pub ch2: TensorChain<S>,
    pub ch_half: TensorChain<S>,
    pub ch_three_halves: TensorChain<S>,
    pub report: ConditionReport,
    pub digests: BTreeMap<String, ChainDigest>,
}

/// Computes `ch_0, ch_1, ch_2` of `p` on the seven-sphere, `ch_{1/2}(Y)` there
/// and `ch_{3/2}(Y)` on the three-sphere slice, with the cycle and
/// transgression checks.
pub fn chern_suite<S: Scalar>(
    seven: &SphereAlgebra<S>,
    three: &SphereAlgebra<S>,
    proj: &Projection<S>,
    ys: &YSystem<S>,
    cfg: &ChernConfig<S>,
) -> Result<ChernResults<S>> {
    let space = ChainSpace::new(seven);
    let p = proj.to_complex(seven.algebra());
    let ch0 = chern_even(&space, &p, 0, cfg)?;
    let ch1 = chern_even(&space, &p, 1, cfg)?;
    let ch2 = chern_even(&space, &p, 2, cfg)?;
    let y = y_matrix(&space, ys);
    let ch_half = chern_odd(&space, &y, HalfDegree::Half, cfg)?;

    let s3 = ChainSpace::new(three);
    let ch_three_halves = chern_odd(&s3, &y, HalfDegree::ThreeHalves, cfg)?;

    let mut report = ConditionReport::new();
    report.insert("ch0_vanishes", space.zero_check(&ch0));
    report.insert("ch1_vanishes", space.zero_check(&ch1));
    report.insert("ch2_nonzero", Check::from_bool(!ch2.is_zero(), "ch2(p) = 0"));
    let b_ch2 = space.b(&ch2)?;
    report.insert("ch2_cycle", space.zero_check(&b_ch2));
    report.insert("ch_half_vanishes", space.zero_check(&ch_half));
    report.insert("ch_three_halves_nonzero", Check::from_bool(!ch_three_halves.is_zero(), "ch3/2(Y) = 0"));
    report.insert("ch_three_halves_cycle", s3.zero_check(&s3.b(&ch_three_halves)?));
    report.insert("transgression_0", space.zero_check(&space.big_b(&ch0).sub(&space.b(&ch1)?)));
    report.insert("transgression_1", space.zero_check(&space.big_b(&ch1).sub(&b_ch2)));

    let mut digests = BTreeMap::new();
    for (name, c, sp) in [
        ("ch0", &ch0, &space),
        ("ch1", &ch1, &space),
        ("ch2", &ch2, &space),
        ("ch_half", &ch_half, &space),
        ("ch_three_halves", &ch_three_halves, &s3),
    ] {
        digests.insert(name.to_string(), sp.digest(c));
    }
    Ok(ChernResults { ch0, ch1, ch2, ch_half, ch_three_halves, report, digests })
}

/// Compares the chain condition `sum (Y^mu* (x) Y^mu - Y^mu (x) Y^mu*) = 0`
/// with the existence of a symmetric unitary `Lambda` with `Y^mu* = Lambda Y`.
pub fn check_lambda_equivalence<S: Scalar>(seven: &SphereAlgebra<S>, ys: &YSystem<S>) -> Result<ConditionReport> {
    let space = ChainSpace::new(seven);
    let mut chain = TensorChain::zero(1);
    for mu in 0..4 {
        let a = space.tensor(&[ys.y_star[mu].clone(), ys.y[mu].clone()])?;
        let b = space.tensor(&[ys.y[mu].clone(), ys.y_star[mu].clone()])?;
        chain = chain.add(&a).sub(&b);
    }
    let chain_check = space.zero_check(&chain);

    let alg = seven.algebra();
    let mut res = Residuals::<S>::new();
    for mu in 0..4 {
        for (m, c) in ys.y_star[mu].sub(&ys.lambda_y(mu)).terms() {
            res.observe(c, || format!("Y{mu}* at {}", alg.fmt_monomial(m)));
        }
    }
    let l = &ys.lambda;
    for i in 0..4 {
        for j in 0..4 {
            res.observe(&l.get(i, j).sub_ref(l.get(j, i)), || format!("Lambda not symmetric at ({i}, {j})"));
        }
    }
    let conj_t = Matrix4::from_fn(|i, j| l.get(j, i).conj());
    let prod = l.mul(&conj_t);
    for i in 0..4 {
        for j in 0..4 {
            let target = if i == j { S::one() } else { S::zero() };
            res.observe(&prod.get(i, j).sub_ref(&target), || format!("Lambda not unitary at ({i}, {j})"));
        }
    }
    let lambda_check = res.finish();
    let agree = chain_check.pass == lambda_check.pass;
    let mut report = ConditionReport::new();
    report.insert("chain_condition", chain_check);
    report.insert("symmetric_unitary_lambda", lambda_check);
    report.insert("agreement", Check::from_bool(agree, "the two criteria disagree"));
    Ok(report)
}
