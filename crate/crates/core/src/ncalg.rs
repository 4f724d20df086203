//! The quadratic algebra `A_R` generated by hermitian `x1^lambda`, `x2^alpha`.
//!
//! Elements are kept in normal form: every monomial is `x1^M x2^V`, all
//! `x1` letters (sorted) in front of all `x2` letters (sorted). Products are
//! brought back to normal form with the exchange rule
//! `x2^alpha x1^lambda = conj(R^{lambda alpha}_{beta mu}) x1^mu x2^beta`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::{Check, ConditionReport, Residuals};
use crate::error::{Error, Result};
use crate::rmatrix::{build_r_quaternionic, DeformParams, RTensor};
use crate::ring::StarRing;
use crate::scalars::Scalar;

/// Upper bound on `N1 + N2`.
pub const MAX_VARS: usize = 16;

/// Exponent vector over `x1^0 .. x1^{N1-1}, x2^0 .. x2^{N2-1}` (in that
/// variable order).
///
/// Monomials are ordered by total degree, then lexicographically with the
/// last variable most significant, so `x1^0 < x1^1 < ... < x2^{N2-1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: [u8; MAX_VARS],
    degree: u16,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { exps: [0; MAX_VARS], degree: 0 };

    pub fn var(i: usize) -> Self {
        Self::var_pow(i, 1)
    }

    pub fn var_pow(i: usize, k: u8) -> Self {
        let mut m = Self::ONE;
        m.exps[i] = k;
        m.degree = u16::from(k);
        m
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        let mut m = Self::ONE;
        for (i, &e) in exps.iter().enumerate() {
            m.exps[i] = e;
            m.degree += u16::from(e);
        }
        m
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn exponents(&self) -> &[u8; MAX_VARS] {
        &self.exps
    }

    pub fn degree(&self) -> usize {
        usize::from(self.degree)
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    /// Product in the commutative sense (exponents add).
    pub fn times(&self, other: &Self) -> Self {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.exps[i] += other.exps[i];
        }
        m.degree += other.degree;
        m
    }

    /// Removes one factor of variable `i`.
    pub fn without(&self, i: usize) -> Self {
        let mut m = *self;
        m.exps[i] -= 1;
        m.degree -= 1;
        m
    }

    /// `(x1 part, x2 part)`.
    pub fn split(&self, n1: usize) -> (Self, Self) {
        let mut a = *self;
        let mut b = *self;
        for i in 0..MAX_VARS {
            if i < n1 {
                b.exps[i] = 0;
            } else {
                a.exps[i] = 0;
            }
        }
        a.degree = a.exps.iter().map(|&e| u16::from(e)).sum();
        b.degree = self.degree - a.degree;
        (a, b)
    }

    /// Variable indices with multiplicity, ascending.
    pub fn letters(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.degree());
        for (i, &e) in self.exps.iter().enumerate() {
            out.extend(std::iter::repeat_n(i as u8, usize::from(e)));
        }
        out
    }

    fn lowest_var(&self) -> Option<usize> {
        self.exps.iter().position(|&e| e > 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.iter().rev().cmp(other.exps.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e > 0).map_or(0, |p| p + 1);
        write!(f, "Monomial{:?}", &self.exps[..last])
    }
}

/// Sparse linear combination of normal monomials, never storing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct NCPoly<S> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Default for NCPoly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> NCPoly<S> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::ONE, S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::monomial(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial, c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add_ref(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, S> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, S> {
        self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest monomial in the order.
    pub fn leading(&self) -> Option<(&Monomial, &S)> {
        self.terms.iter().next_back()
    }

    /// Highest degree present; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    pub fn homogeneous_part(&self, d: usize) -> Self {
        Self { terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, s.mul_ref(c))))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// Largest coefficient modulus; 0 for the zero element.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Applies `f` to each coefficient, dropping new zeros.
    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> NCPoly<T> {
        NCPoly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }
}

/// `x2^alpha x1^lambda -> sum c x1^mu x2^beta`, stored per `(lambda, alpha)`.
type CrossTable<S> = Vec<Vec<(u8, u8, S)>>;
type PassResult<S> = Arc<Vec<(Monomial, u8, S)>>;
type ExchangeResult<S> = Arc<Vec<(Monomial, S)>>;

/// The algebra `A_R` for a fixed tensor `R`.
///
/// Holds memo tables for commuting `x2` words past `x1` words; they only
/// grow, and every lookup result is a pure function of `R`, so one instance
/// can be shared across threads.
pub struct Algebra<S: Scalar> {
    n1: usize,
    n2: usize,
    r: RTensor<S>,
    cross: CrossTable<S>,
    pass_cache: RwLock<HashMap<(u8, Monomial), PassResult<S>>>,
    exchange_cache: RwLock<HashMap<(Monomial, Monomial), ExchangeResult<S>>>,
}

impl<S: Scalar> fmt::Debug for Algebra<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra").field("n1", &self.n1).field("n2", &self.n2).finish_non_exhaustive()
    }
}

impl<S: Scalar> Algebra<S> {
    pub fn new(r: RTensor<S>) -> Self {
        let (n1, n2) = (r.n1, r.n2);
        assert!(n1 + n2 <= MAX_VARS, "at most {MAX_VARS} generators");
        let mut cross = vec![Vec::new(); n1 * n2];
        for l in 0..n1 {
            for a in 0..n2 {
                for b in 0..n2 {
                    for m in 0..n1 {
                        let v = r.get(l, a, b, m);
                        if !v.is_zero() {
                            cross[l * n2 + a].push((m as u8, b as u8, v.conj()));
                        }
                    }
                }
            }
        }
        Self {
            n1,
            n2,
            r,
            cross,
            pass_cache: RwLock::default(),
            exchange_cache: RwLock::default(),
        }
    }

    /// `A_R` for the quaternionic family at `params`.
    pub fn quaternionic(params: &DeformParams<S>) -> Result<Self> {
        Ok(Self::new(build_r_quaternionic(params)?))
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn n_vars(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn r(&self) -> &RTensor<S> {
        &self.r
    }

    /// Coefficients of `x2^alpha x1^lambda` in the normal basis, as `(mu, beta, c)`.
    pub fn cross_rule(&self, lambda: usize, alpha: usize) -> &[(u8, u8, S)] {
        &self.cross[lambda * self.n2 + alpha]
    }

    pub fn x1(&self, lambda: usize) -> NCPoly<S> {
        NCPoly::monomial(Monomial::var(lambda), S::one())
    }

    pub fn x2(&self, alpha: usize) -> NCPoly<S> {
        NCPoly::monomial(Monomial::var(self.n1 + alpha), S::one())
    }

    /// Generator by overall index (`x1` first, then `x2`).
    pub fn generator(&self, i: usize) -> NCPoly<S> {
        NCPoly::monomial(Monomial::var(i), S::one())
    }

    pub fn generators(&self) -> Vec<NCPoly<S>> {
        (0..self.n_vars()).map(|i| self.generator(i)).collect()
    }

    /// `(x1)^2 = sum_lambda (x1^lambda)^2`.
    pub fn x1_squared(&self) -> NCPoly<S> {
        NCPoly::from_terms((0..self.n1).map(|l| (Monomial::var_pow(l, 2), S::one())))
    }

    /// `(x2)^2 = sum_alpha (x2^alpha)^2`.
    pub fn x2_squared(&self) -> NCPoly<S> {
        NCPoly::from_terms((0..self.n2).map(|a| (Monomial::var_pow(self.n1 + a, 2), S::one())))
    }

    /// `x^2 = (x1)^2 + (x2)^2`.
    pub fn x_squared(&self) -> NCPoly<S> {
        self.x1_squared().add(&self.x2_squared())
    }

    /// `x2^alpha x1^A` for an `x1`-only monomial `A`, as `(x1 part, beta, c)`
    /// terms meaning `c x1^{A'} x2^beta`.
    fn pass(&self, alpha: u8, a: Monomial) -> PassResult<S> {
        if let Some(hit) = self.pass_cache.read().unwrap().get(&(alpha, a)) {
            return hit.clone();
        }
        let result: PassResult<S> = match a.lowest_var() {
            None => Arc::new(vec![(Monomial::ONE, alpha, S::one())]),
            Some(lambda) => {
                let rest = a.without(lambda);
                let mut acc: BTreeMap<(Monomial, u8), S> = BTreeMap::new();
                for (mu, beta, c) in self.cross_rule(lambda, usize::from(alpha)) {
                    for (a2, beta2, d) in self.pass(*beta, rest).iter() {
                        let key = (Monomial::var(usize::from(*mu)).times(a2), *beta2);
                        let v = c.mul_ref(d);
                        let e = acc.entry(key).or_insert_with(S::zero);
                        *e = e.add_ref(&v);
                    }
                }
                Arc::new(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((m, b), c)| (m, b, c)).collect())
            }
        };
        self.pass_cache.write().unwrap().insert((alpha, a), result.clone());
        result
    }

    /// Normal form of `x2^V x1^A`.
    pub fn exchange(&self, v: Monomial, a: Monomial) -> ExchangeResult<S> {
        if v.is_one() || a.is_one() {
            return Arc::new(vec![(v.times(&a), S::one())]);
        }
        if let Some(hit) = self.exchange_cache.read().unwrap().get(&(v, a)) {
            return hit.clone();
        }
        let top = v.exps.iter().rposition(|&e| e > 0).expect("nonzero x2 word");
        let alpha = (top - self.n1) as u8;
        let rest = v.without(top);
        let mut acc: BTreeMap<Monomial, S> = BTreeMap::new();
        // x2^V x1^A = x2^{V - e_alpha} (x2^alpha x1^A)
        for (a2, beta, c) in self.pass(alpha, a).iter() {
            let tail = Monomial::var(self.n1 + usize::from(*beta));
            for (m, d) in self.exchange(rest, *a2).iter() {
                let e = acc.entry(m.times(&tail)).or_insert_with(S::zero);
                *e = e.add_ref(&c.mul_ref(d));
            }
        }
        let result: ExchangeResult<S> = Arc::new(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        self.exchange_cache.write().unwrap().insert((v, a), result.clone());
        result
    }

    /// Product of two normal monomials.
    pub fn mul_monomials(&self, p: &Monomial, q: &Monomial) -> ExchangeResult<S> {
        let (m, v) = p.split(self.n1);
        let (a, b) = q.split(self.n1);
        if v.is_one() || a.is_one() {
            return Arc::new(vec![(p.times(q), S::one())]);
        }
        let mid = self.exchange(v, a);
        Arc::new(mid.iter().map(|(x, c)| (m.times(x).times(&b), c.clone())).collect())
    }

    pub fn multiply(&self, f: &NCPoly<S>, g: &NCPoly<S>) -> NCPoly<S> {
        let mut acc: BTreeMap<Monomial, S> = BTreeMap::new();
        for (p, c) in &f.terms {
            for (q, d) in &g.terms {
                let cd = c.mul_ref(d);
                for (m, e) in self.mul_monomials(p, q).iter() {
                    let t = cd.mul_ref(e);
                    let slot = acc.entry(*m).or_insert_with(S::zero);
                    *slot = slot.add_ref(&t);
                }
            }
        }
        NCPoly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// Product of several factors, left to right.
    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a NCPoly<S>>) -> NCPoly<S> {
        factors.into_iter().fold(NCPoly::one(), |acc, f| self.multiply(&acc, f))
    }

    /// `f^k`.
    pub fn power(&self, f: &NCPoly<S>, k: usize) -> NCPoly<S> {
        (0..k).fold(NCPoly::one(), |acc, _| self.multiply(&acc, f))
    }

    pub fn commutator(&self, f: &NCPoly<S>, g: &NCPoly<S>) -> NCPoly<S> {
        self.multiply(f, g).sub(&self.multiply(g, f))
    }

    /// Antilinear anti-automorphism fixing every generator.
    pub fn star(&self, f: &NCPoly<S>) -> NCPoly<S> {
        let mut out = NCPoly::zero();
        for (m, c) in &f.terms {
            let (a, v) = m.split(self.n1);
            let cc = c.conj();
            // (x1^A x2^V)* = x2^V x1^A
            for (x, d) in self.exchange(v, a).iter() {
                out.add_term(*x, cc.mul_ref(d));
            }
        }
        out
    }

    /// Normal form of a word of generator indices.
    pub fn normal_form(&self, word: &[u8]) -> NCPoly<S> {
        word.iter().fold(NCPoly::one(), |acc, &l| self.multiply(&acc, &self.generator(usize::from(l))))
    }

    /// Whether `f` commutes with every generator.
    pub fn is_central(&self, f: &NCPoly<S>) -> bool {
        self.centrality(f).pass
    }

    /// Residual of `[f, x]` over all generators `x`, with the first failing generator as witness.
    pub fn centrality(&self, f: &NCPoly<S>) -> Check {
        let mut res = Residuals::<S>::new();
        for i in 0..self.n_vars() {
            let c = self.commutator(f, &self.generator(i));
            for (m, v) in c.terms() {
                res.observe(v, || format!("[f, {}] at {}", self.var_name(i), self.fmt_monomial(m)));
            }
        }
        res.finish()
    }

    /// All normal monomials of total degree `n`, ascending.
    pub fn basis(&self, n: usize) -> Vec<Monomial> {
        let nv = self.n_vars();
        let mut out = Vec::new();
        let mut exps = vec![0u8; nv];
        fn rec(i: usize, left: usize, exps: &mut Vec<u8>, out: &mut Vec<Monomial>) {
            if i + 1 == exps.len() {
                exps[i] = left as u8;
                out.push(Monomial::from_exponents(exps));
                return;
            }
            for k in 0..=left {
                exps[i] = k as u8;
                rec(i + 1, left - k, exps, out);
            }
            exps[i] = 0;
        }
        if nv == 0 {
            return if n == 0 { vec![Monomial::ONE] } else { vec![] };
        }
        rec(0, n, &mut exps, &mut out);
        out.sort();
        out
    }

    /// All normal monomials of degree at most `n`, ascending.
    pub fn basis_upto(&self, n: usize) -> Vec<Monomial> {
        (0..=n).flat_map(|k| self.basis(k)).collect()
    }

    /// `"x1_0"` style name of variable `i`.
    pub fn var_name(&self, i: usize) -> String {
        if i < self.n1 {
            format!("x1_{i}")
        } else {
            format!("x2_{}", i - self.n1)
        }
    }

    pub fn fmt_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for i in 0..self.n_vars() {
            match m.exps[i] {
                0 => {}
                1 => parts.push(self.var_name(i)),
                e => parts.push(format!("{}^{e}", self.var_name(i))),
            }
        }
        parts.join("*")
    }

    pub fn fmt_word(&self, word: &[u8]) -> String {
        word.iter().map(|&l| self.var_name(usize::from(l))).collect::<Vec<_>>().join("*")
    }

    /// Text form such as `"(3/5,0)*x1_0*x2_1 + (0,1)*x2_3^2"`, ascending monomials.
    pub fn format(&self, f: &NCPoly<S>) -> String {
        if f.is_zero() {
            return "0".into();
        }
        f.terms
            .iter()
            .map(|(m, c)| if m.is_one() { c.to_string() } else { format!("{c}*{}", self.fmt_monomial(m)) })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the text form; words need not be in normal order.
    pub fn parse(&self, text: &str) -> Result<NCPoly<S>> {
        let text = text.trim();
        if text == "0" {
            return Ok(NCPoly::zero());
        }
        let mut out = NCPoly::zero();
        for (sign, term) in split_terms(text)? {
            let mut coeff = if sign { -S::one() } else { S::one() };
            let mut word = Vec::new();
            for factor in term.split('*').map(str::trim) {
                if factor.is_empty() {
                    return Err(Error::MalformedNumber(term.to_string()));
                }
                if factor.starts_with('x') {
                    let (name, pow) = match factor.split_once('^') {
                        Some((n, p)) => {
                            (n, p.parse::<usize>().map_err(|_| Error::MalformedNumber(factor.to_string()))?)
                        }
                        None => (factor, 1),
                    };
                    let var = self.parse_var(name)?;
                    word.extend(std::iter::repeat_n(var, pow));
                } else {
                    coeff = coeff.mul_ref(&S::parse_scalar(factor)?);
                }
            }
            for (m, c) in self.normal_form(&word).terms {
                out.add_term(m, c.mul_ref(&coeff));
            }
        }
        Ok(out)
    }

    fn parse_var(&self, name: &str) -> Result<u8> {
        let unknown = || Error::UnknownGenerator(name.to_string());
        let (group, idx) = name.strip_prefix('x').and_then(|r| r.split_once('_')).ok_or_else(unknown)?;
        let idx: usize = idx.parse().map_err(|_| unknown())?;
        match group {
            "1" if idx < self.n1 => Ok(idx as u8),
            "2" if idx < self.n2 => Ok((self.n1 + idx) as u8),
            _ => Err(unknown()),
        }
    }
}

/// Splits at top-level `+`/`-` (outside parentheses); the flag is `true` for `-`.
fn split_terms(text: &str) -> Result<Vec<(bool, &str)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                // exponent signs such as 1e-3 live inside parentheses
                let piece = text[start..i].trim();
                if !piece.is_empty() {
                    out.push((neg, piece));
                } else if i != 0 && !text[..i].trim().is_empty() && !out.is_empty() {
                    return Err(Error::MalformedNumber(text.to_string()));
                }
                neg = b == b'-';
                start = i + 1;
            }
            _ => {}
        }
    }
    let piece = text[start..].trim();
    if piece.is_empty() || depth != 0 {
        return Err(Error::MalformedNumber(text.to_string()));
    }
    out.push((neg, piece));
    Ok(out)
}

/// `A_R` as a [`StarRing`].
impl<S: Scalar> StarRing for Algebra<S> {
    type Elem = NCPoly<S>;
    type Scalar = S;

    fn zero(&self) -> NCPoly<S> {
        NCPoly::zero()
    }
    fn one(&self) -> NCPoly<S> {
        NCPoly::one()
    }
    fn add(&self, a: &NCPoly<S>, b: &NCPoly<S>) -> NCPoly<S> {
        a.add(b)
    }
    fn mul(&self, a: &NCPoly<S>, b: &NCPoly<S>) -> NCPoly<S> {
        self.multiply(a, b)
    }
    fn scale(&self, s: &S, a: &NCPoly<S>) -> NCPoly<S> {
        a.scale(s)
    }
    fn star(&self, a: &NCPoly<S>) -> NCPoly<S> {
        Algebra::star(self, a)
    }
    fn is_zero(&self, a: &NCPoly<S>) -> bool {
        a.is_zero()
    }
}

/// Order in which the word rewriter picks a reducible position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Random(u64),
}

/// Plain word rewriting, kept separate from [`Algebra::multiply`] so the two
/// can check each other.
pub struct WordRewriter<S> {
    n1: usize,
    rules: Vec<Vec<(u8, u8, S)>>,
    memo: HashMap<Vec<u8>, Arc<BTreeMap<Monomial, S>>>,
}

impl<S: Scalar> WordRewriter<S> {
    pub fn new(r: &RTensor<S>) -> Self {
        let (n1, n2) = (r.n1, r.n2);
        let mut rules = vec![Vec::new(); n1 * n2];
        for (l, a) in (0..n1).flat_map(|l| (0..n2).map(move |a| (l, a))) {
            for b in 0..n2 {
                for m in 0..n1 {
                    let c = r.get(l, a, b, m).conj();
                    if !c.is_zero() {
                        rules[l * n2 + a].push(((n1 + b) as u8, m as u8, c));
                    }
                }
            }
        }
        Self { n1, rules, memo: HashMap::new() }
    }

    fn n2(&self) -> usize {
        self.rules.len() / self.n1.max(1)
    }

    /// Positions `i` where `w[i] w[i+1]` matches a rule.
    pub fn redexes(&self, w: &[u8]) -> Vec<usize> {
        let n1 = self.n1 as u8;
        (0..w.len().saturating_sub(1))
            .filter(|&i| {
                let (p, q) = (w[i], w[i + 1]);
                (p >= n1 && q < n1) || ((p >= n1) == (q >= n1) && p > q)
            })
            .collect()
    }

    /// One rewrite step at position `i`.
    pub fn rewrite_at(&self, w: &[u8], i: usize) -> Vec<(Vec<u8>, S)> {
        let (p, q) = (w[i], w[i + 1]);
        let n1 = self.n1 as u8;
        let with = |a: u8, b: u8| {
            let mut v = w.to_vec();
            v[i] = a;
            v[i + 1] = b;
            v
        };
        if p >= n1 && q < n1 {
            let rule = &self.rules[usize::from(q) * self.n2() + usize::from(p - n1)];
            rule.iter().map(|(beta, mu, c)| (with(*mu, *beta), c.clone())).collect()
        } else {
            vec![(with(q, p), S::one())]
        }
    }

    fn word_monomial(w: &[u8]) -> Monomial {
        let mut m = Monomial::ONE;
        for &l in w {
            m = m.times(&Monomial::var(usize::from(l)));
        }
        m
    }

    /// Full reduction following `strategy`, without memoization.
    pub fn reduce(&self, word: &[u8], strategy: Strategy) -> NCPoly<S> {
        let mut rng = match strategy {
            Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut pending: BTreeMap<Vec<u8>, S> = BTreeMap::new();
        pending.insert(word.to_vec(), S::one());
        let mut out = NCPoly::zero();
        while let Some((w, c)) = pending.pop_first() {
            let spots = self.redexes(&w);
            let Some(&first) = spots.first() else {
                out.add_term(Self::word_monomial(&w), c);
                continue;
            };
            let i = match (&mut rng, strategy) {
                (Some(r), _) => spots[r.gen_range(0..spots.len())],
                (None, Strategy::Rightmost) => *spots.last().unwrap(),
                _ => first,
            };
            for (v, d) in self.rewrite_at(&w, i) {
                let e = pending.entry(v).or_insert_with(S::zero);
                *e = e.add_ref(&c.mul_ref(&d));
            }
        }
        out
    }

    /// Leftmost-first normal form, memoized across calls.
    pub fn normal_form(&mut self, w: &[u8]) -> Arc<BTreeMap<Monomial, S>> {
        if let Some(hit) = self.memo.get(w) {
            return hit.clone();
        }
        let spots = self.redexes(w);
        let result = match spots.first() {
            None => Arc::new(BTreeMap::from([(Self::word_monomial(w), S::one())])),
            Some(&i) => Arc::new(self.combine(w, i)),
        };
        self.memo.insert(w.to_vec(), result.clone());
        result
    }

    fn combine(&mut self, w: &[u8], i: usize) -> BTreeMap<Monomial, S> {
        let mut acc: BTreeMap<Monomial, S> = BTreeMap::new();
        for (v, c) in self.rewrite_at(w, i) {
            for (m, d) in self.normal_form(&v).iter() {
                let e = acc.entry(*m).or_insert_with(S::zero);
                *e = e.add_ref(&c.mul_ref(d));
            }
        }
        acc.retain(|_, c| !c.is_zero());
        acc
    }
}

/// Outcome of [`confluence_check`].
#[derive(Clone, Debug)]
pub struct Confluence {
    pub report: ConditionReport,
    /// `dims[k-1]` is the dimension of the degree-`k` piece, for `k = 1..=n`.
    pub dims: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Expected `dim (A_R)_n` for a PBW algebra on `n_vars` generators.
pub fn polynomial_dimension(n_vars: usize, n: usize) -> usize {
    if n_vars == 0 {
        return usize::from(n == 0);
    }
    binomial(n + n_vars - 1, n_vars - 1)
}

fn diff_residuals<S: Scalar>(a: &BTreeMap<Monomial, S>, b: &BTreeMap<Monomial, S>, res: &mut Residuals<S>, w: impl Fn() -> String) {
    let mut keys: Vec<&Monomial> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        let x = a.get(k).cloned().unwrap_or_else(S::zero);
        let y = b.get(k).cloned().unwrap_or_else(S::zero);
        res.observe(&x.sub_ref(&y), &w);
    }
}

/// Verifies that the rewriting system is confluent through degree `n` and
/// that random words reduce identically under different rewrite orders and
/// under [`Algebra::multiply`].
///
/// For each `k <= n`, every word of length `k` and every applicable rewrite
/// step are checked to lead to the same normal form; together with
/// termination this makes the sorted monomials a basis of `(A_R)_k`, whose
/// size is then compared with the polynomial count.
pub fn confluence_check<S: Scalar>(alg: &Algebra<S>, n: usize, trials: usize, seed: u64) -> Confluence {
    let mut report = ConditionReport::new();
    let mut rw = WordRewriter::new(alg.r());
    let nv = alg.n_vars();
    let mut dims = Vec::new();
    for k in 1..=n {
        let mut res = Residuals::<S>::new();
        let mut support: std::collections::BTreeSet<Monomial> = Default::default();
        let mut fixed = true;
        let mut word = vec![0u8; k];
        let total = nv.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            for slot in word.iter_mut().rev() {
                *slot = (c % nv) as u8;
                c /= nv;
            }
            let nf = rw.normal_form(&word);
            support.extend(nf.keys().copied());
            let spots = rw.redexes(&word);
            if spots.is_empty() {
                fixed &= nf.len() == 1 && nf.get(&WordRewriter::<S>::word_monomial(&word)).is_some_and(S::is_one);
            }
            for &i in spots.iter().skip(1) {
                let other = rw.combine(&word, i);
                diff_residuals(&nf, &other, &mut res, || format!("{} at position {i}", alg.fmt_word(&word)));
            }
        }
        report.insert(format!("local_confluence_{k}"), res.finish());
        let expected = polynomial_dimension(nv, k);
        let dim = support.len();
        dims.push(dim);
        let ok = fixed && dim == alg.basis(k).len() && dim == expected;
        report.insert(format!("hilbert_{k}"), Check::from_bool(ok, format!("dim {dim}, expected {expected}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orders = Residuals::<S>::new();
    let mut engines = Residuals::<S>::new();
    for _ in 0..trials {
        let len = rng.gen_range(1..=n.max(1));
        let word: Vec<u8> = (0..len).map(|_| rng.gen_range(0..nv) as u8).collect();
        let left = rw.reduce(&word, Strategy::Leftmost);
        let right = rw.reduce(&word, Strategy::Rightmost);
        let random = rw.reduce(&word, Strategy::Random(rng.gen()));
        let w = || alg.fmt_word(&word);
        diff_residuals(left.terms(), right.terms(), &mut orders, w);
        diff_residuals(left.terms(), random.terms(), &mut orders, w);
        diff_residuals(left.terms(), alg.normal_form(&word).terms(), &mut engines, w);
    }
    report.insert("random_orders", orders.finish());
    report.insert("engine_agreement", engines.finish());
    Confluence { report, dims }
}

/// Central relations `c_j = s_j` defining a quotient of `A_R`.
#[derive(Clone, Debug)]
pub struct CentralRelations<S> {
    pub relations: Vec<(NCPoly<S>, S)>,
}

impl<S: Scalar> CentralRelations<S> {
    /// `x^2 = 1`.
    pub fn seven_sphere(alg: &Algebra<S>) -> Self {
        Self { relations: vec![(alg.x_squared(), S::one())] }
    }

    /// `(x1)^2 = (x2)^2 = 1`.
    pub fn torus(alg: &Algebra<S>) -> Self {
        Self { relations: vec![(alg.x1_squared(), S::one()), (alg.x2_squared(), S::one())] }
    }

    /// `(x1)^2 = (x2)^2 = 1/2`: the slice of the seven-sphere where the
    /// suspension coordinate vanishes.
    pub fn equator(alg: &Algebra<S>) -> Self {
        Self { relations: vec![(alg.x1_squared(), S::half()), (alg.x2_squared(), S::half())] }
    }
}

struct Echelon<S> {
    /// Rows keyed by leading monomial, each normalized to leading coefficient 1.
    pivots: BTreeMap<Monomial, NCPoly<S>>,
    /// Rows have been generated from every multiplier of degree `< built`.
    built: usize,
}

/// Canonical remainders modulo the ideal generated by central relations.
///
/// The ideal's part in degree `<= d` is spanned by `(c_j - s_j) m` for
/// monomials `m` of degree `<= d - deg c_j`. Those rows are kept in
/// echelon form by leading monomial; the remainder of `f` is what is left
/// after cancelling every pivot monomial from the top down.
pub struct CentralReducer<S: Scalar> {
    alg: Arc<Algebra<S>>,
    relations: Vec<(NCPoly<S>, usize)>,
    cap: usize,
    echelon: RwLock<Echelon<S>>,
}

pub const DEFAULT_DEGREE_CAP: usize = 12;

impl<S: Scalar> CentralReducer<S> {
    pub fn new(alg: Arc<Algebra<S>>, rels: &CentralRelations<S>, cap: usize) -> Result<Self> {
        let mut relations = Vec::new();
        for (c, s) in &rels.relations {
            let check = alg.centrality(c);
            if !check.pass {
                return Err(Error::NotCentral(check.witness));
            }
            let d = c.degree().filter(|&d| d > 0 && c.is_homogeneous()).ok_or_else(|| {
                Error::NotCentral("relation must be homogeneous of positive degree".into())
            })?;
            relations.push((c.sub(&NCPoly::constant(s.clone())), d));
        }
        Ok(Self { alg, relations, cap, echelon: RwLock::new(Echelon { pivots: BTreeMap::new(), built: 0 }) })
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        &self.alg
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn ensure(&self, degree: usize) -> Result<()> {
        if degree > self.cap {
            return Err(Error::DegreeOverflow { degree, cap: self.cap });
        }
        if self.echelon.read().unwrap().built > degree {
            return Ok(());
        }
        let mut ech = self.echelon.write().unwrap();
        for d in ech.built..=degree {
            for (rel, rd) in &self.relations {
                if d < *rd {
                    continue;
                }
                for m in self.alg.basis(d - rd) {
                    let row = self.alg.multiply(&NCPoly::monomial(m, S::one()), rel);
                    insert_row(&mut ech.pivots, row);
                }
            }
        }
        ech.built = degree + 1;
        Ok(())
    }

    /// Canonical representative of `f` modulo the ideal.
    pub fn reduce(&self, f: &NCPoly<S>) -> Result<NCPoly<S>> {
        let Some(d) = f.degree() else { return Ok(NCPoly::zero()) };
        self.ensure(d)?;
        let ech = self.echelon.read().unwrap();
        Ok(reduce_by(&ech.pivots, f.clone()))
    }

    /// Number of independent rows (the dimension of the ideal inside the degree `<= d` space).
    pub fn ideal_dimension(&self, d: usize) -> Result<usize> {
        self.ensure(d)?;
        Ok(self.echelon.read().unwrap().pivots.keys().filter(|m| m.degree() <= d).count())
    }

    /// `reduce(a b)`.
    pub fn mul(&self, a: &NCPoly<S>, b: &NCPoly<S>) -> Result<NCPoly<S>> {
        self.reduce(&self.alg.multiply(a, b))
    }

    /// Whether `f` vanishes in the quotient.
    pub fn vanishes(&self, f: &NCPoly<S>) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }
}

fn reduce_by<S: Scalar>(pivots: &BTreeMap<Monomial, NCPoly<S>>, mut f: NCPoly<S>) -> NCPoly<S> {
    let mut out = NCPoly::zero();
    while let Some((m, c)) = f.terms.pop_last() {
        match pivots.get(&m) {
            Some(row) => {
                for (k, v) in row.terms.iter().rev().skip(1) {
                    f.add_term(*k, -c.mul_ref(v));
                }
            }
            None => out.add_term(m, c),
        }
    }
    out
}

fn insert_row<S: Scalar>(pivots: &mut BTreeMap<Monomial, NCPoly<S>>, mut row: NCPoly<S>) {
    loop {
        let Some((lead, c)) = row.leading().map(|(m, c)| (*m, c.clone())) else { return };
        match pivots.get(&lead) {
            Some(p) => row = row.sub(&p.scale(&c)),
            None => {
                let inv = c.inv().expect("nonzero leading coefficient");
                let mut normalized = row.scale(&inv);
                normalized.terms.insert(lead, S::one());
                pivots.insert(lead, normalized);
                return;
            }
        }
    }
}

/// Remainder of `f` modulo the ideal generated by `c - 1`.
pub fn reduce_mod_central<S: Scalar>(alg: &Arc<Algebra<S>>, f: &NCPoly<S>, c: &NCPoly<S>) -> Result<NCPoly<S>> {
    let rels = CentralRelations { relations: vec![(c.clone(), S::one())] };
    CentralReducer::new(alg.clone(), &rels, DEFAULT_DEGREE_CAP)?.reduce(f)
}

/// The quotient `A_R / (relations)` as a [`StarRing`], with every element
/// kept as its canonical remainder.
pub struct Quotient<S: Scalar> {
    pub reducer: CentralReducer<S>,
}

impl<S: Scalar> Quotient<S> {
    pub fn new(alg: Arc<Algebra<S>>, rels: &CentralRelations<S>, cap: usize) -> Result<Self> {
        Ok(Self { reducer: CentralReducer::new(alg, rels, cap)? })
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        self.reducer.algebra()
    }

    pub fn reduce(&self, f: &NCPoly<S>) -> NCPoly<S> {
        self.reducer.reduce(f).unwrap_or_else(|e| panic!("quotient arithmetic: {e}"))
    }
}

impl<S: Scalar> StarRing for Quotient<S> {
    type Elem = NCPoly<S>;
    type Scalar = S;

    fn zero(&self) -> NCPoly<S> {
        NCPoly::zero()
    }
    fn one(&self) -> NCPoly<S> {
        NCPoly::one()
    }
    fn add(&self, a: &NCPoly<S>, b: &NCPoly<S>) -> NCPoly<S> {
        a.add(b)
    }
    fn mul(&self, a: &NCPoly<S>, b: &NCPoly<S>) -> NCPoly<S> {
        self.reduce(&self.algebra().multiply(a, b))
    }
    fn scale(&self, s: &S, a: &NCPoly<S>) -> NCPoly<S> {
        a.scale(s)
    }
    fn star(&self, a: &NCPoly<S>) -> NCPoly<S> {
        self.reduce(&self.algebra().star(a))
    }
    fn is_zero(&self, a: &NCPoly<S>) -> bool {
        a.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{GaussRational as G, Rational};

    fn alg(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> Arc<Algebra<G>> {
        let q = |p: (i64, i64)| Rational::new(p.0.into(), p.1.into());
        Arc::new(Algebra::quaternionic(&DeformParams::from_rationals(q(a), q(b), q(c)).unwrap()).unwrap())
    }

    #[test]
    fn monomial_order() {
        let x10 = Monomial::var(0);
        let x11 = Monomial::var(1);
        let x23 = Monomial::var(7);
        assert!(x10 < x11 && x11 < x23);
        assert!(x23 < x10.times(&x10));
        assert!(x10.times(&x23) < x11.times(&x23));
        assert!(x11.times(&x11) < x10.times(&x23));
    }

    #[test]
    fn basis_counts() {
        let a = alg((3, 5), (4, 5), (0, 1));
        assert_eq!(a.basis(0).len(), 1);
        assert_eq!(a.basis(1).len(), 8);
        assert_eq!(a.basis(2).len(), 36);
        assert_eq!(a.basis(4).len(), 330);
        assert_eq!(polynomial_dimension(8, 4), 330);
    }

    #[test]
    fn within_group_words_sort() {
        let a = alg((3, 5), (4, 5), (0, 1));
        assert_eq!(a.normal_form(&[1, 0]), NCPoly::monomial(Monomial::var(0).times(&Monomial::var(1)), G::one()));
    }

    #[test]
    fn classical_cross_is_flip() {
        let a = Algebra::<G>::quaternionic(&DeformParams::classical()).unwrap();
        assert_eq!(a.normal_form(&[4, 0]), NCPoly::monomial(Monomial::var(0).times(&Monomial::var(4)), G::one()));
    }

    #[test]
    fn cross_rewrite_matches_tensor() {
        let a = alg((3, 5), (4, 5), (0, 1));
        let nf = a.normal_form(&[4, 0]);
        let mut expected = NCPoly::zero();
        for b in 0..4 {
            for m in 0..4 {
                expected.add_term(Monomial::var(m).times(&Monomial::var(4 + b)), a.r().get(0, 0, b, m).conj());
            }
        }
        assert_eq!(nf, expected);
        assert!(nf.len() <= 16);
    }

    #[test]
    fn star_examples() {
        let a = alg((3, 5), (4, 5), (0, 1));
        assert_eq!(a.star(&a.x1(0)), a.x1(0));
        let f = a.multiply(&a.x1(0), &a.x2(0)).scale(&G::i());
        assert_eq!(a.star(&f), a.normal_form(&[4, 0]).scale(&-G::i()));
    }

    #[test]
    fn squares_are_central() {
        let a = alg((1, 3), (2, 3), (2, 3));
        assert!(a.is_central(&a.x1_squared()));
        assert!(a.is_central(&a.x2_squared()));
        assert!(a.is_central(&a.x_squared()));
        assert!(!a.is_central(&a.x1(0)));
    }

    #[test]
    fn text_round_trip() {
        let a = alg((3, 5), (4, 5), (0, 1));
        let f = a.parse("(3/5,0)*x1_0*x2_1 + (0,1)*x2_3^2").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(a.format(&f), "(3/5,0)*x1_0*x2_1 + (0,1)*x2_3^2");
        assert_eq!(a.parse(&a.format(&f)).unwrap(), f);
        assert_eq!(a.parse("x1_1 - x1_1").unwrap(), NCPoly::zero());
        assert_eq!(a.parse("x2_0*x1_0").unwrap(), a.normal_form(&[4, 0]));
        assert!(matches!(a.parse("x3_0"), Err(Error::UnknownGenerator(_))));
        assert!(matches!(a.parse("x1_4"), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn reduction_examples() {
        let a = alg((3, 5), (4, 5), (0, 1));
        let x2 = a.x_squared();
        assert_eq!(reduce_mod_central(&a, &x2, &x2).unwrap(), NCPoly::one());
        let f = a.multiply(&x2, &a.x1(0));
        assert_eq!(reduce_mod_central(&a, &f, &x2).unwrap(), a.x1(0));
        assert!(matches!(reduce_mod_central(&a, &x2, &a.x1(0)), Err(Error::NotCentral(_))));
    }

    #[test]
    fn degree_cap_enforced() {
        let a = alg((3, 5), (4, 5), (0, 1));
        let r = CentralReducer::new(a.clone(), &CentralRelations::seven_sphere(&a), 3).unwrap();
        let f = a.power(&a.x1(0), 4);
        assert!(matches!(r.reduce(&f), Err(Error::DegreeOverflow { degree: 4, cap: 3 })));
    }

    #[test]
    fn ideal_dimension_matches_multipliers() {
        let a = alg((1, 3), (2, 3), (2, 3));
        let r = CentralReducer::new(a.clone(), &CentralRelations::seven_sphere(&a), 6).unwrap();
        let expected: usize = (0..=3).map(|k| a.basis(k).len()).sum();
        assert_eq!(r.ideal_dimension(5).unwrap(), expected);
    }

    #[test]
    fn torus_relations_reduce_both_squares() {
        let a = alg((3, 5), (4, 5), (0, 1));
        let r = CentralReducer::new(a.clone(), &CentralRelations::torus(&a), 6).unwrap();
        assert_eq!(r.reduce(&a.x1_squared()).unwrap(), NCPoly::one());
        assert_eq!(r.reduce(&a.x2_squared()).unwrap(), NCPoly::one());
        let f = a.multiply(&a.x1_squared(), &a.x2_squared());
        assert_eq!(r.reduce(&f).unwrap(), NCPoly::one());
    }

    #[test]
    fn confluence_at_low_degree() {
        let a = alg((1, 3), (2, 3), (2, 3));
        let c = confluence_check(&a, 3, 20, 7);
        assert!(c.report.all_pass(), "{}", c.report);
        assert_eq!(c.dims, vec![8, 36, 120]);
    }

    #[test]
    fn broken_quadratic_condition_is_caught() {
        let mut r = build_r_quaternionic(&DeformParams::<G>::from_rationals(
            Rational::new(3.into(), 5.into()),
            Rational::new(4.into(), 5.into()),
            Rational::new(0.into(), 1.into()),
        )
        .unwrap())
        .unwrap();
        let v = r.get(0, 1, 2, 3).clone() + G::from_fracs(1, 7, 0, 1);
        r.set(0, 1, 2, 3, v);
        let c = confluence_check(&Algebra::new(r), 3, 10, 1);
        let failed = c.report.failures();
        assert!(!failed.is_empty());
        assert!(c.report.checks.values().any(|ch| !ch.pass && ch.witness.contains("x")));
    }
}
