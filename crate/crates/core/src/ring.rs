//! Ring contexts: a uniform way to do arithmetic on scalars, algebra
//! elements and sphere-reduced elements, plus small square matrices over
//! any such ring.

use std::marker::PhantomData;

use crate::scalars::Scalar;

/// An associative unital *-algebra over the scalar field `Self::Scalar`,
/// given as a context object acting on plain element values.
pub trait StarRing {
    type Elem: Clone;
    type Scalar: Scalar;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, s: &Self::Scalar, a: &Self::Elem) -> Self::Elem;
    fn star(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.scale(&-Self::Scalar::one(), a)
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    #[allow(clippy::wrong_self_convention)]
    fn from_scalar(&self, s: &Self::Scalar) -> Self::Elem {
        self.scale(s, &self.one())
    }
    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// The scalar field as a ring over itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScalarRing<S>(PhantomData<S>);

impl<S> ScalarRing<S> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

impl<S: Scalar> StarRing for ScalarRing<S> {
    type Elem = S;
    type Scalar = S;

    fn zero(&self) -> S {
        S::zero()
    }
    fn one(&self) -> S {
        S::one()
    }
    fn add(&self, a: &S, b: &S) -> S {
        a.add_ref(b)
    }
    fn mul(&self, a: &S, b: &S) -> S {
        a.mul_ref(b)
    }
    fn scale(&self, s: &S, a: &S) -> S {
        s.mul_ref(a)
    }
    fn star(&self, a: &S) -> S {
        a.conj()
    }
    fn is_zero(&self, a: &S) -> bool {
        a.is_zero()
    }
}

/// Square matrix over the elements of a [`StarRing`], stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RingMatrix<T> {
    pub n: usize,
    pub entries: Vec<T>,
}

impl<T: Clone> RingMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> RingMatrix<U> {
        RingMatrix { n: self.n, entries: self.entries.iter().map(&mut f).collect() }
    }
}

impl<T: Clone> RingMatrix<T> {
    pub fn identity<R: StarRing<Elem = T>>(ring: &R, n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn mul<R: StarRing<Elem = T>>(&self, ring: &R, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let terms: Vec<T> =
                (0..n).map(|k| ring.mul(self.get(i, k), other.get(k, j))).collect();
            ring.sum(terms.iter())
        })
    }

    pub fn add<R: StarRing<Elem = T>>(&self, ring: &R, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| ring.add(self.get(i, j), other.get(i, j)))
    }

    pub fn sub<R: StarRing<Elem = T>>(&self, ring: &R, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| ring.sub(self.get(i, j), other.get(i, j)))
    }

    pub fn scale<R: StarRing<Elem = T>>(&self, ring: &R, s: &R::Scalar) -> Self {
        self.map(|x| ring.scale(s, x))
    }

    /// Conjugate transpose with the ring's involution on entries.
    pub fn star<R: StarRing<Elem = T>>(&self, ring: &R) -> Self {
        Self::from_fn(self.n, |i, j| ring.star(self.get(j, i)))
    }

    pub fn trace<R: StarRing<Elem = T>>(&self, ring: &R) -> T {
        ring.sum((0..self.n).map(|i| self.get(i, i)))
    }

    /// Indices of the first entry that is not zero in the ring.
    pub fn first_nonzero<R: StarRing<Elem = T>>(&self, ring: &R) -> Option<(usize, usize)> {
        (0..self.n * self.n)
            .find(|&k| !ring.is_zero(&self.entries[k]))
            .map(|k| (k / self.n, k % self.n))
    }
}
