//! Sparse exact linear algebra: incremental reduced row echelon form,
//! kernels and ranks.

use std::collections::BTreeMap;

use crate::scalars::Scalar;

/// Sparse vector keyed by an ordered coordinate type.
pub type SparseVec<K, S> = BTreeMap<K, S>;

pub(crate) fn add_into<K: Ord, S: Scalar>(map: &mut BTreeMap<K, S>, key: K, c: S) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            o.get_mut().add_assign_ref(&c);
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn axpy<K: Ord + Clone, S: Scalar>(row: &mut SparseVec<K, S>, c: &S, other: &SparseVec<K, S>) {
    for (k, v) in other {
        add_into(row, k.clone(), c.mul_ref(v));
    }
}

/// A subspace kept in reduced row echelon form. Each basis row has
/// coefficient 1 at its pivot and 0 at every other pivot, so the rows
/// are the unique RREF basis of the span.
#[derive(Clone, Debug)]
pub struct Echelon<K, S> {
    rows: BTreeMap<K, SparseVec<K, S>>,
}

impl<K: Ord + Clone, S: Scalar> Default for Echelon<K, S> {
    fn default() -> Self {
        Self { rows: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, S: Scalar> Echelon<K, S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Rows by pivot, pivots ascending.
    pub fn rows(&self) -> &BTreeMap<K, SparseVec<K, S>> {
        &self.rows
    }

    /// `v` minus its projection onto the span along the pivots.
    pub fn remainder(&self, v: &SparseVec<K, S>) -> SparseVec<K, S> {
        let mut r = v.clone();
        for (p, row) in &self.rows {
            if let Some(c) = r.get(p).cloned() {
                axpy(&mut r, &-c, row);
            }
        }
        r
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVec<K, S>) -> bool {
        let r = self.remainder(v);
        let Some((lead, lc)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lc.inv().expect("nonzero pivot");
        let row: SparseVec<K, S> = r.iter().map(|(k, v)| (k.clone(), v.mul_ref(&inv))).collect();
        for other in self.rows.values_mut() {
            if let Some(c) = other.get(&lead).cloned() {
                axpy(other, &-c, &row);
            }
        }
        self.rows.insert(lead, row);
        true
    }

    /// Coordinates of `v` in the row basis, or `None` when `v` is outside the span.
    pub fn coordinates(&self, v: &SparseVec<K, S>) -> Option<SparseVec<K, S>> {
        if !self.remainder(v).is_empty() {
            return None;
        }
        Some(self.rows.keys().filter_map(|p| v.get(p).map(|c| (p.clone(), c.clone()))).collect())
    }
}

/// Kernel of the matrix with the given rows over columns `0..ncols`, one
/// basis vector per non-pivot column.
pub fn kernel<S: Scalar>(rows: impl IntoIterator<Item = SparseVec<usize, S>>, ncols: usize) -> Vec<SparseVec<usize, S>> {
    let mut ech = Echelon::new();
    for r in rows {
        ech.insert(&r);
    }
    (0..ncols)
        .filter(|c| !ech.rows.contains_key(c))
        .map(|free| {
            let mut v = BTreeMap::from([(free, S::one())]);
            for (&p, row) in &ech.rows {
                if let Some(c) = row.get(&free) {
                    v.insert(p, -c.clone());
                }
            }
            v
        })
        .collect()
}

/// Dimension of the span of `vectors`.
pub fn rank<K: Ord + Clone, S: Scalar>(vectors: impl IntoIterator<Item = SparseVec<K, S>>) -> usize {
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(&v);
    }
    ech.rank()
}
