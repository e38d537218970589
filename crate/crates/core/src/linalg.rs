//! Sparse exact row reduction over ℚ.
//!
//! Rows are kept with distinct pivots, the pivot being the smallest column
//! index present. `reduce` clears every pivot column from a vector, so the
//! result is a normal form modulo the span: two vectors are congruent iff
//! their reductions agree. Columns that never become pivots index a basis of
//! the quotient.

use crate::scalar::{Scalar, ScalarExt};
use std::collections::{BTreeMap, HashMap};

pub type SparseVec = BTreeMap<usize, Scalar>;

#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: HashMap<usize, SparseVec>,
}

fn axpy(v: &mut SparseVec, c: &Scalar, row: &SparseVec) {
    for (&k, a) in row {
        let e = v.entry(k).or_default();
        *e -= &Scalar::from(c * a);
        if e.is_zero() {
            v.remove(&k);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = &usize> {
        self.rows.keys()
    }

    /// Normal form of `v` modulo the row space.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(&k, _)| k).find(|k| self.rows.contains_key(k));
            let Some(k) = next else { break };
            let c = v[&k].clone();
            axpy(&mut v, &c, &self.rows[&k]);
            cursor = k + 1;
        }
        v
    }

    /// Adds `v` to the span; returns true when the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut r = self.reduce(v);
        let Some((&p, lead)) = r.iter().next() else { return false };
        let inv = Scalar::from(lead.recip_ref());
        for a in r.values_mut() {
            *a *= &inv;
        }
        // keep existing rows free of the new pivot so reduce stays a normal form
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&p).cloned() {
                axpy(row, &c, &r);
            }
        }
        r.retain(|_, a| !a.is_zero());
        self.rows.insert(p, r);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }
}

pub fn rank(rows: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Dense matrix helpers for the small modules.
pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(r: usize, c: usize) -> Matrix {
    vec![vec![Scalar::new(); c]; r]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::from(1);
    }
    m
}

pub fn cols(m: &Matrix) -> usize {
    m.first().map_or(0, Vec::len)
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, k, p) = (a.len(), b.len(), cols(b));
    let mut out = zeros(n, p);
    for i in 0..n {
        for j in 0..k {
            if a[i][j].is_zero() {
                continue;
            }
            for l in 0..p {
                out[i][l] += &Scalar::from(&a[i][j] * &b[j][l]);
            }
        }
    }
    out
}

pub fn matsub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| Scalar::from(p - q)).collect())
        .collect()
}

pub fn matscale(a: &Matrix, c: &Scalar) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| Scalar::from(x * c)).collect()).collect()
}

pub fn is_zero_matrix(a: &Matrix) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn sv(e: &[(usize, i64)]) -> SparseVec {
        e.iter().map(|&(k, c)| (k, int(c))).collect()
    }

    #[test]
    fn rank_and_reduce() {
        let mut e = Echelon::new();
        assert!(e.insert(sv(&[(0, 1), (1, 1)])));
        assert!(e.insert(sv(&[(1, 1), (2, 1)])));
        assert!(!e.insert(sv(&[(0, 1), (2, -1)])));
        assert_eq!(e.rank(), 2);
        // normal form only uses non-pivot column 2
        let r = e.reduce(sv(&[(0, 3)]));
        assert_eq!(r, sv(&[(2, 3)]));
        assert!(e.contains(&sv(&[(0, 2), (1, 4), (2, 2)])));
    }

    #[test]
    fn matrices() {
        let a = vec![vec![int(0), int(1)], vec![int(0), int(0)]];
        assert!(is_zero_matrix(&matmul(&a, &a)));
        assert_eq!(matmul(&identity(2), &a), a);
        assert_eq!(rank(vec![sv(&[(3, 2)]), sv(&[(3, -4)])]), 1);
    }
}
