//! Truncated Verma-type modules `M(U)` and graded relation checks.
//!
//! `M(U)[d]` is approximated by words of at most `word_cap` letters applied to
//! `U`, every intermediate degree kept in `[0, D]`. Positive modes kill `U`,
//! degree-zero modes act through the A[α]-module, and a vector of negative
//! degree is zero. The relation subspace is spanned by `P · r · S ⊗ u` for
//! every relation instance `r`, suffix word `S` and prefix word `P` within the
//! cap; the quotient is taken degree by degree with exact row reduction.
//! Columns are ordered longest word first, so the surviving basis consists of
//! the shortest available words.

use super::{letter_string, AAlphaModule, ComponentTable, DiError, Letter, Relation};
use crate::linalg::{Echelon, SparseVec};
use crate::par::{self, Exec};
use crate::report::CheckReport;
use crate::scalar::{self, Scalar, ScalarExt};
use crate::Gen;
use serde::{Serialize, Serializer};
use serde_json::json;
use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};

/// Word in application order (`w[0]` acts first) tensored with basis vector
/// `u` of `U`.
type Column = (Vec<Letter>, usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisWord {
    /// Written left to right, e.g. `"E_-1 F_-1"`; empty for a vector of `U`.
    pub word: String,
    pub u: usize,
    pub len: usize,
}

/// Images of basis vectors; `None` where the image needs a word beyond the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub gen: Gen,
    pub mode: i64,
    pub from: u32,
    pub to: u32,
    pub columns: Vec<Option<Vec<Scalar>>>,
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cols: Vec<Option<Vec<String>>> = self
            .columns
            .iter()
            .map(|c| c.as_ref().map(|v| v.iter().map(scalar::format_scalar).collect()))
            .collect();
        json!({"gen": self.gen, "mode": self.mode, "from": self.from, "to": self.to, "columns": cols}).serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedModule {
    #[serde(with = "scalar::serde_scalar")]
    pub alpha: Scalar,
    pub degree_bound: u32,
    pub word_cap: u32,
    pub dims: Vec<usize>,
    /// Dimensions at `word_cap + 1`.
    pub dims_next: Vec<usize>,
    pub stabilized: Vec<bool>,
    pub basis: Vec<Vec<BasisWord>>,
    pub actions: Vec<Action>,
}

impl GradedModule {
    pub fn action(&self, g: Gen, mode: i64, from: u32) -> Option<&Action> {
        self.actions.iter().find(|a| a.gen == g && a.mode == mode && a.from == from)
    }

    fn action_index(&self) -> HashMap<(Gen, i64, u32), &Action> {
        self.actions.iter().map(|a| ((a.gen, a.mode, a.from), a)).collect()
    }

    /// `X_n` on a vector of degree `d`; `Some(0)` when the target degree is
    /// negative, `None` when it is beyond the bound or the image is undefined.
    fn apply(idx: &HashMap<(Gen, i64, u32), &Action>, dims: &[usize], (g, n): Letter, d: i64, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let t = d - n;
        if t < 0 {
            return Some(Vec::new());
        }
        if t as usize >= dims.len() {
            return None;
        }
        let mut out = vec![Scalar::new(); dims[t as usize]];
        if v.iter().all(ScalarExt::is_zero) {
            return Some(out);
        }
        let a = idx.get(&(g, n, d as u32))?;
        for (j, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let col = a.columns[j].as_ref()?;
            for (o, x) in out.iter_mut().zip(col) {
                *o += &Scalar::from(c * x);
            }
        }
        Some(out)
    }
}

struct Builder<'a> {
    table: &'a ComponentTable,
    u: &'a AAlphaModule,
    dmax: i64,
    cap: usize,
    index: Vec<HashMap<Column, usize>>,
    columns: Vec<Vec<Column>>,
    ech: Vec<Echelon>,
}

impl<'a> Builder<'a> {
    fn letters_from(&self, d: i64) -> Vec<Letter> {
        let mut out = Vec::new();
        for g in Gen::ALL {
            for t in 0..=self.dmax {
                out.push((g, d - t));
            }
        }
        out
    }

    /// Words of length `k` starting at degree `d0`, with end degree.
    fn prefixes(&self, d0: i64, k: usize) -> Vec<(Vec<Letter>, i64)> {
        let mut layer = vec![(Vec::new(), d0)];
        for _ in 0..k {
            let mut next = Vec::new();
            for (w, d) in &layer {
                for l in self.letters_from(*d) {
                    let mut w2 = w.clone();
                    w2.push(l);
                    next.push((w2, d - l.1));
                }
            }
            layer = next;
        }
        layer
    }

    fn new(table: &'a ComponentTable, u: &'a AAlphaModule, dmax: u32, cap: u32) -> Self {
        let dmax = dmax as i64;
        let cap = cap as usize;
        let mut b = Builder { table, u, dmax, cap, index: Vec::new(), columns: Vec::new(), ech: Vec::new() };
        let mut by_degree: Vec<Vec<Column>> = vec![Vec::new(); dmax as usize + 1];
        let mut layer: Vec<(Vec<Letter>, i64)> = vec![(Vec::new(), 0)];
        for len in 0..=cap {
            for (w, d) in &layer {
                for j in 0..u.dim {
                    by_degree[*d as usize].push((w.clone(), j));
                }
            }
            if len == cap {
                break;
            }
            let mut next = Vec::new();
            for (w, d) in &layer {
                for l in b.letters_from(*d) {
                    if w.is_empty() && l.1 >= 0 {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.push(l);
                    next.push((w2, d - l.1));
                }
            }
            layer = next;
        }
        for cols in &mut by_degree {
            cols.sort_by_key(|(w, j)| {
                let nonstandard = w.iter().any(|l| l.1 >= 0);
                (Reverse(w.len()), Reverse(nonstandard), w.iter().rev().map(|&(g, n)| (n, g)).collect::<Vec<_>>(), *j)
            });
        }
        b.index = by_degree.iter().map(|cols| cols.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()).collect();
        b.columns = by_degree;
        b.ech = vec![Echelon::new(); dmax as usize + 1];
        b
    }

    /// Adds `c · word ⊗ u_j` in column coordinates. Words passing through a
    /// negative degree vanish; `false` if the word leaves `[0, D]` upward.
    fn push_term(&self, word: &[Letter], j: usize, c: &Scalar, out: &mut SparseVec) -> bool {
        let mut d = 0;
        let mut high = false;
        for &(_, n) in word {
            d -= n;
            if d < 0 {
                return true;
            }
            high |= d > self.dmax;
        }
        if high {
            return false;
        }
        self.push_normalized(word, j, c, out, d as usize);
        true
    }

    fn push_normalized(&self, word: &[Letter], j: usize, c: &Scalar, out: &mut SparseVec, d: usize) {
        match word.first() {
            Some(&(g, 0)) => {
                let a = self.u.matrix(g);
                for i in 0..self.u.dim {
                    if !a[i][j].is_zero() {
                        self.push_normalized(&word[1..], i, &Scalar::from(c * &a[i][j]), out, d);
                    }
                }
            }
            Some(&(_, n)) if n > 0 => {}
            _ => {
                let k = self.index[d][&(word.to_vec(), j)];
                let e = out.entry(k).or_default();
                *e += c;
                if e.is_zero() {
                    out.remove(&k);
                }
            }
        }
    }

    fn mode_range(&self, dx: i64) -> std::ops::RangeInclusive<i64> {
        (dx - self.dmax)..=self.dmax
    }

    fn impose_relations(&mut self) {
        let mut rows: Vec<(usize, SparseVec)> = Vec::new();
        for dx in 0..=self.dmax {
            for (s, j) in &self.columns[dx as usize] {
                if s.len() + 2 > self.cap {
                    continue;
                }
                for rel in Relation::ALL {
                    for m in self.mode_range(dx) {
                        for n in self.mode_range(dx) {
                            let t = dx - m - n;
                            if t < 0 || t > self.dmax || (rel == Relation::PsiPsi && m >= n) {
                                continue;
                            }
                            let terms = rel.terms(self.table, m, n, dx);
                            for k in 0..=(self.cap - 2 - s.len()) {
                                for (p, end) in self.prefixes(t, k) {
                                    let mut row = SparseVec::new();
                                    let mut ok = true;
                                    for (w, c) in &terms {
                                        let mut full = s.clone();
                                        full.extend(w.iter().rev());
                                        full.extend(&p);
                                        ok &= self.push_term(&full, *j, c, &mut row);
                                    }
                                    if ok && !row.is_empty() {
                                        rows.push((end as usize, row));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for (d, r) in rows {
            self.ech[d].insert(r);
        }
    }

    fn basis(&self, d: usize) -> Vec<usize> {
        (0..self.columns[d].len()).filter(|k| !self.ech[d].is_pivot(*k)).collect()
    }

    fn dims(&self) -> Vec<usize> {
        (0..=self.dmax as usize).map(|d| self.basis(d).len()).collect()
    }

    /// Lost dimensions of `U` in degree 0.
    fn collapsed(&self) -> usize {
        (0..self.u.dim).filter(|&j| self.ech[0].is_pivot(self.index[0][&(Vec::new(), j)])).count()
    }
}

fn quotient<'a>(table: &'a ComponentTable, u: &'a AAlphaModule, dmax: u32, cap: u32) -> Builder<'a> {
    let mut b = Builder::new(table, u, dmax, cap);
    b.impose_relations();
    b
}

fn assemble(b: &Builder, alpha: Scalar, dims_next: Vec<usize>) -> GradedModule {
    let dmax = b.dmax;
    let bases: Vec<Vec<usize>> = (0..=dmax as usize).map(|d| b.basis(d)).collect();
    let pos: Vec<HashMap<usize, usize>> = bases.iter().map(|bs| bs.iter().enumerate().map(|(i, &k)| (k, i)).collect()).collect();
    let mut actions = Vec::new();
    for d in 0..=dmax {
        for g in Gen::ALL {
            for t in 0..=dmax {
                let n = d - t;
                let columns = bases[d as usize]
                    .iter()
                    .map(|&k| {
                        let (w, j) = &b.columns[d as usize][k];
                        if w.len() >= b.cap {
                            return None;
                        }
                        let mut word = w.clone();
                        word.push((g, n));
                        let mut v = SparseVec::new();
                        assert!(b.push_term(&word, *j, &scalar::int(1), &mut v));
                        let v = b.ech[t as usize].reduce(v);
                        let mut dense = vec![Scalar::new(); bases[t as usize].len()];
                        for (c, x) in v {
                            dense[pos[t as usize][&c]] = x;
                        }
                        Some(dense)
                    })
                    .collect();
                actions.push(Action { gen: g, mode: n, from: d as u32, to: t as u32, columns });
            }
        }
    }
    let basis = bases
        .iter()
        .enumerate()
        .map(|(d, bs)| {
            bs.iter()
                .map(|&k| {
                    let (w, j) = &b.columns[d][k];
                    let word = w.iter().rev().map(letter_string).collect::<Vec<_>>().join(" ");
                    BasisWord { word, u: *j, len: w.len() }
                })
                .collect()
        })
        .collect();
    let dims = b.dims();
    let stabilized = dims.iter().zip(&dims_next).map(|(a, b)| a == b).collect();
    GradedModule { alpha, degree_bound: dmax as u32, word_cap: b.cap as u32, dims, dims_next, stabilized, basis, actions }
}

/// Builds `M(U)` up to degree `dmax` with words of at most `word_cap` letters,
/// and again at `word_cap + 1` for the stabilization flags.
///
/// The A[α] relations on `u` are not checked first: if they fail, the
/// degree-zero relations collapse part of `U` and the error says so.
pub fn build_verma(table: &ComponentTable, u: &AAlphaModule, dmax: u32, word_cap: u32) -> Result<GradedModule, DiError> {
    Ok(verma_sweep(table, u, dmax, &[word_cap])?.remove(0))
}

/// `build_verma` for several caps, sharing the quotient computations.
pub fn verma_sweep(table: &ComponentTable, u: &AAlphaModule, dmax: u32, caps: &[u32]) -> Result<Vec<GradedModule>, DiError> {
    let alpha = table.alpha()?;
    u.validate()?;
    if table.trunc() <= 2 * dmax as i64 + 1 {
        return Err(DiError::InvalidModule(format!("component table truncation {} too short for degree {dmax}", table.trunc())));
    }
    let mut built: BTreeMap<u32, Builder> = BTreeMap::new();
    for &c in caps {
        for cap in [c, c + 1] {
            if !built.contains_key(&cap) {
                built.insert(cap, quotient(table, u, dmax, cap));
            }
        }
    }
    caps.iter()
        .map(|&c| {
            let b = &built[&c];
            let lost = b.collapsed();
            if lost > 0 {
                return Err(DiError::RelationInconsistency { lost, dim: u.dim, cap: c });
            }
            Ok(assemble(b, alpha.clone(), built[&(c + 1)].dims()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeResult {
    pub degree: u32,
    pub stabilized: bool,
    pub checked: usize,
    pub failed: usize,
    /// Instances needing an action beyond the word cap.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedReport {
    pub checks: Vec<CheckReport>,
    pub per_degree: Vec<DegreeResult>,
    pub passed: bool,
}

impl GradedReport {
    /// All checks on stabilized degrees pass.
    pub fn passed_on_stabilized(&self) -> bool {
        self.per_degree.iter().all(|d| !d.stabilized || d.failed == 0)
    }
}

fn eval_word(idx: &HashMap<(Gen, i64, u32), &Action>, dims: &[usize], word: &[Letter], d: i64, v: &[Scalar]) -> Option<(i64, Vec<Scalar>)> {
    let mut cur = v.to_vec();
    let mut deg = d;
    for &l in word.iter().rev() {
        if deg < 0 {
            return Some((deg, Vec::new()));
        }
        cur = GradedModule::apply(idx, dims, l, deg, &cur)?;
        deg -= l.1;
    }
    Some((deg, cur))
}

/// All six relations on each basis vector, using only the action matrices.
/// The `l`-sums stop at `l = d - m` by the grading.
pub fn verify_graded_relations(table: &ComponentTable, w: &GradedModule, dmax: u32, exec: Exec) -> GradedReport {
    let dmax = dmax.min(w.degree_bound) as i64;
    let idx = w.action_index();
    let items: Vec<(i64, usize)> = (0..=dmax).flat_map(|d| (0..w.dims[d as usize]).map(move |b| (d, b))).collect();
    let parts = par::map(exec, &items, |&(d, b)| {
        let mut reps: Vec<CheckReport> = Relation::ALL.iter().map(|r| CheckReport::new(r.name())).collect();
        let mut skipped = 0;
        let mut e = vec![Scalar::new(); w.dims[d as usize]];
        e[b] = scalar::int(1);
        for (ri, rel) in Relation::ALL.iter().enumerate() {
            for m in (d - dmax)..=dmax {
                for n in (d - dmax)..=dmax {
                    let t = d - m - n;
                    if t < 0 || t > dmax {
                        continue;
                    }
                    let mut acc = vec![Scalar::new(); w.dims[t as usize]];
                    let mut defined = true;
                    for (word, c) in rel.terms(table, m, n, d) {
                        match eval_word(&idx, &w.dims, &word, d, &e) {
                            Some((_, v)) => {
                                for (a, x) in acc.iter_mut().zip(&v) {
                                    *a += &Scalar::from(&c * x);
                                }
                            }
                            None => defined = false,
                        }
                    }
                    if !defined {
                        skipped += 1;
                        continue;
                    }
                    let ok = acc.iter().all(ScalarExt::is_zero);
                    reps[ri].check(ok, || {
                        (
                            format!("{} m={m} n={n} degree={d} basis={b} ({})", rel.name(), w.basis[d as usize][b].word),
                            json!(acc.iter().map(scalar::format_scalar).collect::<Vec<_>>()),
                        )
                    });
                }
            }
        }
        (d, reps, skipped)
    });
    let mut checks: Vec<CheckReport> = Relation::ALL.iter().map(|r| CheckReport::new(r.name())).collect();
    let mut per_degree: Vec<DegreeResult> = (0..=dmax)
        .map(|d| DegreeResult { degree: d as u32, stabilized: w.stabilized[d as usize], checked: 0, failed: 0, skipped: 0 })
        .collect();
    for (d, reps, skipped) in parts {
        let pd = &mut per_degree[d as usize];
        pd.skipped += skipped;
        for (acc, r) in checks.iter_mut().zip(reps) {
            pd.checked += r.checked;
            pd.failed += r.failed;
            acc.merge(r);
        }
    }
    let passed = checks.iter().all(CheckReport::passed);
    GradedReport { checks, per_degree, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ding_iohara::component_table;
    use crate::linalg;
    use crate::ratfunc::{canonicalize, RationalFn};
    use crate::scalar::int;

    fn table(num: &[i64], den: &[i64]) -> ComponentTable {
        component_table(&canonicalize(&RationalFn::from_ints(num, den).unwrap()).unwrap(), 10)
    }

    #[test]
    fn trivial_degree_zero() {
        let t = table(&[-2, 1], &[1, -2]);
        let m = build_verma(&t, &AAlphaModule::trivial(), 0, 2).unwrap();
        assert_eq!(m.dims, vec![1]);
        for a in &m.actions {
            assert!(a.columns.iter().flatten().all(|c| c.iter().all(ScalarExt::is_zero)));
        }
    }

    #[test]
    fn inconsistent_module_detected() {
        let t = table(&[1], &[1]);
        let z = linalg::zeros(1, 1);
        let u = AAlphaModule::new(z.clone(), z, vec![vec![int(3)]]).unwrap();
        assert!(matches!(build_verma(&t, &u, 1, 2), Err(DiError::RelationInconsistency { lost: 1, .. })));
    }

    #[test]
    fn minus_one_small() {
        let t = table(&[-1], &[1]);
        let u = AAlphaModule::u_lambda(&int(2));
        let m = build_verma(&t, &u, 1, 2).unwrap();
        assert_eq!(m.dims, vec![2, 6]);
        let r = verify_graded_relations(&t, &m, 1, Exec::Sequential);
        assert!(r.passed_on_stabilized(), "{:?}", r.per_degree);
    }

    #[test]
    fn corrupted_action_fails() {
        let t = table(&[-1], &[1]);
        let u = AAlphaModule::u_lambda(&int(2));
        let mut m = build_verma(&t, &u, 1, 3).unwrap();
        let a = m.actions.iter_mut().find(|a| a.gen == Gen::F && a.mode == -1 && a.from == 0).unwrap();
        let col = a.columns[0].as_mut().unwrap();
        col[0] += 1;
        let r = verify_graded_relations(&t, &m, 1, Exec::Sequential);
        assert!(!r.passed);
        assert!(r.checks.iter().any(|c| !c.witnesses.is_empty()));
    }
}
