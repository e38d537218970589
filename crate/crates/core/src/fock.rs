//! Fock modules of the loop Heisenberg algebra `L(g)` and its super
//! counterpart: P-B-W monomials, bar-mode actions and the derivation.
//!
//! A monomial `ē(-m1)…f̄(-n1)…ψ̄(-k1)…𝟙` is stored as a sorted list of
//! 16-bit codes; ascending code order is exactly the normal form (all ē,
//! then f̄, then ψ̄, each block by decreasing mode).

use crate::scalar::{self, Scalar, ScalarExt};
use crate::Gen;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

const MODE_BITS: u16 = 12;
const MODE_MASK: u16 = (1 << MODE_BITS) - 1;
/// Largest `k` representable in a factor `a(-k)`.
pub const MAX_MODE: u32 = MODE_MASK as u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("weight of the zero vector is undefined")]
    ZeroVector,
    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),
}

/// Commutation rule for the generators.
///
/// `Super` uses the `Z2×Z2` color factor with `e=(1,0)`, `f=(0,1)`,
/// `ψ=(1,1)`: ē and f̄ anticommute among themselves and with ψ̄, while ē
/// with f̄ and ψ̄ with ψ̄ commute. `SuperKoszul` is the ordinary
/// superalgebra sign (ē, f̄ odd, ψ̄ even). Both share the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistics {
    Plain,
    Super,
    SuperKoszul,
}

impl Statistics {
    pub fn is_super(self) -> bool {
        !matches!(self, Statistics::Plain)
    }

    /// `c(a,b)` in `ab = [a,b]_c + c(a,b) ba`.
    pub fn sign(self, a: Gen, b: Gen) -> i32 {
        match self {
            Statistics::Plain => 1,
            Statistics::Super => {
                let deg = |g: Gen| match g {
                    Gen::E => (1, 0),
                    Gen::F => (0, 1),
                    Gen::Psi => (1, 1),
                };
                let (x, y) = (deg(a), deg(b));
                if (x.0 * y.0 + x.1 * y.1) % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
            Statistics::SuperKoszul => {
                if a != Gen::Psi && b != Gen::Psi {
                    -1
                } else {
                    1
                }
            }
        }
    }

    /// Coefficient `b` with `[a(m), b(n)]_c = b · ψ̄(m+n)`.
    fn bracket(self, a: Gen, b: Gen) -> i32 {
        match (a, b) {
            (Gen::E, Gen::F) => 1,
            (Gen::F, Gen::E) => -self.sign(Gen::F, Gen::E),
            _ => 0,
        }
    }
}

#[inline]
fn code(g: Gen, k: u32) -> u16 {
    debug_assert!(k >= 1 && k <= MAX_MODE);
    ((g as u16) << MODE_BITS) | (MODE_MASK - k as u16)
}

#[inline]
fn code_gen(c: u16) -> Gen {
    match c >> MODE_BITS {
        0 => Gen::E,
        1 => Gen::F,
        _ => Gen::Psi,
    }
}

#[inline]
fn code_k(c: u16) -> u32 {
    (MODE_MASK - (c & MODE_MASK)) as u32
}

/// P-B-W monomial; ordered by weight, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockMonomial {
    weight: u32,
    codes: Vec<u16>,
}

impl FockMonomial {
    pub fn vacuum() -> Self {
        FockMonomial { weight: 0, codes: Vec::new() }
    }

    fn from_codes(codes: Vec<u16>) -> Self {
        let weight = codes.iter().map(|&c| code_k(c)).sum();
        FockMonomial { weight, codes }
    }

    /// Modes are the positive `m` in `a(-m)`; any order is accepted. In the
    /// super case repeated ē or f̄ modes are rejected.
    pub fn new(e: &[u32], f: &[u32], psi: &[u32], stats: Statistics) -> Result<Self, FockError> {
        let mut codes = Vec::with_capacity(e.len() + f.len() + psi.len());
        for (g, ms) in [(Gen::E, e), (Gen::F, f), (Gen::Psi, psi)] {
            for &m in ms {
                if m == 0 || m > MAX_MODE {
                    return Err(FockError::InvalidMonomial(format!("mode {m} out of range")));
                }
                codes.push(code(g, m));
            }
        }
        codes.sort_unstable();
        if stats.is_super() && codes.windows(2).any(|w| w[0] == w[1] && code_gen(w[0]) != Gen::Psi) {
            return Err(FockError::InvalidMonomial("repeated odd factor in super space".into()));
        }
        Ok(Self::from_codes(codes))
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.codes.is_empty()
    }

    fn modes_of(&self, g: Gen) -> Vec<u32> {
        self.codes.iter().filter(|&&c| code_gen(c) == g).map(|&c| code_k(c)).collect()
    }

    pub fn e_modes(&self) -> Vec<u32> {
        self.modes_of(Gen::E)
    }

    pub fn f_modes(&self) -> Vec<u32> {
        self.modes_of(Gen::F)
    }

    pub fn psi_modes(&self) -> Vec<u32> {
        self.modes_of(Gen::Psi)
    }

    /// Factors left to right as `(generator, k)` meaning `a(-k)`.
    pub fn factors(&self) -> impl Iterator<Item = (Gen, u32)> + '_ {
        self.codes.iter().map(|&c| (code_gen(c), code_k(c)))
    }

    /// Leftmost factor and the monomial of the remaining factors.
    pub fn split_first(&self) -> Option<((Gen, u32), FockMonomial)> {
        let (&c, rest) = self.codes.split_first()?;
        Some(((code_gen(c), code_k(c)), Self::from_codes(rest.to_vec())))
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, k) in self.factors() {
            write!(f, "{}(-{k})", g.bar_name())?;
        }
        f.write_str("1")
    }
}

#[derive(Serialize, Deserialize)]
struct MonoJson {
    e: Vec<u32>,
    f: Vec<u32>,
    psi: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    mono: MonoJson,
    #[serde(with = "scalar::serde_scalar")]
    c: Scalar,
}

/// Sparse vector in the Fock basis; never stores zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockVector {
    stats: Statistics,
    terms: BTreeMap<FockMonomial, Scalar>,
}

impl FockVector {
    pub fn zero(stats: Statistics) -> Self {
        FockVector { stats, terms: BTreeMap::new() }
    }

    pub fn vacuum(stats: Statistics) -> Self {
        Self::monomial(FockMonomial::vacuum(), stats)
    }

    pub fn monomial(m: FockMonomial, stats: Statistics) -> Self {
        let mut t = BTreeMap::new();
        t.insert(m, scalar::int(1));
        FockVector { stats, terms: t }
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &FockMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Maximum weight among the terms.
    pub fn weight(&self) -> Result<u32, FockError> {
        self.terms.keys().map(|m| m.weight).max().ok_or(FockError::ZeroVector)
    }

    pub fn add_term(&mut self, m: FockMonomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &FockVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), &Scalar::from(a * c));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> FockVector {
        let mut out = FockVector::zero(self.stats);
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(other, &scalar::int(-1));
        out
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(other, &scalar::int(1));
        out
    }

    fn from_accum(stats: Statistics, acc: HashMap<Vec<u16>, Scalar>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (FockMonomial::from_codes(k), c))
            .collect();
        FockVector { stats, terms }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                mono: MonoJson { e: m.e_modes(), f: m.f_modes(), psi: m.psi_modes() },
                c: c.clone(),
            })
            .collect();
        serde_json::to_value(v).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value, stats: Statistics) -> Result<Self, String> {
        let terms: Vec<TermJson> = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        let mut out = FockVector::zero(stats);
        for t in terms {
            let m = FockMonomial::new(&t.mono.e, &t.mono.f, &t.mono.psi, stats).map_err(|e| e.to_string())?;
            out.add_term(m, &t.c);
        }
        Ok(out)
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})·{}", c, m)?;
        }
        Ok(())
    }
}

/// Straightening kernel: accumulates `prefix · a(m) · rest · 𝟙` into `out`.
fn act(
    stats: Statistics,
    a: Gen,
    m: i64,
    prefix: &mut Vec<u16>,
    rest: &[u16],
    coeff: &Scalar,
    out: &mut HashMap<Vec<u16>, Scalar>,
) {
    if m >= 0 && a == Gen::Psi {
        return;
    }
    let emit = |prefix: &Vec<u16>, mid: Option<u16>, tail: &[u16], out: &mut HashMap<Vec<u16>, Scalar>| {
        let mut k = Vec::with_capacity(prefix.len() + tail.len() + 1);
        k.extend_from_slice(prefix);
        k.extend(mid);
        k.extend_from_slice(tail);
        *out.entry(k).or_default() += coeff;
    };
    let Some((&x1, tail)) = rest.split_first() else {
        if m < 0 {
            emit(prefix, Some(code(a, (-m) as u32)), &[], out);
        }
        return;
    };
    let g1 = code_gen(x1);
    let n1 = -(code_k(x1) as i64);
    if m < 0 {
        let ca = code(a, (-m) as u32);
        if ca < x1 {
            emit(prefix, Some(ca), rest, out);
            return;
        }
        if ca == x1 {
            if stats.sign(a, a) == 1 {
                emit(prefix, Some(ca), rest, out);
            }
            return;
        }
    }
    let b = stats.bracket(a, g1);
    if b != 0 && m + n1 < 0 {
        let c = Scalar::from(coeff * b);
        act(stats, Gen::Psi, m + n1, prefix, tail, &c, out);
    }
    let c = Scalar::from(coeff * stats.sign(a, g1));
    prefix.push(x1);
    act(stats, a, m, prefix, tail, &c, out);
    prefix.pop();
}

/// `a(m) v` in the bar (free-field) algebra.
pub fn apply_bar_mode(a: Gen, m: i64, v: &FockVector) -> FockVector {
    let mut acc = HashMap::new();
    let mut prefix = Vec::new();
    for (mono, c) in &v.terms {
        if m > mono.weight as i64 {
            continue;
        }
        act(v.stats, a, m, &mut prefix, &mono.codes, c, &mut acc);
    }
    FockVector::from_accum(v.stats, acc)
}

/// `a(m)` applied to a single monomial.
pub fn apply_bar_mode_mono(a: Gen, m: i64, mono: &FockMonomial, stats: Statistics) -> FockVector {
    let mut acc = HashMap::new();
    if m <= mono.weight as i64 {
        act(stats, a, m, &mut Vec::new(), &mono.codes, &scalar::int(1), &mut acc);
    }
    FockVector::from_accum(stats, acc)
}

/// Applies `word[0](m0) word[1](m1) … v`, rightmost first.
pub fn apply_bar_word(word: &[(Gen, i64)], v: &FockVector) -> FockVector {
    let mut out = v.clone();
    for &(g, m) in word.iter().rev() {
        out = apply_bar_mode(g, m, &out);
    }
    out
}

/// The derivation `d(a(n)) = -n a(n-1)`, `d𝟙 = 0`.
pub fn derivation(v: &FockVector) -> FockVector {
    let stats = v.stats;
    let mut out = FockVector::zero(stats);
    for (mono, c) in &v.terms {
        let word: Vec<(Gen, i64)> = mono.factors().map(|(g, k)| (g, -(k as i64))).collect();
        for j in 0..word.len() {
            let (g, n) = word[j];
            let tail = FockVector::monomial(FockMonomial::from_codes(mono.codes[j + 1..].to_vec()), stats);
            let mut t = apply_bar_mode(g, n - 1, &tail);
            t = apply_bar_word(&word[..j], &t);
            out.add_scaled(&t, &Scalar::from(c * (-n)));
        }
    }
    out
}

fn partitions(n: u32, max: u32, strict: bool, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if n == 0 {
        out.push(cur.clone());
        return;
    }
    for p in (1..=max.min(n)).rev() {
        cur.push(p);
        let next = if strict { p - 1 } else { p };
        partitions(n - p, next, strict, cur, out);
        cur.pop();
    }
}

/// Partitions of `n` (weakly or strictly decreasing parts).
pub fn partitions_of(n: u32, strict: bool) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    partitions(n, n, strict, &mut Vec::new(), &mut out);
    out
}

/// All P-B-W monomials of the given weight, sorted.
pub fn enumerate_basis(weight: u32, stats: Statistics) -> Vec<FockMonomial> {
    let strict = stats.is_super();
    let mut out = Vec::new();
    let parts: Vec<(Vec<Vec<u32>>, Vec<Vec<u32>>)> = (0..=weight)
        .map(|w| (partitions_of(w, strict), partitions_of(w, false)))
        .collect();
    for a in 0..=weight {
        for b in 0..=weight - a {
            let c = weight - a - b;
            for pe in &parts[a as usize].0 {
                for pf in &parts[b as usize].0 {
                    for pp in &parts[c as usize].1 {
                        out.push(FockMonomial::new(pe, pf, pp, stats).expect("valid partition"));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Basis of all weights `0..=max_weight`.
pub fn enumerate_basis_upto(max_weight: u32, stats: Statistics) -> Vec<FockMonomial> {
    (0..=max_weight).flat_map(|w| enumerate_basis(w, stats)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn mono(e: &[u32], f: &[u32], p: &[u32], s: Statistics) -> FockVector {
        FockVector::monomial(FockMonomial::new(e, f, p, s).unwrap(), s)
    }

    #[test]
    fn e0_on_f_gives_psi() {
        for s in [Statistics::Plain, Statistics::Super, Statistics::SuperKoszul] {
            let v = apply_bar_mode(Gen::E, 0, &mono(&[], &[1], &[], s));
            assert_eq!(v, mono(&[], &[], &[1], s));
        }
    }

    #[test]
    fn creation_sorting_signs() {
        let p = apply_bar_mode(Gen::E, -1, &mono(&[2], &[], &[], Statistics::Plain));
        assert_eq!(p, mono(&[2, 1], &[], &[], Statistics::Plain));
        let s = apply_bar_mode(Gen::E, -1, &mono(&[2], &[], &[], Statistics::Super));
        assert_eq!(s, mono(&[2, 1], &[], &[], Statistics::Super).scaled(&int(-1)));
        let z = apply_bar_mode(Gen::E, -1, &mono(&[1], &[], &[], Statistics::Super));
        assert!(z.is_zero());
    }

    #[test]
    fn psi_annihilates_low_weight() {
        let v = apply_bar_mode(Gen::Psi, 2, &mono(&[1], &[], &[], Statistics::Plain));
        assert!(v.is_zero());
        let v = apply_bar_mode(Gen::Psi, 0, &mono(&[], &[], &[2], Statistics::Plain));
        assert!(v.is_zero());
    }

    #[test]
    fn color_signs_for_psi() {
        // ψ̄(-2) ē(-1) 𝟙 = c(ψ,e) ē(-1) ψ̄(-2) 𝟙
        let v = apply_bar_mode(Gen::Psi, -2, &mono(&[1], &[], &[], Statistics::Super));
        assert_eq!(v, mono(&[1], &[], &[2], Statistics::Super).scaled(&int(-1)));
        let v = apply_bar_mode(Gen::Psi, -2, &mono(&[1], &[], &[], Statistics::SuperKoszul));
        assert_eq!(v, mono(&[1], &[], &[2], Statistics::SuperKoszul));
    }

    #[test]
    fn weights() {
        let s = Statistics::Plain;
        assert_eq!(FockVector::vacuum(s).weight().unwrap(), 0);
        assert_eq!(mono(&[3], &[], &[1], s).weight().unwrap(), 4);
        assert_eq!(mono(&[1], &[], &[], s).add(&mono(&[], &[2], &[], s)).weight().unwrap(), 2);
        assert_eq!(FockVector::zero(s).weight(), Err(FockError::ZeroVector));
    }

    #[test]
    fn basis_counts_small() {
        assert_eq!(enumerate_basis(0, Statistics::Plain).len(), 1);
        assert_eq!(enumerate_basis(2, Statistics::Plain).len(), 9);
        assert_eq!(enumerate_basis(2, Statistics::Super).len(), 7);
    }

    #[test]
    fn derivation_examples() {
        let s = Statistics::Plain;
        assert!(derivation(&FockVector::vacuum(s)).is_zero());
        assert_eq!(derivation(&mono(&[1], &[], &[], s)), mono(&[2], &[], &[], s));
        // d(ē(-1)ē(-1)𝟙) = 2 ē(-2)ē(-1)𝟙
        assert_eq!(derivation(&mono(&[1, 1], &[], &[], s)), mono(&[2, 1], &[], &[], s).scaled(&int(2)));
    }

    #[test]
    fn json_roundtrip() {
        let s = Statistics::Super;
        let v = mono(&[2, 1], &[1], &[1, 1], s).scaled(&scalar::frac(-3, 4));
        let j = v.to_json();
        assert_eq!(FockVector::from_json(&j, s).unwrap(), v);
        assert!(FockVector::from_json(&serde_json::json!([{"mono": {"e": [1, 1], "f": [], "psi": []}, "c": "1"}]), s).is_err());
    }
}
