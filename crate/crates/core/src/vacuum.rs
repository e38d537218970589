//! The vacuum 𝒜(h)-module on Fock space.
//!
//! Dressed modes `e(m) = Σ_i ē(m+i) φ_i`, `f(m) = Σ_i f̄(m+i) φ_i` and
//! `ψ(m) = Σ_{i,j} ψ̄(m+i+j) φ_i φ_j`. Mode convention `a(x) = Σ a_n x^{-n-1}`.
//!
//! Components of the defining relations (sums over `r ≥ 0`, `0 ≤ i ≤ r`):
//!
//! ```text
//! e_m e_n = Σ h_r C(r,i) (-1)^i     e_{n+r-i} e_{m+i}
//! f_m f_n = Σ h_r C(r,i) (-1)^{r-i} f_{n+r-i} f_{m+i}
//! ψ_m e_n = Σ h_r C(r,i) (-1)^i     e_{n+r-i} ψ_{m+i}
//! ψ_m f_n = Σ h_r C(r,i) (-1)^{r-i} f_{n+r-i} ψ_{m+i}
//! [e_m, f_n] = ψ_{m+n},   [ψ_m, ψ_n] = 0
//! ```
//!
//! On a vector of weight `W` only `r ≤ W - m - n` can contribute.

use crate::fock::{self, apply_bar_mode, FockMonomial, FockVector, Statistics};
use crate::linalg::{Echelon, SparseVec};
use crate::par::{self, Exec};
use crate::phi::{self, PhiContext};
use crate::ratfunc::{self, CanonicalG, HFactorization, RatFnError, RationalFn};
use crate::report::CheckReport;
use crate::scalar::{self, Scalar, ScalarExt};
use crate::series::TruncSeries;
use crate::Gen;
use rug::Integer;
use serde::Serialize;
use serde_json::json;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VacuumError {
    #[error(transparent)]
    RatFn(#[from] RatFnError),
    #[error("h(x)h(-x) != 1 up to truncation")]
    NotInvolutive,
    #[error("q must be a power series with q(0) = 1")]
    BadQ,
}

/// Series truncation that covers every coefficient touched by the relation
/// suite at `degree` with lowest mode `lo`.
pub fn required_trunc(degree: u32, lo: i64) -> i64 {
    let lo = lo.min(0);
    let wx = degree as i64 - lo;
    (2 * wx - lo + 2).max(degree as i64 + 4)
}

#[derive(Debug)]
pub struct AhContext {
    h: TruncSeries,
    factorization: HFactorization,
    canonical: Option<CanonicalG>,
    stats: Statistics,
    phi: PhiContext,
    phi2: PhiContext,
}

impl AhContext {
    pub fn from_g(g: &RationalFn, trunc: i64) -> Result<Self, VacuumError> {
        let cg = ratfunc::canonicalize(g)?;
        let f = ratfunc::factor_h(&cg, trunc)?;
        let mut ctx = Self::from_factorization(f)?;
        ctx.canonical = Some(cg);
        Ok(ctx)
    }

    /// `h = ε q(x) q(-x)^{-1}`; ε selects the plain or super Fock space.
    pub fn from_factorization(f: HFactorization) -> Result<Self, VacuumError> {
        if f.q.lo() != 0 || f.q.coeff(0) != 1 {
            return Err(VacuumError::BadQ);
        }
        if !(&f.h * &f.h.reflect()).agrees_with(&TruncSeries::one(f.h.trunc())) {
            return Err(VacuumError::NotInvolutive);
        }
        let stats = if f.epsilon == 1 { Statistics::Plain } else { Statistics::Super };
        let (phi, phi2) = Self::phis(&f.q, stats);
        Ok(AhContext { h: f.h.clone(), factorization: f, canonical: None, stats, phi, phi2 })
    }

    fn phis(q: &TruncSeries, stats: Statistics) -> (PhiContext, PhiContext) {
        let phi = PhiContext::new(q.reflect(), q.clone(), stats).expect("q(0) = 1");
        let phi2 = phi.squared();
        (phi, phi2)
    }

    /// Same `q`, different commutation rule for the Fock space.
    pub fn with_statistics(&self, stats: Statistics) -> Self {
        let (phi, phi2) = Self::phis(&self.factorization.q, stats);
        AhContext {
            h: self.h.clone(),
            factorization: self.factorization.clone(),
            canonical: self.canonical.clone(),
            stats,
            phi,
            phi2,
        }
    }

    /// Same realization, but relations are checked against a different `h`.
    pub fn with_relation_h(&self, h: TruncSeries) -> Self {
        let mut c = self.with_statistics(self.stats);
        c.h = h;
        c
    }

    pub fn h(&self) -> &TruncSeries {
        &self.h
    }

    pub fn factorization(&self) -> &HFactorization {
        &self.factorization
    }

    pub fn canonical(&self) -> Option<&CanonicalG> {
        self.canonical.as_ref()
    }

    pub fn epsilon(&self) -> i32 {
        self.factorization.epsilon
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn phi(&self) -> &PhiContext {
        &self.phi
    }

    pub fn h_coeff(&self, r: i64) -> Scalar {
        self.h.coeff(r)
    }

    pub fn clear_caches(&self) {
        self.phi.clear_cache();
        self.phi2.clear_cache();
    }

    fn phi_for(&self, g: Gen) -> &PhiContext {
        if g == Gen::Psi {
            &self.phi2
        } else {
            &self.phi
        }
    }

    /// `a(m) v` for the dressed generator `a`.
    pub fn apply_mode(&self, a: Gen, m: i64, v: &FockVector) -> FockVector {
        let Ok(w) = v.weight() else { return FockVector::zero(self.stats) };
        let top = w as i64 - m;
        if top < 0 {
            return FockVector::zero(self.stats);
        }
        let ph = self.phi_for(a);
        let mut out = FockVector::zero(self.stats);
        for i in 0..=top {
            let p = ph.apply(i, v).expect("nonnegative");
            out.add_scaled(&apply_bar_mode(a, m + i, &p), &scalar::int(1));
        }
        out
    }

    /// `a(m) X` for every `m` in `lo..=top(X)`, sharing the `φ_i X`.
    fn apply_mode_range(&self, a: Gen, lo: i64, v: &FockVector) -> Vec<(i64, FockVector)> {
        let Ok(w) = v.weight() else { return Vec::new() };
        let w = w as i64;
        if w - lo < 0 {
            return Vec::new();
        }
        let phis = self.phi_for(a).apply_all((w - lo) as u32, v);
        (lo..=w)
            .map(|m| {
                let mut out = FockVector::zero(self.stats);
                for i in 0..=(w - m) {
                    out.add_scaled(&apply_bar_mode(a, m + i, &phis[i as usize]), &scalar::int(1));
                }
                (m, out)
            })
            .collect()
    }

    /// `word[0] word[1] … 𝟙` with each letter `(gen, mode)`.
    pub fn apply_word(&self, word: &[(Gen, i64)], v: &FockVector) -> FockVector {
        let mut out = v.clone();
        for &(g, m) in word.iter().rev() {
            out = self.apply_mode(g, m, &out);
        }
        out
    }

    pub fn basis(&self, weight_bound: u32) -> Vec<FockMonomial> {
        fock::enumerate_basis_upto(weight_bound, self.stats)
    }
}

/// P-B-W vectors `e(-m1)…f(-n1)…ψ(-k1)…𝟙` of the given degree, indexed by
/// the Fock monomial with the same mode lists.
pub fn pbw_vectors(ctx: &AhContext, degree: u32) -> Vec<(FockMonomial, FockVector)> {
    fock::enumerate_basis(degree, ctx.stats)
        .into_iter()
        .map(|m| {
            let word: Vec<(Gen, i64)> = m.factors().map(|(g, k)| (g, -(k as i64))).collect();
            let v = ctx.apply_word(&word, &FockVector::vacuum(ctx.stats));
            (m, v)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PbwDegree {
    pub degree: u32,
    pub count: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PbwReport {
    pub degrees: Vec<PbwDegree>,
    pub passed: bool,
}

fn to_sparse(v: &FockVector, index: &mut HashMap<FockMonomial, usize>) -> SparseVec {
    v.terms()
        .map(|(m, c)| {
            let n = index.len();
            (*index.entry(m.clone()).or_insert(n), c.clone())
        })
        .collect()
}

pub fn verify_pbw_independence(ctx: &AhContext, degree_bound: u32, exec: Exec) -> PbwReport {
    let degrees: Vec<u32> = (0..=degree_bound).collect();
    let out = par::map(exec, &degrees, |&d| {
        let vs = pbw_vectors(ctx, d);
        let mut index = HashMap::new();
        let mut e = Echelon::new();
        for (_, v) in &vs {
            e.insert(to_sparse(v, &mut index));
        }
        PbwDegree { degree: d, count: vs.len(), rank: e.rank() }
    });
    let passed = out.iter().all(|d| d.rank == d.count);
    PbwReport { degrees: out, passed }
}

/// Relation identifiers used in reports.
pub const RELATIONS: [&str; 6] = ["ee", "ff", "psi-e", "psi-f", "e-f", "psi-psi"];

/// Products `Z_a Y_b v` for one basis vector.
struct Products {
    w: i64,
    lo: i64,
    stats: Statistics,
    single: HashMap<(Gen, i64), FockVector>,
    pair: HashMap<(Gen, Gen, i64, i64), FockVector>,
    zero: FockVector,
}

impl Products {
    fn build(ctx: &AhContext, v: &FockVector, lo: i64) -> Self {
        let w = v.weight().unwrap_or(0) as i64;
        let mut single = HashMap::new();
        let mut pair = HashMap::new();
        for y in Gen::ALL {
            for (b, yb) in ctx.apply_mode_range(y, lo, v) {
                for z in Gen::ALL {
                    for (a, zayb) in ctx.apply_mode_range(z, lo, &yb) {
                        if !zayb.is_zero() {
                            pair.insert((z, y, a, b), zayb);
                        }
                    }
                }
            }
        }
        // singles reach down to 2·lo for the e-f bracket
        for y in Gen::ALL {
            for (b, yb) in ctx.apply_mode_range(y, 2 * lo.min(0), v) {
                if !yb.is_zero() {
                    single.insert((y, b), yb);
                }
            }
        }
        Products { w, lo, stats: ctx.stats, single, pair, zero: FockVector::zero(ctx.stats) }
    }

    fn one(&self, y: Gen, b: i64) -> &FockVector {
        debug_assert!(b >= 2 * self.lo.min(0));
        self.single.get(&(y, b)).unwrap_or(&self.zero)
    }

    fn two(&self, z: Gen, y: Gen, a: i64, b: i64) -> &FockVector {
        assert!(a >= self.lo && b >= self.lo, "product index below the tabulated window");
        self.pair.get(&(z, y, a, b)).unwrap_or(&self.zero)
    }
}

/// `Σ_{r ≤ rmax} Σ_i h_r C(r,i) s(r,i) Z_{n+r-i} Y_{m+i} v`, `s = (-1)^i` or
/// `(-1)^{r-i}`.
fn twisted_sum(
    ctx: &AhContext,
    p: &Products,
    (z, y): (Gen, Gen),
    m: i64,
    n: i64,
    rmax: i64,
    sign_on_i: bool,
) -> FockVector {
    let mut out = FockVector::zero(p.stats);
    for r in 0..=rmax {
        let hr = ctx.h_coeff(r);
        if hr.is_zero() {
            continue;
        }
        for i in 0..=r {
            let t = p.two(z, y, n + r - i, m + i);
            if t.is_zero() {
                continue;
            }
            let parity = if sign_on_i { i } else { r - i };
            let mut c = Scalar::from(&hr * Integer::from(Integer::binomial_u(r as u32, i as u32)));
            if parity % 2 == 1 {
                c = -c;
            }
            out.add_scaled(t, &c);
        }
    }
    out
}

/// Direct evaluation of the `r = R + 1` layer, which must vanish.
fn guard_layer(ctx: &AhContext, v: &FockVector, (z, y): (Gen, Gen), m: i64, n: i64, r: i64) -> bool {
    (0..=r).all(|i| {
        let inner = ctx.apply_mode(y, m + i, v);
        ctx.apply_mode(z, n + r - i, &inner).is_zero()
    })
}

fn relation_checks(ctx: &AhContext, mono: &FockMonomial, window: (i64, i64)) -> [CheckReport; 7] {
    let v = FockVector::monomial(mono.clone(), ctx.stats);
    let p = Products::build(ctx, &v, window.0);
    let w = p.w;
    let mut reps: [CheckReport; 7] = [
        CheckReport::new(RELATIONS[0]),
        CheckReport::new(RELATIONS[1]),
        CheckReport::new(RELATIONS[2]),
        CheckReport::new(RELATIONS[3]),
        CheckReport::new(RELATIONS[4]),
        CheckReport::new(RELATIONS[5]),
        CheckReport::new("truncation-guard"),
    ];
    let loc = |rel: &str, m: i64, n: i64| format!("{rel} m={m} n={n} v={mono}");
    let twisted = [
        (0usize, (Gen::E, Gen::E), (Gen::E, Gen::E), true),
        (1, (Gen::F, Gen::F), (Gen::F, Gen::F), false),
        (2, (Gen::Psi, Gen::E), (Gen::E, Gen::Psi), true),
        (3, (Gen::Psi, Gen::F), (Gen::F, Gen::Psi), false),
    ];
    for m in window.0..=window.1 {
        for n in window.0..=window.1 {
            let rmax = w - m - n;
            for &(idx, lhs_pair, rhs_pair, sign_on_i) in &twisted {
                let lhs = p.two(lhs_pair.0, lhs_pair.1, m, n);
                let rhs = twisted_sum(ctx, &p, rhs_pair, m, n, rmax, sign_on_i);
                let d = lhs.sub(&rhs);
                reps[idx].check(d.is_zero(), || (loc(RELATIONS[idx], m, n), d.to_json()));
                if rmax >= -1 && (m == window.0 || n == window.0) {
                    let ok = guard_layer(ctx, &v, rhs_pair, m, n, rmax + 1);
                    reps[6].check(ok, || (loc("guard", m, n), json!({"r": rmax + 1})));
                }
            }
            let d = p
                .two(Gen::E, Gen::F, m, n)
                .sub(p.two(Gen::F, Gen::E, n, m))
                .sub(p.one(Gen::Psi, m + n));
            reps[4].check(d.is_zero(), || (loc("e-f", m, n), d.to_json()));
            let d = p.two(Gen::Psi, Gen::Psi, m, n).sub(p.two(Gen::Psi, Gen::Psi, n, m));
            reps[5].check(d.is_zero(), || (loc("psi-psi", m, n), d.to_json()));
        }
    }
    reps
}

/// All six relations on every basis vector of weight `≤ degree_bound` for
/// `(m, n)` in the window (inclusive). The last record is the runtime guard
/// that the `r = R + 1` layer of each twisted sum vanishes.
pub fn verify_relations(ctx: &AhContext, degree_bound: u32, window: (i64, i64), exec: Exec) -> Vec<CheckReport> {
    let basis = ctx.basis(degree_bound);
    let parts = par::map(exec, &basis, |m| relation_checks(ctx, m, window));
    let mut out: Vec<CheckReport> = RELATIONS
        .iter()
        .map(|s| CheckReport::new(s))
        .chain([CheckReport::new("truncation-guard")])
        .collect();
    for reps in parts {
        for (acc, r) in out.iter_mut().zip(reps) {
            acc.merge(r);
        }
    }
    out
}

/// `d(a(m)v) - a(m)d(v) = -m a(m-1) v` for the dressed modes, plus the
/// φ compatibility `[d, φ_i] = (i+1) φ_{i+1}` for `i ≤ phi_max`.
pub fn verify_derivation(
    ctx: &AhContext,
    degree_bound: u32,
    window: (i64, i64),
    phi_max: u32,
    exec: Exec,
) -> Vec<CheckReport> {
    let basis = ctx.basis(degree_bound);
    let parts = par::map(exec, &basis, |mono| {
        let mut r = CheckReport::new("derivation");
        let v = FockVector::monomial(mono.clone(), ctx.stats);
        let dv = fock::derivation(&v);
        for a in Gen::ALL {
            for m in window.0..=window.1 {
                let lhs = fock::derivation(&ctx.apply_mode(a, m, &v)).sub(&ctx.apply_mode(a, m, &dv));
                let rhs = ctx.apply_mode(a, m - 1, &v).scaled(&scalar::int(-m));
                let d = lhs.sub(&rhs);
                r.check(d.is_zero(), || (format!("{} m={m} v={mono}", a.name()), d.to_json()));
            }
        }
        r
    });
    let mut vac = CheckReport::new("derivation-vacuum");
    vac.check(fock::derivation(&FockVector::vacuum(ctx.stats)).is_zero(), || ("d(1)".into(), json!(null)));
    vec![
        CheckReport::fold("derivation", parts.into_iter().chain([vac])),
        phi::derivation_check(&ctx.phi, degree_bound, phi_max, exec),
    ]
}

/// The generator products: `e_0 f = ψ`, `e_n f = 0` for `n ≥ 1`, and
/// `ψ_n ψ = ψ_n e = ψ_n f = e_n e = f_n f = 0` for `n ≥ 0`.
pub fn remark_products(ctx: &AhContext, nmax: i64) -> CheckReport {
    let s = ctx.stats;
    let one = FockVector::vacuum(s);
    let gen_vec = |g: Gen| ctx.apply_mode(g, -1, &one);
    let (e, f, psi) = (gen_vec(Gen::E), gen_vec(Gen::F), gen_vec(Gen::Psi));
    let mut r = CheckReport::new("generator-products");
    let d = ctx.apply_mode(Gen::E, 0, &f).sub(&psi);
    r.check(d.is_zero(), || ("e_0 f - psi".into(), d.to_json()));
    for n in 1..=nmax {
        let t = ctx.apply_mode(Gen::E, n, &f);
        r.check(t.is_zero(), || (format!("e_{n} f"), t.to_json()));
    }
    let cases = [(Gen::Psi, &psi, "psi_n psi"), (Gen::Psi, &e, "psi_n e"), (Gen::Psi, &f, "psi_n f"), (Gen::E, &e, "e_n e"), (Gen::F, &f, "f_n f")];
    for (g, v, name) in cases {
        for n in 0..=nmax {
            let t = ctx.apply_mode(g, n, v);
            r.check(t.is_zero(), || (format!("{name} n={n}"), t.to_json()));
        }
    }
    r
}

/// Dressed modes coincide with bar modes (meaningful when `h = 1`).
pub fn degeneration_check(ctx: &AhContext, degree_bound: u32, window: (i64, i64), exec: Exec) -> CheckReport {
    let basis = ctx.basis(degree_bound);
    let parts = par::map(exec, &basis, |mono| {
        let mut r = CheckReport::new("degeneration");
        let v = FockVector::monomial(mono.clone(), ctx.stats);
        for a in Gen::ALL {
            for m in window.0..=window.1 {
                let d = ctx.apply_mode(a, m, &v).sub(&apply_bar_mode(a, m, &v));
                r.check(d.is_zero(), || (format!("{} m={m} v={mono}", a.name()), d.to_json()));
            }
        }
        r
    });
    CheckReport::fold("degeneration", parts)
}

/// `a(n) 𝟙 = 0` for `n ≥ 0`, and the filtration bound on basis vectors.
pub fn creation_and_filtration(ctx: &AhContext, degree_bound: u32, window: (i64, i64)) -> CheckReport {
    let mut r = CheckReport::new("creation-filtration");
    let one = FockVector::vacuum(ctx.stats);
    for a in Gen::ALL {
        for n in 0..=window.1.max(0) {
            let t = ctx.apply_mode(a, n, &one);
            r.check(t.is_zero(), || (format!("{}_{n} 1", a.name()), t.to_json()));
        }
    }
    for mono in ctx.basis(degree_bound) {
        let v = FockVector::monomial(mono.clone(), ctx.stats);
        for a in Gen::ALL {
            for m in window.0..=window.1 {
                let t = ctx.apply_mode(a, m, &v);
                let ok = t.weight().map_or(true, |w| w as i64 <= mono.weight() as i64 - m);
                r.check(ok, || (format!("{} m={m} v={mono}", a.name()), json!({"weight": t.weight().ok()})));
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(num: &[i64], den: &[i64], deg: u32, lo: i64) -> AhContext {
        let g = RationalFn::from_ints(num, den).unwrap();
        AhContext::from_g(&g, required_trunc(deg, lo)).unwrap()
    }

    #[test]
    fn statistics_follow_epsilon() {
        assert_eq!(ctx(&[1], &[1], 2, -2).stats(), Statistics::Plain);
        assert_eq!(ctx(&[0, 0, -1], &[1], 2, -2).stats(), Statistics::Super);
    }

    #[test]
    fn relations_small_generic() {
        for (n, d) in [(&[-2i64, 1][..], &[1i64, -2][..]), (&[0, 0, -1], &[1]), (&[-1], &[1]), (&[0, 1], &[1])] {
            let c = ctx(n, d, 2, -2);
            for r in verify_relations(&c, 2, (-2, 3), Exec::Sequential) {
                assert!(r.passed(), "{:?} {}", n, r.summary_line());
            }
        }
    }

    #[test]
    fn remark_and_creation() {
        let c = ctx(&[-2, 1], &[1, -2], 3, -3);
        assert!(remark_products(&c, 3).passed());
        assert!(creation_and_filtration(&c, 2, (-2, 3)).passed());
    }

    #[test]
    fn e0_f_is_psi_explicitly() {
        let c = ctx(&[0, 0, -1], &[1], 2, -2);
        let one = FockVector::vacuum(c.stats());
        let f = c.apply_mode(Gen::F, -1, &one);
        assert_eq!(c.apply_mode(Gen::E, 0, &f), c.apply_mode(Gen::Psi, -1, &one));
    }

    #[test]
    fn pbw_small() {
        let c = ctx(&[-2, 1], &[1, -2], 3, -3);
        let r = verify_pbw_independence(&c, 3, Exec::Sequential);
        assert!(r.passed);
        assert_eq!(r.degrees[2].count, 9);
    }

    #[test]
    fn derivation_small() {
        let c = ctx(&[-2, 1], &[1, -2], 2, -3);
        for r in verify_derivation(&c, 2, (-2, 3), 3, Exec::Sequential) {
            assert!(r.passed(), "{}", r.summary_line());
        }
    }

    #[test]
    fn corrupted_h_fails() {
        let c = ctx(&[-2, 1], &[1, -2], 2, -2);
        let mut coeffs: Vec<Scalar> = (0..c.h().trunc()).map(|k| c.h().coeff(k)).collect();
        coeffs[1] += 1;
        let bad = c.with_relation_h(TruncSeries::new(0, coeffs, c.h().trunc()));
        let reps = verify_relations(&bad, 2, (-2, 3), Exec::Sequential);
        assert!(reps.iter().any(|r| !r.passed()));
    }
}
