//! The operators `φ_i` with `φ(t) = Σ φ_i t^i` on Fock space, fixed by
//! `φ(t)𝟙 = 𝟙` and `φ(t) ā(x) = P_a(t - x) ā(x) φ(t)` where
//! `P_e = p1`, `P_f = p2`, `P_ψ = p1·p2`.
//!
//! In components: `φ_i ā(m) = Σ_{r,j} P_r C(r,j) (-1)^j ā(m+j) φ_{i-r+j}`.

use crate::fock::{self, apply_bar_mode, FockMonomial, FockVector, Statistics};
use crate::par::{self, Exec};
use crate::scalar::{self, Scalar, ScalarExt};
use crate::series::TruncSeries;
use crate::Gen;
use dashmap::DashMap;
use rug::Integer;
use crate::report::CheckReport;
use serde_json::json;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhiError {
    #[error("phi index {0} is negative")]
    NegativeIndex(i64),
    #[error("invalid phi context: {0}")]
    InvalidContext(String),
}

pub struct PhiContext {
    p1: TruncSeries,
    p2: TruncSeries,
    /// Known coefficients of `P_e, P_f, P_ψ`.
    coeffs: [Vec<Scalar>; 3],
    stats: Statistics,
    cache: DashMap<(u32, FockMonomial), Arc<FockVector>>,
}

impl std::fmt::Debug for PhiContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhiContext")
            .field("p1", &self.p1)
            .field("p2", &self.p2)
            .field("stats", &self.stats)
            .field("cached", &self.cache.len())
            .finish()
    }
}

impl PhiContext {
    pub fn new(p1: TruncSeries, p2: TruncSeries, stats: Statistics) -> Result<Self, PhiError> {
        for (name, p) in [("p1", &p1), ("p2", &p2)] {
            if p.lo() < 0 || p.try_coeff(0) != Some(scalar::int(1)) {
                return Err(PhiError::InvalidContext(format!("{name} must be a power series with constant term 1")));
            }
        }
        let p12 = &p1 * &p2;
        let dense = |p: &TruncSeries| (0..p.trunc()).map(|k| p.coeff(k)).collect::<Vec<_>>();
        let coeffs = [dense(&p1), dense(&p2), dense(&p12)];
        Ok(PhiContext { p1, p2, coeffs, stats, cache: DashMap::new() })
    }

    /// `φ = identity` (`p1 = p2 = 1`).
    pub fn identity(stats: Statistics, trunc: i64) -> Self {
        Self::new(TruncSeries::one(trunc), TruncSeries::one(trunc), stats).expect("valid")
    }

    /// Context whose `φ` equals the square of this one: `(p1², p2²)`.
    pub fn squared(&self) -> Self {
        Self::new(&self.p1 * &self.p1, &self.p2 * &self.p2, self.stats).expect("valid")
    }

    pub fn p1(&self) -> &TruncSeries {
        &self.p1
    }

    pub fn p2(&self) -> &TruncSeries {
        &self.p2
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    /// Number of known series coefficients.
    pub fn series_order(&self) -> i64 {
        self.p1.trunc().min(self.p2.trunc())
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    pub fn clear_cache(&self) {
        self.cache.clear();
    }

    /// `P_a` coefficient of `t^r`.
    pub fn p_coeff(&self, a: Gen, r: usize) -> &Scalar {
        let c = &self.coeffs[a as usize];
        c.get(r).unwrap_or_else(|| {
            panic!(
                "series coefficient t^{r} of P_{} requested beyond truncation O(t^{}); raise the series truncation",
                a.name(),
                c.len()
            )
        })
    }

    /// `φ_i` on one monomial (memoized).
    pub fn phi_mono(&self, i: u32, mono: &FockMonomial) -> Arc<FockVector> {
        let key = (i, mono.clone());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let v = Arc::new(self.compute(i, mono));
        self.cache.insert(key, v.clone());
        v
    }

    fn compute(&self, i: u32, mono: &FockMonomial) -> FockVector {
        let Some(((g, k), rest)) = mono.split_first() else {
            return if i == 0 { FockVector::vacuum(self.stats) } else { FockVector::zero(self.stats) };
        };
        let w_rest = rest.weight() as i64;
        let k = k as i64;
        let mut out = FockVector::zero(self.stats);
        for kk in 0..=i {
            let inner = self.phi_mono(kk, &rest);
            if inner.is_zero() {
                continue;
            }
            let d = (i - kk) as usize;
            for j in 0..=(k + w_rest) as usize {
                let r = j + d;
                let p = self.p_coeff(g, r);
                if p.is_zero() {
                    continue;
                }
                let mut c = Scalar::from(p * Integer::from(Integer::binomial_u(r as u32, j as u32)));
                if j % 2 == 1 {
                    c = -c;
                }
                let t = apply_bar_mode(g, -k + j as i64, &inner);
                out.add_scaled(&t, &c);
            }
        }
        out
    }

    pub fn apply(&self, i: i64, v: &FockVector) -> Result<FockVector, PhiError> {
        if i < 0 {
            return Err(PhiError::NegativeIndex(i));
        }
        let mut out = FockVector::zero(v.stats());
        for (m, c) in v.terms() {
            out.add_scaled(&self.phi_mono(i as u32, m), c);
        }
        Ok(out)
    }

    /// `[φ_0 v, …, φ_imax v]`.
    pub fn apply_all(&self, imax: u32, v: &FockVector) -> Vec<FockVector> {
        (0..=imax as i64).map(|i| self.apply(i, v).expect("nonnegative")).collect()
    }
}

pub fn apply_phi(ctx: &PhiContext, i: i64, v: &FockVector) -> Result<FockVector, PhiError> {
    ctx.apply(i, v)
}

fn basis_vectors(weight_bound: u32, stats: Statistics) -> Vec<FockMonomial> {
    fock::enumerate_basis_upto(weight_bound, stats)
}

/// `φ_i` does not raise weight, and `φ_0 v ≡ v` modulo lower weight.
pub fn phi_preserves_filtration_check(ctx: &PhiContext, weight_bound: u32, exec: Exec) -> CheckReport {
    let imax = (ctx.series_order() - weight_bound as i64 - 1).max(0) as u32;
    let basis = basis_vectors(weight_bound, ctx.stats);
    let parts = par::map(exec, &basis, |m| {
        let mut r = CheckReport::new("phi-filtration");
        let w = m.weight();
        for i in 0..=imax {
            let v = ctx.phi_mono(i, m);
            let wt = v.weight().unwrap_or(0);
            r.check(wt <= w, || (format!("phi_{i}({m})"), json!({"weight": wt, "bound": w})));
            if i == 0 {
                let d = v.sub(&FockVector::monomial(m.clone(), ctx.stats));
                let ok = d.weight().map_or(true, |wt| wt < w);
                r.check(ok, || (format!("phi_0({m}) - {m}"), d.to_json()));
            }
        }
        r
    });
    CheckReport::fold("phi-filtration", parts)
}

/// `φ_i ā(m) v = Σ P_r C(r,j)(-1)^j ā(m+j) φ_{i-r+j} v` on arbitrary basis
/// vectors and modes (the recursion itself only uses leftmost creations).
pub fn commutation_check(ctx: &PhiContext, weight_bound: u32, imax: u32, exec: Exec) -> CheckReport {
    let basis = basis_vectors(weight_bound, ctx.stats);
    let wb = weight_bound as i64;
    let parts = par::map(exec, &basis, |m| {
        let mut r = CheckReport::new("phi-commutation");
        let v = FockVector::monomial(m.clone(), ctx.stats);
        let w = m.weight() as i64;
        let phis = ctx.apply_all(imax, &v);
        for g in Gen::ALL {
            for mode in -(wb + 1)..=(wb + 1) {
                let av = apply_bar_mode(g, mode, &v);
                for i in 0..=imax {
                    let lhs = ctx.apply(i as i64, &av).unwrap();
                    let mut rhs = FockVector::zero(ctx.stats);
                    for kk in 0..=i {
                        let d = (i - kk) as usize;
                        for j in 0..=(w - mode).max(-1) {
                            let j = j as usize;
                            let rr = j + d;
                            let mut c = Scalar::from(ctx.p_coeff(g, rr) * Integer::from(Integer::binomial_u(rr as u32, j as u32)));
                            if j % 2 == 1 {
                                c = -c;
                            }
                            rhs.add_scaled(&apply_bar_mode(g, mode + j as i64, &phis[kk as usize]), &c);
                        }
                    }
                    r.check(lhs == rhs, || {
                        (format!("phi_{i} {}({mode}) {m}", g.bar_name()), lhs.sub(&rhs).to_json())
                    });
                }
            }
        }
        r
    });
    CheckReport::fold("phi-commutation", parts)
}

/// `φ_i φ_j v = φ_j φ_i v` for `i + j ≤ order`.
pub fn commutativity_check(ctx: &PhiContext, weight_bound: u32, order: u32, exec: Exec) -> CheckReport {
    let basis = basis_vectors(weight_bound, ctx.stats);
    let parts = par::map(exec, &basis, |m| {
        let mut r = CheckReport::new("phi-commutativity");
        let v = FockVector::monomial(m.clone(), ctx.stats);
        let phis = ctx.apply_all(order, &v);
        for i in 0..=order {
            for j in (i + 1)..=(order - i) {
                let a = ctx.apply(i as i64, &phis[j as usize]).unwrap();
                let b = ctx.apply(j as i64, &phis[i as usize]).unwrap();
                r.check(a == b, || (format!("[phi_{i}, phi_{j}] {m}"), a.sub(&b).to_json()));
            }
        }
        r
    });
    CheckReport::fold("phi-commutativity", parts)
}

/// `d(φ_i v) - φ_i d(v) = (i+1) φ_{i+1} v`.
pub fn derivation_check(ctx: &PhiContext, weight_bound: u32, imax: u32, exec: Exec) -> CheckReport {
    let basis = basis_vectors(weight_bound, ctx.stats);
    let parts = par::map(exec, &basis, |m| {
        let mut r = CheckReport::new("phi-derivation");
        let v = FockVector::monomial(m.clone(), ctx.stats);
        let dv = fock::derivation(&v);
        for i in 0..=imax as i64 {
            let lhs = fock::derivation(&ctx.apply(i, &v).unwrap()).sub(&ctx.apply(i, &dv).unwrap());
            let rhs = ctx.apply(i + 1, &v).unwrap().scaled(&scalar::int(i + 1));
            r.check(lhs == rhs, || (format!("[d, phi_{i}] {m}"), lhs.sub(&rhs).to_json()));
        }
        r
    });
    CheckReport::fold("phi-derivation", parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};
    use crate::series::exp_scaled;

    fn generic(stats: Statistics) -> PhiContext {
        // asymmetric on purpose
        let p1 = TruncSeries::new(0, vec![int(1), int(2), frac(-1, 3), int(5)], 12);
        let p2 = exp_scaled(&frac(3, 2), 12);
        PhiContext::new(p1, p2, stats).unwrap()
    }

    fn mono(e: &[u32], f: &[u32], p: &[u32], s: Statistics) -> FockVector {
        FockVector::monomial(FockMonomial::new(e, f, p, s).unwrap(), s)
    }

    #[test]
    fn vacuum_rules() {
        let c = generic(Statistics::Plain);
        let one = FockVector::vacuum(Statistics::Plain);
        assert_eq!(c.apply(0, &one).unwrap(), one);
        for i in 1..5 {
            assert!(c.apply(i, &one).unwrap().is_zero());
        }
        assert_eq!(c.apply(-1, &one), Err(PhiError::NegativeIndex(-1)));
    }

    #[test]
    fn phi1_on_e() {
        let c = generic(Statistics::Plain);
        let v = mono(&[1], &[], &[], Statistics::Plain);
        assert_eq!(c.apply(1, &v).unwrap(), v.scaled(&int(2)));
    }

    #[test]
    fn identity_context() {
        for s in [Statistics::Plain, Statistics::Super] {
            let c = PhiContext::identity(s, 10);
            for m in fock::enumerate_basis_upto(4, s) {
                let v = FockVector::monomial(m.clone(), s);
                assert_eq!(c.apply(0, &v).unwrap(), v);
                for i in 1..5 {
                    assert!(c.apply(i, &v).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn structural_checks_generic() {
        for s in [Statistics::Plain, Statistics::Super] {
            let c = generic(s);
            assert!(phi_preserves_filtration_check(&c, 4, Exec::Sequential).passed());
            let r = commutation_check(&c, 2, 3, Exec::Sequential);
            assert!(r.passed(), "{:?}", r.witnesses);
            assert!(commutativity_check(&c, 3, 5, Exec::Sequential).passed());
            let r = derivation_check(&c, 3, 4, Exec::Sequential);
            assert!(r.passed(), "{:?}", r.witnesses);
        }
    }

    #[test]
    fn squared_context_is_composition() {
        let s = Statistics::Plain;
        let c = generic(s);
        let c2 = c.squared();
        for m in fock::enumerate_basis_upto(3, s) {
            let v = FockVector::monomial(m, s);
            let phis = c.apply_all(5, &v);
            for n in 0..=5i64 {
                let mut direct = FockVector::zero(s);
                for i in 0..=n {
                    direct = direct.add(&c.apply(n - i, &phis[i as usize]).unwrap());
                }
                assert_eq!(direct, c2.apply(n, &v).unwrap());
            }
        }
    }

    #[test]
    #[should_panic(expected = "beyond truncation")]
    fn short_series_is_loud() {
        let c = PhiContext::new(TruncSeries::one(2), TruncSeries::one(2), Statistics::Plain).unwrap();
        let v = mono(&[3], &[], &[], Statistics::Plain);
        let _ = c.apply(1, &v);
    }
}
