//! Polynomials and rational functions over ℚ, the inversion symmetry
//! `g(z)g(1/z) = 1`, canonical form `g = ±z^l p(z)/p̃(z)` and the
//! factorization `h(x) = ε q(x) q(-x)^{-1}`.

use crate::scalar::{self, format_scalar, Scalar, ScalarExt};
use crate::series::{exp_scaled, iota_exp, TruncSeries};
use rug::Integer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatFnError {
    #[error("g(z)g(1/z) != 1: {0}")]
    SymmetryViolated(String),
    #[error("numerator does not split over the rationals (irreducible factor {residual})")]
    IrrationalRoots { residual: String },
    #[error("invalid rational function: {0}")]
    InvalidInput(String),
    #[error("factorization identity failed: {0}")]
    FactorizationMismatch(String),
}

/// Dense polynomial, `coeffs[k]` multiplies `z^k`; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Scalar>);

impl Poly {
    pub fn new(mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| scalar::int(x)).collect())
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(scalar::int(1))
    }

    /// `z^k`.
    pub fn z_pow(k: usize) -> Self {
        let mut c = vec![Scalar::new(); k + 1];
        c[k] = scalar::int(1);
        Poly(c)
    }

    /// `z - r`.
    pub fn linear(r: &Scalar) -> Self {
        Poly(vec![Scalar::from(-r), scalar::int(1)])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Scalar {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, z: &Scalar) -> Scalar {
        let mut acc = Scalar::new();
        for c in self.0.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.0.iter().map(|a| Scalar::from(a * c)).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&Scalar::from(self.lc().recip_ref()))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut c = vec![Scalar::new(); n];
        for (i, a) in self.0.iter().enumerate() {
            c[i] += a;
        }
        for (i, a) in o.0.iter().enumerate() {
            c[i] += a;
        }
        Self::new(c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&scalar::int(-1)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Scalar::new(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += &Scalar::from(a * b);
            }
        }
        Self::new(c)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.0.clone();
        let dl = d.0.len();
        if r.len() < dl {
            return (Self::zero(), self.clone());
        }
        let inv = Scalar::from(d.lc().recip_ref());
        let mut q = vec![Scalar::new(); r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let c = Scalar::from(&r[k + dl - 1] * &inv);
            if !c.is_zero() {
                for (j, b) in d.0.iter().enumerate() {
                    r[k + j] -= &Scalar::from(&c * b);
                }
            }
            q[k] = c;
        }
        r.truncate(dl - 1);
        (Self::new(q), Self::new(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Coefficient reversal `z^{deg p} p(1/z)`.
    pub fn rev(&self) -> Self {
        Self::new(self.0.iter().rev().cloned().collect())
    }

    /// `p(-z)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { Scalar::from(-c) } else { c.clone() })
                .collect(),
        )
    }

    /// Splits `p = z^k · rest` with `rest(0) != 0`.
    pub fn strip_z(&self) -> (usize, Self) {
        let k = self.0.iter().take_while(|c| c.is_zero()).count();
        (k, Self::new(self.0[k..].to_vec()))
    }

    /// Rational roots with multiplicity (sorted) and the cofactor that has no
    /// rational roots.
    pub fn rational_roots(&self) -> (Vec<(Scalar, u32)>, Poly) {
        let mut out = Vec::new();
        if self.is_zero() {
            return (out, self.clone());
        }
        let (k, mut rest) = self.strip_z();
        if k > 0 {
            out.push((Scalar::new(), k as u32));
        }
        if rest.degree() > 0 {
            let ints = integer_coeffs(&rest);
            let a0 = ints[0].clone().abs();
            let an = ints.last().unwrap().clone().abs();
            let mut cands: Vec<Scalar> = Vec::new();
            for p in divisors(&a0) {
                for q in divisors(&an) {
                    let r = Scalar::from((p.clone(), q));
                    cands.push(r.clone());
                    cands.push(-r);
                }
            }
            cands.sort();
            cands.dedup();
            for r in cands {
                let lin = Poly::linear(&r);
                let mut m = 0;
                while rest.degree() > 0 && rest.eval(&r).is_zero() {
                    rest = rest.div_rem(&lin).0;
                    m += 1;
                }
                if m > 0 {
                    out.push((r, m));
                }
            }
        }
        out.sort();
        (out, rest)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_scalar).collect()
    }
}

fn integer_coeffs(p: &Poly) -> Vec<Integer> {
    let mut l = Integer::from(1);
    for c in p.coeffs() {
        l.lcm_mut(c.denom());
    }
    p.coeffs()
        .iter()
        .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
        .collect()
}

fn divisors(n: &Integer) -> Vec<Integer> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = Integer::from(1);
    while Integer::from(&d * &d) <= *n {
        if n.is_divisible(&d) {
            let other = Integer::from(n / &d);
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "scalar::serde_scalar_vec")] Vec<Scalar>);
        Ok(Poly::new(W::deserialize(d)?.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootMult {
    #[serde(with = "scalar::serde_scalar")]
    pub root: Scalar,
    pub mult: u32,
}

/// `num(z)/den(z)`, optionally with the rational roots of `num`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roots: Option<Vec<RootMult>>,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, RatFnError> {
        if den.is_zero() {
            return Err(RatFnError::InvalidInput("denominator is zero".into()));
        }
        Ok(RationalFn { num, den, roots: None })
    }

    pub fn with_roots(mut self, roots: Vec<RootMult>) -> Self {
        self.roots = Some(roots);
        self
    }

    pub fn from_ints(num: &[i64], den: &[i64]) -> Result<Self, RatFnError> {
        Self::new(Poly::from_ints(num), Poly::from_ints(den))
    }

    pub fn constant(c: Scalar) -> Self {
        RationalFn { num: Poly::constant(c), den: Poly::one(), roots: None }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn roots(&self) -> Option<&[RootMult]> {
        self.roots.as_deref()
    }

    /// Structural check used after deserializing.
    pub fn validate(&self) -> Result<(), RatFnError> {
        if self.den.is_zero() {
            return Err(RatFnError::InvalidInput("denominator is zero".into()));
        }
        Ok(())
    }

    /// `g(1/z)` as a rational function.
    pub fn reflected(&self) -> RationalFn {
        let (dn, dd) = (self.num.degree(), self.den.degree());
        let (mut n, mut d) = (self.num.rev(), self.den.rev());
        if dd >= dn {
            n = n.mul(&Poly::z_pow(dd - dn));
        } else {
            d = d.mul(&Poly::z_pow(dn - dd));
        }
        RationalFn { num: n, den: d, roots: None }
    }

    /// `self == other` as rational functions.
    pub fn same_function(&self, other: &RationalFn) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn { num: self.num.mul(&o.num), den: self.den.mul(&o.den), roots: None }
    }
}

/// `g(z) g(1/z) = 1`, tested as `N·rev(N)·z^{deg D} = D·rev(D)·z^{deg N}`.
pub fn check_symmetry(g: &RationalFn) -> bool {
    if g.num.is_zero() || g.den.is_zero() {
        return false;
    }
    let (dn, dd) = (g.num.degree(), g.den.degree());
    let lhs = g.num.mul(&g.num.rev()).mul(&Poly::z_pow(dd));
    let rhs = g.den.mul(&g.den.rev()).mul(&Poly::z_pow(dn));
    lhs == rhs
}

/// `g = sign · z^l · p(z) / p̃(z)` with `p` monic, `p(0) != 0`, `p̃ = z^n p(1/z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalG {
    pub sign: i32,
    pub l: i64,
    pub p: Poly,
    #[serde(with = "scalar::serde_scalar_vec")]
    pub roots: Vec<Scalar>,
    pub n: usize,
}

impl CanonicalG {
    pub fn p_tilde(&self) -> Poly {
        self.p.rev()
    }

    pub fn reconstruct(&self) -> RationalFn {
        let mut num = self.p.scale(&scalar::int(self.sign as i64));
        let mut den = self.p_tilde();
        if self.l >= 0 {
            num = num.mul(&Poly::z_pow(self.l as usize));
        } else {
            den = den.mul(&Poly::z_pow((-self.l) as usize));
        }
        RationalFn { num, den, roots: None }
    }

    /// `g(0)` when `g` is analytic and nonzero at the origin.
    pub fn alpha(&self) -> Option<Scalar> {
        if self.l != 0 {
            return None;
        }
        let zero = Scalar::new();
        let v = Scalar::from(self.p.eval(&zero) / self.p_tilde().eval(&zero));
        Some(v * self.sign)
    }

    /// `g(1)`, equal to `h(0)`.
    pub fn epsilon(&self) -> i32 {
        self.sign
    }
}

pub fn canonicalize(g: &RationalFn) -> Result<CanonicalG, RatFnError> {
    g.validate()?;
    if !check_symmetry(g) {
        return Err(RatFnError::SymmetryViolated(format!(
            "num={:?} den={:?}",
            g.num.to_strings(),
            g.den.to_strings()
        )));
    }
    if let Some(rs) = &g.roots {
        let mut prod = Poly::one();
        for r in rs {
            for _ in 0..r.mult {
                prod = prod.mul(&Poly::linear(&r.root));
            }
        }
        if prod != g.num.monic() {
            return Err(RatFnError::InvalidInput(
                "supplied roots do not multiply to the monic numerator".into(),
            ));
        }
    }
    let c = g.num.gcd(&g.den);
    let num = g.num.div_rem(&c).0;
    let den = g.den.div_rem(&c).0;
    let (a, p1) = num.strip_z();
    let (b, p2) = den.strip_z();
    let p = p1.monic();
    let pt = p.rev();
    let kappa = Scalar::from(p2.lc() / pt.lc());
    if pt.scale(&kappa) != p2 {
        return Err(RatFnError::SymmetryViolated("denominator is not a multiple of p~".into()));
    }
    let sign = Scalar::from(p1.lc() / kappa);
    let sign = if sign == 1 {
        1
    } else if sign == -1 {
        -1
    } else {
        return Err(RatFnError::SymmetryViolated(format!("leading ratio {}", format_scalar(&sign))));
    };
    let (rm, residual) = p.rational_roots();
    if residual.degree() > 0 {
        return Err(RatFnError::IrrationalRoots { residual: format!("{:?}", residual.to_strings()) });
    }
    let mut roots = Vec::new();
    for (r, m) in rm {
        debug_assert!(r != 1 && r != -1 && !r.is_zero());
        for _ in 0..m {
            roots.push(r.clone());
        }
    }
    let n = p.degree();
    Ok(CanonicalG { sign, l: a as i64 - b as i64, p, roots, n })
}

/// `h(x) = ι_{x,0} g(e^x)`, a power series because `g(1) = ±1`.
pub fn compute_h(cg: &CanonicalG, trunc: i64) -> TruncSeries {
    let h = iota_exp(&cg.reconstruct(), trunc);
    assert!(h.lo() >= 0 || h.is_zero(), "h has a pole at x=0");
    h
}

/// `h = epsilon · q(x) · q(-x)^{-1}` with `q(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HFactorization {
    pub h: TruncSeries,
    pub q: TruncSeries,
    pub epsilon: i32,
}

impl HFactorization {
    /// Trivial factorization `h = epsilon`, `q = 1`.
    pub fn trivial(epsilon: i32, trunc: i64) -> Self {
        HFactorization {
            h: TruncSeries::constant(scalar::int(epsilon as i64), trunc),
            q: TruncSeries::one(trunc),
            epsilon,
        }
    }

    /// `ε q(x) q(-x)^{-1} - h`.
    pub fn defect(&self) -> TruncSeries {
        let ratio = &self.q * &self.q.reflect().inv().expect("q(0) = 1");
        &ratio.scale(&scalar::int(self.epsilon as i64)) - &self.h
    }
}

pub fn factor_h(cg: &CanonicalG, trunc: i64) -> Result<HFactorization, RatFnError> {
    let h = compute_h(cg, trunc);
    let half = |k: i64| Scalar::from((k, 2));
    let mut q = &exp_scaled(&half(cg.l), trunc) * &exp_scaled(&half(-(cg.n as i64)), trunc);
    for r in &cg.roots {
        let mut lin = exp_scaled(&scalar::int(1), trunc);
        lin = &lin - &TruncSeries::constant(r.clone(), trunc);
        q = &q * &lin;
    }
    let q0 = q.coeff(0);
    if q0.is_zero() {
        return Err(RatFnError::FactorizationMismatch("q(0) = 0".into()));
    }
    let q = q.scale(&Scalar::from(q0.recip_ref()));
    let ratio = &q * &q.reflect().inv().expect("q(0) = 1");
    for eps in [1, -1] {
        if ratio.scale(&scalar::int(eps as i64)).agrees_with(&h) {
            if eps != cg.sign {
                return Err(RatFnError::FactorizationMismatch(format!(
                    "epsilon {eps} differs from g(1) = {}",
                    cg.sign
                )));
            }
            return Ok(HFactorization { h, q, epsilon: eps });
        }
    }
    Err(RatFnError::FactorizationMismatch("q(x)/q(-x) is not ±h".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn rf(n: &[i64], d: &[i64]) -> RationalFn {
        RationalFn::from_ints(n, d).unwrap()
    }

    #[test]
    fn symmetry_examples() {
        assert!(check_symmetry(&rf(&[-2, 1], &[1, -2])));
        assert!(check_symmetry(&rf(&[0, 0, -1], &[1])));
        assert!(!check_symmetry(&rf(&[1, 1], &[1])));
        assert!(check_symmetry(&rf(&[1], &[1])));
        assert!(check_symmetry(&rf(&[1], &[0, 1])));
    }

    #[test]
    fn canonical_examples() {
        let c = canonicalize(&rf(&[-2, 1], &[1, -2])).unwrap();
        assert_eq!((c.sign, c.l, c.n), (1, 0, 1));
        assert_eq!(c.roots, vec![int(2)]);
        assert_eq!(c.p_tilde(), Poly::from_ints(&[1, -2]));
        let c = canonicalize(&rf(&[0, 0, -1], &[1])).unwrap();
        assert_eq!((c.sign, c.l, c.n), (-1, 2, 0));
        // (z-2)(z-3) / ((1-2z)(1-3z))
        let g = rf(&[6, -5, 1], &[1, -5, 6]);
        let c = canonicalize(&g).unwrap();
        assert_eq!((c.sign, c.l), (1, 0));
        assert_eq!(c.roots, vec![int(2), int(3)]);
        assert!(c.reconstruct().same_function(&g));
        assert!(matches!(canonicalize(&rf(&[1, 1], &[1])), Err(RatFnError::SymmetryViolated(_))));
    }

    #[test]
    fn reciprocal_roots_cancel() {
        // -(z-2)(z-1/2) / ((1-2z)(1-z/2)) is the constant -1
        let num = Poly::linear(&int(2)).mul(&Poly::linear(&frac(1, 2))).scale(&int(-1));
        let den = Poly::from_ints(&[1, -2]).mul(&Poly::new(vec![int(1), frac(-1, 2)]));
        let c = canonicalize(&RationalFn::new(num, den).unwrap()).unwrap();
        assert_eq!((c.sign, c.l, c.n), (-1, 0, 0));
        assert_eq!(c.alpha(), Some(int(-1)));
    }

    #[test]
    fn irrational_roots_rejected() {
        // (z^2-3) / (1-3z^2) is symmetric, roots ±√3
        let g = rf(&[-3, 0, 1], &[1, 0, -3]);
        assert!(check_symmetry(&g));
        assert!(matches!(canonicalize(&g), Err(RatFnError::IrrationalRoots { .. })));
    }

    #[test]
    fn supplied_roots_checked() {
        let g = rf(&[-2, 1], &[1, -2]).with_roots(vec![RootMult { root: int(3), mult: 1 }]);
        assert!(canonicalize(&g).is_err());
        let g = rf(&[-2, 1], &[1, -2]).with_roots(vec![RootMult { root: int(2), mult: 1 }]);
        assert!(canonicalize(&g).is_ok());
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        let p = Poly::linear(&frac(2, 3)).mul(&Poly::linear(&frac(2, 3))).mul(&Poly::from_ints(&[1, 0, 1]));
        let (r, rest) = p.rational_roots();
        assert_eq!(r, vec![(frac(2, 3), 2)]);
        assert_eq!(rest.degree(), 2);
    }

    #[test]
    fn factor_examples() {
        let c = canonicalize(&rf(&[1], &[1])).unwrap();
        let f = factor_h(&c, 10).unwrap();
        assert_eq!((f.q.clone(), f.epsilon), (TruncSeries::one(10), 1));

        let c = canonicalize(&rf(&[-2, 1], &[1, -2])).unwrap();
        let f = factor_h(&c, 12).unwrap();
        assert_eq!(f.epsilon, 1);
        assert_eq!(f.h.coeff(0), int(1));
        assert_eq!(f.h.coeff(1), int(-3));
        assert!(f.defect().is_zero());

        let c = canonicalize(&rf(&[0, 0, -1], &[1])).unwrap();
        let f = factor_h(&c, 10).unwrap();
        assert_eq!(f.epsilon, -1);
        assert_eq!(f.q, exp_scaled(&int(1), 10));
    }

    #[test]
    fn reflected_roundtrip() {
        let g = rf(&[0, -2, 1], &[1, -2]);
        assert!(g.reflected().reflected().same_function(&g));
        assert!(rf(&[1], &[0, 1]).reflected().same_function(&rf(&[0, 1], &[1])));
    }
}
