//! Truncated Laurent series in one variable, the diagonal two-variable
//! expansions, and the expansion maps for rational functions.

use crate::ratfunc::{Poly, RationalFn};
use crate::scalar::{self, Scalar, ScalarExt};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series is zero up to x^{trunc}; no inverse")]
    ZeroLeadingTerm { trunc: i64 },
}

/// `Σ_{k=lo}^{trunc-1} c_k x^k + O(x^trunc)`.
///
/// `coeffs.len() == trunc - lo` and `coeffs[0] != 0` unless the series is
/// zero, in which case `lo == trunc` and `coeffs` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries", into = "RawSeries")]
pub struct TruncSeries {
    lo: i64,
    trunc: i64,
    coeffs: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct RawSeries {
    lo: i64,
    trunc: i64,
    #[serde(with = "scalar::serde_scalar_vec")]
    coeffs: Vec<Scalar>,
}

impl TryFrom<RawSeries> for TruncSeries {
    type Error = String;
    fn try_from(r: RawSeries) -> Result<Self, String> {
        if r.lo > r.trunc || r.coeffs.len() as i64 != r.trunc - r.lo {
            return Err(format!(
                "series needs trunc - lo = len(coeffs), got lo={} trunc={} len={}",
                r.lo,
                r.trunc,
                r.coeffs.len()
            ));
        }
        Ok(TruncSeries::new(r.lo, r.coeffs, r.trunc))
    }
}

impl From<TruncSeries> for RawSeries {
    fn from(s: TruncSeries) -> Self {
        RawSeries { lo: s.lo, trunc: s.trunc, coeffs: s.coeffs }
    }
}

impl TruncSeries {
    /// Coefficients start at `x^lo`; extra entries past `trunc` are dropped
    /// and missing ones are zero.
    pub fn new(lo: i64, mut coeffs: Vec<Scalar>, trunc: i64) -> Self {
        if lo >= trunc {
            return Self::zero(trunc);
        }
        coeffs.resize((trunc - lo) as usize, Scalar::new());
        let mut s = TruncSeries { lo, trunc, coeffs };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
    }

    pub fn zero(trunc: i64) -> Self {
        TruncSeries { lo: trunc, trunc, coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar, trunc: i64) -> Self {
        Self::monomial(c, 0, trunc)
    }

    pub fn one(trunc: i64) -> Self {
        Self::constant(scalar::int(1), trunc)
    }

    pub fn monomial(c: Scalar, k: i64, trunc: i64) -> Self {
        Self::new(k, vec![c], trunc)
    }

    /// `coeffs[k]` is the coefficient of `x^k`.
    pub fn from_poly(p: &Poly, trunc: i64) -> Self {
        Self::new(0, p.coeffs().to_vec(), trunc)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^k`, or `None` when `k` lies at or past the truncation.
    pub fn try_coeff(&self, k: i64) -> Option<Scalar> {
        if k >= self.trunc {
            None
        } else if k < self.lo {
            Some(Scalar::new())
        } else {
            Some(self.coeffs[(k - self.lo) as usize].clone())
        }
    }

    /// Panics when `x^k` is not known; a silently wrong zero would be worse.
    pub fn coeff(&self, k: i64) -> Scalar {
        self.try_coeff(k).unwrap_or_else(|| {
            panic!(
                "series coefficient x^{k} requested beyond truncation O(x^{})",
                self.trunc
            )
        })
    }

    pub fn coeff_ref(&self, k: i64) -> Option<&Scalar> {
        if k >= self.lo && k < self.trunc {
            Some(&self.coeffs[(k - self.lo) as usize])
        } else {
            None
        }
    }

    /// Lowers the truncation to `min(self.trunc, t)`.
    pub fn truncate(&self, t: i64) -> Self {
        if t >= self.trunc {
            return self.clone();
        }
        let keep = (t - self.lo).max(0) as usize;
        Self::new(self.lo, self.coeffs[..keep.min(self.coeffs.len())].to_vec(), t)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(
            self.lo,
            self.coeffs.iter().map(|a| Scalar::from(a * c)).collect(),
            self.trunc,
        )
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        TruncSeries { lo: self.lo + k, trunc: self.trunc + k, coeffs: self.coeffs.clone() }
    }

    /// `x ↦ -x`.
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if (self.lo + i as i64) % 2 != 0 { Scalar::from(-c) } else { c.clone() })
            .collect();
        TruncSeries { lo: self.lo, trunc: self.trunc, coeffs }
    }

    pub fn inv(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::ZeroLeadingTerm { trunc: self.trunc });
        }
        let n = self.coeffs.len();
        let a0inv = Scalar::from(self.coeffs[0].recip_ref());
        let mut b: Vec<Scalar> = Vec::with_capacity(n);
        b.push(a0inv.clone());
        for k in 1..n {
            let mut s = Scalar::new();
            for j in 1..=k {
                s += &Scalar::from(&self.coeffs[j] * &b[k - j]);
            }
            b.push(-(s * &a0inv));
        }
        Ok(Self::new(-self.lo, b, n as i64 - self.lo))
    }

    /// `self - other` vanishes on the common known range.
    pub fn agrees_with(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// `self^k` for `k ≥ 1`.
    pub fn pow(&self, k: u32) -> Self {
        assert!(k >= 1, "pow needs a positive exponent");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, b: &TruncSeries) -> TruncSeries {
        let trunc = self.trunc.min(b.trunc);
        let lo = self.lo.min(b.lo).min(trunc);
        let mut c = vec![Scalar::new(); (trunc - lo) as usize];
        for s in [self, b] {
            for (i, a) in s.coeffs.iter().enumerate() {
                let k = s.lo + i as i64;
                if k < trunc {
                    c[(k - lo) as usize] += a;
                }
            }
        }
        TruncSeries::new(lo, c, trunc)
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            lo: self.lo,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| Scalar::from(-c)).collect(),
        }
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, b: &TruncSeries) -> TruncSeries {
        self + &(-b)
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, b: &TruncSeries) -> TruncSeries {
        let trunc = (self.trunc + b.lo).min(b.trunc + self.lo);
        let lo = self.lo + b.lo;
        if lo >= trunc {
            return TruncSeries::zero(trunc);
        }
        let n = (trunc - lo) as usize;
        let mut c = vec![Scalar::new(); n];
        for (i, x) in self.coeffs.iter().enumerate().take(n) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(n - i) {
                c[i + j] += &Scalar::from(x * y);
            }
        }
        TruncSeries::new(lo, c, trunc)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr for TruncSeries {
            type Output = TruncSeries;
            fn $f(self, b: TruncSeries) -> TruncSeries {
                (&self).$f(&b)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

/// `e^{cx} = Σ c^k x^k / k!` up to `O(x^trunc)`.
pub fn exp_scaled(c: &Scalar, trunc: i64) -> TruncSeries {
    let n = trunc.max(0) as usize;
    let mut out = Vec::with_capacity(n);
    let mut term = scalar::int(1);
    for k in 0..n {
        out.push(term.clone());
        term *= c;
        term /= (k + 1) as u32;
    }
    TruncSeries::new(0, out, trunc)
}

/// `p(e^{x})` as a power series.
fn poly_at_exp(p: &Poly, trunc: i64) -> TruncSeries {
    let mut acc = TruncSeries::zero(trunc);
    for (k, a) in p.coeffs().iter().enumerate() {
        if !a.is_zero() {
            acc = &acc + &exp_scaled(&scalar::int(k as i64), trunc).scale(a);
        }
    }
    acc
}

/// Order of vanishing of `p(e^x)` at `x = 0`, i.e. the multiplicity of the
/// root `z = 1` of `p`.
fn root_one_multiplicity(p: &Poly) -> i64 {
    let lin = Poly::new(vec![scalar::int(-1), scalar::int(1)]);
    let mut q = p.clone();
    let mut m = 0;
    while !q.is_zero() {
        let (quo, rem) = q.div_rem(&lin);
        if !rem.is_zero() {
            break;
        }
        q = quo;
        m += 1;
    }
    m
}

/// Laurent expansion of `g(e^x)` at `x = 0`, exact up to `O(x^trunc)`.
pub fn iota_exp(g: &RationalFn, trunc: i64) -> TruncSeries {
    let vd = root_one_multiplicity(g.den());
    let vn = root_one_multiplicity(g.num());
    let work = trunc + 2 * vd + vn.max(0) + 1;
    let n = poly_at_exp(g.num(), work);
    let d = poly_at_exp(g.den(), work);
    let dinv = d.inv().expect("denominator of a rational function is nonzero");
    (&n * &dinv).truncate(trunc)
}

fn z_valuation(p: &Poly) -> i64 {
    p.coeffs().iter().take_while(|c| c.is_zero()).count() as i64
}

/// Laurent expansion of `g(z)` at `z = 0`.
pub fn iota_z0(g: &RationalFn, trunc: i64) -> TruncSeries {
    let vd = z_valuation(g.den());
    let vn = z_valuation(g.num());
    let work = (trunc + 2 * vd - vn).max(vd + 1) + 1;
    let n = TruncSeries::from_poly(g.num(), work + vn);
    let d = TruncSeries::from_poly(g.den(), work);
    let dinv = d.inv().expect("denominator of a rational function is nonzero");
    (&n * &dinv).truncate(trunc)
}

/// Expansion of `g(1/z)` at `z = 0`, i.e. `g` at infinity.
pub fn iota_zinf(g: &RationalFn, trunc: i64) -> TruncSeries {
    iota_z0(&g.reflected(), trunc)
}

/// Rectangular exponent window for the diagonal expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub z: (i64, i64),
    pub w: (i64, i64),
}

impl Window {
    pub fn contains(&self, zw: (i64, i64)) -> bool {
        (self.z.0..=self.z.1).contains(&zw.0) && (self.w.0..=self.w.1).contains(&zw.1)
    }
}

/// Sparse series in `z, w` restricted to a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiTruncSeries {
    window: Window,
    terms: BTreeMap<(i64, i64), Scalar>,
}

impl BiTruncSeries {
    pub fn new(window: Window) -> Self {
        BiTruncSeries { window, terms: BTreeMap::new() }
    }

    /// Terms outside the window are discarded.
    pub fn insert(&mut self, zw: (i64, i64), c: Scalar) {
        if self.window.contains(zw) && !c.is_zero() {
            self.terms.insert(zw, c);
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coeff(&self, zw: (i64, i64)) -> Option<Scalar> {
        if !self.window.contains(zw) {
            return None;
        }
        Some(self.terms.get(&zw).cloned().unwrap_or_default())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Scalar)> {
        self.terms.iter()
    }
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    zw: (i64, i64),
    #[serde(with = "scalar::serde_scalar")]
    c: Scalar,
}

#[derive(Serialize, Deserialize)]
struct RawBi {
    window: Window,
    terms: Vec<RawTerm>,
}

impl Serialize for BiTruncSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawBi {
            window: self.window,
            terms: self.terms.iter().map(|(k, c)| RawTerm { zw: *k, c: c.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiTruncSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawBi::deserialize(d)?;
        let mut out = BiTruncSeries::new(raw.window);
        for t in raw.terms {
            if !raw.window.contains(t.zw) {
                return Err(serde::de::Error::custom(format!("term {:?} outside window", t.zw)));
            }
            out.insert(t.zw, t.c);
        }
        Ok(out)
    }
}

/// `ι_{w,z} g(w/z) = Σ g̃_l z^l w^{-l}` and `ι_{w,z} g(z/w) = Σ g_l z^l w^{-l}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioExpansions {
    pub g_w_over_z: BiTruncSeries,
    pub g_z_over_w: BiTruncSeries,
}

pub fn iota_wz_ratio(g: &RationalFn, window: Window) -> RatioExpansions {
    let lmax = window.z.1.min(-window.w.0);
    let trunc = lmax + 1;
    let tilde = iota_zinf(g, trunc);
    let plain = iota_z0(g, trunc);
    let fill = |s: &TruncSeries| {
        let mut b = BiTruncSeries::new(window);
        for l in s.lo()..s.trunc() {
            b.insert((l, -l), s.coeff(l));
        }
        b
    };
    RatioExpansions { g_w_over_z: fill(&tilde), g_z_over_w: fill(&plain) }
}
