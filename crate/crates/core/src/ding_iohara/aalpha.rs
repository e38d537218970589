//! The degree-zero algebra A[α]: generators `E0, F0, Ψ0` with
//! `E0² = α⁻¹E0²`, `F0² = αF0²`, `Ψ0E0 = α⁻¹E0Ψ0`, `Ψ0F0 = αF0Ψ0`,
//! `[E0, F0] = Ψ0`.

use super::DiError;
use crate::linalg::{self, is_zero_matrix, matmul, matscale, matsub, Echelon, Matrix, SparseVec};
use crate::ratfunc::Poly;
use crate::report::CheckReport;
use crate::scalar::{self, format_scalar, Scalar, ScalarExt};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AAlphaModule {
    pub dim: usize,
    #[serde(rename = "E0", with = "scalar::serde_scalar_matrix")]
    pub e0: Matrix,
    #[serde(rename = "F0", with = "scalar::serde_scalar_matrix")]
    pub f0: Matrix,
    #[serde(rename = "Psi0", with = "scalar::serde_scalar_matrix")]
    pub psi0: Matrix,
}

impl AAlphaModule {
    pub fn new(e0: Matrix, f0: Matrix, psi0: Matrix) -> Result<Self, DiError> {
        let m = AAlphaModule { dim: e0.len(), e0, f0, psi0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), DiError> {
        if self.dim == 0 {
            return Err(DiError::InvalidModule("dim must be positive".into()));
        }
        for (name, a) in [("E0", &self.e0), ("F0", &self.f0), ("Psi0", &self.psi0)] {
            if a.len() != self.dim || a.iter().any(|r| r.len() != self.dim) {
                return Err(DiError::InvalidModule(format!("{name} is not {0}x{0}", self.dim)));
            }
        }
        Ok(())
    }

    /// Everything acts by zero.
    pub fn trivial() -> Self {
        let z = linalg::zeros(1, 1);
        AAlphaModule { dim: 1, e0: z.clone(), f0: z.clone(), psi0: z }
    }

    /// The two-dimensional A[-1]-module: `E0 = λE₁₂`, `F0 = E₂₁`, `Ψ0 = λ(E₁₁ - E₂₂)`.
    pub fn u_lambda(lambda: &Scalar) -> Self {
        let (l, z, o) = (lambda.clone(), Scalar::new(), scalar::int(1));
        AAlphaModule {
            dim: 2,
            e0: vec![vec![z.clone(), l.clone()], vec![z.clone(), z.clone()]],
            f0: vec![vec![z.clone(), z.clone()], vec![o, z.clone()]],
            psi0: vec![vec![l.clone(), z.clone()], vec![z, -l]],
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, DiError> {
        let m: AAlphaModule = serde_json::from_value(v.clone()).map_err(|e| DiError::InvalidModule(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn matrix(&self, g: crate::Gen) -> &Matrix {
        match g {
            crate::Gen::E => &self.e0,
            crate::Gen::F => &self.f0,
            crate::Gen::Psi => &self.psi0,
        }
    }
}

fn first_nonzero(a: &Matrix) -> serde_json::Value {
    for (i, r) in a.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            if !x.is_zero() {
                return json!({"row": i, "col": j, "value": format_scalar(x)});
            }
        }
    }
    serde_json::Value::Null
}

/// The five defining relations as exact matrix identities.
pub fn verify_aalpha(m: &AAlphaModule, alpha: &Scalar) -> CheckReport {
    let mut r = CheckReport::new("aalpha");
    if alpha.is_zero() {
        r.fail("alpha".into(), json!("alpha = 0"));
        return r;
    }
    if let Err(e) = m.validate() {
        r.fail("shape".into(), json!(e.to_string()));
        return r;
    }
    let ainv = Scalar::from(alpha.recip_ref());
    let (e, f, p) = (&m.e0, &m.f0, &m.psi0);
    let ee = matmul(e, e);
    let ff = matmul(f, f);
    let diffs = [
        ("E0^2 - alpha^-1 E0^2", matsub(&ee, &matscale(&ee, &ainv))),
        ("F0^2 - alpha F0^2", matsub(&ff, &matscale(&ff, alpha))),
        ("Psi0 E0 - alpha^-1 E0 Psi0", matsub(&matmul(p, e), &matscale(&matmul(e, p), &ainv))),
        ("Psi0 F0 - alpha F0 Psi0", matsub(&matmul(p, f), &matscale(&matmul(f, p), alpha))),
        ("E0 F0 - F0 E0 - Psi0", matsub(&matsub(&matmul(e, f), &matmul(f, e)), p)),
    ];
    for (name, d) in diffs {
        r.check(is_zero_matrix(&d), || (name.to_string(), first_nonzero(&d)));
    }
    r
}

/// Noncommutative polynomial in `E` (0) and `F` (1).
type NcPoly = BTreeMap<Vec<u8>, Scalar>;

fn nc_mul(a: &NcPoly, b: &NcPoly) -> NcPoly {
    let mut out = NcPoly::new();
    for (u, x) in a {
        for (v, y) in b {
            let w: Vec<u8> = u.iter().chain(v).copied().collect();
            *out.entry(w).or_default() += &Scalar::from(x * y);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn nc_add(a: &NcPoly, b: &NcPoly, c: &Scalar) -> NcPoly {
    let mut out = a.clone();
    for (w, x) in b {
        *out.entry(w.clone()).or_default() += &Scalar::from(x * c);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn nc_word(w: &[u8]) -> NcPoly {
    NcPoly::from([(w.to_vec(), scalar::int(1))])
}

fn word_index(w: &[u8]) -> usize {
    w.iter().fold(0, |acc, &b| 2 * acc + b as usize)
}

fn all_words(k: usize) -> Vec<Vec<u8>> {
    (0..1usize << k).map(|i| (0..k).map(|j| ((i >> (k - 1 - j)) & 1) as u8).collect()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct NilpotencyCertificate {
    /// Each identity and whether it lies in the defining ideal.
    pub identities: Vec<(String, bool)>,
    pub passed: bool,
}

/// Decides, by exact linear algebra in the free algebra on `E, F` (with
/// `Ψ = EF - FE`), whether the listed products lie in the two-sided ideal of
/// defining relations. All relations are homogeneous, so each degree is a
/// finite problem.
pub fn nilpotency_certificate(alpha: &Scalar) -> NilpotencyCertificate {
    let one = scalar::int(1);
    let ainv = Scalar::from(alpha.recip_ref());
    let e = nc_word(&[0]);
    let f = nc_word(&[1]);
    let psi = nc_add(&nc_word(&[0, 1]), &nc_word(&[1, 0]), &-one.clone());
    let ee = nc_mul(&e, &e);
    let ff = nc_mul(&f, &f);
    let rels: Vec<(usize, NcPoly)> = vec![
        (2, nc_add(&NcPoly::new(), &ee, &Scalar::from(&one - &ainv))),
        (2, nc_add(&NcPoly::new(), &ff, &Scalar::from(&one - alpha))),
        (3, nc_add(&nc_mul(&psi, &e), &nc_mul(&e, &psi), &-ainv.clone())),
        (3, nc_add(&nc_mul(&psi, &f), &nc_mul(&f, &psi), &-alpha.clone())),
    ];
    let ideal = |k: usize| {
        let mut ech = Echelon::new();
        for (d, r) in &rels {
            if *d > k {
                continue;
            }
            for a in 0..=(k - d) {
                for left in all_words(a) {
                    for right in all_words(k - d - a) {
                        let p = nc_mul(&nc_mul(&nc_word(&left), r), &nc_word(&right));
                        ech.insert(p.iter().map(|(w, c)| (word_index(w), c.clone())).collect::<SparseVec>());
                    }
                }
            }
        }
        ech
    };
    let ideals: Vec<Echelon> = (0..=4).map(ideal).collect();
    let ef = nc_mul(&e, &f);
    let fe = nc_mul(&f, &e);
    let targets: Vec<(&str, NcPoly)> = vec![
        ("E0^2", ee.clone()),
        ("F0^2", ff.clone()),
        ("Psi0 E0", nc_mul(&psi, &e)),
        ("E0 Psi0", nc_mul(&e, &psi)),
        ("Psi0 F0", nc_mul(&psi, &f)),
        ("F0 Psi0", nc_mul(&f, &psi)),
        ("Psi0^2", nc_mul(&psi, &psi)),
        ("(E0F0)^2", nc_mul(&ef, &ef)),
        ("(F0E0)^2", nc_mul(&fe, &fe)),
        ("(E0F0)(F0E0)", nc_mul(&ef, &fe)),
        ("(F0E0)(E0F0)", nc_mul(&fe, &ef)),
    ];
    let identities: Vec<(String, bool)> = targets
        .into_iter()
        .map(|(name, p)| {
            let k = p.keys().next().map_or(0, Vec::len);
            let v: SparseVec = p.iter().map(|(w, c)| (word_index(w), c.clone())).collect();
            (format!("{name} = 0"), ideals[k].contains(&v))
        })
        .collect();
    let passed = identities.iter().all(|(_, ok)| *ok);
    NilpotencyCertificate { identities, passed }
}

/// Binary quadratic form `det[v, Av]` for `v = (x, y)`, as the polynomial in
/// `t = x/y` together with its `x²` coefficient (the point at infinity).
fn eigen_form(a: &Matrix) -> Poly {
    let c2 = a[1][0].clone();
    let c1 = Scalar::from(&a[1][1] - &a[0][0]);
    let c0 = -a[0][1].clone();
    // degree slots kept fixed: [y², xy, x²]
    Poly::new(vec![c0, c1, c2])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantLines {
    /// Every line is invariant (all three operators are scalar).
    pub all: bool,
    /// Finite slopes `x/y` of common invariant lines.
    #[serde(with = "scalar::serde_scalar_vec")]
    pub slopes: Vec<Scalar>,
    /// Whether the line `y = 0` is invariant.
    pub infinity: bool,
}

impl InvariantLines {
    pub fn is_empty(&self) -> bool {
        !self.all && self.slopes.is_empty() && !self.infinity
    }
}

/// Exhaustive search for invariant lines of a 2-dimensional module: a line
/// `[x : y]` is invariant iff it is a common root of the forms `det[v, Av]`,
/// so the gcd over ℚ decides the question over ℂ as well.
pub fn invariant_lines(m: &AAlphaModule) -> Result<InvariantLines, DiError> {
    if m.dim != 2 {
        return Err(DiError::InvalidModule("invariant-line search needs dim 2".into()));
    }
    let forms: Vec<Poly> = [&m.e0, &m.f0, &m.psi0].iter().map(|a| eigen_form(a)).collect();
    let nonzero: Vec<&Poly> = forms.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return Ok(InvariantLines { all: true, slopes: vec![], infinity: true });
    }
    let infinity = forms.iter().all(|p| p.coeffs().get(2).map_or(true, ScalarExt::is_zero));
    let g = nonzero.iter().skip(1).fold((*nonzero[0]).clone(), |acc, p| acc.gcd(p));
    let (roots, residual) = g.rational_roots();
    // irrational common roots would still be invariant lines over ℂ
    if residual.degree() > 0 {
        return Err(DiError::InvalidModule(format!("common invariant lines over an extension: {:?}", residual.to_strings())));
    }
    let slopes = roots.into_iter().map(|(r, _)| r).collect();
    Ok(InvariantLines { all: false, slopes, infinity })
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum AAlphaClassification {
    /// `α ≠ ±1`: the trivial module is the only irreducible.
    Nilpotent {
        #[serde(with = "scalar::serde_scalar")]
        alpha: Scalar,
        irreducibles: Vec<AAlphaModule>,
        certificate: NilpotencyCertificate,
    },
    /// `α = -1`: the trivial module and the family `U(λ)`, `λ ≠ 0`.
    MinusOne {
        irreducibles: Vec<AAlphaModule>,
        family: String,
        certificate: NilpotencyCertificate,
    },
    /// `α = 1`: the enveloping algebra of the Heisenberg algebra.
    Heisenberg { identification: String, open: bool },
}

pub fn classify_aalpha(alpha: &Scalar) -> Result<AAlphaClassification, DiError> {
    if alpha.is_zero() {
        return Err(DiError::ZeroAlpha);
    }
    if *alpha == 1 {
        return Ok(AAlphaClassification::Heisenberg {
            identification: "A[1] = U(heis): [E0,F0] = Psi0 central".into(),
            open: true,
        });
    }
    let certificate = nilpotency_certificate(alpha);
    if *alpha == -1 {
        return Ok(AAlphaClassification::MinusOne {
            irreducibles: vec![AAlphaModule::trivial()],
            family: "U(lambda): E0 = lambda E12, F0 = E21, Psi0 = lambda (E11 - E22), lambda != 0".into(),
            certificate,
        });
    }
    Ok(AAlphaClassification::Nilpotent { alpha: alpha.clone(), irreducibles: vec![AAlphaModule::trivial()], certificate })
}

/// Eigenvalues of a 2×2 matrix with rational spectrum.
pub fn eigenvalues_2x2(a: &Matrix) -> Option<Vec<Scalar>> {
    let tr = Scalar::from(&a[0][0] + &a[1][1]);
    let det = Scalar::from(&a[0][0] * &a[1][1]) - Scalar::from(&a[0][1] * &a[1][0]);
    let (roots, residual) = Poly::new(vec![det, -tr, scalar::int(1)]).rational_roots();
    if residual.degree() > 0 {
        return None;
    }
    let mut out = Vec::new();
    for (r, m) in roots {
        for _ in 0..m {
            out.push(r.clone());
        }
    }
    Some(out)
}
