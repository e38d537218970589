//! The algebra Ã(g) for `g` analytic at 0 with `α = g(0) ≠ 0`.
//!
//! Modes use `E(z) = Σ E_n z^{-n}`, so `deg E_n = -n`. Component relations:
//!
//! ```text
//! E_m E_n = Σ_l g̃_l E_{n-l} E_{m+l}     F_m F_n = Σ_l g_l F_{n-l} F_{m+l}
//! Ψ_m E_n = Σ_l g̃_l E_{n-l} Ψ_{m+l}     Ψ_m F_n = Σ_l g_l F_{n-l} Ψ_{m+l}
//! [E_m, F_n] = Ψ_{m+n}                   [Ψ_m, Ψ_n] = 0
//! ```
//!
//! with `g(z) = Σ g_l z^l` and `g(1/z) = Σ g̃_l z^l` at `z = 0`.

mod aalpha;
mod verma;

pub use aalpha::*;
pub use verma::*;

use crate::ratfunc::{CanonicalG, RatFnError};
use crate::scalar::{self, Scalar};
use crate::series::{iota_z0, TruncSeries};
use crate::Gen;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiError {
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("g must be analytic and nonzero at z = 0 (got z^{0} in the canonical form)")]
    NotAnalytic(i64),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("relations collapse {lost} of {dim} degree-0 vectors at word cap {cap}")]
    RelationInconsistency { lost: usize, dim: usize, cap: u32 },
    #[error(transparent)]
    RatFn(#[from] RatFnError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentTable {
    pub g_coeffs: TruncSeries,
    pub gtilde_coeffs: TruncSeries,
    pub p: i64,
    pub q: i64,
}

pub fn component_table(cg: &CanonicalG, trunc: i64) -> ComponentTable {
    let g = cg.reconstruct();
    let g_coeffs = iota_z0(&g, trunc);
    let gtilde_coeffs = iota_z0(&g.reflected(), trunc);
    let (p, q) = (g_coeffs.lo(), gtilde_coeffs.lo());
    ComponentTable { g_coeffs, gtilde_coeffs, p, q }
}

impl ComponentTable {
    pub fn g(&self, l: i64) -> Scalar {
        if l < self.p { Scalar::new() } else { self.g_coeffs.coeff(l) }
    }

    pub fn gtilde(&self, l: i64) -> Scalar {
        if l < self.q { Scalar::new() } else { self.gtilde_coeffs.coeff(l) }
    }

    /// `α = g_0`, defined when both expansions start at `l = 0`.
    pub fn alpha(&self) -> Result<Scalar, DiError> {
        if self.p != 0 || self.q != 0 {
            return Err(DiError::NotAnalytic(self.p));
        }
        Ok(self.g(0))
    }

    pub fn trunc(&self) -> i64 {
        self.g_coeffs.trunc().min(self.gtilde_coeffs.trunc())
    }
}

/// One instance of a defining relation, as `Σ c · word` with words written
/// left to right (the rightmost letter acts first). The relation says the sum
/// vanishes on any vector of degree `d`; `d` bounds the `l`-sums.
pub type Letter = (Gen, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    EE,
    FF,
    PsiE,
    PsiF,
    EF,
    PsiPsi,
}

impl Relation {
    pub const ALL: [Relation; 6] = [Relation::EE, Relation::FF, Relation::PsiE, Relation::PsiF, Relation::EF, Relation::PsiPsi];

    pub fn name(self) -> &'static str {
        match self {
            Relation::EE => "EE",
            Relation::FF => "FF",
            Relation::PsiE => "PsiE",
            Relation::PsiF => "PsiF",
            Relation::EF => "EF",
            Relation::PsiPsi => "PsiPsi",
        }
    }

    /// Terms of the relation `X_m Y_n - …` applied to a vector of degree `d`.
    pub fn terms(self, table: &ComponentTable, m: i64, n: i64, d: i64) -> Vec<(Vec<Letter>, Scalar)> {
        use Gen::*;
        let one = scalar::int(1);
        let twisted = |x: Gen, y: Gen, tilde: bool| {
            let mut out = vec![(vec![(x, m), (y, n)], one.clone())];
            for l in 0..=(d - m) {
                let c = if tilde { table.gtilde(l) } else { table.g(l) };
                if c != 0 {
                    out.push((vec![(y, n - l), (x, m + l)], -c));
                }
            }
            out
        };
        match self {
            Relation::EE => twisted(E, E, true),
            Relation::FF => twisted(F, F, false),
            Relation::PsiE => twisted(Psi, E, true),
            Relation::PsiF => twisted(Psi, F, false),
            Relation::EF => vec![
                (vec![(E, m), (F, n)], one.clone()),
                (vec![(F, n), (E, m)], -one.clone()),
                (vec![(Psi, m + n)], -one),
            ],
            Relation::PsiPsi => vec![(vec![(Psi, m), (Psi, n)], one.clone()), (vec![(Psi, n), (Psi, m)], -one)],
        }
    }
}

pub fn letter_string(&(g, n): &Letter) -> String {
    let s = match g {
        Gen::E => "E",
        Gen::F => "F",
        Gen::Psi => "Psi",
    };
    format!("{s}_{n}")
}
