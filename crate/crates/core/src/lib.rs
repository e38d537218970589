//! Exact computation in the vacuum module of 𝒜(h), realized on Fock space,
//! and in graded modules of the Ding-Iohara type algebra Ã(g).

pub mod ding_iohara;
pub mod fock;
pub mod linalg;
pub mod par;
pub mod phi;
pub mod ratfunc;
pub mod report;
pub mod scalar;
pub mod series;
pub mod vacuum;

use serde::{Deserialize, Serialize};

/// The three generators `e, f, ψ` (also `E, F, Ψ` for Ã(g)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gen {
    E = 0,
    F = 1,
    Psi = 2,
}

impl Gen {
    pub const ALL: [Gen; 3] = [Gen::E, Gen::F, Gen::Psi];

    pub fn name(self) -> &'static str {
        match self {
            Gen::E => "e",
            Gen::F => "f",
            Gen::Psi => "psi",
        }
    }

    pub fn bar_name(self) -> &'static str {
        match self {
            Gen::E => "ebar",
            Gen::F => "fbar",
            Gen::Psi => "psibar",
        }
    }

    pub fn parse(s: &str) -> Option<Gen> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "ebar" => Some(Gen::E),
            "f" | "fbar" => Some(Gen::F),
            "psi" | "psibar" | "ψ" => Some(Gen::Psi),
            _ => None,
        }
    }
}
