//! `qva`: exact checks for the vacuum module of 𝒜(h) and graded Ã(g)-modules.
//!
//! Exit status: 0 all selected checks passed, 1 some check failed,
//! 2 invalid configuration, 3 symmetry violated, 4 irrational roots,
//! 5 inconsistent module data, 6 I/O error.

mod input;
mod run;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qva", version, about = "Exact computer algebra for A(h) and its Ding-Iohara companion")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// Print the full JSON report on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed recorded in the report; all current checks are exhaustive.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Print elapsed time on stderr (never part of the report).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GArg {
    /// g(z) as JSON ({"num": [...], "den": [...]}, ascending coefficients) or a path to such a file.
    #[arg(long)]
    pub g: String,
    /// Series truncation; sized from the degree and window when omitted.
    #[arg(long)]
    pub trunc: Option<i64>,
}

#[derive(Args, Debug, Clone)]
pub struct WindowArg {
    /// Mode window A B (inclusive).
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub window: Option<Vec<i64>>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Canonical form and expansions of g; h(x) = g(e^x).
    Expand {
        #[command(flatten)]
        g: GArg,
        /// Exponent window A B for the two-variable expansions of g(w/z) and g(z/w).
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        window: Option<Vec<i64>>,
    },
    /// The factorization h(x) = ε q(x) q(-x)^{-1}.
    Factor {
        #[command(flatten)]
        g: GArg,
    },
    /// P-B-W vectors of the vacuum module by degree.
    VacuumBasis {
        #[command(flatten)]
        g: GArg,
        #[arg(long)]
        degree: u32,
    },
    /// Apply one generator mode to a Fock vector.
    Act {
        #[command(flatten)]
        g: GArg,
        /// e, f or psi.
        #[arg(long)]
        gen: String,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        /// Fock vector JSON ([{"mono": {"e": [..], "f": [..], "psi": [..]}, "c": "1"}]), "vacuum", or a path.
        #[arg(long)]
        vector: String,
        /// Use the undressed loop-algebra mode.
        #[arg(long)]
        bar: bool,
    },
    /// φ_i on a Fock vector, or the structural φ checks with --check.
    Phi {
        #[command(flatten)]
        g: GArg,
        #[arg(long, default_value_t = 1)]
        i: u32,
        #[arg(long)]
        vector: Option<String>,
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Run a verification suite
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Irreducible modules of the degree-zero algebra A[α].
    ClassifyAalpha {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Also build and check U(λ) when α = -1.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Truncated Verma-type module M(U).
    Verma {
        #[command(flatten)]
        g: GArg,
        /// A[α]-module JSON ({"dim", "E0", "F0", "Psi0"}) or a path.
        #[arg(long)]
        module: String,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 3)]
        word_cap: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// All six defining relations of 𝒜(h) on the vacuum module.
    Ah {
        #[command(flatten)]
        g: GArg,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Relations of Ã(g) on M(U), swept over word caps up to --word-cap.
    Atilde {
        #[command(flatten)]
        g: GArg,
        #[arg(long)]
        module: String,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 3)]
        word_cap: u32,
    },
    /// Exact rank of the P-B-W vectors.
    Independence {
        #[command(flatten)]
        g: GArg,
        #[arg(long)]
        degree: u32,
    },
    /// d(a(m)v) - a(m)d(v) = -m a(m-1)v and [d, φ_i] = (i+1)φ_{i+1}.
    Derivation {
        #[command(flatten)]
        g: GArg,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        window: WindowArg,
        #[arg(long, default_value_t = 4)]
        phi_max: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qva: {e}");
            ExitCode::from(e.code())
        }
    }
}
