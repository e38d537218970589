use qva_core::ding_iohara::{AAlphaModule, DiError};
use qva_core::fock::{FockVector, Statistics};
use qva_core::ratfunc::{RatFnError, RationalFn};
use qva_core::scalar::{self, Scalar};
use qva_core::vacuum::VacuumError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Symmetry(String),
    Irrational(String),
    Inconsistent(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Symmetry(_) => 3,
            CliError::Irrational(_) => 4,
            CliError::Inconsistent(_) => 5,
            CliError::Io(_) => 6,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "invalid configuration: {s}"),
            CliError::Symmetry(s) => write!(f, "g(z)g(1/z) != 1: {s}"),
            CliError::Irrational(s) => write!(f, "numerator has irrational roots; residual factor coefficients (ascending) {s}"),
            CliError::Inconsistent(s) => write!(f, "inconsistent data: {s}"),
            CliError::Io(s) => write!(f, "i/o: {s}"),
        }
    }
}

impl From<RatFnError> for CliError {
    fn from(e: RatFnError) -> Self {
        match e {
            RatFnError::SymmetryViolated(s) => CliError::Symmetry(s),
            RatFnError::IrrationalRoots { residual } => CliError::Irrational(residual),
            RatFnError::InvalidInput(s) => CliError::Config(s),
            RatFnError::FactorizationMismatch(s) => CliError::Inconsistent(s),
        }
    }
}

impl From<VacuumError> for CliError {
    fn from(e: VacuumError) -> Self {
        match e {
            VacuumError::RatFn(r) => r.into(),
            other => CliError::Inconsistent(other.to_string()),
        }
    }
}

impl From<DiError> for CliError {
    fn from(e: DiError) -> Self {
        match e {
            DiError::RatFn(r) => r.into(),
            DiError::RelationInconsistency { .. } => CliError::Inconsistent(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Inline JSON, or the contents of a file holding JSON.
pub fn json_arg(s: &str) -> Result<serde_json::Value, CliError> {
    match serde_json::from_str(s) {
        Ok(v) => return Ok(v),
        // looks inline, so do not fall back to reading a file
        Err(e) if s.trim_start().starts_with(['{', '[', '"']) => return Err(CliError::Config(format!("{s}: {e}"))),
        Err(_) => {}
    }
    let text = std::fs::read_to_string(s).map_err(|e| CliError::Io(format!("{s}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{s}: {e}")))
}

pub fn parse_g(s: &str) -> Result<(RationalFn, serde_json::Value), CliError> {
    let v = json_arg(s)?;
    let g = match &v {
        serde_json::Value::Object(_) => {
            serde_json::from_value::<RationalFn>(v.clone()).map_err(|e| CliError::Config(format!("g: {e}")))?
        }
        other => RationalFn::constant(scalar::serde_scalar::from_value(other).map_err(|e| CliError::Config(format!("g: {e}")))?),
    };
    g.validate()?;
    Ok((g, v))
}

pub fn parse_scalar(s: &str) -> Result<Scalar, CliError> {
    scalar::parse_scalar(s).map_err(|e| CliError::Config(e.to_string()))
}

pub fn parse_vector(s: &str, stats: Statistics) -> Result<FockVector, CliError> {
    if s == "vacuum" {
        return Ok(FockVector::vacuum(stats));
    }
    FockVector::from_json(&json_arg(s)?, stats).map_err(|e| CliError::Config(format!("vector: {e}")))
}

pub fn parse_module(s: &str) -> Result<AAlphaModule, CliError> {
    Ok(AAlphaModule::from_json(&json_arg(s)?)?)
}

pub fn window(w: &Option<Vec<i64>>, degree: u32) -> Result<(i64, i64), CliError> {
    match w.as_deref() {
        None => Ok((-(degree as i64), degree as i64 + 1)),
        Some([a, b]) if a <= b => Ok((*a, *b)),
        Some(other) => Err(CliError::Config(format!("window needs A <= B, got {other:?}"))),
    }
}
