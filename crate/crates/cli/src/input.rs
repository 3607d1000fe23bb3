//! Input resolution: inline JSON vs file paths, fan specifiers, and the
//! error-to-exit-code mapping.

use std::fmt;
use std::sync::Arc;
use toridyn_core::fan::{Fan, WeightedLattice};
use toridyn_core::json::{parse_fan_json, parse_int_matrix_json, parse_matrix_json, JsonError};
use toridyn_core::matrix::{IntMatrix, RatMatrix};
use toridyn_core::poly::PolyError;

/// Exit code 2: a violated mathematical precondition or malformed input.
/// Exit code 3: a resource budget was exhausted.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl CliError {
    pub fn domain(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            exit_code: 2,
        }
    }

    pub fn resource(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            exit_code: 3,
        }
    }

    pub fn from_poly(context: &str, e: PolyError) -> Self {
        match e {
            PolyError::BudgetExceeded { .. } => CliError::resource(format!("{context}: {e}")),
            other => CliError::domain(format!("{context}: {other}")),
        }
    }
}

macro_rules! domain_from {
    ($($ty:path),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::domain(e.to_string())
            }
        })*
    };
}

domain_from!(
    JsonError,
    toridyn_core::fan::FanError,
    toridyn_core::matrix::MatrixError,
    toridyn_core::divisor::DivisorError,
    toridyn_core::stability::StabilityError,
    toridyn_core::spectral::SpectralError,
);

impl From<toridyn_core::dynamics::DynamicsError> for CliError {
    fn from(e: toridyn_core::dynamics::DynamicsError) -> Self {
        use toridyn_core::dynamics::DynamicsError;
        match &e {
            DynamicsError::Poly(PolyError::BudgetExceeded { .. }) => {
                CliError::resource(e.to_string())
            }
            _ => CliError::domain(e.to_string()),
        }
    }
}

/// Inline JSON if the argument looks like JSON, otherwise read the file.
pub fn resolve_text(arg: &str) -> Result<String, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg)
        .map_err(|e| CliError::domain(format!("cannot read `{arg}`: {e}")))
}

pub fn load_rat_matrix(arg: &str) -> Result<RatMatrix, CliError> {
    Ok(parse_matrix_json(&resolve_text(arg)?)?)
}

pub fn load_int_matrix(arg: &str) -> Result<IntMatrix, CliError> {
    Ok(parse_int_matrix_json(&resolve_text(arg)?)?)
}

/// A fan argument: `pn:N`, `p1n:N`, `weighted:d0,d1,...`, inline JSON or a
/// file path. Weighted specs also return the lattice.
pub fn load_fan(spec: &str) -> Result<(Arc<Fan>, Option<WeightedLattice>), CliError> {
    if let Some(rest) = spec.strip_prefix("pn:") {
        let n: usize = rest
            .parse()
            .map_err(|_| CliError::domain(format!("bad dimension in `{spec}`")))?;
        return Ok((Arc::new(Fan::projective(n)?), None));
    }
    if let Some(rest) = spec.strip_prefix("p1n:") {
        let n: usize = rest
            .parse()
            .map_err(|_| CliError::domain(format!("bad dimension in `{spec}`")))?;
        return Ok((Arc::new(Fan::p1n(n)?), None));
    }
    if let Some(rest) = spec.strip_prefix("weighted:") {
        let weights = parse_weights(rest)?;
        let (fan, lattice) = Fan::weighted(&weights)?;
        return Ok((Arc::new(fan), Some(lattice)));
    }
    Ok((Arc::new(parse_fan_json(&resolve_text(spec)?)?), None))
}

pub fn parse_weights(list: &str) -> Result<Vec<u64>, CliError> {
    list.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| CliError::domain(format!("bad weight `{p}`")))
        })
        .collect()
}

/// Worker-thread bound from the environment, default 1.
pub fn thread_count() -> Result<usize, CliError> {
    match std::env::var("TORIDYN_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| {
                CliError::domain(format!("TORIDYN_THREADS must be a positive integer, got `{v}`"))
            })?;
            if n == 0 {
                return Err(CliError::domain("TORIDYN_THREADS must be at least 1"));
            }
            Ok(n)
        }
    }
}
