use thiserror::Error;

use crate::linalg::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QrwError {
    #[error("{what} must lie strictly inside the unit disk, got modulus {modulus}")]
    Domain { what: String, modulus: f64 },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("coin at site {site} is not unitary (defect {defect:.3e})")]
    NonUnitary { site: i64, defect: f64 },

    #[error(
        "coin at site {site} is trivial (|c11| = {c11:.3e}); the walk splits into independent pieces"
    )]
    TrivialCoin { site: i64, c11: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: best estimate {estimate:?}, error bound {error:.3e}")]
    Quadrature { estimate: Vec<C64>, error: f64 },

    #[error(
        "ratio limit did not converge after {iterations} steps: last value {last}, gap {gap:.3e}"
    )]
    Convergence {
        last: C64,
        gap: f64,
        iterations: usize,
    },
}

pub type Result<T> = std::result::Result<T, QrwError>;

pub(crate) fn check_disk(what: impl Into<String>, modulus: f64) -> Result<()> {
    if modulus < 1.0 && modulus.is_finite() {
        Ok(())
    } else {
        Err(QrwError::Domain {
            what: what.into(),
            modulus,
        })
    }
}
