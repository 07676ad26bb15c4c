use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which tail of a packet violated the tail tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRegion {
    /// Probability in `x < 0`.
    NegativePosition,
    /// Probability at `k > 0`.
    PositiveMomentum,
    /// Probability beyond the right edge of the grid.
    RightBoundary,
    /// Probability beyond the grid Nyquist wavenumber.
    Bandwidth,
}

impl fmt::Display for TailRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TailRegion::NegativePosition => "mass in x<0",
            TailRegion::PositiveMomentum => "positive-momentum mass",
            TailRegion::RightBoundary => "mass beyond the right grid edge",
            TailRegion::Bandwidth => "mass beyond the grid Nyquist wavenumber",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{region} {mass:.3e} exceeds tail tolerance {tolerance:.1e}")]
    TailViolation {
        region: TailRegion,
        mass: f64,
        tolerance: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("evolution config rejected: {0}")]
    Config(String),

    #[error("mass {mass:.3e} reached the grid boundary at t = {time} (limit {limit:.1e})")]
    BoundaryMass { time: f64, mass: f64, limit: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("sampling mismatch: {0}")]
    Mismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
