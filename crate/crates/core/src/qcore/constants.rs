use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Reduced Planck constant and particle mass. Defaults to natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        ensure(hbar.is_finite() && hbar > 0.0, || format!("hbar must be positive, got {hbar}"))?;
        ensure(mass.is_finite() && mass > 0.0, || format!("mass must be positive, got {mass}"))?;
        Ok(Self { hbar, mass })
    }

    /// Angular frequency `ħk²/2m` of a plane wave.
    #[inline]
    pub fn kinetic_frequency(&self, k: f64) -> f64 {
        self.hbar * k * k / (2.0 * self.mass)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}
