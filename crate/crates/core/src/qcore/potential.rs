use serde::{Deserialize, Serialize};

use super::SpatialGrid;
use crate::error::{ensure, Error, Result};

/// Positive shape function `f(x)` of the absorber on `x < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `f(x) = scale`.
    Constant { scale: f64 },
    /// `f(x) = scale · e^{rate·x}`.
    Exponential { scale: f64, rate: f64 },
    /// `f(x) = scale / (1 + (x/width)²)`.
    Lorentzian { scale: f64, width: f64 },
    /// Piecewise-linear through `(x, f)` pairs, constant beyond the table ends.
    Tabulated { x: Vec<f64>, f: Vec<f64> },
}

impl Profile {
    pub fn unit() -> Self {
        Profile::Constant { scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            ensure(v.is_finite() && v > 0.0, || format!("profile {what} must be positive, got {v}"))
        };
        match self {
            Profile::Constant { scale } => positive(*scale, "scale"),
            Profile::Exponential { scale, rate } => {
                positive(*scale, "scale")?;
                ensure(rate.is_finite(), || "exponential rate must be finite".into())
            }
            Profile::Lorentzian { scale, width } => {
                positive(*scale, "scale")?;
                positive(*width, "width")
            }
            Profile::Tabulated { x, f } => {
                ensure(!x.is_empty() && x.len() == f.len(), || {
                    "tabulated profile needs matching non-empty x and f columns".into()
                })?;
                ensure(x.windows(2).all(|w| w[0] < w[1]), || {
                    "tabulated profile abscissae must be strictly increasing".into()
                })?;
                f.iter().try_for_each(|v| positive(*v, "table value"))
            }
        }
    }

    /// `f(x)`; only meaningful for `x < 0`.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Constant { scale } => *scale,
            Profile::Exponential { scale, rate } => scale * (rate * x).exp(),
            Profile::Lorentzian { scale, width } => {
                let u = x / width;
                scale / (1.0 + u * u)
            }
            Profile::Tabulated { x: xs, f } => {
                if x <= xs[0] {
                    return f[0];
                }
                let last = xs.len() - 1;
                if x >= xs[last] {
                    return f[last];
                }
                let i = xs.partition_point(|&v| v <= x) - 1;
                let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
                f[i] * (1.0 - w) + f[i + 1] * w
            }
        }
    }
}

/// `V(x) = -i V0 θ(-x) f(x)`, stored as the absorption rate `W = V0 f θ(-x)`.
///
/// The point `x = 0` is not absorbed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingPotential {
    v0: f64,
    profile: Profile,
}

impl AbsorbingPotential {
    pub fn new(v0: f64, profile: Profile) -> Result<Self> {
        ensure(v0.is_finite() && v0 >= 0.0, || format!("V0 must be >= 0, got {v0}"))?;
        profile.validate()?;
        Ok(Self { v0, profile })
    }

    /// `V0 = 0`.
    pub fn free() -> Self {
        Self { v0: 0.0, profile: Profile::unit() }
    }

    pub fn step(v0: f64) -> Result<Self> {
        Self::new(v0, Profile::unit())
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Absorption rate `W(x) = -Im V(x)`.
    pub fn rate(&self, x: f64) -> f64 {
        if x < 0.0 && self.v0 > 0.0 {
            self.v0 * self.profile.value(x)
        } else {
            0.0
        }
    }

    /// Absorption rates on the grid; every index `>= zero_index` is exactly 0.
    pub fn rates_on(&self, grid: &SpatialGrid) -> Result<Vec<f64>> {
        let j0 = grid.zero_index();
        let rates: Vec<f64> = (0..grid.len())
            .map(|j| if j < j0 { self.rate(grid.x(j)) } else { 0.0 })
            .collect();
        if rates.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter("absorption rate overflows on the grid".into()));
        }
        if self.v0 > 0.0 && rates[..j0].iter().any(|&r| r <= 0.0) {
            return Err(Error::InvalidParameter(
                "profile underflows to zero inside the grid; f must stay positive on x < 0".into(),
            ));
        }
        Ok(rates)
    }
}
