//! Numerical laboratory for arrival times under complex absorbing potentials.
//!
//! A one-dimensional wavepacket starting in `x > 0` with negative momenta is
//! evolved under `H = H0 - i V0 θ(-x) f(x)`. The crate provides
//!
//! * [`qcore`]: grids, states, absorbing potentials and spectral observables,
//! * [`evolve`]: Strang-split spectral evolution, survival probability and
//!   the two routes to the arrival density,
//! * [`arrival`]: ideal (free-evolution) arrival distributions: the `p δ(x) p`
//!   density, its normalized form, the probability current and the Kijowski
//!   distribution,
//! * [`pdx`]: free and restricted propagators, the path-decomposition
//!   reconstruction, the boundary (edge) kernel, `φ(x)` and the Zeno constant,
//! * [`quad`]: adaptive Gauss–Kronrod quadrature used for the singular kernels.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrival;
pub mod error;
pub mod evolve;
pub mod pdx;
pub mod qcore;
pub mod quad;
pub mod series;

pub use error::{Error, Result};
pub use qcore::{
    AbsorbingPotential, GaussianPacketSpec, PhysicalConstants, Profile, Representation,
    SpatialGrid, WaveFunction,
};
pub use series::{TimeAxis, TimeSeries};
