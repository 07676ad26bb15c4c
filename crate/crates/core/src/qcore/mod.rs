//! Grids, states, potentials and pointwise observables shared by every other module.

mod constants;
mod grid;
mod packet;
mod potential;
mod wave;

pub use constants::PhysicalConstants;
pub use grid::SpatialGrid;
pub use packet::{make_gaussian, GaussianPacketSpec, DEFAULT_TAIL_TOLERANCE};
pub use potential::{AbsorbingPotential, Profile};
pub(crate) use wave::plan_pair as wave_plan;
pub use wave::{observables, spectral_transform, Direction, Observables, Representation, WaveFunction};
