//! Propagators, path-decomposition kernels and the Zeno-limit quantities `φ(x)` and `C`.

mod grid;
mod kernels;
mod zeno;

pub use grid::{
    edge_kernel_grid, phi_grid_estimate, pdx_reconstruct, smoothed_delta, ColumnMesh, GridPhi, PdxOptions,
    PdxResult,
};
pub use kernels::{
    edge_kernel, edge_kernel_series, free_propagator, free_propagator_dx, restricted_propagator,
    restricted_propagator_dx_origin, Kernel, KernelForm,
};
pub use zeno::{
    constant_c, phi_closed_form, phi_function, resolvent_check, special_integrals, ConstantMode, PhiValue,
    ResolventCheck, SpecialIntegrals, FACTORIZATION_THRESHOLD,
};
