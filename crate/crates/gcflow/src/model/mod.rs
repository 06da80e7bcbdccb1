//! The continuous model: initial profiles, the parabolicity cutoff, the flow's
//! right-hand side, and the Gauss curvature diagnostic.

mod cutoff;
mod operator;
mod profile;

pub use cutoff::CutoffSpec;
pub use operator::{gauss_curvature, pde_rhs, pde_rhs_unmodified};
pub use profile::{InitialProfile, Preset, ProfileParams};
