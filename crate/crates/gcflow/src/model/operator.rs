//! Pointwise discretization of the flow's right-hand side and of the Gauss
//! curvature of the generated surface of revolution.
//!
//! The graph u(x, t) > 0 rotated about the x-axis moves by its Gauss curvature
//! exactly when u satisfies
//!
//!   u_t = u_xx / (u (1 + u_x^2)^{3/2}),
//!
//! and the modified equation replaces the factor u by the cutoff g(u).  Both
//! derivatives use centered second-order stencils; boundary nodes are pinned by
//! the solver, so their right-hand side is 0 and no one-sided stencil is needed.

use crate::error::{Error, Result};
use crate::model::CutoffSpec;
use crate::solver::Grid;

fn check_len(u: &[f64], grid: &Grid) -> Result<()> {
    if u.len() != grid.n() {
        return Err(Error::GridMismatch {
            expected: grid.n(),
            got: u.len(),
        });
    }
    Ok(())
}

/// Right-hand side of the modified equation, u_xx / (g(u) (1 + u_x^2)^{3/2}),
/// at interior nodes; 0 at the pinned boundary nodes.
pub fn pde_rhs(u: &[f64], grid: &Grid, cutoff: &CutoffSpec) -> Result<Vec<f64>> {
    check_len(u, grid)?;
    let n = u.len();
    let dx = grid.dx();
    let dx2 = dx * dx;
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let ux = (u[i + 1] - u[i - 1]) / (2.0 * dx);
        let uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / dx2;
        let w = 1.0 + ux * ux;
        out[i] = uxx / (cutoff.g(u[i]) * (w * w.sqrt()));
    }
    Ok(out)
}

/// Right-hand side of the original (unmodified) equation, with u itself as the
/// coefficient.  Only meaningful where u stays away from 0; the caller guards.
pub fn pde_rhs_unmodified(u: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    check_len(u, grid)?;
    let n = u.len();
    let dx = grid.dx();
    let dx2 = dx * dx;
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let ux = (u[i + 1] - u[i - 1]) / (2.0 * dx);
        let uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / dx2;
        let w = 1.0 + ux * ux;
        out[i] = uxx / (u[i] * (w * w.sqrt()));
    }
    Ok(out)
}

/// Gauss curvature K = -u_xx / (u (1 + u_x^2)^2) of the surface of revolution
/// generated by the sampled profile, with the same stencils as [`pde_rhs`];
/// 0 at boundary nodes.  Rejects any nonpositive node value.
pub fn gauss_curvature(u: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    check_len(u, grid)?;
    if let Some(node) = u.iter().position(|&v| v <= 0.0) {
        return Err(Error::DegenerateSurface {
            node,
            value: u[node],
        });
    }
    let n = u.len();
    let dx = grid.dx();
    let dx2 = dx * dx;
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let ux = (u[i + 1] - u[i - 1]) / (2.0 * dx);
        let uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / dx2;
        let w = 1.0 + ux * ux;
        out[i] = -uxx / (u[i] * (w * w));
    }
    Ok(out)
}
