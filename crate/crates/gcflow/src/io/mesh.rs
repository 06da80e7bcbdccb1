//! Wavefront OBJ export of the surface of revolution generated by one
//! snapshot: the graph of u rotated about the x-axis.

use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// Export the snapshot nearest to `time` as a triangulated surface of
/// revolution.  Vertices are (x_i, u_i cos theta_j, u_i sin theta_j) with
/// theta_j = 2 pi j / n_theta; each quad is split into two triangles and the
/// seam j = n_theta wraps back to j = 0, giving n * n_theta vertices and
/// 2 (n - 1) * n_theta triangles.
pub fn export_mesh(traj: &Trajectory, time: f64, n_theta: usize, path: &Path) -> Result<()> {
    let text = mesh_obj_text(traj, time, n_theta)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub(crate) fn mesh_obj_text(traj: &Trajectory, time: f64, n_theta: usize) -> Result<String> {
    if n_theta < 3 {
        return Err(Error::invalid(format!(
            "mesh needs at least 3 angular samples, got {n_theta}"
        )));
    }
    // Nearest snapshot; ties resolve to the earlier one.
    let k = traj
        .times
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - time)
                .abs()
                .partial_cmp(&(*b - time).abs())
                .expect("snapshot times are finite")
        })
        .map(|(k, _)| k)
        .expect("trajectory is never empty");
    let u = &traj.samples[k];
    if let Some(node) = u.iter().position(|&v| v <= 0.0) {
        return Err(Error::DegenerateSurface {
            node,
            value: u[node],
        });
    }

    let n = u.len();
    let mut out = String::new();
    out.push_str(&format!(
        "# surface of revolution at t = {} ({} vertices, {} triangles)\n",
        traj.times[k],
        n * n_theta,
        2 * (n - 1) * n_theta
    ));
    out.push_str("o revolution\n");
    for (i, &radius) in u.iter().enumerate() {
        let x = traj.x[i];
        for j in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            out.push_str(&format!(
                "v {} {} {}\n",
                x,
                radius * theta.cos(),
                radius * theta.sin()
            ));
        }
    }
    // 1-based OBJ indices; vertex (i, j) sits at i * n_theta + j + 1.
    let id = |i: usize, j: usize| i * n_theta + (j % n_theta) + 1;
    for i in 0..n - 1 {
        for j in 0..n_theta {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            out.push_str(&format!("f {a} {b} {c}\n"));
            out.push_str(&format!("f {a} {c} {d}\n"));
        }
    }
    Ok(out)
}
