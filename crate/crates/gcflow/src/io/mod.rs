//! Configuration files, trajectory and report serialization, and the
//! surface-of-revolution mesh export.
//!
//! Configs are flat JSON documents; presets are named by string.  Trajectories
//! serialize to JSON (metadata object plus times[], x[], u[][]) that round-trips
//! bit-exactly, or to CSV `t,x,u` rows for plotting pipelines.

mod mesh;

pub use mesh::export_mesh;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::InvariantReport;
use crate::error::{Error, Result};
use crate::model::{InitialProfile, Preset};
use crate::solver::{DtPolicy, Grid, NewtonOptions, SolverConfig, Stepper, Trajectory};

pub const VALID_CHECKS: [&str; 5] = [
    "bounds",
    "gradient_range",
    "bernstein",
    "decay",
    "mixed_derivative",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshConfig {
    pub enabled: bool,
    pub time: f64,
    pub n_theta: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig {
            enabled: false,
            time: 0.0,
            n_theta: 32,
        }
    }
}

/// A validated run configuration: the solver setup plus checker names, the
/// decay epsilon, output paths, and the mesh request.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub checks: Vec<String>,
    pub epsilon: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub mesh: MeshConfig,
}

/// The raw on-disk schema; every field beyond the profile, grid, and t_end is
/// optional and defaulted.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    profile: String,
    c: Option<f64>,
    amplitude: Option<f64>,
    r0: Option<f64>,
    sigma: Option<f64>,
    #[serde(rename = "L")]
    l: f64,
    n: usize,
    t_end: f64,
    stepper: Option<String>,
    dt: Option<f64>,
    safety: Option<f64>,
    newton_tol: Option<f64>,
    newton_max_iter: Option<usize>,
    snapshot_every: Option<usize>,
    checks: Option<Vec<String>>,
    epsilon: Option<f64>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    mesh: Option<MeshConfig>,
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::validation(field, "must be finite"))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let preset = match raw.profile.as_str() {
            "Constant" => Preset::Constant,
            "BumpOnConstant" => Preset::BumpOnConstant,
            "SmoothedStep" => Preset::SmoothedStep,
            "DecayingSinusoid" => Preset::DecayingSinusoid,
            other => {
                return Err(Error::validation(
                    "preset",
                    format!("unknown profile preset '{other}'"),
                ))
            }
        };
        let c = finite("c", raw.c.ok_or_else(|| Error::validation("c", "required"))?)?;
        let need = |name: &str, v: Option<f64>| -> Result<f64> {
            finite(
                name,
                v.ok_or_else(|| Error::validation(name, format!("required for {preset:?}")))?,
            )
        };
        let profile = match preset {
            Preset::Constant => InitialProfile::constant(c),
            Preset::BumpOnConstant => {
                InitialProfile::bump_on_constant(c, need("amplitude", raw.amplitude)?, need("r0", raw.r0)?)
            }
            Preset::SmoothedStep => {
                InitialProfile::smoothed_step(c, need("amplitude", raw.amplitude)?, need("r0", raw.r0)?)
            }
            Preset::DecayingSinusoid => {
                InitialProfile::decaying_sinusoid(c, need("amplitude", raw.amplitude)?)
            }
        }
        .map_err(|e| Error::validation("profile", e.to_string()))?;

        if raw.n % 2 == 0 || raw.n < 3 {
            return Err(Error::validation(
                "grid parity",
                format!("n must be odd and at least 3, got {}", raw.n),
            ));
        }
        let grid = Grid::new(finite("L", raw.l)?, raw.n)
            .map_err(|e| Error::validation("grid", e.to_string()))?;

        let stepper = match raw.stepper.as_deref() {
            None | Some("explicit") => Stepper::Explicit,
            Some("implicit") => Stepper::ImplicitEuler,
            Some(other) => {
                return Err(Error::validation(
                    "stepper",
                    format!("expected 'explicit' or 'implicit', got '{other}'"),
                ))
            }
        };
        let dt_policy = match raw.dt {
            None => DtPolicy::Auto,
            Some(dt) => {
                let dt = finite("dt", dt)?;
                if dt <= 0.0 {
                    return Err(Error::validation("dt", "must be positive"));
                }
                DtPolicy::Fixed(dt)
            }
        };

        let solver = SolverConfig {
            profile,
            sigma: finite("sigma", raw.sigma.unwrap_or(1.0))?,
            grid,
            t_end: finite("t_end", raw.t_end)?,
            stepper,
            dt_policy,
            safety: finite("safety", raw.safety.unwrap_or(0.9))?,
            newton: NewtonOptions {
                tol: finite("newton_tol", raw.newton_tol.unwrap_or(1e-10))?,
                max_iter: raw.newton_max_iter.unwrap_or(30),
            },
            snapshot_every: raw.snapshot_every.unwrap_or(10),
        };
        solver
            .validate()
            .map_err(|e| Error::validation("solver", e.to_string()))?;

        let checks = raw.checks.unwrap_or_else(|| vec!["bounds".to_string()]);
        for name in &checks {
            if !VALID_CHECKS.contains(&name.as_str()) {
                return Err(Error::validation(
                    "checks",
                    format!("unknown checker '{name}'"),
                ));
            }
        }
        let mesh = raw.mesh.unwrap_or_default();
        if mesh.n_theta < 3 {
            return Err(Error::validation(
                "mesh.n_theta",
                format!("need at least 3 angular samples, got {}", mesh.n_theta),
            ));
        }
        let epsilon = finite("epsilon", raw.epsilon.unwrap_or(0.1))?;
        if epsilon <= 0.0 {
            return Err(Error::validation("epsilon", "must be positive"));
        }
        if let Some(path) = &raw.output {
            if path.as_os_str().is_empty() {
                return Err(Error::validation("output", "path must be nonempty"));
            }
        }
        Ok(RunConfig {
            solver,
            checks,
            epsilon,
            seed: raw.seed.unwrap_or(0),
            output: raw.output,
            mesh,
        })
    }
}

/// Parse and validate a JSON run configuration.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    RunConfig::from_json(&text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Json,
    Csv,
}

/// Write a trajectory.  JSON round-trips bit-exactly; CSV emits the header
/// `t,x,u` and one row per (snapshot, node) with 17 significant digits.
pub fn write_trajectory(traj: &Trajectory, path: &Path, format: TrajectoryFormat) -> Result<()> {
    let text = match format {
        TrajectoryFormat::Json => {
            let mut s = serde_json::to_string(traj).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            s
        }
        TrajectoryFormat::Csv => {
            let mut s = String::from("t,x,u\n");
            for (k, row) in traj.samples.iter().enumerate() {
                let t = traj.times[k];
                for (i, &u) in row.iter().enumerate() {
                    s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", t, traj.x[i], u));
                }
            }
            s
        }
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Read a JSON trajectory and re-check its shape invariants.
pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)?;
    let traj: Trajectory =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    traj.validate()?;
    Ok(traj)
}

/// Write the checker reports as a JSON list.
pub fn write_report(reports: &[InvariantReport], path: &Path) -> Result<()> {
    let mut s =
        serde_json::to_string_pretty(reports).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
