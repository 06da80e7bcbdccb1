//! Command-line surface tying the modules into reproducible experiments.
//!
//! Exit codes: 0 on success, 1 when a checker fails, 2 on configuration or
//! runtime errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{convergence_study, run_named_checks};
use crate::barriers::{choose_decay_params, choose_lambda, decay_radius, lattice, Barrier, CoshBarrier, DecayBarrier};
use crate::error::{Error, Result};
use crate::io::{export_mesh, parse_config, read_trajectory, write_report, write_trajectory, RunConfig, TrajectoryFormat};
use crate::solver::{evolve, Trajectory};

#[derive(Parser)]
#[command(name = "gcflow", about = "Gauss curvature flow of rotational graphs: solver, barriers, and theorem checks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver and write the trajectory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output path; falls back to the config's `output` field.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the configured checkers and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Check a previously written trajectory instead of recomputing one.
        #[arg(long)]
        traj: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's epsilon for the decay check.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Print the chosen barrier parameters (h, w, lambda, K) and the lattice
    /// residual extrema for the given constants.
    Barrier {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Positive lower bound of the initial profile.
        #[arg(long)]
        m: Option<f64>,
        /// Supremum of the initial profile.
        #[arg(long)]
        sup: Option<f64>,
        /// Radius outside which the profile is constant.
        #[arg(long)]
        r0: Option<f64>,
        /// Time horizon T.
        #[arg(long)]
        t: Option<f64>,
        /// Relative margin of lambda over 4/m.
        #[arg(long, default_value_t = 0.25)]
        margin: f64,
    },
    /// Export the surface of revolution at a snapshot as a Wavefront OBJ.
    Mesh {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        traj: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Snapshot time (nearest recorded one is used); falls back to the
        /// config's mesh.time.
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        n_theta: Option<usize>,
    },
    /// Print the grid-refinement order table.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

fn load_or_evolve(config: &RunConfig, traj: &Option<PathBuf>) -> Result<Trajectory> {
    match traj {
        Some(path) => read_trajectory(path),
        None => evolve(&config.solver),
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            format,
        } => {
            let cfg = parse_config(&config)?;
            let out = out
                .or(cfg.output.clone())
                .ok_or_else(|| Error::validation("output", "no --out flag and no output path in the config"))?;
            let traj = evolve(&cfg.solver)?;
            let format = match format {
                Format::Json => TrajectoryFormat::Json,
                Format::Csv => TrajectoryFormat::Csv,
            };
            write_trajectory(&traj, &out, format)?;
            println!(
                "wrote {} snapshots x {} nodes to {}",
                traj.times.len(),
                traj.x.len(),
                out.display()
            );
            Ok(0)
        }
        Command::Verify {
            config,
            traj,
            out,
            epsilon,
        } => {
            let cfg = parse_config(&config)?;
            let trajectory = load_or_evolve(&cfg, &traj)?;
            let eps = epsilon.unwrap_or(cfg.epsilon);
            let reports = run_named_checks(&trajectory, &cfg.checks, eps)?;
            for r in &reports {
                let status = if r.pass {
                    if r.note.as_deref().map_or(false, |n| n.contains("inconclusive")) {
                        "pass (with warning)"
                    } else {
                        "pass"
                    }
                } else {
                    "FAIL"
                };
                println!(
                    "check {:<17} {status}: worst violation {:+.6e} vs tolerance {:.3e}{}",
                    r.name,
                    r.worst_violation,
                    r.tolerance_used,
                    r.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default()
                );
            }
            if let Some(path) = out {
                write_report(&reports, &path)?;
            }
            Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
        }
        Command::Barrier {
            config,
            epsilon,
            m,
            sup,
            r0,
            t,
            margin,
        } => {
            let cfg = config.as_deref().map(parse_config).transpose()?;
            let profile = cfg.as_ref().map(|c| &c.solver.profile);
            let m = m
                .or(profile.map(|p| p.m()))
                .ok_or_else(|| Error::validation("m", "pass --m or a config"))?;
            let sup = sup
                .or(profile.map(|p| p.sup_f()))
                .ok_or_else(|| Error::validation("sup", "pass --sup or a config"))?;
            let r0 = r0.or(profile.map(|p| p.support_radius())).unwrap_or(1.0);
            let horizon = t
                .or(cfg.as_ref().map(|c| c.solver.t_end))
                .ok_or_else(|| Error::validation("t", "pass --t or a config"))?;
            let eps = epsilon
                .or(cfg.as_ref().map(|c| c.epsilon))
                .ok_or_else(|| Error::validation("epsilon", "pass --epsilon or a config"))?;

            let (h, w) = choose_decay_params(eps, sup, r0, m, horizon)?;
            let lambda = choose_lambda(m, margin)?;
            let k = decay_radius(h, w, eps);
            println!("h = {h}");
            println!("w = {w}");
            println!("lambda = {lambda}");
            println!("K = {k}");

            let half_width = cfg
                .as_ref()
                .map(|c| c.solver.grid.half_width())
                .unwrap_or(20.0);
            let xs = lattice(-half_width, half_width, 201);
            let ts = lattice(0.0, horizon, 101);
            let decay = Barrier::DecayUpper(DecayBarrier::new(
                cfg.as_ref()
                    .and_then(|c| c.solver.profile.far_field_c())
                    .unwrap_or(m),
                eps,
                h,
                w,
                m,
            )?);
            let (dmin, dmax, dat) = decay.residual_extrema(&xs, &ts);
            println!(
                "decay residual on [{:.3}, {:.3}] x [0, {horizon}]: min = {dmin:.6e}, max = {dmax:.6e} at (x, t) = ({:.4}, {:.4})",
                -half_width, half_width, dat.0, dat.1
            );
            println!("decay residual margin = {:.6e}", -dmax);
            let cosh = Barrier::Cosh(CoshBarrier::new(sup, sup, half_width, lambda, m)?);
            let (cmin, cmax, cat) = cosh.residual_extrema(&xs, &ts);
            println!(
                "cosh residual (a = M = {sup}, R = {half_width}): min = {cmin:.6e}, max = {cmax:.6e} at (x, t) = ({:.4}, {:.4})",
                cat.0, cat.1
            );
            println!("cosh residual margin = {:.6e}", -cmax);
            Ok(if dmax < 0.0 && cmax < 0.0 { 0 } else { 1 })
        }
        Command::Mesh {
            config,
            traj,
            out,
            time,
            n_theta,
        } => {
            let cfg = parse_config(&config)?;
            let trajectory = load_or_evolve(&cfg, &traj)?;
            let time = time.unwrap_or(cfg.mesh.time);
            let n_theta = n_theta.unwrap_or(cfg.mesh.n_theta);
            export_mesh(&trajectory, time, n_theta, &out)?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Convergence { config, levels } => {
            let cfg = parse_config(&config)?;
            let study = convergence_study(&cfg.solver, levels)?;
            println!("{:>6} {:>12} {:>14} {:>8}", "n", "dx", "|u_k-u_k+1|", "order");
            for (k, &n) in study.ns.iter().enumerate() {
                let diff = study
                    .diffs
                    .get(k)
                    .map(|d| format!("{d:.6e}"))
                    .unwrap_or_else(|| "-".into());
                let order = if k == 0 {
                    "-".to_string()
                } else {
                    study
                        .orders
                        .get(k - 1)
                        .map(|o| {
                            if o.is_nan() {
                                "n/a".to_string()
                            } else {
                                format!("{o:.3}")
                            }
                        })
                        .unwrap_or_else(|| "-".into())
                };
                println!("{:>6} {:>12.6e} {:>14} {:>8}", n, study.dxs[k], diff, order);
            }
            let order = study.order();
            if order.is_nan() {
                println!("order estimate: n/a (differences at rounding level)");
            } else {
                println!("order estimate: {order:.3}");
            }
            Ok(0)
        }
    }
}

/// Parse argv, run the requested subcommand, and return the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/usage; version and help are successes.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
