//! Time integration on a truncated domain.
//!
//! The continuous problem lives on all of R; we truncate to [-L, L] and pin
//! Dirichlet values u(+-L, t) = sigma f(+-L) for all t.  For compactly
//! supported perturbations this is exact at the boundary (f is constant
//! there and solutions stay near that constant); otherwise it introduces a
//! boundary layer, so invariant checks restrict to the window |x| <= L/2.
//!
//! Two steppers are provided: forward Euler under the stability bound derived
//! from the coefficient floor g(u) >= m/4, and backward Euler solved by Newton
//! iteration with the analytic tridiagonal Jacobian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{pde_rhs, CutoffSpec, InitialProfile, ProfileParams};

/// Uniform grid on [-L, L] with an odd node count so x = 0 is a node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    n: usize,
    dx: f64,
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid(format!(
                "grid half-width must be positive and finite, got {half_width}"
            )));
        }
        if n < 3 {
            return Err(Error::invalid(format!("grid needs at least 3 nodes, got {n}")));
        }
        if n % 2 == 0 {
            return Err(Error::invalid(format!(
                "grid node count must be odd so x = 0 is a node, got {n}"
            )));
        }
        let dx = 2.0 * half_width / (n - 1) as f64;
        Ok(Grid { half_width, n, dx })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// i-th node.  Evaluated so that x_0 = -L, the center node, and x_{n-1} = L
    /// are exact in floating point.
    pub fn node(&self, i: usize) -> f64 {
        self.half_width * ((2 * i) as f64 / (self.n - 1) as f64 - 1.0)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the node at x = 0.
    pub fn center_index(&self) -> usize {
        (self.n - 1) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stepper {
    Explicit,
    ImplicitEuler,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DtPolicy {
    /// Explicit: the stability bound; implicit: ten times it.  Either way the
    /// step is then rounded down so that t_end is hit in a whole number of
    /// uniform steps.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 30,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub profile: InitialProfile,
    pub sigma: f64,
    pub grid: Grid,
    pub t_end: f64,
    pub stepper: Stepper,
    pub dt_policy: DtPolicy,
    pub safety: f64,
    pub newton: NewtonOptions,
    pub snapshot_every: usize,
}

impl SolverConfig {
    /// Config with the documented defaults: sigma = 1, explicit stepper with
    /// automatic step, safety 0.9, Newton tol 1e-10 / 30 iterations, every
    /// tenth step recorded.
    pub fn new(profile: InitialProfile, grid: Grid, t_end: f64) -> Self {
        SolverConfig {
            profile,
            sigma: 1.0,
            grid,
            t_end,
            stepper: Stepper::Explicit,
            dt_policy: DtPolicy::Auto,
            safety: 0.9,
            newton: NewtonOptions::default(),
            snapshot_every: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma <= 1.0) {
            return Err(Error::invalid(format!("sigma must lie in [0, 1], got {}", self.sigma)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::invalid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::invalid(format!("safety must lie in (0, 1], got {}", self.safety)));
        }
        if !(self.newton.tol > 0.0) {
            return Err(Error::invalid("newton.tol must be positive"));
        }
        if self.snapshot_every == 0 {
            return Err(Error::invalid("snapshot_every must be at least 1"));
        }
        if let DtPolicy::Fixed(dt) = self.dt_policy {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::invalid(format!("fixed dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

/// Constants of a run carried along with its snapshots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub profile: ProfileParams,
    pub sigma: f64,
    pub m: f64,
    pub sup_f: f64,
    pub grad_min: f64,
    pub grad_max: f64,
    pub far_field_c: Option<f64>,
    pub support_radius: f64,
    pub half_width: f64,
    pub n: usize,
    pub dx: f64,
    pub t_end: f64,
    pub stepper: Stepper,
    /// Actual uniform step the run used.
    pub dt: f64,
    pub safety: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub snapshot_every: usize,
    /// Evaluations of the cutoff on its non-identity branch during the run.
    pub cutoff_hits: u64,
}

/// Snapshots of one run: strictly increasing times starting at 0, one profile
/// sample per time, samples[0] = sigma f on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub metadata: TrajectoryMeta,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    #[serde(rename = "u")]
    pub samples: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Assemble a trajectory from raw parts, enforcing the shape invariants
    /// (not the solution behavior -- checkers judge that).
    pub fn from_parts(
        metadata: TrajectoryMeta,
        times: Vec<f64>,
        x: Vec<f64>,
        samples: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let traj = Trajectory {
            metadata,
            times,
            x,
            samples,
        };
        traj.validate()?;
        Ok(traj)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() || self.times[0] != 0.0 {
            return Err(Error::validation("times", "must start at 0"));
        }
        if self.times.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::validation("times", "must be strictly increasing"));
        }
        if self.samples.len() != self.times.len() {
            return Err(Error::validation("u", "one sample row per time required"));
        }
        if self.x.len() != self.metadata.n {
            return Err(Error::validation("x", "node array does not match metadata n"));
        }
        if self.samples.iter().any(|row| row.len() != self.x.len()) {
            return Err(Error::validation("u", "sample rows must match the node array"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.metadata.half_width, self.metadata.n)
            .expect("trajectory metadata always holds a valid grid")
    }

    pub fn final_sample(&self) -> &[f64] {
        self.samples.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }
}

/// sigma f sampled on the grid.
pub fn sample_profile(profile: &InitialProfile, sigma: f64, grid: &Grid) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::invalid(format!("sigma must lie in [0, 1], got {sigma}")));
    }
    Ok((0..grid.n())
        .map(|i| sigma * profile.value(grid.node(i)))
        .collect())
}

/// Largest stable forward-Euler step.  The diffusion coefficient is at most
/// 1/(g(u)) <= 4/m, so the classical bound dt <= dx^2/(2 max-coeff) becomes
/// safety * m * dx^2 / 8.
pub fn stable_dt(grid: &Grid, m: f64, safety: f64) -> f64 {
    safety * m * grid.dx() * grid.dx() / 8.0
}

/// One forward-Euler step; boundary nodes are left unchanged (pinned).
pub fn step_explicit(u: &[f64], dt: f64, grid: &Grid, cutoff: &CutoffSpec) -> Result<Vec<f64>> {
    let rhs = pde_rhs(u, grid, cutoff)?;
    let mut next = u.to_vec();
    for i in 1..u.len() - 1 {
        next[i] = u[i] + dt * rhs[i];
    }
    Ok(next)
}

/// Solve a general tridiagonal system by the Thomas algorithm.
/// `sub[i]` couples row i+1 to column i; `sup[i]` couples row i to column i+1.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert_eq!(rhs.len(), n);
    debug_assert!(n == 0 || (sub.len() == n - 1 && sup.len() == n - 1));
    let mut c = vec![0.0; n.saturating_sub(1)];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if !denom.is_finite() || denom.abs() < 1e-300 {
        return Err(Error::invalid("tridiagonal solve hit a vanishing pivot"));
    }
    if n > 1 {
        c[0] = sup[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i - 1] * c[i - 1];
        if !denom.is_finite() || denom.abs() < 1e-300 {
            return Err(Error::invalid("tridiagonal solve hit a vanishing pivot"));
        }
        if i < n - 1 {
            c[i] = sup[i] / denom;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Ok(x)
}

/// One backward-Euler step: solve F(v) = v - u - dt rhs(v) = 0 at interior
/// nodes by Newton iteration with the analytic tridiagonal Jacobian, boundary
/// values pinned.  Converged when the max-norm of F drops below `newton.tol`.
pub fn step_implicit(
    u: &[f64],
    dt: f64,
    grid: &Grid,
    cutoff: &CutoffSpec,
    newton: &NewtonOptions,
) -> Result<Vec<f64>> {
    let n = u.len();
    if n != grid.n() {
        return Err(Error::GridMismatch {
            expected: grid.n(),
            got: n,
        });
    }
    let dx = grid.dx();
    let dx2 = dx * dx;
    let ni = n - 2;
    let mut v = u.to_vec();
    let mut residual = f64::INFINITY;

    let mut diag = vec![0.0; ni];
    let mut sub = vec![0.0; ni.saturating_sub(1)];
    let mut sup = vec![0.0; ni.saturating_sub(1)];
    let mut neg_f = vec![0.0; ni];

    for _ in 0..newton.max_iter {
        residual = 0.0f64;
        for i in 1..n - 1 {
            let j = i - 1;
            let p = (v[i + 1] - v[i - 1]) / (2.0 * dx);
            let a2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / dx2;
            let g = cutoff.g(v[i]);
            let gp = cutoff.g_prime(v[i]);
            let w = 1.0 + p * p;
            let w12 = w.sqrt();
            let w32 = w * w12;
            let denom = g * w32;
            let rhs_i = a2 / denom;

            let f_i = v[i] - u[i] - dt * rhs_i;
            neg_f[j] = -f_i;
            residual = residual.max(f_i.abs());

            // d rhs / d v_{i+-1} and d rhs / d v_i by the chain rule.
            let dw_term = a2 * g * 3.0 * p * w12 / (2.0 * dx) / (denom * denom);
            let d_plus = 1.0 / (dx2 * denom) - dw_term;
            let d_minus = 1.0 / (dx2 * denom) + dw_term;
            let d_center = -2.0 / (dx2 * denom) - a2 * gp * w32 / (denom * denom);

            diag[j] = 1.0 - dt * d_center;
            if j > 0 {
                sub[j - 1] = -dt * d_minus;
            }
            if j < ni - 1 {
                sup[j] = -dt * d_plus;
            }
        }
        if residual < newton.tol {
            return Ok(v);
        }
        let delta = solve_tridiagonal(&sub, &diag, &sup, &neg_f)?;
        for (j, d) in delta.iter().enumerate() {
            v[j + 1] += d;
        }
        if v.iter().any(|x| !x.is_finite()) {
            break;
        }
    }
    Err(Error::NewtonDivergence {
        max_iter: newton.max_iter,
        residual,
    })
}

fn advance(
    u: &[f64],
    dt: f64,
    grid: &Grid,
    cutoff: &CutoffSpec,
    stepper: Stepper,
    newton: &NewtonOptions,
) -> Result<Vec<f64>> {
    match stepper {
        Stepper::Explicit => step_explicit(u, dt, grid, cutoff),
        Stepper::ImplicitEuler => match step_implicit(u, dt, grid, cutoff, newton) {
            Ok(v) => Ok(v),
            // Halve the step once on divergence, then give up.
            Err(Error::NewtonDivergence { .. }) => {
                let half = step_implicit(u, 0.5 * dt, grid, cutoff, newton)?;
                step_implicit(&half, 0.5 * dt, grid, cutoff, newton)
            }
            Err(e) => Err(e),
        },
    }
}

/// Advance sigma f from t = 0 to t_end, recording every `snapshot_every`-th
/// state plus the final one.
pub fn evolve(config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    let grid = &config.grid;
    let profile = &config.profile;
    let cutoff = CutoffSpec::instrumented(profile.m())?;
    let u0 = sample_profile(profile, config.sigma, grid)?;

    let (dt, nsteps) = match config.dt_policy {
        DtPolicy::Auto => {
            let base = stable_dt(grid, profile.m(), config.safety);
            let target = match config.stepper {
                Stepper::Explicit => base,
                Stepper::ImplicitEuler => 10.0 * base,
            };
            let nsteps = (config.t_end / target).ceil().max(1.0) as usize;
            (config.t_end / nsteps as f64, nsteps)
        }
        DtPolicy::Fixed(dt) => {
            let nsteps = (config.t_end / dt).ceil().max(1.0) as usize;
            (dt, nsteps)
        }
    };

    let mut u = u0.clone();
    let mut times = vec![0.0];
    let mut samples = vec![u0];
    let mut t_prev = 0.0;
    for k in 1..=nsteps {
        let t_k = if k == nsteps {
            config.t_end
        } else {
            k as f64 * dt
        };
        let h = t_k - t_prev;
        u = advance(&u, h, grid, &cutoff, config.stepper, &config.newton)?;
        if let Some(node) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::StabilityViolation {
                node,
                x: grid.node(node),
                t: t_k,
            });
        }
        if k % config.snapshot_every == 0 || k == nsteps {
            times.push(t_k);
            samples.push(u.clone());
        }
        t_prev = t_k;
    }

    let metadata = TrajectoryMeta {
        profile: profile.params(),
        sigma: config.sigma,
        m: profile.m(),
        sup_f: profile.sup_f(),
        grad_min: profile.grad_min(),
        grad_max: profile.grad_max(),
        far_field_c: profile.far_field_c(),
        support_radius: profile.support_radius(),
        half_width: grid.half_width(),
        n: grid.n(),
        dx: grid.dx(),
        t_end: config.t_end,
        stepper: config.stepper,
        dt,
        safety: config.safety,
        newton_tol: config.newton.tol,
        newton_max_iter: config.newton.max_iter,
        snapshot_every: config.snapshot_every,
        cutoff_hits: cutoff.non_identity_hits(),
    };
    Trajectory::from_parts(metadata, times, grid.nodes(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> InitialProfile {
        InitialProfile::bump_on_constant(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = Grid::new(1.0, 3).unwrap();
        assert_eq!(g.nodes(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(g.dx(), 1.0);
        let g = Grid::new(10.0, 2001).unwrap();
        assert_eq!(g.dx(), 0.01);
        assert_eq!(g.node(0), -10.0);
        assert_eq!(g.node(1000), 0.0);
        assert_eq!(g.node(2000), 10.0);
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid::new(1.0, 4).is_err());
        assert!(Grid::new(1.0, 2).is_err());
        assert!(Grid::new(0.0, 5).is_err());
        assert!(Grid::new(-2.0, 5).is_err());
    }

    #[test]
    fn sampling_scales_by_sigma() {
        let g = Grid::new(5.0, 101).unwrap();
        let constant = InitialProfile::constant(2.0).unwrap();
        let s = sample_profile(&constant, 1.0, &g).unwrap();
        assert!(s.iter().all(|&v| v == 2.0));
        let z = sample_profile(&bump(), 0.0, &g).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        // Bump value at the center node: 1 + e * e^{-1} = 2.
        let b = sample_profile(&bump(), 1.0, &g).unwrap();
        assert!((b[g.center_index()] - 2.0).abs() < 1e-14);
        assert!(sample_profile(&bump(), 1.5, &g).is_err());
        assert!(sample_profile(&bump(), -0.1, &g).is_err());
    }

    #[test]
    fn stable_dt_arithmetic() {
        let g = Grid::new(0.5, 11).unwrap(); // dx = 0.1
        assert!((stable_dt(&g, 1.0, 0.9) - 1.125e-3).abs() < 1e-18);
        assert!((stable_dt(&g, 2.0, 1.0) - 2.5e-3).abs() < 1e-18);
        let g2 = Grid::new(1.0, 11).unwrap(); // dx doubled
        assert!((stable_dt(&g2, 1.0, 0.9) / stable_dt(&g, 1.0, 0.9) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_fixed_point_on_constants() {
        let g = Grid::new(5.0, 101).unwrap();
        let cutoff = CutoffSpec::new(2.0).unwrap();
        let u = vec![2.0; 101];
        let next = step_explicit(&u, 1e-3, &g, &cutoff).unwrap();
        assert_eq!(next, u);
    }

    #[test]
    fn explicit_single_step_on_parabola() {
        // rhs(0) = 2 exactly for u = 1 + x^2, so one step moves u(0) by 2 dt.
        let g = Grid::new(1.0, 41).unwrap();
        let cutoff = CutoffSpec::new(1.0).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|x| 1.0 + x * x).collect();
        let dt = 1e-4;
        let next = step_explicit(&u, dt, &g, &cutoff).unwrap();
        let mid = g.center_index();
        assert!((next[mid] - (1.0 + 2.0 * dt)).abs() < 1e-15);
    }

    #[test]
    fn explicit_step_doubling_is_first_order() {
        // Two half steps vs one full step differ by O(dt^2): the defect ratio
        // under dt-halving should approach 4.
        let g = Grid::new(5.0, 201).unwrap();
        let cutoff = CutoffSpec::new(1.0).unwrap();
        let u = sample_profile(&bump(), 1.0, &g).unwrap();
        let defect = |dt: f64| {
            let one = step_explicit(&u, dt, &g, &cutoff).unwrap();
            let half = step_explicit(&u, 0.5 * dt, &g, &cutoff).unwrap();
            let two = step_explicit(&half, 0.5 * dt, &g, &cutoff).unwrap();
            one.iter()
                .zip(two.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let d1 = defect(4e-4);
        let d2 = defect(2e-4);
        let ratio = d1 / d2;
        assert!(
            (ratio - 4.0).abs() < 0.5,
            "step-doubling defect ratio {ratio}, defects {d1:.3e}/{d2:.3e}"
        );
    }

    #[test]
    fn implicit_converges_immediately_on_constants() {
        let g = Grid::new(5.0, 51).unwrap();
        let cutoff = CutoffSpec::new(2.0).unwrap();
        let u = vec![2.0; 51];
        let opts = NewtonOptions {
            tol: 1e-12,
            max_iter: 1,
        };
        // One residual evaluation suffices: F(u) = 0 exactly.
        let v = step_implicit(&u, 1e-2, &g, &cutoff, &opts).unwrap();
        assert_eq!(v, u);
    }

    #[test]
    fn implicit_zero_iterations_diverges() {
        let g = Grid::new(5.0, 51).unwrap();
        let cutoff = CutoffSpec::new(2.0).unwrap();
        let u = vec![2.0; 51];
        let opts = NewtonOptions {
            tol: 1e-12,
            max_iter: 0,
        };
        assert!(matches!(
            step_implicit(&u, 1e-2, &g, &cutoff, &opts),
            Err(Error::NewtonDivergence { .. })
        ));
    }

    #[test]
    fn implicit_and_explicit_steps_differ_at_second_order() {
        let g = Grid::new(5.0, 201).unwrap();
        let cutoff = CutoffSpec::new(1.0).unwrap();
        let u = sample_profile(&bump(), 1.0, &g).unwrap();
        let opts = NewtonOptions {
            tol: 1e-13,
            max_iter: 50,
        };
        let gap = |dt: f64| {
            let e = step_explicit(&u, dt, &g, &cutoff).unwrap();
            let i = step_implicit(&u, dt, &g, &cutoff, &opts).unwrap();
            e.iter()
                .zip(i.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = gap(4e-4) / gap(2e-4);
        assert!((ratio - 4.0).abs() < 0.5, "per-step gap ratio {ratio}");
    }

    #[test]
    fn evolve_constant_is_static() {
        let profile = InitialProfile::constant(2.0).unwrap();
        let grid = Grid::new(5.0, 101).unwrap();
        for stepper in [Stepper::Explicit, Stepper::ImplicitEuler] {
            let mut config = SolverConfig::new(profile.clone(), grid.clone(), 0.3);
            config.stepper = stepper;
            let traj = evolve(&config).unwrap();
            for row in &traj.samples {
                for &v in row {
                    assert!((v - 2.0).abs() < 1e-12);
                }
            }
            assert_eq!(traj.times[0], 0.0);
            assert_eq!(traj.final_time(), 0.3);
        }
    }

    #[test]
    fn evolve_sigma_zero_stays_zero() {
        let grid = Grid::new(5.0, 101).unwrap();
        let mut config = SolverConfig::new(bump(), grid, 0.2);
        config.sigma = 0.0;
        let traj = evolve(&config).unwrap();
        for row in &traj.samples {
            assert!(row.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn evolve_bump_relaxes_and_matches_finer_run() {
        let t_end = 0.5;
        let coarse = {
            let mut c = SolverConfig::new(bump(), Grid::new(10.0, 401).unwrap(), t_end);
            c.snapshot_every = 200;
            evolve(&c).unwrap()
        };
        let max0 = coarse.samples[0].iter().cloned().fold(f64::MIN, f64::max);
        let max_end = coarse.final_sample().iter().cloned().fold(f64::MIN, f64::max);
        assert!(max_end < max0, "bump failed to relax: {max_end} vs {max0}");

        // Doubled resolution as its own oracle for the final maximum.
        let fine = {
            let mut c = SolverConfig::new(bump(), Grid::new(10.0, 801).unwrap(), t_end);
            c.snapshot_every = 800;
            evolve(&c).unwrap()
        };
        let max_end_fine = fine.final_sample().iter().cloned().fold(f64::MIN, f64::max);
        assert!(
            (max_end - max_end_fine).abs() < 5e-3,
            "coarse {max_end} vs fine {max_end_fine}"
        );
        assert!(max_end_fine < max0);
    }

    #[test]
    fn evolve_reports_newton_divergence() {
        let grid = Grid::new(5.0, 101).unwrap();
        let mut config = SolverConfig::new(bump(), grid, 0.1);
        config.stepper = Stepper::ImplicitEuler;
        config.newton = NewtonOptions {
            tol: 1e-10,
            max_iter: 0,
        };
        assert!(matches!(
            evolve(&config),
            Err(Error::NewtonDivergence { .. })
        ));
    }

    #[test]
    fn discrete_extrema_are_monotone_for_every_preset() {
        // The explicit scheme at or below the stable step is a convex update,
        // so node maxima cannot grow and node minima cannot shrink.
        let profiles = vec![
            InitialProfile::constant(2.0).unwrap(),
            bump(),
            InitialProfile::smoothed_step(1.0, 1.0, 1.0).unwrap(),
            InitialProfile::decaying_sinusoid(1.5, 1.0).unwrap(),
        ];
        for profile in profiles {
            let mut config = SolverConfig::new(profile, Grid::new(8.0, 201).unwrap(), 0.2);
            config.snapshot_every = 5;
            let traj = evolve(&config).unwrap();
            let mut prev_max = f64::INFINITY;
            let mut prev_min = f64::NEG_INFINITY;
            for (k, row) in traj.samples.iter().enumerate() {
                let row_max = row.iter().cloned().fold(f64::MIN, f64::max);
                let row_min = row.iter().cloned().fold(f64::MAX, f64::min);
                if k > 0 {
                    assert!(row_max <= prev_max + 1e-12, "max grew at snapshot {k}");
                    assert!(row_min >= prev_min - 1e-12, "min shrank at snapshot {k}");
                }
                prev_max = row_max;
                prev_min = row_min;
            }
        }
    }

    #[test]
    fn explicit_and_implicit_agree_at_final_time() {
        let grid = Grid::new(10.0, 401).unwrap();
        let dt = stable_dt(&grid, 1.0, 0.9);
        let run = |stepper: Stepper| {
            let mut config = SolverConfig::new(bump(), grid.clone(), 0.1);
            config.stepper = stepper;
            config.dt_policy = DtPolicy::Fixed(dt);
            config.snapshot_every = usize::MAX;
            evolve(&config).unwrap()
        };
        let e = run(Stepper::Explicit);
        let i = run(Stepper::ImplicitEuler);
        let gap = e
            .final_sample()
            .iter()
            .zip(i.final_sample().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(gap < 5.0 * dt, "cross-validation gap {gap} vs 5 dt = {}", 5.0 * dt);
    }

    #[test]
    fn boundary_window_stays_at_far_field_value() {
        // L = 10 >= 4 R0; the pinned value is exactly c and |u - c| at
        // |x| = L/2 stays small for t <= 0.5.
        let mut config = SolverConfig::new(bump(), Grid::new(10.0, 401).unwrap(), 0.5);
        config.snapshot_every = 50;
        let traj = evolve(&config).unwrap();
        let n = traj.metadata.n;
        assert_eq!(traj.samples[0][0], 1.0);
        assert_eq!(traj.samples[0][n - 1], 1.0);
        for row in &traj.samples {
            assert_eq!(row[0], 1.0);
            assert_eq!(row[n - 1], 1.0);
        }
        let quarter = (n - 1) / 4; // x = -L/2
        for row in &traj.samples {
            assert!((row[quarter] - 1.0).abs() < 1e-3);
            assert!((row[3 * quarter] - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn spatial_refinement_is_second_order() {
        let t_end = 0.1;
        let run = |n: usize| {
            let mut c = SolverConfig::new(bump(), Grid::new(10.0, n).unwrap(), t_end);
            c.snapshot_every = usize::MAX;
            evolve(&c).unwrap().final_sample().to_vec()
        };
        let u0 = run(201);
        let u1 = run(401);
        let u2 = run(801);
        let diff = |coarse: &[f64], fine: &[f64]| {
            coarse
                .iter()
                .enumerate()
                .map(|(i, &v)| (v - fine[2 * i]).abs())
                .fold(0.0f64, f64::max)
        };
        let d01 = diff(&u0, &u1);
        let d12 = diff(&u1, &u2);
        let order = (d01 / d12).log2();
        assert!(
            (order - 2.0).abs() <= 0.3,
            "Richardson order {order} (diffs {d01:.3e}, {d12:.3e})"
        );
    }

    #[test]
    fn instrumented_runs_stay_on_identity_branch() {
        let mut config = SolverConfig::new(bump(), Grid::new(10.0, 201).unwrap(), 0.2);
        config.stepper = Stepper::ImplicitEuler;
        let traj = evolve(&config).unwrap();
        assert_eq!(traj.metadata.cutoff_hits, 0);
        let m = traj.metadata.m;
        for row in &traj.samples {
            assert!(row.iter().all(|&v| v >= m - 1e-12));
        }
    }
}
