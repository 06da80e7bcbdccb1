//! Initial data for the flow: closed-form C^2 profiles with their derived
//! constants (infimum m, supremum, slope range, far-field constant).
//!
//! Two kinds of data are covered.  `SmoothedStep` and `DecayingSinusoid` are
//! merely bounded with bounded slope; `Constant` and `BumpOnConstant` are
//! identically equal to a constant c outside a compact set, which is the case
//! whose solutions decay back to c.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative outward padding applied to scan-derived extrema so the stored
/// bounds are guaranteed enclosures of the true ones.
const SCAN_PAD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// f = c
    Constant,
    /// f = c + A * B(x/R0) with B the standard C-infinity bump, B(0) = 1
    BumpOnConstant,
    /// f = c + A * (1 + tanh(x/R0)) / 2
    SmoothedStep,
    /// f = c + A * sin(x) / (1 + x^2)
    DecayingSinusoid,
}

/// The defining parameters of a profile, the part that serializes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub preset: Preset,
    pub c: f64,
    pub amplitude: f64,
    pub r0: f64,
}

/// An initial profile together with its derived constants.
///
/// Invariants established at construction: 0 < m <= f(x) <= sup_f,
/// grad_min <= f'(x) <= grad_max, and when `far_field_c` is present,
/// f(x) = c exactly for |x| > support_radius.
#[derive(Clone, Debug)]
pub struct InitialProfile {
    params: ProfileParams,
    m: f64,
    sup_f: f64,
    grad_min: f64,
    grad_max: f64,
    far_field_c: Option<f64>,
}

/// B(s) = e * exp(-1/(1-s^2)) for |s| < 1, else 0.  B(0) = 1, support [-1, 1].
fn bump_kernel(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// B'(s) = -2s/(1-s^2)^2 * B(s).
fn bump_kernel_slope(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let r = 1.0 - s * s;
        -2.0 * s / (r * r) * bump_kernel(s)
    }
}

fn sinusoid_kernel(x: f64) -> f64 {
    x.sin() / (1.0 + x * x)
}

fn sinusoid_kernel_slope(x: f64) -> f64 {
    let w = 1.0 + x * x;
    (x.cos() * w - 2.0 * x * x.sin()) / (w * w)
}

/// Dense scan with a parabolic vertex polish around the best sample.
/// Returns (min, max) of `f` over [lo, hi].
fn scan_extrema<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, f: F) -> (f64, f64) {
    let step = (hi - lo) / n as f64;
    let at = |i: usize| lo + step * i as f64;
    let (mut imin, mut imax) = (0usize, 0usize);
    let (mut vmin, mut vmax) = (f(lo), f(lo));
    for i in 1..=n {
        let v = f(at(i));
        if v < vmin {
            vmin = v;
            imin = i;
        }
        if v > vmax {
            vmax = v;
            imax = i;
        }
    }
    let polish = |i: usize, minimize: bool| -> f64 {
        let center = f(at(i));
        if i == 0 || i == n {
            return center;
        }
        let (ym, y0, yp) = (f(at(i - 1)), center, f(at(i + 1)));
        let denom = yp - 2.0 * y0 + ym;
        if denom == 0.0 {
            return center;
        }
        let offset = -0.5 * step * (yp - ym) / denom;
        if offset.abs() > step {
            return center;
        }
        let refined = f(at(i) + offset);
        if minimize {
            refined.min(center)
        } else {
            refined.max(center)
        }
    };
    (polish(imin, true), polish(imax, false))
}

fn pad_lo(v: f64) -> f64 {
    v - SCAN_PAD * (1.0 + v.abs())
}

fn pad_hi(v: f64) -> f64 {
    v + SCAN_PAD * (1.0 + v.abs())
}

impl InitialProfile {
    pub fn constant(c: f64) -> Result<Self> {
        let params = ProfileParams {
            preset: Preset::Constant,
            c,
            amplitude: 0.0,
            r0: 0.0,
        };
        Self::build(params)
    }

    pub fn bump_on_constant(c: f64, amplitude: f64, r0: f64) -> Result<Self> {
        let params = ProfileParams {
            preset: Preset::BumpOnConstant,
            c,
            amplitude,
            r0,
        };
        Self::build(params)
    }

    pub fn smoothed_step(c: f64, amplitude: f64, r0: f64) -> Result<Self> {
        let params = ProfileParams {
            preset: Preset::SmoothedStep,
            c,
            amplitude,
            r0,
        };
        Self::build(params)
    }

    pub fn decaying_sinusoid(c: f64, amplitude: f64) -> Result<Self> {
        let params = ProfileParams {
            preset: Preset::DecayingSinusoid,
            c,
            amplitude,
            r0: 0.0,
        };
        Self::build(params)
    }

    pub fn build(params: ProfileParams) -> Result<Self> {
        for (name, v) in [
            ("c", params.c),
            ("amplitude", params.amplitude),
            ("r0", params.r0),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("profile parameter {name} must be finite")));
            }
        }
        let (c, a, r0) = (params.c, params.amplitude, params.r0);
        let profile = match params.preset {
            Preset::Constant => InitialProfile {
                params,
                m: c,
                sup_f: c,
                grad_min: 0.0,
                grad_max: 0.0,
                far_field_c: Some(c),
            },
            Preset::BumpOnConstant => {
                if !(r0 > 0.0) {
                    return Err(Error::invalid("bump radius r0 must be positive"));
                }
                // B ranges over [0, 1] with both ends attained, so the value
                // extrema are exact; the slope extrema come from a scan.
                let (slo, shi) = scan_extrema(-1.0, 1.0, 200_000, bump_kernel_slope);
                let scale = a / r0;
                let (g1, g2) = (scale * slo, scale * shi);
                InitialProfile {
                    params,
                    m: c + a.min(0.0),
                    sup_f: c + a.max(0.0),
                    grad_min: pad_lo(g1.min(g2)),
                    grad_max: pad_hi(g1.max(g2)),
                    far_field_c: Some(c),
                }
            }
            Preset::SmoothedStep => {
                if !(r0 > 0.0) {
                    return Err(Error::invalid("step width r0 must be positive"));
                }
                // (1 + tanh)/2 ranges over (0, 1); f' = A/(2 R0) sech^2 peaks at 0.
                let peak = a / (2.0 * r0);
                InitialProfile {
                    params,
                    m: c + a.min(0.0),
                    sup_f: c + a.max(0.0),
                    grad_min: peak.min(0.0),
                    grad_max: peak.max(0.0),
                    far_field_c: None,
                }
            }
            Preset::DecayingSinusoid => {
                // sin(x)/(1+x^2) is odd with |.| <= 1/(1+x^2); all extrema of it
                // and of its derivative lie well inside [-30, 30].
                let (qlo, qhi) = scan_extrema(-30.0, 30.0, 600_000, sinusoid_kernel);
                let (dlo, dhi) = scan_extrema(-30.0, 30.0, 600_000, sinusoid_kernel_slope);
                let (v1, v2) = (a * qlo, a * qhi);
                let (g1, g2) = (a * dlo, a * dhi);
                InitialProfile {
                    params,
                    m: pad_lo(c + v1.min(v2)),
                    sup_f: pad_hi(c + v1.max(v2)),
                    grad_min: pad_lo(g1.min(g2)),
                    grad_max: pad_hi(g1.max(g2)),
                    far_field_c: None,
                }
            }
        };
        if !(profile.m > 0.0) {
            return Err(Error::invalid(format!(
                "profile infimum must be positive, got m = {}",
                profile.m
            )));
        }
        Ok(profile)
    }

    /// f(x), in closed form.
    pub fn value(&self, x: f64) -> f64 {
        let p = &self.params;
        match p.preset {
            Preset::Constant => p.c,
            Preset::BumpOnConstant => p.c + p.amplitude * bump_kernel(x / p.r0),
            Preset::SmoothedStep => p.c + p.amplitude * 0.5 * (1.0 + (x / p.r0).tanh()),
            Preset::DecayingSinusoid => p.c + p.amplitude * sinusoid_kernel(x),
        }
    }

    /// f'(x), in closed form.
    pub fn slope(&self, x: f64) -> f64 {
        let p = &self.params;
        match p.preset {
            Preset::Constant => 0.0,
            Preset::BumpOnConstant => p.amplitude / p.r0 * bump_kernel_slope(x / p.r0),
            Preset::SmoothedStep => {
                let sech = 1.0 / (x / p.r0).cosh();
                p.amplitude / (2.0 * p.r0) * sech * sech
            }
            Preset::DecayingSinusoid => p.amplitude * sinusoid_kernel_slope(x),
        }
    }

    pub fn params(&self) -> ProfileParams {
        self.params
    }

    pub fn preset(&self) -> Preset {
        self.params.preset
    }

    /// Infimum of f; positive by construction.
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn sup_f(&self) -> f64 {
        self.sup_f
    }

    pub fn grad_min(&self) -> f64 {
        self.grad_min
    }

    pub fn grad_max(&self) -> f64 {
        self.grad_max
    }

    /// The constant c with f = c outside a compact set, when there is one.
    pub fn far_field_c(&self) -> Option<f64> {
        self.far_field_c
    }

    /// Radius outside which f equals its far-field constant (0 for Constant;
    /// meaningful only when `far_field_c` is present).
    pub fn support_radius(&self) -> f64 {
        match self.params.preset {
            Preset::BumpOnConstant => self.params.r0,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_bounds_on_dense_sample(p: &InitialProfile) {
        let n = 40_001;
        for i in 0..n {
            let x = -25.0 + 50.0 * i as f64 / (n - 1) as f64;
            let f = p.value(x);
            let fp = p.slope(x);
            assert!(
                p.m() <= f && f <= p.sup_f(),
                "value bound violated at x = {x}: m = {}, f = {f}, sup = {}",
                p.m(),
                p.sup_f()
            );
            assert!(
                p.grad_min() <= fp && fp <= p.grad_max(),
                "slope bound violated at x = {x}: [{}, {}], f' = {fp}",
                p.grad_min(),
                p.grad_max()
            );
        }
    }

    #[test]
    fn constant_constants() {
        let p = InitialProfile::constant(2.0).unwrap();
        assert_eq!(p.m(), 2.0);
        assert_eq!(p.sup_f(), 2.0);
        assert_eq!(p.far_field_c(), Some(2.0));
        assert_eq!(p.value(17.3), 2.0);
        assert_eq!(p.slope(17.3), 0.0);
        check_bounds_on_dense_sample(&p);
    }

    #[test]
    fn bump_constants_and_compact_support() {
        let p = InitialProfile::bump_on_constant(1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.m(), 1.0);
        assert_eq!(p.sup_f(), 2.0);
        // B(0) = e * e^{-1} = 1 exactly up to rounding.
        assert!((p.value(0.0) - 2.0).abs() < 1e-14);
        // Exactly constant outside the support.
        assert_eq!(p.value(1.0), 1.0);
        assert_eq!(p.value(-3.7), 1.0);
        assert_eq!(p.slope(2.0), 0.0);
        assert_eq!(p.far_field_c(), Some(1.0));
        assert_eq!(p.support_radius(), 1.0);
        // Slope range is symmetric for this even bump.
        assert!((p.grad_min() + p.grad_max()).abs() < 1e-8);
        check_bounds_on_dense_sample(&p);
    }

    #[test]
    fn smoothed_step_constants() {
        let p = InitialProfile::smoothed_step(1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.m(), 1.0);
        assert_eq!(p.sup_f(), 2.0);
        assert_eq!(p.grad_min(), 0.0);
        assert_eq!(p.grad_max(), 0.5);
        assert!(p.far_field_c().is_none());
        assert!((p.value(0.0) - 1.5).abs() < 1e-15);
        assert!((p.slope(0.0) - 0.5).abs() < 1e-15);
        check_bounds_on_dense_sample(&p);
    }

    #[test]
    fn sinusoid_constants() {
        let p = InitialProfile::decaying_sinusoid(1.5, 1.0).unwrap();
        // Kernel extremum is about 0.43743 near x = 0.798.
        assert!((p.m() - (1.5 - 0.43743)).abs() < 1e-4);
        assert!((p.sup_f() - (1.5 + 0.43743)).abs() < 1e-4);
        // Slope maximum is exactly 1 at x = 0 (padded upward).
        assert!((p.grad_max() - 1.0).abs() < 1e-7);
        assert!(p.far_field_c().is_none());
        check_bounds_on_dense_sample(&p);
    }

    #[test]
    fn rejects_nonpositive_infimum() {
        assert!(InitialProfile::constant(0.0).is_err());
        assert!(InitialProfile::constant(-1.0).is_err());
        assert!(InitialProfile::bump_on_constant(1.0, -1.0, 1.0).is_err());
        assert!(InitialProfile::smoothed_step(0.5, -0.5, 1.0).is_err());
        assert!(InitialProfile::decaying_sinusoid(0.4, 1.0).is_err());
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(InitialProfile::bump_on_constant(1.0, 1.0, 0.0).is_err());
        assert!(InitialProfile::smoothed_step(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn negative_amplitude_bump_dips() {
        let p = InitialProfile::bump_on_constant(2.0, -0.5, 1.0).unwrap();
        assert_eq!(p.m(), 1.5);
        assert_eq!(p.sup_f(), 2.0);
        check_bounds_on_dense_sample(&p);
    }
}
