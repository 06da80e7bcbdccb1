//! The smooth cutoff that keeps the flow coefficient uniformly parabolic.
//!
//! Before any a priori bound on u is known, the coefficient 1/(u (1+u_x^2)^{3/2})
//! could blow up as u -> 0.  The remedy is a modified coefficient 1/(g(u) ...)
//! where g is constant m/4 below m/4, the identity above m/2, nondecreasing on
//! [0, oo), and extended evenly to negative arguments, so that g(z) >= m/4 for
//! every real z.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Parameters of the cutoff built from `m`, a positive lower bound of the
/// initial profile.  The transition interval is [m/4, m/2].
///
/// The blend on (m/4, m/2) is the quintic Hermite interpolant matching value,
/// first, and second derivative at both junctions (g = m/4, g' = 0, g'' = 0 at
/// m/4; g = m/2, g' = 1, g'' = 0 at m/2), the minimal-degree polynomial with
/// C^2 junctions.  In normalized coordinates s = (|z| - m/4)/(m/4):
///
///   g(z) = (m/4) * (1 + 6 s^3 - 8 s^4 + 3 s^5),    s in (0, 1),
///
/// whose derivative s^2 (18 - 32 s + 15 s^2) is nonnegative (the quadratic
/// factor has negative discriminant), so g is nondecreasing on [0, oo).
#[derive(Clone, Debug)]
pub struct CutoffSpec {
    m: f64,
    /// Counts evaluations that fall in the non-identity region |z| < m/2.
    non_identity_hits: Option<Arc<AtomicU64>>,
}

impl CutoffSpec {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::invalid(format!("cutoff requires m > 0, got {m}")));
        }
        Ok(CutoffSpec {
            m,
            non_identity_hits: None,
        })
    }

    /// Same cutoff, with a counter that records every evaluation on the
    /// non-identity branch.  Used to confirm that solutions never leave the
    /// range where the modified equation coincides with the original one.
    pub fn instrumented(m: f64) -> Result<Self> {
        let mut spec = Self::new(m)?;
        spec.non_identity_hits = Some(Arc::new(AtomicU64::new(0)));
        Ok(spec)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Lower edge of the blend interval.
    pub fn transition_lo(&self) -> f64 {
        0.25 * self.m
    }

    /// Upper edge of the blend interval; the identity branch starts here.
    pub fn transition_hi(&self) -> f64 {
        0.5 * self.m
    }

    /// Number of evaluations of g or g' at arguments with |z| < m/2 since
    /// construction.  Zero unless built with [`CutoffSpec::instrumented`].
    pub fn non_identity_hits(&self) -> u64 {
        self.non_identity_hits
            .as_ref()
            .map_or(0, |c| c.load(Ordering::Relaxed))
    }

    fn record_hit(&self) {
        if let Some(c) = &self.non_identity_hits {
            c.fetch_add(1, Ordering::Relaxed);
        }
    }

    /// The cutoff g.  Total function: m/4 for |z| <= m/4, |z| for |z| >= m/2,
    /// the quintic blend in between.  Even by construction.
    pub fn g(&self, z: f64) -> f64 {
        let az = z.abs();
        if az >= self.transition_hi() {
            return az;
        }
        self.record_hit();
        if az <= self.transition_lo() {
            return self.transition_lo();
        }
        let q = self.transition_lo();
        let s = (az - q) / q;
        q * (1.0 + s * s * s * (6.0 + s * (-8.0 + 3.0 * s)))
    }

    /// Exact derivative of [`CutoffSpec::g`]: 0 inside (-m/4, m/4),
    /// sign(z) outside (-m/2, m/2), the quintic's derivative in between.
    /// Odd, since g is even.
    pub fn g_prime(&self, z: f64) -> f64 {
        let az = z.abs();
        let slope = if az >= self.transition_hi() {
            1.0
        } else {
            self.record_hit();
            if az <= self.transition_lo() {
                0.0
            } else {
                let q = self.transition_lo();
                let s = (az - q) / q;
                s * s * (18.0 + s * (-32.0 + 15.0 * s))
            }
        };
        if z < 0.0 {
            -slope
        } else {
            slope
        }
    }
}
