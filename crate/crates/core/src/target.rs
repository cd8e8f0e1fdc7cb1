//! Ground-truth target model: time-varying circle trajectories with
//! certified derivative bounds, plus an optional irregular-boundary
//! perturbation for stress tests.
//!
//! Trajectories are immutable after construction and validated at load:
//! the radius must stay above [`MIN_RADIUS`] over the whole horizon
//! (checked by dense sampling), and sampling outside the horizon is an
//! error rather than extrapolation so the reported derivative bounds
//! stay meaningful.

use thiserror::Error;

use crate::geometry::{signed_boundary_distance, Vec2};

/// Smallest radius a trajectory is allowed to reach anywhere on its
/// horizon. Matches the estimator's radius floor.
pub const MIN_RADIUS: f64 = 1e-3;

/// Number of intervals used for load-time dense sampling of r(t).
const VALIDATION_SAMPLES: usize = 10_000;

/// Relative slack on horizon bounds checks, absorbing `step * dt`
/// round-off without permitting real extrapolation.
const HORIZON_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum TargetError {
    #[error("sample time {t} outside trajectory horizon [{t_min}, {t_max}]")]
    OutOfRange { t: f64, t_min: f64, t_max: f64 },
    #[error("radius {r} at t={t} below minimum {MIN_RADIUS}")]
    RadiusBelowMinimum { t: f64, r: f64 },
    #[error("waypoint row {row}: {reason}")]
    Format { row: usize, reason: String },
    #[error("non-finite {what} in trajectory parameters")]
    NonFinite { what: &'static str },
    #[error("invalid horizon [{t_min}, {t_max}]")]
    InvalidHorizon { t_min: f64, t_max: f64 },
    #[error("perturbation amplitude {eta} outside [0, 1)")]
    InvalidPerturbation { eta: f64 },
}

/// Ground-truth circle at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetState {
    pub c: Vec2,
    pub r: f64,
    pub t: f64,
}

/// One row of a waypoint table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub t: f64,
    pub c: Vec2,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryKind {
    /// Fixed center and radius.
    Constant,
    /// Center moves at a constant velocity, radius at a constant rate.
    LinearDrift { velocity: Vec2, r_rate: f64 },
    /// Center oscillates along `c_amplitude`, radius along `r_amplitude`;
    /// both are zero-phase sines so the base state is the t=0 state.
    Sinusoidal {
        c_amplitude: Vec2,
        c_omega: f64,
        r_amplitude: f64,
        r_omega: f64,
    },
    /// Piecewise-linear interpolation through a waypoint table.
    Waypoints { rows: Vec<Waypoint> },
}

/// Sinusoidal boundary perturbation `r_b(θ) = r·(1 + η·sin(kθ + φ))`,
/// modeling an irregular shape that stays close to the fitted circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPerturbation {
    pub eta: f64,
    pub modes: u32,
    pub phase: f64,
}

impl BoundaryPerturbation {
    pub fn new(eta: f64, modes: u32, phase: f64) -> Result<Self, TargetError> {
        if !eta.is_finite() || !(0.0..1.0).contains(&eta) {
            return Err(TargetError::InvalidPerturbation { eta });
        }
        if !phase.is_finite() {
            return Err(TargetError::NonFinite { what: "phase" });
        }
        Ok(Self { eta, modes, phase })
    }

    pub fn none() -> Self {
        Self { eta: 0.0, modes: 0, phase: 0.0 }
    }
}

/// A time-parameterized ground-truth circle with certified bounds on
/// `‖ċ‖` and `|ṙ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetTrajectory {
    kind: TrajectoryKind,
    base: TargetState,
    t_min: f64,
    t_max: f64,
}

impl TargetTrajectory {
    pub fn constant(c: Vec2, r: f64, horizon: f64) -> Result<Self, TargetError> {
        Self::build(TrajectoryKind::Constant, c, r, 0.0, horizon)
    }

    pub fn linear_drift(
        c0: Vec2,
        r0: f64,
        velocity: Vec2,
        r_rate: f64,
        horizon: f64,
    ) -> Result<Self, TargetError> {
        if !velocity.is_finite() {
            return Err(TargetError::NonFinite { what: "velocity" });
        }
        if !r_rate.is_finite() {
            return Err(TargetError::NonFinite { what: "r_rate" });
        }
        Self::build(
            TrajectoryKind::LinearDrift { velocity, r_rate },
            c0,
            r0,
            0.0,
            horizon,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn sinusoidal(
        c0: Vec2,
        r0: f64,
        c_amplitude: Vec2,
        c_omega: f64,
        r_amplitude: f64,
        r_omega: f64,
        horizon: f64,
    ) -> Result<Self, TargetError> {
        if !c_amplitude.is_finite() {
            return Err(TargetError::NonFinite { what: "c_amplitude" });
        }
        if ![c_omega, r_amplitude, r_omega].iter().all(|v| v.is_finite()) {
            return Err(TargetError::NonFinite { what: "oscillation parameters" });
        }
        Self::build(
            TrajectoryKind::Sinusoidal { c_amplitude, c_omega, r_amplitude, r_omega },
            c0,
            r0,
            0.0,
            horizon,
        )
    }

    /// Builds a waypoint trajectory with linear interpolation between rows.
    /// Row numbers in errors are 1-based positions in the input sequence.
    pub fn from_waypoints(rows: Vec<Waypoint>) -> Result<Self, TargetError> {
        if rows.len() < 2 {
            return Err(TargetError::Format {
                row: rows.len(),
                reason: format!("need at least 2 waypoints, got {}", rows.len()),
            });
        }
        for (i, w) in rows.iter().enumerate() {
            let row = i + 1;
            if !w.t.is_finite() || !w.c.is_finite() || !w.r.is_finite() {
                return Err(TargetError::Format { row, reason: "non-finite value".into() });
            }
            if !(w.r > 0.0) {
                return Err(TargetError::Format {
                    row,
                    reason: format!("radius {} must be > 0", w.r),
                });
            }
            if i > 0 && w.t <= rows[i - 1].t {
                return Err(TargetError::Format {
                    row,
                    reason: format!(
                        "timestamp {} not strictly greater than previous {}",
                        w.t,
                        rows[i - 1].t
                    ),
                });
            }
        }
        let first = rows[0];
        let t_min = first.t;
        let t_max = rows[rows.len() - 1].t;
        let traj = Self {
            kind: TrajectoryKind::Waypoints { rows },
            base: TargetState { c: first.c, r: first.r, t: first.t },
            t_min,
            t_max,
        };
        traj.validate_radius()?;
        Ok(traj)
    }

    fn build(
        kind: TrajectoryKind,
        c0: Vec2,
        r0: f64,
        t_min: f64,
        t_max: f64,
    ) -> Result<Self, TargetError> {
        if !c0.is_finite() || !r0.is_finite() {
            return Err(TargetError::NonFinite { what: "base state" });
        }
        if !t_max.is_finite() || t_max < t_min {
            return Err(TargetError::InvalidHorizon { t_min, t_max });
        }
        let traj = Self {
            kind,
            base: TargetState { c: c0, r: r0, t: t_min },
            t_min,
            t_max,
        };
        traj.validate_radius()?;
        Ok(traj)
    }

    /// Dense-samples r(t) over the horizon and rejects any dip below
    /// [`MIN_RADIUS`].
    fn validate_radius(&self) -> Result<(), TargetError> {
        let span = self.t_max - self.t_min;
        let steps = if span == 0.0 { 1 } else { VALIDATION_SAMPLES };
        for i in 0..=steps {
            let t = self.t_min + span * (i as f64 / steps as f64);
            let r = self.eval(t).1;
            if !(r >= MIN_RADIUS) {
                return Err(TargetError::RadiusBelowMinimum { t, r });
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &TrajectoryKind {
        &self.kind
    }

    pub fn base(&self) -> TargetState {
        self.base
    }

    /// Inclusive sampling window.
    pub fn horizon(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    fn eval(&self, t: f64) -> (Vec2, f64) {
        match &self.kind {
            TrajectoryKind::Constant => (self.base.c, self.base.r),
            TrajectoryKind::LinearDrift { velocity, r_rate } => {
                (self.base.c + *velocity * t, self.base.r + r_rate * t)
            }
            TrajectoryKind::Sinusoidal { c_amplitude, c_omega, r_amplitude, r_omega } => (
                self.base.c + *c_amplitude * (c_omega * t).sin(),
                self.base.r + r_amplitude * (r_omega * t).sin(),
            ),
            TrajectoryKind::Waypoints { rows } => {
                // clamp only against horizon-slack round-off at the ends
                if t <= rows[0].t {
                    return (rows[0].c, rows[0].r);
                }
                let last = rows[rows.len() - 1];
                if t >= last.t {
                    return (last.c, last.r);
                }
                let idx = rows.partition_point(|w| w.t <= t);
                let (a, b) = (rows[idx - 1], rows[idx]);
                let alpha = (t - a.t) / (b.t - a.t);
                let c = a.c + (b.c - a.c) * alpha;
                let r = a.r + (b.r - a.r) * alpha;
                (c, r)
            }
        }
    }

    /// Exact trajectory state at time `t`; continuous in `t` for all kinds.
    pub fn sample(&self, t: f64) -> Result<TargetState, TargetError> {
        let slack = HORIZON_SLACK * self.t_max.abs().max(1.0);
        if !t.is_finite() || t < self.t_min - slack || t > self.t_max + slack {
            return Err(TargetError::OutOfRange { t, t_min: self.t_min, t_max: self.t_max });
        }
        let (c, r) = self.eval(t);
        Ok(TargetState { c, r, t })
    }

    /// Certified bounds `(ε₁, ε₂)` with `‖ċ(t)‖ ≤ ε₁` and `|ṙ(t)| ≤ ε₂`
    /// everywhere on the horizon. Closed form for parametric kinds,
    /// maximum segment slope for waypoints.
    pub fn derivative_bounds(&self) -> (f64, f64) {
        match &self.kind {
            TrajectoryKind::Constant => (0.0, 0.0),
            TrajectoryKind::LinearDrift { velocity, r_rate } => (velocity.norm(), r_rate.abs()),
            TrajectoryKind::Sinusoidal { c_amplitude, c_omega, r_amplitude, r_omega } => (
                c_amplitude.norm() * c_omega.abs(),
                r_amplitude.abs() * r_omega.abs(),
            ),
            TrajectoryKind::Waypoints { rows } => {
                let mut eps1 = 0.0f64;
                let mut eps2 = 0.0f64;
                for pair in rows.windows(2) {
                    let dt = pair[1].t - pair[0].t;
                    eps1 = eps1.max((pair[1].c - pair[0].c).norm() / dt);
                    eps2 = eps2.max((pair[1].r - pair[0].r).abs() / dt);
                }
                (eps1, eps2)
            }
        }
    }

    /// Signed radial distance from `p` to the (optionally perturbed)
    /// boundary at time `t`: `‖c(t) − p‖ − r(t)·(1 + η·sin(kθ_p + φ))`
    /// where `θ_p` is the polar angle of `p` about `c(t)`. With `η = 0`
    /// this reduces exactly to the circular signed boundary distance.
    pub fn measured_distance(
        &self,
        pert: &BoundaryPerturbation,
        p: Vec2,
        t: f64,
    ) -> Result<f64, TargetError> {
        let state = self.sample(t)?;
        if pert.eta == 0.0 {
            // exact reduction to the circle case
            return Ok(signed_boundary_distance(p, state.c, state.r)
                .expect("validated trajectory radius is positive"));
        }
        let rel = p - state.c;
        let theta = rel.y.atan2(rel.x);
        let r_b = state.r * (1.0 + pert.eta * (pert.modes as f64 * theta + pert.phase).sin());
        Ok(rel.norm() - r_b)
    }
}
