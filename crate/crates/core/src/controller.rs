//! The per-agent circumnavigation control law and its implementable
//! limiter variants.
//!
//! The raw input combines the estimated center motion feedforward, a
//! radial term driving the agent onto the estimated boundary, and a
//! tangential term proportional to the angular separation from the
//! successor agent:
//!
//! `u = ĉ̇ + ((D̂ᶜ − r̂) − r̂̇)·ψ + β·D̂ᶜ·E·ψ`
//!
//! where `ψ` is the bearing toward the estimated center and `E` the
//! quarter-turn rotation. A real vehicle has a speed ceiling, so the raw
//! input passes through one of three limiters before integration.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::estimator::{CircleEstimate, RateEstimate};
use crate::geometry::{bearing, ccw_angle, rotate90, Angle, GeometryError, Vec2, SINGULARITY_EPS};

#[derive(Debug, Error, PartialEq)]
pub enum ControllerError {
    #[error("control gain delta {delta} must be > 0")]
    InvalidDelta { delta: f64 },
    #[error("speed limit u_max {u_max} must be > 0")]
    InvalidUMax { u_max: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How the raw control input is turned into an implementable one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// `U = δ·u`; the form used by the convergence analysis. Can exceed
    /// `u_max`.
    GainScaled,
    /// `U = u` if `‖u‖ ≤ u_max`, else `(u_max/‖u‖)·u`.
    NormSaturated,
    /// Each component of the gain-scaled input `δ·u` clamped to
    /// `±u_max`, the per-axis cap used by vehicles with independent
    /// coordinate speed limits. A bare per-axis cap without the gain
    /// would quantize every saturated step to a diagonal, erasing the
    /// angular-separation feedback.
    ComponentClamped,
}

impl fmt::Display for LimitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LimitMode::GainScaled => "gain-scaled",
            LimitMode::NormSaturated => "norm-saturated",
            LimitMode::ComponentClamped => "component-clamped",
        };
        f.write_str(s)
    }
}

impl FromStr for LimitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gain-scaled" => Ok(LimitMode::GainScaled),
            "norm-saturated" => Ok(LimitMode::NormSaturated),
            "component-clamped" => Ok(LimitMode::ComponentClamped),
            other => Err(format!(
                "unknown mode {other:?} (expected gain-scaled, norm-saturated, \
                 or component-clamped)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub delta: f64,
    pub u_max: f64,
    pub mode: LimitMode,
}

impl ControlParams {
    pub fn new(delta: f64, u_max: f64, mode: LimitMode) -> Result<Self, ControllerError> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(ControllerError::InvalidDelta { delta });
        }
        if !(u_max > 0.0) || !u_max.is_finite() {
            return Err(ControllerError::InvalidUMax { u_max });
        }
        Ok(Self { delta, u_max, mode })
    }
}

/// Raw and limited control for one agent at one step, with the geometry
/// it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub u_raw: Vec2,
    pub u_applied: Vec2,
    pub beta_used: Angle,
    pub psi_used: Vec2,
}

/// Evaluates the raw control law for agent `i` at `p_i` with successor
/// at `p_next`, against the fused estimate and current rate estimates.
/// Returns `(u_raw, β_i, ψ_i)`.
pub fn control_input(
    p_i: Vec2,
    p_next: Vec2,
    est: &CircleEstimate,
    rates: &RateEstimate,
) -> Result<(Vec2, Angle, Vec2), GeometryError> {
    let psi = bearing(est.c_hat, p_i)?;
    let next_dist = (est.c_hat - p_next).norm();
    if next_dist <= SINGULARITY_EPS {
        return Err(GeometryError::BearingSingularity { distance: next_dist });
    }
    let d_c = (est.c_hat - p_i).norm();
    let beta = ccw_angle(p_i - est.c_hat, p_next - est.c_hat)
        .expect("distances checked above");
    let radial = (d_c - est.r_hat) - rates.r_dot_hat;
    let u_raw = rates.c_dot_hat + psi * radial + rotate90(psi) * (beta.radians() * d_c);
    Ok((u_raw, beta, psi))
}

/// Full per-agent control evaluation: the raw law followed by the
/// configured limiter.
pub fn compute_control(
    p_i: Vec2,
    p_next: Vec2,
    est: &CircleEstimate,
    rates: &RateEstimate,
    params: &ControlParams,
) -> Result<ControlOutput, GeometryError> {
    let (u_raw, beta_used, psi_used) = control_input(p_i, p_next, est, rates)?;
    Ok(ControlOutput {
        u_raw,
        u_applied: limit(u_raw, params),
        beta_used,
        psi_used,
    })
}

/// Applies the configured limiter to a raw control input.
pub fn limit(u_raw: Vec2, params: &ControlParams) -> Vec2 {
    match params.mode {
        LimitMode::GainScaled => u_raw * params.delta,
        LimitMode::NormSaturated => {
            let norm = u_raw.norm();
            if norm <= params.u_max {
                u_raw
            } else {
                u_raw * (params.u_max / norm)
            }
        }
        LimitMode::ComponentClamped => {
            let scaled = u_raw * params.delta;
            Vec2::new(
                scaled.x.clamp(-params.u_max, params.u_max),
                scaled.y.clamp(-params.u_max, params.u_max),
            )
        }
    }
}
