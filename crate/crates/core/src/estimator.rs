//! Decentralized target estimation: constrained least-squares circle fit
//! from shared (position, boundary-distance) pairs, estimate fusion by
//! averaging, and finite-difference rate estimation.
//!
//! The fit minimizes `Σᵢ (‖pᵢ − ĉ‖ − (r̂ + D̂ᵇᵢ))²` subject to `r̂ > 0`,
//! solved by damped Gauss-Newton with the positivity constraint enforced
//! by projection onto `r̂ ≥ R_FLOOR`. Every agent runs the same fit on the
//! same shared measurement set; fusing by average keeps the architecture
//! ready for the fault-exclusion path even though per-agent estimates
//! coincide under deterministic arithmetic.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::geometry::Vec2;
use crate::rng::SimRng;
use crate::target::TargetState;

/// Projection floor for the fitted radius. The constraint is inactive
/// near any genuine solution; the floor only matters for garbage data.
pub const R_FLOOR: f64 = 1e-3;

const MAX_ITERATIONS: usize = 100;
const GRADIENT_TOL: f64 = 1e-10;
const MIN_SINGULAR_VALUE: f64 = 1e-9;
/// Below this center-to-position distance a residual's Jacobian row is
/// undefined; a fixed unit direction is substituted.
const DEGENERATE_DIST: f64 = 1e-12;
/// Stream tag separating the satellite bootstrap draws from the
/// per-step measurement noise streams.
const SATELLITE_STREAM: u64 = u64::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("need at least 3 valid measurements, got {valid}")]
    InsufficientData { valid: usize },
    #[error("measurement positions are collinear (min singular value {sigma_min:e})")]
    DegenerateGeometry { sigma_min: f64 },
    #[error("fit did not meet gradient tolerance within {MAX_ITERATIONS} iterations \
             (best objective {objective:e})")]
    NonConvergence { best: CircleEstimate, objective: f64 },
    #[error("estimate timestamps {actual} apart, expected interval {expected}")]
    InconsistentInterval { expected: f64, actual: f64 },
    #[error("no valid estimates to fuse")]
    AllFaulty,
    #[error("satellite radius noise {noise_r} must be below the true radius {r}")]
    InvalidNoise { noise_r: f64, r: f64 },
    #[error("estimated radius {r_hat} must be > 0")]
    InvalidRadius { r_hat: f64 },
}

/// One agent's shared observation: its position and signed distance to
/// the target boundary. `valid` never holds with non-finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub agent_id: usize,
    pub p: Vec2,
    pub d_b: f64,
    pub valid: bool,
}

impl Measurement {
    pub fn new(agent_id: usize, p: Vec2, d_b: f64, valid: bool) -> Self {
        Self {
            agent_id,
            p,
            d_b,
            valid: valid && p.is_finite() && d_b.is_finite(),
        }
    }
}

/// The shared swarm belief about the target circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleEstimate {
    pub c_hat: Vec2,
    pub r_hat: f64,
    pub t: f64,
}

impl CircleEstimate {
    pub fn new(c_hat: Vec2, r_hat: f64, t: f64) -> Result<Self, EstimatorError> {
        if !(r_hat > 0.0) || !r_hat.is_finite() {
            return Err(EstimatorError::InvalidRadius { r_hat });
        }
        Ok(Self { c_hat, r_hat, t })
    }
}

/// Finite-difference estimates of the target motion rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateEstimate {
    pub c_dot_hat: Vec2,
    pub r_dot_hat: f64,
}

fn objective(pts: &[(Vec2, f64)], x: &Vector3<f64>) -> f64 {
    let c = Vec2::new(x[0], x[1]);
    pts.iter()
        .map(|&(p, d)| {
            let res = (p - c).norm() - x[2] - d;
            res * res
        })
        .sum()
}

/// Conservative bound on the objective's own evaluation rounding: each
/// residual is a difference of magnitude-`dist` quantities, so its
/// square re-rounds at `2·|res|·ε·scale`. Step acceptance must tolerate
/// ties within this band or the iteration deadlocks against a lucky
/// low sample of the objective.
fn objective_noise(pts: &[(Vec2, f64)], x: &Vector3<f64>) -> f64 {
    let c = Vec2::new(x[0], x[1]);
    let sum: f64 = pts
        .iter()
        .map(|&(p, d)| {
            let dist = (p - c).norm();
            let res = dist - x[2] - d;
            2.0 * res.abs() * (dist + x[2].abs() + d.abs())
        })
        .sum();
    4.0 * f64::EPSILON * sum
}

/// Accumulates `JᵀJ` and `Jᵀf` for the damped Gauss-Newton step.
fn normal_equations(pts: &[(Vec2, f64)], x: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>) {
    let c = Vec2::new(x[0], x[1]);
    let mut jtj = Matrix3::zeros();
    let mut jtf = Vector3::zeros();
    for &(p, d) in pts {
        let diff = p - c;
        let dist = diff.norm();
        let u = if dist < DEGENERATE_DIST {
            Vec2::new(1.0, 0.0)
        } else {
            diff * (1.0 / dist)
        };
        let res = dist - x[2] - d;
        let row = Vector3::new(-u.x, -u.y, -1.0);
        jtj += row * row.transpose();
        jtf += row * res;
    }
    (jtj, jtf)
}

/// Smallest singular value of the centered position matrix; zero for
/// collinear placements.
fn min_singular_value(pts: &[(Vec2, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mean = pts.iter().fold(Vec2::ZERO, |acc, &(p, _)| acc + p) * (1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(p, _) in pts {
        let d = p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let tr = sxx + syy;
    let gap = ((sxx - syy).powi(2) + 4.0 * sxy * sxy).sqrt();
    let lambda_min = 0.5 * (tr - gap);
    lambda_min.max(0.0).sqrt()
}

/// Fits a circle `(ĉ, r̂)` to the valid measurements by damped
/// Gauss-Newton from `init`, with Levenberg-style damping (λ starts at
/// 1e-3, ×10 on a rejected step, ÷10 on an accepted one) and the
/// positivity constraint enforced by projection after each accepted
/// step. The returned estimate carries timestamp `t`.
///
/// The objective never increases relative to the (projected) init; on
/// failure to meet the gradient tolerance within the iteration cap the
/// error carries the best iterate found.
pub fn fit_circle(
    measurements: &[Measurement],
    init: &CircleEstimate,
    t: f64,
) -> Result<CircleEstimate, EstimatorError> {
    let pts: Vec<(Vec2, f64)> = measurements
        .iter()
        .filter(|m| m.valid)
        .map(|m| (m.p, m.d_b))
        .collect();
    if pts.len() < 3 {
        return Err(EstimatorError::InsufficientData { valid: pts.len() });
    }
    let sigma_min = min_singular_value(&pts);
    if sigma_min <= MIN_SINGULAR_VALUE {
        return Err(EstimatorError::DegenerateGeometry { sigma_min });
    }

    let mut x = Vector3::new(init.c_hat.x, init.c_hat.y, init.r_hat.max(R_FLOOR));
    let mut obj = objective(&pts, &x);
    let mut lambda = 1e-3;

    for _ in 0..MAX_ITERATIONS {
        let (jtj, jtf) = normal_equations(&pts, &x);
        if jtf.amax() <= GRADIENT_TOL {
            return Ok(CircleEstimate::new(Vec2::new(x[0], x[1]), x[2], t)
                .expect("projected radius is positive"));
        }
        let damped = jtj + Matrix3::identity() * lambda;
        let accepted = match damped.lu().solve(&(-jtf)) {
            Some(step) if step.iter().all(|v| v.is_finite()) => {
                let mut cand = x + step;
                cand[2] = cand[2].max(R_FLOOR);
                let cand_obj = objective(&pts, &cand);
                // near a noisy minimum the true improvement drops below
                // the objective's evaluation noise; there the gradient
                // norm decides, which the final Gauss-Newton hops keep
                // shrinking
                let accept = if cand_obj < obj {
                    true
                } else if cand_obj <= obj + objective_noise(&pts, &x) {
                    normal_equations(&pts, &cand).1.amax() < jtf.amax()
                } else {
                    false
                };
                if accept {
                    x = cand;
                    obj = cand_obj;
                }
                accept
            }
            _ => false,
        };
        if accepted {
            lambda = (lambda * 0.1).max(1e-15);
        } else {
            lambda = (lambda * 10.0).min(1e15);
        }
    }

    Err(EstimatorError::NonConvergence {
        best: CircleEstimate::new(Vec2::new(x[0], x[1]), x[2], t)
            .expect("projected radius is positive"),
        objective: obj,
    })
}

/// Finite-difference rates between two estimates `delta_t` apart.
pub fn estimate_rates(
    prev: &CircleEstimate,
    cur: &CircleEstimate,
    delta_t: f64,
) -> Result<RateEstimate, EstimatorError> {
    let actual = cur.t - prev.t;
    if !(delta_t > 0.0) || (actual - delta_t).abs() > 1e-9 {
        return Err(EstimatorError::InconsistentInterval { expected: delta_t, actual });
    }
    Ok(RateEstimate {
        c_dot_hat: (cur.c_hat - prev.c_hat) * (1.0 / delta_t),
        r_dot_hat: (cur.r_hat - prev.r_hat) / delta_t,
    })
}

/// Component-wise arithmetic mean over the valid per-agent estimates.
pub fn fuse_estimates(
    per_agent: &[(CircleEstimate, bool)],
) -> Result<CircleEstimate, EstimatorError> {
    let mut sum_c = Vec2::ZERO;
    let mut sum_r = 0.0;
    let mut sum_t = 0.0;
    let mut count = 0usize;
    for (est, valid) in per_agent {
        if *valid {
            sum_c += est.c_hat;
            sum_r += est.r_hat;
            sum_t += est.t;
            count += 1;
        }
    }
    if count == 0 {
        return Err(EstimatorError::AllFaulty);
    }
    let inv = 1.0 / count as f64;
    CircleEstimate::new(sum_c * inv, sum_r * inv, sum_t * inv)
}

/// One-shot noisy initial estimate standing in for satellite image
/// processing: the center is offset uniformly on a disk of radius
/// `noise_c`, the radius uniformly within `±noise_r`. Deterministic
/// given the seed.
pub fn init_from_satellite(
    truth: &TargetState,
    noise_c: f64,
    noise_r: f64,
    seed: u64,
) -> Result<CircleEstimate, EstimatorError> {
    if !(noise_r >= 0.0) || !(noise_c >= 0.0) || noise_r >= truth.r {
        return Err(EstimatorError::InvalidNoise { noise_r, r: truth.r });
    }
    let mut rng = SimRng::substream(seed, SATELLITE_STREAM);
    let radius = noise_c * rng.next_f64().sqrt();
    let angle = std::f64::consts::TAU * rng.next_f64();
    let c_hat = truth.c + Vec2::new(radius * angle.cos(), radius * angle.sin());
    let r_hat = truth.r + rng.symmetric(noise_r);
    CircleEstimate::new(c_hat, r_hat, truth.t)
}
