//! Deterministic engine for tracking and circumnavigating a moving,
//! size-varying circular target with a swarm of kinematic surface agents.
//!
//! The pipeline per step: each agent measures its signed distance to the
//! target boundary, measurements are broadcast over a directed ring,
//! every agent fits a circle to the shared measurements by constrained
//! least squares, the per-agent estimates are fused by averaging, and a
//! bearing-based control law drives the agents onto the estimated
//! boundary while spreading them to equal angular separation.
//!
//! Modules follow the loop structure:
//! - [`geometry`]: planar primitives, angles, bearings, signed distances
//! - [`target`]: ground-truth trajectories with certified derivative bounds
//! - [`estimator`]: circle fit, rate estimation, estimate fusion
//! - [`controller`]: the circumnavigation control law and its limiters
//! - [`network`]: ring topology, measurement sharing, fault injection
//! - [`sim`]: the fixed-timestep closed loop and run metrics
//! - [`analysis`]: post-run convergence claim checks

pub mod analysis;
pub mod controller;
pub mod estimator;
pub mod geometry;
pub mod network;
pub mod rng;
pub mod sim;
pub mod target;

pub use geometry::{Angle, Vec2};
pub use estimator::{CircleEstimate, Measurement, RateEstimate};
pub use sim::{SimConfig, SimLog};
pub use target::{TargetState, TargetTrajectory};
