//! Ring communication topology, the measurement-sharing contract, and
//! the fault injection model.
//!
//! Communication is synchronous and lossless within a step. Every agent
//! receives the full set of (position, distance) measurements plus its
//! ring successor's position; faults are modeled as validity flags on a
//! schedule, not dropped packets, so the estimator's exclusion path is
//! what carries the fault story.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::estimator::Measurement;
use crate::geometry::Vec2;
use crate::rng::SimRng;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("ring needs at least {min} agents, got {n}")]
    RingTooSmall { n: usize, min: usize },
    #[error("successor map is not a single {n}-cycle")]
    NotARing { n: usize },
    #[error("got {got} agent states for a ring of {expected}")]
    TopologyMismatch { expected: usize, got: usize },
    #[error("fault window {index}: {reason}")]
    BadSchedule { index: usize, reason: String },
    #[error("fault schedule leaves only {valid} valid agents at t={t} (need ≥ 3)")]
    TooFewValid { t: f64, valid: usize },
}

/// Counterclockwise directed ring over agents `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingTopology {
    successor: Vec<usize>,
}

impl RingTopology {
    /// The canonical ring `i → i+1 (mod n)`.
    pub fn new(n: usize) -> Result<Self, NetworkError> {
        if n < 3 {
            return Err(NetworkError::RingTooSmall { n, min: 3 });
        }
        Ok(Self {
            successor: (0..n).map(|i| (i + 1) % n).collect(),
        })
    }

    /// Builds a ring from an explicit successor map, rejecting anything
    /// that is not a single n-cycle.
    pub fn from_successors(successor: Vec<usize>) -> Result<Self, NetworkError> {
        let n = successor.len();
        if n < 3 {
            return Err(NetworkError::RingTooSmall { n, min: 3 });
        }
        let mut seen = vec![false; n];
        let mut at = 0usize;
        for _ in 0..n {
            if at >= n || seen[at] {
                return Err(NetworkError::NotARing { n });
            }
            seen[at] = true;
            at = successor[at];
        }
        if at != 0 || !seen.iter().all(|&s| s) {
            return Err(NetworkError::NotARing { n });
        }
        Ok(Self { successor })
    }

    pub fn n(&self) -> usize {
        self.successor.len()
    }

    pub fn successor(&self, agent: usize) -> usize {
        self.successor[agent]
    }
}

/// One scheduled measurement outage for one agent over a closed time
/// interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultWindow {
    pub agent_id: usize,
    pub t_start: f64,
    pub t_end: f64,
}

/// Fault windows plus the bounded measurement-noise model.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultSchedule {
    pub windows: Vec<FaultWindow>,
    pub noise_amplitude: f64,
    pub seed: u64,
}

impl FaultSchedule {
    pub fn none(seed: u64) -> Self {
        Self { windows: Vec::new(), noise_amplitude: 0.0, seed }
    }

    pub fn new(
        windows: Vec<FaultWindow>,
        noise_amplitude: f64,
        seed: u64,
    ) -> Result<Self, NetworkError> {
        if !(noise_amplitude >= 0.0) || !noise_amplitude.is_finite() {
            return Err(NetworkError::BadSchedule {
                index: 0,
                reason: format!("noise amplitude {noise_amplitude} must be ≥ 0"),
            });
        }
        for (i, w) in windows.iter().enumerate() {
            if !w.t_start.is_finite() || !w.t_end.is_finite() || w.t_start > w.t_end {
                return Err(NetworkError::BadSchedule {
                    index: i,
                    reason: format!("bad interval [{}, {}]", w.t_start, w.t_end),
                });
            }
        }
        Ok(Self { windows, noise_amplitude, seed })
    }

    /// Whether `agent`'s measurement is valid at time `t`.
    pub fn is_valid(&self, agent: usize, t: f64) -> bool {
        !self
            .windows
            .iter()
            .any(|w| w.agent_id == agent && t >= w.t_start && t <= w.t_end)
    }

    /// Config-time check: every window applies to a real agent within the
    /// horizon, and at least 3 agents stay valid at every step.
    pub fn validate(&self, n: usize, dt: f64, duration: usize) -> Result<(), NetworkError> {
        let horizon = duration as f64 * dt;
        for (i, w) in self.windows.iter().enumerate() {
            if w.agent_id >= n {
                return Err(NetworkError::BadSchedule {
                    index: i,
                    reason: format!("agent {} out of range (n = {n})", w.agent_id),
                });
            }
            if w.t_start < 0.0 || w.t_end > horizon {
                return Err(NetworkError::BadSchedule {
                    index: i,
                    reason: format!(
                        "interval [{}, {}] outside horizon [0, {horizon}]",
                        w.t_start, w.t_end
                    ),
                });
            }
        }
        for step in 0..=duration {
            let t = step as f64 * dt;
            let valid = (0..n).filter(|&a| self.is_valid(a, t)).count();
            if valid < 3 {
                return Err(NetworkError::TooFewValid { t, valid });
            }
        }
        Ok(())
    }
}

/// What one agent receives in one exchange round.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentView {
    /// All n shared measurements, noise applied and fault flags resolved.
    pub measurements: Vec<Measurement>,
    /// Position of the ring successor, used for the separation angle.
    pub successor_pos: Vec2,
}

/// Distributes measurements around the ring for step `step` at time `t`.
///
/// `raw` holds per-agent (position, true measured distance) in agent
/// order. Noise (uniform in ±amplitude, drawn per agent from a per-step
/// substream) is applied once, before distribution, so all views share
/// the same noised values.
pub fn exchange(
    raw: &[(Vec2, f64)],
    topo: &RingTopology,
    faults: &FaultSchedule,
    step: u64,
    t: f64,
) -> Result<Vec<AgentView>, NetworkError> {
    let n = topo.n();
    if raw.len() != n {
        return Err(NetworkError::TopologyMismatch { expected: n, got: raw.len() });
    }
    let mut rng = SimRng::substream(faults.seed, step);
    let shared: Vec<Measurement> = raw
        .iter()
        .enumerate()
        .map(|(j, &(p, d_b))| {
            let noise = rng.symmetric(faults.noise_amplitude);
            Measurement::new(j, p, d_b + noise, faults.is_valid(j, t))
        })
        .collect();
    Ok((0..n)
        .map(|i| AgentView {
            measurements: shared.clone(),
            successor_pos: raw[topo.successor(i)].0,
        })
        .collect())
}

/// The in-degree Laplacian form `Bᵀ` of the directed ring: row `i` has
/// `+1` at column `i` and `−1` at column `i+1 (mod n)`, so that
/// `(−Bᵀβ)ᵢ = −βᵢ + βᵢ₊₁`.
pub fn incidence_ring(n: usize) -> Result<DMatrix<f64>, NetworkError> {
    if n < 2 {
        return Err(NetworkError::RingTooSmall { n, min: 2 });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if j == i {
            1.0
        } else if j == (i + 1) % n {
            -1.0
        } else {
            0.0
        }
    }))
}
