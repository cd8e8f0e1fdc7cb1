//! The deterministic fixed-timestep closed loop: satellite bootstrap,
//! measurement → exchange → estimate → fuse → control → integrate, plus
//! run metrics and the angular-consensus reference integrator.
//!
//! Each step, in order: sample the true target and measure per-agent
//! boundary distances; distribute them over the ring; on estimation
//! steps (every `est_every`-th step) run the per-agent circle fits, fuse
//! by averaging, and difference consecutive fused estimates into rate
//! feedforward; evaluate and limit the control law; Euler-integrate the
//! agent kinematics. Truth never reaches the controller except through
//! the measured distances and the satellite bootstrap.
//!
//! A run is a pure function of its config: identical configs produce
//! bit-identical logs.

use std::f64::consts::TAU;

use nalgebra::DVector;
use thiserror::Error;

use crate::controller::{compute_control, ControlParams};
use crate::estimator::{
    estimate_rates, fit_circle, fuse_estimates, init_from_satellite, CircleEstimate,
    EstimatorError, RateEstimate,
};
use crate::geometry::{Angle, GeometryError, Vec2};
use crate::network::{exchange, incidence_ring, FaultSchedule, NetworkError, RingTopology};
use crate::target::{BoundaryPerturbation, TargetError, TargetTrajectory};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("satellite bootstrap failed: {0}")]
    Satellite(#[source] EstimatorError),
    #[error("step {step}: target error: {source}")]
    Target { step: u64, source: TargetError },
    #[error("step {step}: network error: {source}")]
    Network { step: u64, source: NetworkError },
    #[error("step {step}, agent {agent}: control error: {source}")]
    Control { step: u64, agent: usize, source: GeometryError },
    #[error("step {step}, agent {agent}: non-finite position after integration")]
    NonFiniteState { step: u64, agent: usize },
    #[error("consensus initial condition invalid: angle sum {sum} (expected 2π)")]
    InvalidInitialCondition { sum: f64 },
}

/// Optional absolute overrides for the per-claim bounds used by the
/// post-run report. Unset entries fall back to defaults derived from the
/// trajectory's derivative bounds and the estimation interval.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportOverrides {
    pub center_bound: Option<f64>,
    pub radius_bound: Option<f64>,
    pub db_bound: Option<f64>,
    pub beta_bound: Option<f64>,
}

/// Full description of one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub dt: f64,
    /// Estimation runs every `est_every`-th step; the differentiation
    /// interval is `est_every·dt`.
    pub est_every: usize,
    /// Number of integration steps; the log carries `duration + 1`
    /// records including the initial one.
    pub duration: usize,
    pub seed: u64,
    /// Initial distance from the estimated center in units of the
    /// estimated radius; 1 places agents on the estimated boundary.
    pub placement_margin: f64,
    pub noise_c: f64,
    pub noise_r: f64,
    /// Explicit initial ring angles (radians, strictly increasing in
    /// [0, 2π)); equally spaced when absent.
    pub initial_angles: Option<Vec<f64>>,
    pub control: ControlParams,
    pub trajectory: TargetTrajectory,
    pub perturbation: BoundaryPerturbation,
    pub faults: FaultSchedule,
    /// Fraction of final steps used as the asymptotic-bound proxy window.
    pub tail_fraction: f64,
    pub report: ReportOverrides,
}

impl SimConfig {
    /// Checks every cross-field invariant. Engine entry points call this;
    /// config loaders surface the message to the user.
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.n < 3 {
            return fail("n must be ≥ 3".into());
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return fail(format!("dt must be > 0, got {}", self.dt));
        }
        if self.est_every == 0 {
            return fail("est_every must be ≥ 1".into());
        }
        if !(self.placement_margin >= 1.0) {
            return fail(format!(
                "placement_margin must be ≥ 1 (agents start outside the shape), got {}",
                self.placement_margin
            ));
        }
        if !(self.noise_c >= 0.0) || !(self.noise_r >= 0.0) {
            return fail("satellite noise amplitudes must be ≥ 0".into());
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return fail(format!(
                "tail_fraction must be in (0, 1], got {}",
                self.tail_fraction
            ));
        }
        if let Some(angles) = &self.initial_angles {
            if angles.len() != self.n {
                return fail(format!(
                    "initial_angles has {} entries for n = {}",
                    angles.len(),
                    self.n
                ));
            }
            for (i, a) in angles.iter().enumerate() {
                if !a.is_finite() || !(0.0..TAU).contains(a) {
                    return fail(format!("initial_angles[{i}] = {a} outside [0, 2π)"));
                }
                if i > 0 && *a <= angles[i - 1] {
                    return fail(format!(
                        "initial_angles must be strictly increasing (entry {i})"
                    ));
                }
            }
        }
        let horizon_needed = self.duration as f64 * self.dt;
        let (t_min, t_max) = self.trajectory.horizon();
        if t_min > 0.0 || t_max < horizon_needed {
            return fail(format!(
                "trajectory horizon [{t_min}, {t_max}] does not cover the run [0, {horizon_needed}]"
            ));
        }
        self.faults
            .validate(self.n, self.dt, self.duration)
            .map_err(|e| SimError::InvalidConfig(format!("fault schedule: {e}")))?;
        Ok(())
    }
}

/// Per-agent data captured at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentRecord {
    pub p: Vec2,
    /// Shared (possibly noised) signed boundary distance.
    pub d_b: f64,
    /// Distance to the estimated center.
    pub d_c: f64,
    /// Separation angle to the ring successor, radians in [0, 2π).
    pub beta: f64,
    pub u_raw: Vec2,
    pub u_applied: Vec2,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub t: f64,
    pub truth_c: Vec2,
    pub truth_r: f64,
    pub est: CircleEstimate,
    pub rates: RateEstimate,
    pub agents: Vec<AgentRecord>,
}

/// Full per-step time series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub n: usize,
    pub dt: f64,
    pub records: Vec<StepRecord>,
}

/// Mutable loop state between steps.
#[derive(Debug, Clone)]
pub struct SimState {
    pub step: u64,
    pub positions: Vec<Vec2>,
    /// Fused estimate from the most recent successful estimation step.
    fused: Option<CircleEstimate>,
    rates: RateEstimate,
    est0: CircleEstimate,
    topo: RingTopology,
}

/// Places agent `i` at `ĉ₀ + margin·r̂₀·(cos θᵢ, sin θᵢ)` with the given
/// counterclockwise angles.
pub fn place_agents_at_angles(est0: &CircleEstimate, margin: f64, angles: &[f64]) -> Vec<Vec2> {
    angles
        .iter()
        .map(|&th| est0.c_hat + Vec2::new(th.cos(), th.sin()) * (margin * est0.r_hat))
        .collect()
}

/// Equally spaced counterclockwise placement, `θᵢ = 2πi/n`, giving every
/// initial separation angle the consensus value `2π/n`.
pub fn place_agents_initial(est0: &CircleEstimate, n: usize, margin: f64) -> Vec<Vec2> {
    let angles: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    place_agents_at_angles(est0, margin, &angles)
}

/// Bootstraps the loop state from the satellite stub and the placement
/// policy.
pub fn init_state(config: &SimConfig) -> Result<SimState, SimError> {
    config.validate()?;
    let truth0 = config
        .trajectory
        .sample(0.0)
        .map_err(|source| SimError::Target { step: 0, source })?;
    let est0 = init_from_satellite(&truth0, config.noise_c, config.noise_r, config.seed)
        .map_err(SimError::Satellite)?;
    let positions = match &config.initial_angles {
        Some(angles) => place_agents_at_angles(&est0, config.placement_margin, angles),
        None => place_agents_initial(&est0, config.n, config.placement_margin),
    };
    let topo = RingTopology::new(config.n)
        .map_err(|source| SimError::Network { step: 0, source })?;
    Ok(SimState {
        step: 0,
        positions,
        fused: None,
        rates: RateEstimate::default(),
        est0,
        topo,
    })
}

/// Runs the measurement/estimation/control pipeline at the state's
/// current step and returns the step record, without integrating.
/// Estimator state (fused estimate, rates) advances on estimation steps.
pub fn observe(state: &mut SimState, config: &SimConfig) -> Result<StepRecord, SimError> {
    let step = state.step;
    let t = step as f64 * config.dt;
    let truth = config
        .trajectory
        .sample(t)
        .map_err(|source| SimError::Target { step, source })?;

    // (1) measure against the (possibly perturbed) true boundary
    let raw: Vec<(Vec2, f64)> = state
        .positions
        .iter()
        .map(|&p| {
            config
                .trajectory
                .measured_distance(&config.perturbation, p, t)
                .map(|d| (p, d))
        })
        .collect::<Result<_, _>>()
        .map_err(|source| SimError::Target { step, source })?;

    // (2) distribute over the ring
    let views = exchange(&raw, &state.topo, &config.faults, step, t)
        .map_err(|source| SimError::Network { step, source })?;

    // (3) estimation step: per-agent fits, fusion, rate differencing
    if step % config.est_every as u64 == 0 {
        let init = state.fused.unwrap_or(state.est0);
        let per_agent: Vec<(CircleEstimate, bool)> = (0..config.n)
            .map(|i| {
                if !config.faults.is_valid(i, t) {
                    return (init, false);
                }
                match fit_circle(&views[i].measurements, &init, t) {
                    Ok(est) => (est, true),
                    // insufficient data / degenerate geometry /
                    // nonconvergence: this agent contributes nothing
                    Err(_) => (init, false),
                }
            })
            .collect();
        if let Ok(new_fused) = fuse_estimates(&per_agent) {
            state.rates = match state.fused {
                // zero feedforward until two fused estimates exist
                None => RateEstimate::default(),
                Some(prev) => {
                    let gap = new_fused.t - prev.t;
                    estimate_rates(&prev, &new_fused, gap).unwrap_or(state.rates)
                }
            };
            state.fused = Some(new_fused);
        }
        // on fusion failure (all agents faulty) the previous fused
        // estimate and rates are held
    }

    let est = state.fused.unwrap_or(state.est0);

    // (4) control
    let mut agents = Vec::with_capacity(config.n);
    for i in 0..config.n {
        let p = state.positions[i];
        let succ = views[i].successor_pos;
        let out = compute_control(p, succ, &est, &state.rates, &config.control)
            .map_err(|source| SimError::Control { step, agent: i, source })?;
        let m = &views[i].measurements[i];
        agents.push(AgentRecord {
            p,
            d_b: m.d_b,
            d_c: (est.c_hat - p).norm(),
            beta: out.beta_used.radians(),
            u_raw: out.u_raw,
            u_applied: out.u_applied,
            valid: m.valid,
        });
    }

    Ok(StepRecord {
        step,
        t,
        truth_c: truth.c,
        truth_r: truth.r,
        est,
        rates: state.rates,
        agents,
    })
}

/// Euler-integrates the applied controls of `record` and advances the
/// step counter.
pub fn advance(state: &mut SimState, config: &SimConfig, record: &StepRecord) -> Result<(), SimError> {
    for (i, agent) in record.agents.iter().enumerate() {
        state.positions[i] += agent.u_applied * config.dt;
        if !state.positions[i].is_finite() {
            return Err(SimError::NonFiniteState { step: state.step, agent: i });
        }
    }
    state.step += 1;
    Ok(())
}

/// One full step: observe, then integrate.
pub fn step(state: &mut SimState, config: &SimConfig) -> Result<StepRecord, SimError> {
    let record = observe(state, config)?;
    advance(state, config, &record)?;
    Ok(record)
}

/// Executes `duration` steps and returns the log with `duration + 1`
/// records (the final record observes the end state without integrating
/// past it).
pub fn run(config: &SimConfig) -> Result<SimLog, SimError> {
    let mut state = init_state(config)?;
    let mut records = Vec::with_capacity(config.duration + 1);
    for _ in 0..config.duration {
        records.push(step(&mut state, config)?);
    }
    records.push(observe(&mut state, config)?);
    Ok(SimLog { n: config.n, dt: config.dt, records })
}

/// Aggregate error metrics: asymptotic maxima over the tail window,
/// run-wide minima for the positivity and singularity claims, and the
/// fitted exponential decay rate of the mean boundary-tracking error
/// over the transient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryMetrics {
    pub tail_center_error_max: f64,
    pub tail_radius_error_max: f64,
    pub tail_db_abs_max: f64,
    /// max over tail of `max_i |β_i − 2π/n|`
    pub tail_beta_error_max: f64,
    /// min over the whole run of every separation angle
    pub min_beta: f64,
    /// min over the whole run of every distance to the estimated center
    pub min_d_c: f64,
    /// max over the whole run of `|Σ β_i − 2π|`
    pub beta_sum_max_dev: f64,
    pub max_u_applied_norm: f64,
    pub max_u_applied_component: f64,
    /// Log-linear fit of mean_i `W_i = D̂ᶜ_i − r̂` while `|W| > 1e-6`;
    /// `None` without at least two qualifying steps.
    pub w_decay_rate: Option<f64>,
}

/// Computes [`SummaryMetrics`] with the last `tail_fraction` of records
/// as the lim-sup proxy window.
pub fn metrics(log: &SimLog, tail_fraction: f64) -> SummaryMetrics {
    assert!(
        tail_fraction > 0.0 && tail_fraction <= 1.0,
        "tail_fraction must be in (0, 1]"
    );
    let n_records = log.records.len();
    let tail_len = ((tail_fraction * n_records as f64).ceil() as usize).clamp(1, n_records);
    let tail_start = n_records - tail_len;
    let beta_target = TAU / log.n as f64;

    let mut m = SummaryMetrics {
        tail_center_error_max: 0.0,
        tail_radius_error_max: 0.0,
        tail_db_abs_max: 0.0,
        tail_beta_error_max: 0.0,
        min_beta: f64::INFINITY,
        min_d_c: f64::INFINITY,
        beta_sum_max_dev: 0.0,
        max_u_applied_norm: 0.0,
        max_u_applied_component: 0.0,
        w_decay_rate: None,
    };

    for (k, rec) in log.records.iter().enumerate() {
        let mut beta_sum = 0.0;
        for agent in &rec.agents {
            beta_sum += agent.beta;
            m.min_beta = m.min_beta.min(agent.beta);
            m.min_d_c = m.min_d_c.min(agent.d_c);
            m.max_u_applied_norm = m.max_u_applied_norm.max(agent.u_applied.norm());
            m.max_u_applied_component = m.max_u_applied_component.max(agent.u_applied.amax());
            if k >= tail_start {
                m.tail_db_abs_max = m.tail_db_abs_max.max(agent.d_b.abs());
                m.tail_beta_error_max =
                    m.tail_beta_error_max.max((agent.beta - beta_target).abs());
            }
        }
        m.beta_sum_max_dev = m.beta_sum_max_dev.max((beta_sum - TAU).abs());
        if k >= tail_start {
            m.tail_center_error_max = m
                .tail_center_error_max
                .max((rec.est.c_hat - rec.truth_c).norm());
            m.tail_radius_error_max = m
                .tail_radius_error_max
                .max((rec.est.r_hat - rec.truth_r).abs());
        }
    }

    m.w_decay_rate = fit_w_decay(log);
    m
}

/// Least-squares slope of `ln |mean_i W_i|` against time over the
/// transient prefix where `|mean W| > 1e-6`.
fn fit_w_decay(log: &SimLog) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for rec in &log.records {
        let w: f64 = rec
            .agents
            .iter()
            .map(|a| a.d_c - rec.est.r_hat)
            .sum::<f64>()
            / rec.agents.len() as f64;
        if w.abs() <= 1e-6 {
            break;
        }
        pts.push((rec.t, w.abs().ln()));
    }
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (st, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), &(t, y)| (a + t, b + y));
    let (tbar, ybar) = (st / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(t, y) in &pts {
        num += (t - tbar) * (y - ybar);
        den += (t - tbar) * (t - tbar);
    }
    if den == 0.0 {
        return None;
    }
    Some(-(num / den))
}

/// Reference trajectory of the separation-angle consensus dynamics
/// `β̇ = −δBᵀβ`, integrated with fixed-step RK4 at step `dt/100`.
/// Serves as the oracle for closed-loop β trajectories.
pub fn consensus_predict(
    beta0: &[Angle],
    delta: f64,
    t: f64,
    dt: f64,
) -> Result<Vec<Angle>, SimError> {
    let n = beta0.len();
    let sum: f64 = beta0.iter().map(|b| b.radians()).sum();
    if (sum - TAU).abs() > 1e-9 {
        return Err(SimError::InvalidInitialCondition { sum });
    }
    if !(t >= 0.0) || !(dt > 0.0) || !(delta >= 0.0) {
        return Err(SimError::InvalidConfig(
            "consensus_predict needs t ≥ 0, dt > 0, delta ≥ 0".into(),
        ));
    }
    let b_t = incidence_ring(n).map_err(|source| SimError::Network { step: 0, source })?;
    let f = |beta: &DVector<f64>| -> DVector<f64> { &b_t * beta * (-delta) };

    let mut beta = DVector::from_iterator(n, beta0.iter().map(|b| b.radians()));
    if t == 0.0 {
        return Ok(beta.iter().map(|&b| Angle::new(b)).collect());
    }
    let h_max = dt / 100.0;
    let steps = (t / h_max).ceil() as usize;
    let h = t / steps as f64;
    for _ in 0..steps {
        let k1 = f(&beta);
        let k2 = f(&(&beta + &k1 * (h / 2.0)));
        let k3 = f(&(&beta + &k2 * (h / 2.0)));
        let k4 = f(&(&beta + &k3 * h));
        beta += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(beta.iter().map(|&b| Angle::new(b)).collect())
}
