//! Scenario config parsing, validation, and canonical rendering.
//!
//! The format is flat `key = value` lines with `#` comments and
//! `[section]` headers (control, trajectory, perturbation, faults,
//! report). Unknown or inapplicable keys are errors, duplicate keys are
//! errors naming both lines, and every default is rendered explicitly by
//! the canonical writer, so `parse(render(c)) == c` for every valid
//! config.
//!
//! Agent ids in fault windows are 1-based, matching the timeseries CSV
//! column names.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use circumnav_core::controller::{ControlParams, LimitMode};
use circumnav_core::geometry::Vec2;
use circumnav_core::network::{FaultSchedule, FaultWindow};
use circumnav_core::sim::{ReportOverrides, SimConfig};
use circumnav_core::target::{BoundaryPerturbation, TargetTrajectory, TrajectoryKind, Waypoint};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("duplicate key {key:?} on lines {first_line} and {second_line}")]
    DuplicateKey { key: String, first_line: usize, second_line: usize },
    #[error("line {line}: unknown or inapplicable key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("missing required key {key:?}")]
    MissingKey { key: String },
    #[error("key {key:?}: {msg}")]
    Semantic { key: String, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

const SECTIONS: [&str; 5] = ["control", "trajectory", "perturbation", "faults", "report"];

/// Raw `section.key -> (value, line)` map with duplicate detection.
struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

fn tokenize(text: &str) -> Result<RawConfig, ConfigError> {
    let mut entries = BTreeMap::new();
    let mut section = String::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                msg: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    msg: format!("unknown section [{name}] (expected one of {SECTIONS:?})"),
                });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: line_no,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: line_no, msg: "empty key".into() });
        }
        let full = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        if let Some((_, first_line)) = entries.get(&full) {
            return Err(ConfigError::DuplicateKey {
                key: full,
                first_line: *first_line,
                second_line: line_no,
            });
        }
        entries.insert(full, (value.trim().to_string(), line_no));
    }
    Ok(RawConfig { entries })
}

/// Typed reads with consumption tracking; leftover keys become errors.
struct Reader {
    raw: RawConfig,
    used: Vec<String>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.used.push(key.to_string());
        self.raw.entries.get(key).cloned()
    }

    fn str_or(&mut self, key: &str, default: &str) -> String {
        self.take(key).map(|(v, _)| v).unwrap_or_else(|| default.to_string())
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((v, _)) => parse_f64(key, &v),
        }
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((v, _)) => v.parse().map_err(|_| ConfigError::Semantic {
                key: key.into(),
                msg: format!("expected a nonnegative integer, got {v:?}"),
            }),
        }
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((v, _)) => v.parse().map_err(|_| ConfigError::Semantic {
                key: key.into(),
                msg: format!("expected a nonnegative integer, got {v:?}"),
            }),
        }
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, _)) => parse_f64(key, &v).map(Some),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        for (key, &(_, line)) in &self.raw.entries {
            if !self.used.contains(key) {
                return Err(ConfigError::UnknownKey { line, key: clone_key(key) });
            }
        }
        Ok(())
    }
}

fn clone_key(k: &str) -> String {
    k.to_string()
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| ConfigError::Semantic {
        key: key.into(),
        msg: format!("expected a number, got {v:?}"),
    })?;
    if !x.is_finite() {
        return Err(ConfigError::Semantic {
            key: key.into(),
            msg: format!("value must be finite, got {v:?}"),
        });
    }
    Ok(x)
}

fn semantic(key: &str, msg: impl ToString) -> ConfigError {
    ConfigError::Semantic { key: key.into(), msg: msg.to_string() }
}

/// Parses a config from text. `base_dir` anchors relative waypoint CSV
/// paths.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<SimConfig, ConfigError> {
    let mut r = Reader { raw: tokenize(text)?, used: Vec::new() };

    let n: usize = match r.take("n") {
        Some((v, _)) => v.parse().map_err(|_| {
            semantic("n", format!("expected a nonnegative integer, got {v:?}"))
        })?,
        None => return Err(ConfigError::MissingKey { key: "n".into() }),
    };
    if n < 3 {
        return Err(semantic("n", "n must be ≥ 3"));
    }
    let dt = r.f64_or("dt", 1.0)?;
    if !(dt > 0.0) {
        return Err(semantic("dt", format!("dt must be > 0, got {dt}")));
    }
    let est_every = r.usize_or("est_every", 1)?;
    if est_every == 0 {
        return Err(semantic("est_every", "est_every must be ≥ 1"));
    }
    let duration = r.usize_or("duration", 500)?;
    if duration == 0 {
        return Err(semantic("duration", "duration must be ≥ 1"));
    }
    let seed = r.u64_or("seed", 0)?;
    let placement_margin = r.f64_or("placement_margin", 1.2)?;
    if !(placement_margin >= 1.0) {
        return Err(semantic(
            "placement_margin",
            format!("placement_margin must be ≥ 1, got {placement_margin}"),
        ));
    }
    let noise_c = r.f64_or("noise_c", 0.0)?;
    let noise_r = r.f64_or("noise_r", 0.0)?;
    if noise_c < 0.0 || noise_r < 0.0 {
        return Err(semantic("noise_c", "satellite noise amplitudes must be ≥ 0"));
    }
    let tail_fraction = r.f64_or("tail_fraction", 0.2)?;
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(semantic(
            "tail_fraction",
            format!("tail_fraction must be in (0, 1], got {tail_fraction}"),
        ));
    }
    let initial_angles = match r.take("initial_angles") {
        None => None,
        Some((v, _)) => {
            let angles: Result<Vec<f64>, _> = v
                .split(',')
                .map(|s| parse_f64("initial_angles", s.trim()))
                .collect();
            Some(angles?)
        }
    };

    let delta = r.f64_or("control.delta", 1.0)?;
    let u_max = r.f64_or("control.u_max", 2.0)?;
    let mode: LimitMode = r
        .str_or("control.mode", "norm-saturated")
        .parse()
        .map_err(|e| semantic("control.mode", e))?;
    let control = ControlParams::new(delta, u_max, mode)
        .map_err(|e| semantic("control.delta", e))?;

    let horizon = duration as f64 * dt;
    let trajectory = parse_trajectory(&mut r, horizon, base_dir)?;

    let eta = r.f64_or("perturbation.eta", 0.0)?;
    let modes = r.usize_or("perturbation.modes", 0)? as u32;
    let phase = r.f64_or("perturbation.phase", 0.0)?;
    let perturbation = BoundaryPerturbation::new(eta, modes, phase)
        .map_err(|e| semantic("perturbation.eta", e))?;

    let noise_amplitude = r.f64_or("faults.noise_amplitude", 0.0)?;
    let windows = match r.take("faults.windows") {
        None => Vec::new(),
        Some((v, _)) => parse_windows(&v)?,
    };
    let faults = FaultSchedule::new(windows, noise_amplitude, seed)
        .map_err(|e| semantic("faults.windows", e))?;

    let report = ReportOverrides {
        center_bound: r.opt_f64("report.center_bound")?,
        radius_bound: r.opt_f64("report.radius_bound")?,
        db_bound: r.opt_f64("report.db_bound")?,
        beta_bound: r.opt_f64("report.beta_bound")?,
    };

    r.finish()?;

    let config = SimConfig {
        n,
        dt,
        est_every,
        duration,
        seed,
        placement_margin,
        noise_c,
        noise_r,
        initial_angles,
        control,
        trajectory,
        perturbation,
        faults,
        tail_fraction,
        report,
    };
    config
        .validate()
        .map_err(|e| semantic("config", e.to_string()))?;
    Ok(config)
}

fn parse_trajectory(
    r: &mut Reader,
    horizon: f64,
    base_dir: &Path,
) -> Result<TargetTrajectory, ConfigError> {
    let kind = r
        .take("trajectory.kind")
        .map(|(v, _)| v)
        .ok_or(ConfigError::MissingKey { key: "trajectory.kind".into() })?;
    let center_and_radius = |r: &mut Reader| -> Result<(Vec2, f64), ConfigError> {
        let cx = r.f64_or("trajectory.cx", 0.0)?;
        let cy = r.f64_or("trajectory.cy", 0.0)?;
        let radius = r.f64_or("trajectory.r", 10.0)?;
        Ok((Vec2::new(cx, cy), radius))
    };
    let wrap = |res: Result<TargetTrajectory, circumnav_core::target::TargetError>| {
        res.map_err(|e| semantic("trajectory", e))
    };
    match kind.as_str() {
        "constant" => {
            let (c, radius) = center_and_radius(r)?;
            wrap(TargetTrajectory::constant(c, radius, horizon))
        }
        "linear-drift" => {
            let (c, radius) = center_and_radius(r)?;
            let vx = r.f64_or("trajectory.velocity_x", 0.0)?;
            let vy = r.f64_or("trajectory.velocity_y", 0.0)?;
            let r_rate = r.f64_or("trajectory.r_rate", 0.0)?;
            wrap(TargetTrajectory::linear_drift(
                c,
                radius,
                Vec2::new(vx, vy),
                r_rate,
                horizon,
            ))
        }
        "sinusoidal" => {
            let (c, radius) = center_and_radius(r)?;
            let ax = r.f64_or("trajectory.c_amplitude_x", 0.0)?;
            let ay = r.f64_or("trajectory.c_amplitude_y", 0.0)?;
            let c_omega = r.f64_or("trajectory.c_omega", 0.0)?;
            let r_amplitude = r.f64_or("trajectory.r_amplitude", 0.0)?;
            let r_omega = r.f64_or("trajectory.r_omega", 0.0)?;
            wrap(TargetTrajectory::sinusoidal(
                c,
                radius,
                Vec2::new(ax, ay),
                c_omega,
                r_amplitude,
                r_omega,
                horizon,
            ))
        }
        "waypoints" => {
            let inline = r.take("trajectory.waypoints");
            let csv = r.take("trajectory.waypoints_csv");
            let rows = match (inline, csv) {
                (Some((v, _)), None) => parse_inline_waypoints(&v)?,
                (None, Some((path, _))) => load_waypoint_csv(&base_dir.join(path.trim()))?,
                (Some(_), Some(_)) => {
                    return Err(semantic(
                        "trajectory.waypoints",
                        "give either waypoints or waypoints_csv, not both",
                    ))
                }
                (None, None) => {
                    return Err(ConfigError::MissingKey {
                        key: "trajectory.waypoints".into(),
                    })
                }
            };
            wrap(TargetTrajectory::from_waypoints(rows))
        }
        other => Err(semantic(
            "trajectory.kind",
            format!(
                "unknown kind {other:?} (expected constant, linear-drift, sinusoidal, \
                 or waypoints)"
            ),
        )),
    }
}

/// `t:x:y:r` rows separated by `;`.
fn parse_inline_waypoints(v: &str) -> Result<Vec<Waypoint>, ConfigError> {
    v.split(';')
        .filter(|row| !row.trim().is_empty())
        .map(|row| {
            let parts: Vec<&str> = row.split(':').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(semantic(
                    "trajectory.waypoints",
                    format!("row {row:?} must be t:x:y:r"),
                ));
            }
            Ok(Waypoint {
                t: parse_f64("trajectory.waypoints", parts[0])?,
                c: Vec2::new(
                    parse_f64("trajectory.waypoints", parts[1])?,
                    parse_f64("trajectory.waypoints", parts[2])?,
                ),
                r: parse_f64("trajectory.waypoints", parts[3])?,
            })
        })
        .collect()
}

/// CSV with header `t,x,y,r`, decimal-point floats, one waypoint per row.
pub fn load_waypoint_csv(path: &Path) -> Result<Vec<Waypoint>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, l)| l.trim())
        .unwrap_or_default();
    if header != "t,x,y,r" {
        return Err(semantic(
            "trajectory.waypoints_csv",
            format!("expected header `t,x,y,r`, got {header:?}"),
        ));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(semantic(
                "trajectory.waypoints_csv",
                format!("row {}: expected 4 fields, got {}", idx + 1, fields.len()),
            ));
        }
        let num = |s: &str| {
            parse_f64("trajectory.waypoints_csv", s).map_err(|_| {
                semantic(
                    "trajectory.waypoints_csv",
                    format!("row {}: bad number {s:?}", idx + 1),
                )
            })
        };
        rows.push(Waypoint {
            t: num(fields[0])?,
            c: Vec2::new(num(fields[1])?, num(fields[2])?),
            r: num(fields[3])?,
        });
    }
    Ok(rows)
}

/// `agent:t_start:t_end` triples separated by `;`, agents 1-based.
fn parse_windows(v: &str) -> Result<Vec<FaultWindow>, ConfigError> {
    v.split(';')
        .filter(|w| !w.trim().is_empty())
        .map(|w| {
            let parts: Vec<&str> = w.split(':').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(semantic(
                    "faults.windows",
                    format!("window {w:?} must be agent:t_start:t_end"),
                ));
            }
            let agent: usize = parts[0].parse().map_err(|_| {
                semantic("faults.windows", format!("bad agent id {:?}", parts[0]))
            })?;
            if agent == 0 {
                return Err(semantic("faults.windows", "agent ids are 1-based"));
            }
            Ok(FaultWindow {
                agent_id: agent - 1,
                t_start: parse_f64("faults.windows", parts[1])?,
                t_end: parse_f64("faults.windows", parts[2])?,
            })
        })
        .collect()
}

/// Canonical writer: every resolved value explicit, floats in Rust's
/// shortest round-trip form. `parse_config(render(c)) == c`.
pub fn render(config: &SimConfig) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "n = {}", config.n).unwrap();
    writeln!(w, "dt = {}", config.dt).unwrap();
    writeln!(w, "est_every = {}", config.est_every).unwrap();
    writeln!(w, "duration = {}", config.duration).unwrap();
    writeln!(w, "seed = {}", config.seed).unwrap();
    writeln!(w, "placement_margin = {}", config.placement_margin).unwrap();
    writeln!(w, "noise_c = {}", config.noise_c).unwrap();
    writeln!(w, "noise_r = {}", config.noise_r).unwrap();
    writeln!(w, "tail_fraction = {}", config.tail_fraction).unwrap();
    if let Some(angles) = &config.initial_angles {
        let joined: Vec<String> = angles.iter().map(|a| a.to_string()).collect();
        writeln!(w, "initial_angles = {}", joined.join(", ")).unwrap();
    }

    writeln!(w, "\n[control]").unwrap();
    writeln!(w, "delta = {}", config.control.delta).unwrap();
    writeln!(w, "u_max = {}", config.control.u_max).unwrap();
    writeln!(w, "mode = {}", config.control.mode).unwrap();

    writeln!(w, "\n[trajectory]").unwrap();
    let base = config.trajectory.base();
    match config.trajectory.kind() {
        TrajectoryKind::Constant => {
            writeln!(w, "kind = constant").unwrap();
            writeln!(w, "cx = {}", base.c.x).unwrap();
            writeln!(w, "cy = {}", base.c.y).unwrap();
            writeln!(w, "r = {}", base.r).unwrap();
        }
        TrajectoryKind::LinearDrift { velocity, r_rate } => {
            writeln!(w, "kind = linear-drift").unwrap();
            writeln!(w, "cx = {}", base.c.x).unwrap();
            writeln!(w, "cy = {}", base.c.y).unwrap();
            writeln!(w, "r = {}", base.r).unwrap();
            writeln!(w, "velocity_x = {}", velocity.x).unwrap();
            writeln!(w, "velocity_y = {}", velocity.y).unwrap();
            writeln!(w, "r_rate = {}", r_rate).unwrap();
        }
        TrajectoryKind::Sinusoidal { c_amplitude, c_omega, r_amplitude, r_omega } => {
            writeln!(w, "kind = sinusoidal").unwrap();
            writeln!(w, "cx = {}", base.c.x).unwrap();
            writeln!(w, "cy = {}", base.c.y).unwrap();
            writeln!(w, "r = {}", base.r).unwrap();
            writeln!(w, "c_amplitude_x = {}", c_amplitude.x).unwrap();
            writeln!(w, "c_amplitude_y = {}", c_amplitude.y).unwrap();
            writeln!(w, "c_omega = {}", c_omega).unwrap();
            writeln!(w, "r_amplitude = {}", r_amplitude).unwrap();
            writeln!(w, "r_omega = {}", r_omega).unwrap();
        }
        TrajectoryKind::Waypoints { rows } => {
            writeln!(w, "kind = waypoints").unwrap();
            let rendered: Vec<String> = rows
                .iter()
                .map(|wp| format!("{}:{}:{}:{}", wp.t, wp.c.x, wp.c.y, wp.r))
                .collect();
            writeln!(w, "waypoints = {}", rendered.join("; ")).unwrap();
        }
    }

    writeln!(w, "\n[perturbation]").unwrap();
    writeln!(w, "eta = {}", config.perturbation.eta).unwrap();
    writeln!(w, "modes = {}", config.perturbation.modes).unwrap();
    writeln!(w, "phase = {}", config.perturbation.phase).unwrap();

    writeln!(w, "\n[faults]").unwrap();
    writeln!(w, "noise_amplitude = {}", config.faults.noise_amplitude).unwrap();
    if !config.faults.windows.is_empty() {
        let rendered: Vec<String> = config
            .faults
            .windows
            .iter()
            .map(|fw| format!("{}:{}:{}", fw.agent_id + 1, fw.t_start, fw.t_end))
            .collect();
        writeln!(w, "windows = {}", rendered.join("; ")).unwrap();
    }

    let rep = &config.report;
    if rep.center_bound.is_some()
        || rep.radius_bound.is_some()
        || rep.db_bound.is_some()
        || rep.beta_bound.is_some()
    {
        writeln!(w, "\n[report]").unwrap();
        if let Some(v) = rep.center_bound {
            writeln!(w, "center_bound = {v}").unwrap();
        }
        if let Some(v) = rep.radius_bound {
            writeln!(w, "radius_bound = {v}").unwrap();
        }
        if let Some(v) = rep.db_bound {
            writeln!(w, "db_bound = {v}").unwrap();
        }
        if let Some(v) = rep.beta_bound {
            writeln!(w, "beta_bound = {v}").unwrap();
        }
    }
    out
}

/// Loads and parses a config file; relative waypoint CSVs resolve
/// against the config's directory.
pub fn load_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

/// Applies one sweepable scalar to a copy of `base`. Trajectory-shaping
/// keys rebuild the trajectory; `dt` rebuilds the horizon.
pub fn with_sweep_value(
    base: &SimConfig,
    key: &str,
    value: f64,
) -> Result<SimConfig, ConfigError> {
    let mut config = base.clone();
    let horizon = |c: &SimConfig| c.duration as f64 * c.dt;
    match key {
        "delta" => {
            config.control = ControlParams::new(value, config.control.u_max, config.control.mode)
                .map_err(|e| semantic("delta", e))?;
        }
        "u_max" => {
            config.control = ControlParams::new(config.control.delta, value, config.control.mode)
                .map_err(|e| semantic("u_max", e))?;
        }
        "dt" => {
            if !(value > 0.0) {
                return Err(semantic("dt", "dt must be > 0"));
            }
            config.dt = value;
            config.trajectory = rebuild_with_horizon(&config, horizon(&config))?;
        }
        "noise_amplitude" => {
            config.faults = FaultSchedule::new(
                config.faults.windows.clone(),
                value,
                config.faults.seed,
            )
            .map_err(|e| semantic("noise_amplitude", e))?;
        }
        "eta" => {
            config.perturbation = BoundaryPerturbation::new(
                value,
                config.perturbation.modes,
                config.perturbation.phase,
            )
            .map_err(|e| semantic("eta", e))?;
        }
        "drift_speed" | "r_rate" => {
            let base_state = config.trajectory.base();
            let (velocity, r_rate) = match config.trajectory.kind() {
                TrajectoryKind::LinearDrift { velocity, r_rate } => (*velocity, *r_rate),
                _ => {
                    return Err(semantic(
                        key,
                        "sweeping this key requires a linear-drift trajectory",
                    ))
                }
            };
            let (velocity, r_rate) = if key == "drift_speed" {
                let norm = velocity.norm();
                let dir = if norm > 0.0 {
                    velocity * (1.0 / norm)
                } else {
                    Vec2::new(1.0, 0.0)
                };
                (dir * value, r_rate)
            } else {
                (velocity, value)
            };
            config.trajectory = TargetTrajectory::linear_drift(
                base_state.c,
                base_state.r,
                velocity,
                r_rate,
                horizon(&config),
            )
            .map_err(|e| semantic(key, e))?;
        }
        other => {
            return Err(semantic(
                other,
                "not sweepable (expected delta, u_max, dt, noise_amplitude, eta, \
                 drift_speed, or r_rate)",
            ))
        }
    }
    Ok(config)
}

fn rebuild_with_horizon(config: &SimConfig, horizon: f64) -> Result<TargetTrajectory, ConfigError> {
    let base = config.trajectory.base();
    let res = match config.trajectory.kind() {
        TrajectoryKind::Constant => TargetTrajectory::constant(base.c, base.r, horizon),
        TrajectoryKind::LinearDrift { velocity, r_rate } => {
            TargetTrajectory::linear_drift(base.c, base.r, *velocity, *r_rate, horizon)
        }
        TrajectoryKind::Sinusoidal { c_amplitude, c_omega, r_amplitude, r_omega } => {
            TargetTrajectory::sinusoidal(
                base.c,
                base.r,
                *c_amplitude,
                *c_omega,
                *r_amplitude,
                *r_omega,
                horizon,
            )
        }
        TrajectoryKind::Waypoints { rows } => TargetTrajectory::from_waypoints(rows.clone()),
    };
    res.map_err(|e| semantic("trajectory", e))
}
