//! Command implementations behind the `circumnav` binary: run a
//! scenario and emit its artifact set, sweep one scalar across values,
//! or validate a config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use circumnav_core::analysis::theorem_report;
use circumnav_core::sim::{metrics, run, SimError, SimLog, SummaryMetrics};

use crate::artifacts::{summary_text, theorem_csv, theorem_text, timeseries_csv};
use crate::config::{load_config, render, with_sweep_value, ConfigError};
use crate::plot::{line_chart, path_chart, CircleMark, Series, PALETTE};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("engine failure: {0}")]
    Engine(#[from] SimError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 1 for engine failures, 2 for config, I/O, and usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(_) => 1,
            _ => 2,
        }
    }
}

/// Paths of everything a successful run writes.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub timeseries: PathBuf,
    pub summary: PathBuf,
    pub theorem_txt: PathBuf,
    pub theorem_csv: PathBuf,
    pub svgs: Vec<PathBuf>,
}

impl RunArtifacts {
    pub fn all_paths(&self) -> Vec<&PathBuf> {
        let mut v = vec![&self.timeseries, &self.summary, &self.theorem_txt, &self.theorem_csv];
        v.extend(self.svgs.iter());
        v
    }
}

/// Parses and validates a config, returning its canonical rendering.
pub fn cmd_validate(config_path: &Path) -> Result<String, CliError> {
    let config = load_config(config_path)?;
    Ok(render(&config))
}

/// Executes the scenario and writes the artifact set into `out_dir`.
/// Files are assembled in memory first; a failed write removes anything
/// already written so no partial artifact set is left behind.
pub fn cmd_run(config_path: &Path, out_dir: &Path) -> Result<RunArtifacts, CliError> {
    let config = load_config(config_path)?;
    log::info!("running {} steps with n = {}", config.duration, config.n);
    let log = run(&config)?;
    let m = metrics(&log, config.tail_fraction);
    let report = theorem_report(&log, &config);
    log::info!(
        "tail center error {:.3e}, tail |D^b| {:.3e}, min beta {:.3e}",
        m.tail_center_error_max,
        m.tail_db_abs_max,
        m.min_beta
    );

    let mut files: Vec<(PathBuf, String)> = vec![
        (out_dir.join("timeseries.csv"), timeseries_csv(&log)),
        (out_dir.join("summary.txt"), summary_text(&config, &m)),
        (out_dir.join("theorem.txt"), theorem_text(&report)),
        (out_dir.join("theorem.csv"), theorem_csv(&report)),
    ];
    let mut svgs = Vec::new();
    for (name, content) in render_plots(&log) {
        let path = out_dir.join(name);
        svgs.push(path.clone());
        files.push((path, content));
    }

    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    write_all_or_clean_up(&files)?;

    Ok(RunArtifacts {
        timeseries: out_dir.join("timeseries.csv"),
        summary: out_dir.join("summary.txt"),
        theorem_txt: out_dir.join("theorem.txt"),
        theorem_csv: out_dir.join("theorem.csv"),
        svgs,
    })
}

fn write_all_or_clean_up(files: &[(PathBuf, String)]) -> Result<(), CliError> {
    for (i, (path, content)) in files.iter().enumerate() {
        if let Err(source) = std::fs::write(path, content) {
            for (done, _) in &files[..i] {
                let _ = std::fs::remove_file(done);
            }
            return Err(CliError::Io { path: path.clone(), source });
        }
    }
    Ok(())
}

/// The per-run SVG panel set.
fn render_plots(log: &SimLog) -> Vec<(&'static str, String)> {
    let t: Vec<f64> = log.records.iter().map(|r| r.t).collect();
    let pair = |true_vals: Vec<f64>, est_vals: Vec<f64>, what: &str| {
        vec![
            Series::new(
                format!("true {what}"),
                PALETTE[0],
                t.iter().copied().zip(true_vals).collect(),
            ),
            Series::new(
                format!("estimated {what}"),
                PALETTE[1],
                t.iter().copied().zip(est_vals).collect(),
            )
            .dashed(),
        ]
    };

    let mut out = Vec::new();
    out.push((
        "estimate_x.svg",
        line_chart(
            "Target center x: true vs estimated",
            "t [iterations]",
            "x [field units]",
            &pair(
                log.records.iter().map(|r| r.truth_c.x).collect(),
                log.records.iter().map(|r| r.est.c_hat.x).collect(),
                "x",
            ),
        ),
    ));
    out.push((
        "estimate_y.svg",
        line_chart(
            "Target center y: true vs estimated",
            "t [iterations]",
            "y [field units]",
            &pair(
                log.records.iter().map(|r| r.truth_c.y).collect(),
                log.records.iter().map(|r| r.est.c_hat.y).collect(),
                "y",
            ),
        ),
    ));
    out.push((
        "estimate_r.svg",
        line_chart(
            "Target radius: true vs estimated",
            "t [iterations]",
            "r [field units]",
            &pair(
                log.records.iter().map(|r| r.truth_r).collect(),
                log.records.iter().map(|r| r.est.r_hat).collect(),
                "r",
            ),
        ),
    ));
    out.push((
        "error_db1.svg",
        line_chart(
            "Agent 1 boundary tracking error",
            "t [iterations]",
            "|D^b_1| [field units]",
            &[Series::new(
                "|D^b_1|",
                PALETTE[0],
                t.iter()
                    .copied()
                    .zip(log.records.iter().map(|r| r.agents[0].d_b.abs()))
                    .collect(),
            )],
        ),
    ));
    let beta_target = std::f64::consts::TAU / log.n as f64;
    out.push((
        "beta1.svg",
        line_chart(
            "Agent 1 separation angle",
            "t [iterations]",
            "beta_1 [rad]",
            &[
                Series::new(
                    "beta_1",
                    PALETTE[0],
                    t.iter()
                        .copied()
                        .zip(log.records.iter().map(|r| r.agents[0].beta))
                        .collect(),
                ),
                Series::new(
                    "2 pi / n",
                    PALETTE[2],
                    vec![(t[0], beta_target), (*t.last().unwrap(), beta_target)],
                )
                .dashed(),
            ],
        ),
    ));
    out.push((
        "control_u1.svg",
        line_chart(
            "Agent 1 applied control input",
            "t [iterations]",
            "u_1 [field units / iteration]",
            &[
                Series::new(
                    "u_1 x",
                    PALETTE[0],
                    t.iter()
                        .copied()
                        .zip(log.records.iter().map(|r| r.agents[0].u_applied.x))
                        .collect(),
                ),
                Series::new(
                    "u_1 y",
                    PALETTE[1],
                    t.iter()
                        .copied()
                        .zip(log.records.iter().map(|r| r.agents[0].u_applied.y))
                        .collect(),
                ),
            ],
        ),
    ));

    // top-down view: agent paths, target center path, final outlines
    let mut series: Vec<Series> = (0..log.n)
        .map(|i| {
            Series::new(
                format!("agent {}", i + 1),
                PALETTE[i % PALETTE.len()],
                log.records
                    .iter()
                    .map(|r| (r.agents[i].p.x, r.agents[i].p.y))
                    .collect(),
            )
        })
        .collect();
    series.push(
        Series::new(
            "target center",
            "#555555",
            log.records.iter().map(|r| (r.truth_c.x, r.truth_c.y)).collect(),
        )
        .dashed(),
    );
    let last = log.records.last().expect("log never empty");
    let circles = [
        CircleMark {
            cx: last.truth_c.x,
            cy: last.truth_c.y,
            r: last.truth_r,
            color: "#555555",
            dashed: false,
        },
        CircleMark {
            cx: last.est.c_hat.x,
            cy: last.est.c_hat.y,
            r: last.est.r_hat,
            color: PALETTE[1],
            dashed: true,
        },
    ];
    out.push((
        "paths.svg",
        path_chart("Agent paths around the target", &series, &circles),
    ));
    out
}

/// One run per value with seeds `seed + index`; rows land in
/// `sweep.csv` in value order.
pub fn cmd_sweep(
    config_path: &Path,
    key: &str,
    values: &[f64],
    out_dir: &Path,
) -> Result<PathBuf, CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }
    let base = load_config(config_path)?;
    let mut rows: Vec<(f64, u64, SummaryMetrics)> = Vec::new();
    for (i, &value) in values.iter().enumerate() {
        let mut config = with_sweep_value(&base, key, value)?;
        config.seed = base.seed + i as u64;
        config.faults = circumnav_core::network::FaultSchedule {
            seed: config.seed,
            ..config.faults.clone()
        };
        log::info!("sweep {key} = {value} (seed {})", config.seed);
        let log = run(&config)?;
        rows.push((value, config.seed, metrics(&log, config.tail_fraction)));
    }

    let mut csv = String::from(
        "key,value,seed,tail_center_error_max,tail_radius_error_max,tail_db_abs_max,\
         tail_beta_error_max,min_beta,min_d_c,beta_sum_max_dev,max_u_applied_norm,\
         max_u_applied_component,w_decay_rate\n",
    );
    for (value, seed, m) in &rows {
        writeln!(
            csv,
            "{key},{value},{seed},{},{},{},{},{},{},{},{},{},{}",
            m.tail_center_error_max,
            m.tail_radius_error_max,
            m.tail_db_abs_max,
            m.tail_beta_error_max,
            m.min_beta,
            m.min_d_c,
            m.beta_sum_max_dev,
            m.max_u_applied_norm,
            m.max_u_applied_component,
            m.w_decay_rate.map_or_else(|| "none".into(), |r| r.to_string()),
        )
        .unwrap();
    }

    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let path = out_dir.join("sweep.csv");
    std::fs::write(&path, csv).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}
