//! Text artifact writers: the timeseries CSV, the run summary, and the
//! claim report in table and CSV form.

use std::fmt::Write as _;

use circumnav_core::analysis::TheoremReport;
use circumnav_core::sim::{SimConfig, SimLog, SummaryMetrics};

use crate::config::render;

/// Floats in artifacts use 17 significant digits so a parsed CSV
/// reproduces the exact f64 bit patterns.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fixed schema: `t,cx,cy,r,chx,chy,rh,cdx,cdy,rd` followed by one
/// `p{i}x,p{i}y,db{i},dc{i},beta{i},ux{i},uy{i},valid{i}` block per
/// agent, i = 1..n. `ux/uy` are the applied control; `valid` is 0/1.
pub fn timeseries_csv(log: &SimLog) -> String {
    let mut out = String::new();
    out.push_str("t,cx,cy,r,chx,chy,rh,cdx,cdy,rd");
    for i in 1..=log.n {
        write!(
            out,
            ",p{i}x,p{i}y,db{i},dc{i},beta{i},ux{i},uy{i},valid{i}"
        )
        .unwrap();
    }
    out.push('\n');
    for rec in &log.records {
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            full(rec.t),
            full(rec.truth_c.x),
            full(rec.truth_c.y),
            full(rec.truth_r),
            full(rec.est.c_hat.x),
            full(rec.est.c_hat.y),
            full(rec.est.r_hat),
            full(rec.rates.c_dot_hat.x),
            full(rec.rates.c_dot_hat.y),
            full(rec.rates.r_dot_hat),
        )
        .unwrap();
        for agent in &rec.agents {
            write!(
                out,
                ",{},{},{},{},{},{},{},{}",
                full(agent.p.x),
                full(agent.p.y),
                full(agent.d_b),
                full(agent.d_c),
                full(agent.beta),
                full(agent.u_applied.x),
                full(agent.u_applied.y),
                u8::from(agent.valid),
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

/// The resolved config in canonical form plus the run metrics as
/// comments; the whole file re-parses as the same config.
pub fn summary_text(config: &SimConfig, m: &SummaryMetrics) -> String {
    let mut out = String::from("# resolved configuration\n");
    out.push_str(&render(config));
    out.push_str("\n# metrics\n");
    let mut line = |k: &str, v: String| writeln!(out, "# {k} = {v}").unwrap();
    line("tail_center_error_max", full(m.tail_center_error_max));
    line("tail_radius_error_max", full(m.tail_radius_error_max));
    line("tail_db_abs_max", full(m.tail_db_abs_max));
    line("tail_beta_error_max", full(m.tail_beta_error_max));
    line("min_beta", full(m.min_beta));
    line("min_d_c", full(m.min_d_c));
    line("beta_sum_max_dev", full(m.beta_sum_max_dev));
    line("max_u_applied_norm", full(m.max_u_applied_norm));
    line("max_u_applied_component", full(m.max_u_applied_component));
    line(
        "w_decay_rate",
        m.w_decay_rate.map_or_else(|| "none".into(), full),
    );
    out
}

/// Human-readable claim table.
pub fn theorem_text(report: &TheoremReport) -> String {
    let mut out = format!(
        "{:<24} {:>24} {:>24} {:>12} {:>8}\n",
        "claim", "measured", "bound", "ratio", "status"
    );
    for e in &report.entries {
        let status = if !e.applicable {
            "n/a"
        } else if e.pass {
            "pass"
        } else {
            "FAIL"
        };
        writeln!(
            out,
            "{:<24} {:>24} {:>24} {:>12} {:>8}",
            e.claim.to_string(),
            format!("{:.6e}", e.measured),
            format!("{:.6e}", e.bound),
            e.ratio.map_or_else(|| "-".to_string(), |r| format!("{r:.4}")),
            status
        )
        .unwrap();
    }
    out
}

/// Machine-readable claim report.
pub fn theorem_csv(report: &TheoremReport) -> String {
    let mut out = String::from("claim,measured,bound,ratio,applicable,pass\n");
    for e in &report.entries {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            e.claim,
            full(e.measured),
            full(e.bound),
            e.ratio.map_or_else(String::new, full),
            u8::from(e.applicable),
            u8::from(e.pass),
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use circumnav_core::analysis::theorem_report;
    use circumnav_core::sim::{metrics, run};
    use std::path::Path;

    fn tiny_log() -> (SimConfig, SimLog) {
        let config = crate::config::parse_config(
            "n = 3\nduration = 2\n[trajectory]\nkind = constant\n",
            Path::new("."),
        )
        .unwrap();
        let log = run(&config).unwrap();
        (config, log)
    }

    #[test]
    fn csv_header_is_stable() {
        let (_, log) = tiny_log();
        let csv = timeseries_csv(&log);
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "t,cx,cy,r,chx,chy,rh,cdx,cdy,rd,\
             p1x,p1y,db1,dc1,beta1,ux1,uy1,valid1,\
             p2x,p2y,db2,dc2,beta2,ux2,uy2,valid2,\
             p3x,p3y,db3,dc3,beta3,ux3,uy3,valid3"
        );
        assert_eq!(csv.lines().count(), 1 + 3); // header + duration+1 records
        let columns = header.split(',').count();
        for line in csv.lines().skip(1) {
            assert_eq!(line.split(',').count(), columns);
        }
    }

    #[test]
    fn csv_floats_round_trip_exactly() {
        let (_, log) = tiny_log();
        let csv = timeseries_csv(&log);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        let rec = &log.records[0];
        assert_eq!(row[1].parse::<f64>().unwrap(), rec.truth_c.x);
        assert_eq!(row[6].parse::<f64>().unwrap(), rec.est.r_hat);
        assert_eq!(row[10].parse::<f64>().unwrap(), rec.agents[0].p.x);
    }

    #[test]
    fn summary_reparses_as_the_same_config() {
        let (config, log) = tiny_log();
        let m = metrics(&log, config.tail_fraction);
        let summary = summary_text(&config, &m);
        let reparsed = crate::config::parse_config(&summary, Path::new(".")).unwrap();
        assert_eq!(reparsed, config);
        assert!(summary.contains("tail_center_error_max"));
    }

    #[test]
    fn theorem_outputs_cover_every_claim() {
        let (config, log) = tiny_log();
        let report = theorem_report(&log, &config);
        let text = theorem_text(&report);
        let csv = theorem_csv(&report);
        for claim in circumnav_core::analysis::TheoremClaim::ALL {
            assert!(text.contains(&claim.to_string()), "{claim} missing in text");
            assert!(csv.contains(&claim.to_string()), "{claim} missing in csv");
        }
        assert_eq!(csv.lines().count(), 1 + report.entries.len());
    }
}
