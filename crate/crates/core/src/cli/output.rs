//! CSV trajectories and plain-text reports.

use std::fmt::Write;

use crate::analysis::AnalysisReport;
use crate::multirate::GlobalClock;
use crate::simulate::Trajectory;
use crate::system::{TimeKind, TssrSystem};
use crate::tensor::multi_indices;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn column_names(prefix: &str, shape: &[usize]) -> Vec<String> {
    if shape.is_empty() {
        return vec![prefix.to_string()];
    }
    multi_indices(shape)
        .into_iter()
        .map(|idx| {
            let mut name = prefix.to_string();
            for i in idx {
                write!(name, "_{i}").unwrap();
            }
            name
        })
        .collect()
}

/// Header `t,x_…[,y_…]` followed by one row per sample. Discrete time
/// stamps are written as integers.
pub fn trajectory_csv(system: &TssrSystem, trajectory: &Trajectory, emit_output: bool) -> String {
    let mut header = vec!["t".to_string()];
    header.extend(column_names("x", system.state_shape()));
    if emit_output {
        header.extend(column_names("y", system.output_shape()));
    }
    let mut out = header.join(",");
    out.push('\n');

    for s in &trajectory.samples {
        match system.time_kind() {
            TimeKind::Discrete => write!(out, "{}", s.when as u64).unwrap(),
            TimeKind::Continuous => out.push_str(&format_number(s.when)),
        }
        let values = s
            .state
            .data()
            .iter()
            .chain(if emit_output { s.output.data() } else { &[] });
        for v in values {
            out.push(',');
            out.push_str(&format_number(*v));
        }
        out.push('\n');
    }
    out
}

/// Comment line with the global clock, header `n,x_0,…`, and one row per
/// global tick.
pub fn multirate_csv(clock: &GlobalClock, rows: &[Vec<f64>]) -> String {
    let factors: Vec<String> = clock.factors.iter().map(u64::to_string).collect();
    let mut out = format!("# d={} f={}\n", clock.period, factors.join(","));
    let processes = clock.factors.len();
    let mut header = vec!["n".to_string()];
    header.extend((0..processes).map(|i| format!("x_{i}")));
    out.push_str(&header.join(","));
    out.push('\n');
    for (k, row) in rows.iter().enumerate() {
        write!(out, "{}", k as u64 * clock.period).unwrap();
        for v in row {
            out.push(',');
            out.push_str(&format_number(*v));
        }
        out.push('\n');
    }
    out
}

/// One `name: value` line per field in a fixed order. Parts that do not
/// apply print `absent`.
pub fn render_report(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let absent = || "absent".to_string();
    writeln!(out, "state_dim: {}", report.state_dim).unwrap();
    writeln!(
        out,
        "spectral_radius: {}",
        format_number(report.stability.spectral_radius)
    )
    .unwrap();
    if report.time_kind == TimeKind::Continuous {
        let re = report.stability.max_real_part.map_or_else(absent, format_number);
        writeln!(out, "max_real_part: {re}").unwrap();
    }
    writeln!(out, "stability: {}", report.stability.verdict.as_str()).unwrap();
    let rank = |r: Option<usize>| r.map_or_else(absent, |r| r.to_string());
    writeln!(out, "controllability_rank: {}", rank(report.controllability_rank)).unwrap();
    writeln!(out, "observability_rank: {}", rank(report.observability_rank)).unwrap();
    out
}
