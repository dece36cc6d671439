//! Scaling benchmark: the same experiment at several robot counts.

use std::fmt::Write as _;

use crate::config::SimConfig;
use crate::memory;
use crate::runner::{run, RunOptions};

pub const DEFAULT_SIZES: [usize; 4] = [1, 100, 1000, 5000];

pub const HEADER: &str = "n,ticks,wall_seconds,steps_per_sec,peak_mem_bytes,error";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub ticks: u64,
    pub wall_seconds: f64,
    pub steps_per_sec: f64,
    pub peak_mem_bytes: Option<u64>,
    pub error: Option<String>,
}

/// `v` rounded to 6 significant digits, printed without an exponent.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("scientific float");
    format!("{rounded}")
}

impl BenchRow {
    /// Times are rounded to 6 significant digits first, and throughput is
    /// derived from the rounded time, so the printed row satisfies
    /// `steps_per_sec = n * ticks / wall_seconds` exactly.
    fn measured(n: usize, ticks: u64, wall: f64, peak: Option<u64>) -> Self {
        let wall_seconds: f64 = sig6(wall).parse().expect("float");
        let steps_per_sec = if wall_seconds > 0.0 {
            sig6(n as f64 * ticks as f64 / wall_seconds)
                .parse()
                .expect("float")
        } else {
            0.0
        };
        BenchRow {
            n,
            ticks,
            wall_seconds,
            steps_per_sec,
            peak_mem_bytes: peak,
            error: None,
        }
    }

    pub fn to_csv(&self) -> String {
        match &self.error {
            Some(e) => format!(
                "{},{},,,,{}",
                self.n,
                self.ticks,
                e.replace([',', '\n'], " ")
            ),
            None => format!(
                "{},{},{},{},{},",
                self.n,
                self.ticks,
                sig6(self.wall_seconds),
                sig6(self.steps_per_sec),
                self.peak_mem_bytes
                    .map(|b| b.to_string())
                    .unwrap_or_default()
            ),
        }
    }
}

/// Runs `base` once per size with logs and frames disabled. A failing size
/// becomes an error row and the remaining sizes still run.
pub fn bench(base: &SimConfig, sizes: &[usize], ticks: u64) -> Vec<BenchRow> {
    sizes
        .iter()
        .map(|&n| {
            let mut cfg = base.clone();
            cfg.robots = n;
            cfg.ticks = ticks;
            cfg.log_path = None;
            cfg.frames_every = None;
            cfg.spawn_positions = None;
            memory::reset_peak();
            match run(&cfg, RunOptions { quiet: true }) {
                Ok(report) => {
                    BenchRow::measured(n, ticks, report.metrics.wall_seconds, report.peak_mem_bytes)
                }
                Err(e) => BenchRow {
                    n,
                    ticks,
                    wall_seconds: 0.0,
                    steps_per_sec: 0.0,
                    peak_mem_bytes: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{HEADER}");
    for r in rows {
        let _ = writeln!(s, "{}", r.to_csv());
    }
    s
}
