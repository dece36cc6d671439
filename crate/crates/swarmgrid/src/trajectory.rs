//! CSV trajectory log: one row per robot per tick.

use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use swarmgrid_core::SimState;

pub const HEADER: &str = "tick,robot_id,x,y,theta,collided";

/// Largest heading that still prints below `3.141593`.
const THETA_PRINT_LIMIT: f64 = 3.1415925;

/// Heading formatted to 6 decimals inside `[-3.141593, 3.141592]`.
///
/// Headings in `[3.1415925, π)` would round up to `3.141593`; they are
/// printed as the congruent angle `theta - 2π` instead.
pub fn format_theta(theta: f64) -> String {
    let t = if (THETA_PRINT_LIMIT..PI).contains(&theta) {
        theta - TAU
    } else {
        theta
    };
    format!("{t:.6}")
}

pub struct TrajectoryLog<W: Write> {
    out: W,
}

impl TrajectoryLog<BufWriter<File>> {
    pub fn create(path: &Path) -> io::Result<Self> {
        TrajectoryLog::new(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write> TrajectoryLog<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{HEADER}")?;
        Ok(TrajectoryLog { out })
    }

    /// Appends the rows for the state's current tick.
    pub fn record(&mut self, state: &SimState) -> io::Result<()> {
        for b in &state.bodies {
            writeln!(
                self.out,
                "{},{},{:.6},{:.6},{},{}",
                state.tick,
                b.id,
                b.pose.x,
                b.pose.y,
                format_theta(b.pose.theta),
                b.collided_last_tick as u8
            )?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
