//! Argument handling for the `swarmgrid` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::bench;
use crate::config::{parse_config, ConfigError};
use crate::runner::{run, RunOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Headless disc-robot swarm simulator.
#[derive(Debug, Parser)]
#[command(name = "swarmgrid", version)]
pub struct Cli {
    /// Experiment properties file.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Override a config key; repeatable, last one wins.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Shorthand for --set seed=N.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Shorthand for --set ticks=N.
    #[arg(long, value_name = "N")]
    pub ticks: Option<u64>,
    /// Run the scaling benchmark over comma-separated robot counts.
    #[arg(long, value_name = "N1,N2,...", num_args = 0..=1, default_missing_value = "1,100,1000,5000")]
    pub bench: Option<String>,
    /// Write a PPM frame every N ticks.
    #[arg(long, value_name = "N")]
    pub frames_every: Option<u64>,
    /// Directory for PPM frames.
    #[arg(long, value_name = "DIR")]
    pub frames_dir: Option<PathBuf>,
    /// Write the trajectory CSV here.
    #[arg(long, value_name = "PATH")]
    pub log: Option<PathBuf>,
    /// No progress output on stderr.
    #[arg(long)]
    pub quiet: bool,
}

impl Cli {
    /// `--set` values followed by the shorthand flags.
    pub fn overrides(&self) -> Vec<String> {
        let mut o = self.set.clone();
        if let Some(s) = self.seed {
            o.push(format!("seed={s}"));
        }
        if let Some(t) = self.ticks {
            o.push(format!("ticks={t}"));
        }
        if let Some(p) = &self.log {
            o.push(format!("log.path={}", p.display()));
        }
        if let Some(n) = self.frames_every {
            o.push(format!("frames.every={n}"));
        }
        if let Some(d) = &self.frames_dir {
            o.push(format!("frames.dir={}", d.display()));
        }
        o
    }
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let sizes: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad size `{t}`: {e}"))
        })
        .collect::<Result<_, _>>()?;
    if sizes.is_empty() {
        return Err("no sizes".into());
    }
    Ok(sizes)
}

fn config_error_line(e: &ConfigError) -> String {
    format!(
        "error: kind=config key={:?} at={:?} reason={:?}",
        e.key,
        e.location.to_string(),
        e.to_string()
    )
}

/// Runs the program and returns its exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_CONFIG
                }
            };
        }
    };

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(
                stderr,
                "error: kind=config key=\"--config\" at={:?} reason={:?}",
                cli.config.display().to_string(),
                e.to_string()
            );
            return EXIT_CONFIG;
        }
    };
    let config = match parse_config(&text, &cli.overrides()) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "{}", config_error_line(&e));
            return EXIT_CONFIG;
        }
    };

    if let Some(sizes) = &cli.bench {
        let sizes = match parse_sizes(sizes) {
            Ok(s) => s,
            Err(why) => {
                let _ = writeln!(stderr, "error: kind=config key=\"--bench\" reason={why:?}");
                return EXIT_CONFIG;
            }
        };
        let rows = bench::bench(&config, &sizes, config.ticks);
        let _ = write!(stdout, "{}", bench::to_csv(&rows));
        return if rows.iter().any(|r| r.error.is_some()) {
            EXIT_RUNTIME
        } else {
            EXIT_OK
        };
    }

    match run(&config, RunOptions { quiet: cli.quiet }) {
        Ok(report) => {
            let _ = write!(stdout, "{}", report.to_key_values());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(
                stderr,
                "error: kind={} reason={:?}",
                e.kind(),
                e.to_string()
            );
            EXIT_RUNTIME
        }
    }
}
