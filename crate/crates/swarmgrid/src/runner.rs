//! Runs one configured experiment end to end.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use swarmgrid_core::engine::{Engine, EngineError, Metrics};
use swarmgrid_core::{Braitenberg, Controller, GridMap, MapError, RandomWalk};

use crate::config::{ControllerKind, SimConfig, World};
use crate::frame::render_frame;
use crate::memory;
use crate::pgm::{self, PgmError};
use crate::trajectory::TrajectoryLog;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot read map {path}: {source}")]
    MapIo { path: PathBuf, source: io::Error },
    #[error("cannot load map {path}: {source}")]
    MapFormat { path: PathBuf, source: PgmError },
    #[error("bad arena: {0}")]
    Arena(#[from] MapError),
    #[error("cannot write log {path}: {source}")]
    Log { path: PathBuf, source: io::Error },
    #[error("cannot write frame {path}: {source}")]
    Frame { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl RunError {
    /// Short machine-readable class for the one-line error report.
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::MapIo { .. } | RunError::MapFormat { .. } | RunError::Arena(_) => "map",
            RunError::Log { .. } => "log",
            RunError::Frame { .. } => "frame",
            RunError::Engine(EngineError::Spawn(_)) => "spawn",
            RunError::Engine(_) => "engine",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub metrics: Metrics,
    pub robots: usize,
    /// Platform-reported peak resident memory; an estimate.
    pub peak_mem_bytes: Option<u64>,
    pub final_digest: u64,
    pub config: SimConfig,
}

impl RunReport {
    /// Flat `key=value` block, one pair per line.
    pub fn to_key_values(&self) -> String {
        let m = &self.metrics;
        let mut s = String::new();
        let _ = writeln!(s, "ticks_run={}", m.ticks_run);
        let _ = writeln!(s, "robots={}", self.robots);
        let _ = writeln!(s, "wall_seconds={}", m.wall_seconds);
        let _ = writeln!(s, "steps_per_sec={}", m.steps_per_sec);
        let _ = writeln!(s, "canceled_moves={}", m.canceled_moves);
        let _ = writeln!(s, "messages_delivered={}", m.messages_delivered);
        let peak = self
            .peak_mem_bytes
            .map(|b| b.to_string())
            .unwrap_or_default();
        let _ = writeln!(s, "peak_mem_bytes_estimate={peak}");
        let _ = writeln!(s, "final_digest={:016x}", self.final_digest);
        for (k, v) in self.config.entries() {
            let _ = writeln!(s, "config.{k}={v}");
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Suppress progress lines on stderr.
    pub quiet: bool,
}

pub fn load_world(config: &SimConfig) -> Result<GridMap, RunError> {
    match &config.world {
        World::Map(path) => {
            let bytes = fs::read(path).map_err(|source| RunError::MapIo {
                path: path.clone(),
                source,
            })?;
            pgm::load_map(&bytes).map_err(|source| RunError::MapFormat {
                path: path.clone(),
                source,
            })
        }
        World::Arena { width, height } => Ok(GridMap::walled_arena(*width, *height)?),
    }
}

pub fn build_controller(config: &SimConfig) -> Box<dyn Controller> {
    match config.controller {
        ControllerKind::Braitenberg => {
            let angles = config.sensors.angles();
            match &config.weights {
                Some(w) => Box::new(Braitenberg::new(config.limits, &angles, w.clone())),
                None => Box::new(Braitenberg::with_default_weights(config.limits, &angles)),
            }
        }
        ControllerKind::RandomWalk => Box::new(RandomWalk::new(config.limits)),
    }
}

pub fn build_engine(config: &SimConfig) -> Result<Engine, RunError> {
    let map = load_world(config)?;
    Ok(Engine::new(
        map,
        &config.engine_config(),
        build_controller(config),
    )?)
}

fn frame_path(dir: &Path, tick: u64) -> PathBuf {
    dir.join(format!("frame_{tick:06}.ppm"))
}

fn write_frame(engine: &Engine, config: &SimConfig) -> Result<(), RunError> {
    let path = frame_path(&config.frames_dir, engine.state().tick);
    let bytes = render_frame(engine.state(), engine.sensors(), config.frames_rays);
    fs::write(&path, bytes).map_err(|source| RunError::Frame { path, source })
}

/// Loads the world, spawns, runs `config.ticks` ticks, and writes the
/// configured log and frames.
pub fn run(config: &SimConfig, opts: RunOptions) -> Result<RunReport, RunError> {
    let mut engine = build_engine(config)?;
    run_engine(&mut engine, config, opts)
}

pub fn run_engine(
    engine: &mut Engine,
    config: &SimConfig,
    opts: RunOptions,
) -> Result<RunReport, RunError> {
    let mut log = match &config.log_path {
        Some(path) => Some(TrajectoryLog::create(path).map_err(|source| RunError::Log {
            path: path.clone(),
            source,
        })?),
        None => None,
    };
    if config.frames_every.is_some() {
        fs::create_dir_all(&config.frames_dir).map_err(|source| RunError::Frame {
            path: config.frames_dir.clone(),
            source,
        })?;
        write_frame(engine, config)?;
    }
    let log_err = |source| RunError::Log {
        path: config.log_path.clone().unwrap_or_default(),
        source,
    };

    let progress_every = (config.ticks / 10).max(1);
    let start = Instant::now();
    for _ in 0..config.ticks {
        engine.step()?;
        let tick = engine.state().tick;
        if let Some(log) = log.as_mut() {
            log.record(engine.state()).map_err(log_err)?;
        }
        if let Some(every) = config.frames_every {
            if tick.is_multiple_of(every) {
                write_frame(engine, config)?;
            }
        }
        if !opts.quiet && tick.is_multiple_of(progress_every) {
            eprintln!("tick {tick}/{}", config.ticks);
        }
    }
    if let Some(log) = log {
        log.finish().map_err(log_err)?;
    }
    let wall = start.elapsed().as_secs_f64();

    let robots = engine.state().robot_count();
    engine.metrics_mut().set_wall_seconds(wall, robots);
    Ok(RunReport {
        metrics: engine.state().metrics,
        robots,
        peak_mem_bytes: memory::peak_resident_bytes(),
        final_digest: engine.state().digest(),
        config: config.clone(),
    })
}
