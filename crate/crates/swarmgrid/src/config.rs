//! Properties-style experiment configuration.
//!
//! One `key = value` per line, `#` starts a comment, later keys win, and
//! command-line overrides win over the file. Unknown keys are errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use swarmgrid_core::engine::{EngineConfig, SpawnSpec, DEFAULT_PAYLOAD_CAP};
use swarmgrid_core::{Limits, Pose, SensorSpec};

pub const DEFAULT_RADIUS: f64 = 4.0;
pub const DEFAULT_SENSOR_COUNT: usize = 8;
pub const DEFAULT_SENSOR_RANGE: f64 = 64.0;
pub const DEFAULT_V_MAX: f64 = 2.0;
pub const DEFAULT_W_MAX: f64 = 0.3;
pub const DEFAULT_FRAMES_DIR: &str = "frames";

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "map.path",
    "arena.width",
    "arena.height",
    "robots.count",
    "robots.radius",
    "sensors.count",
    "sensors.range",
    "sensors.angles",
    "limits.v_max",
    "limits.w_max",
    "controller.type",
    "controller.weights",
    "controller.payload_cap",
    "seed",
    "ticks",
    "log.path",
    "frames.every",
    "frames.dir",
    "frames.rays",
    "index.cell_size",
    "spawn.positions",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    /// 1-based position in the override list.
    Override(usize),
    /// The key was absent after merging.
    Missing,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Override(n) => write!(f, "override {n}"),
            Location::Missing => write!(f, "merged config"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigErrorKind {
    Syntax,
    UnknownKey,
    MissingKey,
    BadValue(String),
    Conflict(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{location}: {}", describe(.key, .kind))]
pub struct ConfigError {
    pub key: String,
    pub location: Location,
    pub kind: ConfigErrorKind,
}

fn describe(key: &str, kind: &ConfigErrorKind) -> String {
    match kind {
        ConfigErrorKind::Syntax => format!("expected `key = value`, got `{key}`"),
        ConfigErrorKind::UnknownKey => format!("unknown key `{key}`"),
        ConfigErrorKind::MissingKey => format!("missing required key `{key}`"),
        ConfigErrorKind::BadValue(why) => format!("bad value for `{key}`: {why}"),
        ConfigErrorKind::Conflict(why) => format!("`{key}`: {why}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum World {
    Map(PathBuf),
    /// Generated empty arena with a one-pixel wall.
    Arena {
        width: usize,
        height: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SensorLayout {
    /// Evenly spaced rays, the first straight ahead.
    Even(usize),
    Angles(Vec<f64>),
}

impl SensorLayout {
    pub fn angles(&self) -> Vec<f64> {
        match self {
            SensorLayout::Even(k) => SensorSpec::evenly_spaced(*k, 1.0).angles,
            SensorLayout::Angles(a) => a.clone(),
        }
    }

    pub fn count(&self) -> usize {
        match self {
            SensorLayout::Even(k) => *k,
            SensorLayout::Angles(a) => a.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    Braitenberg,
    RandomWalk,
}

impl ControllerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ControllerKind::Braitenberg => "braitenberg",
            ControllerKind::RandomWalk => "random_walk",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub world: World,
    pub robots: usize,
    pub radius: f64,
    pub sensors: SensorLayout,
    pub sensor_range: f64,
    pub limits: Limits,
    pub controller: ControllerKind,
    /// Braitenberg steering weights; defaults to the antisymmetric set.
    pub weights: Option<Vec<f64>>,
    pub payload_cap: usize,
    pub seed: u64,
    pub ticks: u64,
    pub log_path: Option<PathBuf>,
    pub frames_every: Option<u64>,
    pub frames_dir: PathBuf,
    pub frames_rays: bool,
    pub cell_size: Option<f64>,
    pub spawn_positions: Option<Vec<Pose>>,
}

impl SimConfig {
    /// A config with defaults for every optional key.
    pub fn new(world: World, robots: usize, seed: u64, ticks: u64) -> Self {
        SimConfig {
            world,
            robots,
            radius: DEFAULT_RADIUS,
            sensors: SensorLayout::Even(DEFAULT_SENSOR_COUNT),
            sensor_range: DEFAULT_SENSOR_RANGE,
            limits: Limits {
                v_max: DEFAULT_V_MAX,
                w_max: DEFAULT_W_MAX,
            },
            controller: ControllerKind::Braitenberg,
            weights: None,
            payload_cap: DEFAULT_PAYLOAD_CAP,
            seed,
            ticks,
            log_path: None,
            frames_every: None,
            frames_dir: PathBuf::from(DEFAULT_FRAMES_DIR),
            frames_rays: false,
            cell_size: None,
            spawn_positions: None,
        }
    }

    pub fn sensor_spec(&self) -> SensorSpec {
        SensorSpec {
            angles: self.sensors.angles(),
            range: self.sensor_range,
        }
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            seed: self.seed,
            spawn: SpawnSpec {
                count: self.robots,
                radius: self.radius,
                positions: self.spawn_positions.clone(),
            },
            sensors: self.sensor_spec(),
            limits: self.limits,
            cell_size: self.cell_size,
            payload_cap: self.payload_cap,
        }
    }

    /// Canonical `key = value` text that parses back to an equal config.
    pub fn to_properties(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Key/value pairs in canonical order; optional keys only when set.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut e: Vec<(&'static str, String)> = Vec::new();
        match &self.world {
            World::Map(p) => e.push(("map.path", p.display().to_string())),
            World::Arena { width, height } => {
                e.push(("arena.width", width.to_string()));
                e.push(("arena.height", height.to_string()));
            }
        }
        e.push(("robots.count", self.robots.to_string()));
        e.push(("robots.radius", self.radius.to_string()));
        e.push(("sensors.count", self.sensors.count().to_string()));
        if let SensorLayout::Angles(a) = &self.sensors {
            e.push(("sensors.angles", join_floats(a)));
        }
        e.push(("sensors.range", self.sensor_range.to_string()));
        e.push(("limits.v_max", self.limits.v_max.to_string()));
        e.push(("limits.w_max", self.limits.w_max.to_string()));
        e.push(("controller.type", self.controller.as_str().to_string()));
        if let Some(w) = &self.weights {
            e.push(("controller.weights", join_floats(w)));
        }
        e.push(("controller.payload_cap", self.payload_cap.to_string()));
        e.push(("seed", self.seed.to_string()));
        e.push(("ticks", self.ticks.to_string()));
        if let Some(p) = &self.log_path {
            e.push(("log.path", p.display().to_string()));
        }
        if let Some(n) = self.frames_every {
            e.push(("frames.every", n.to_string()));
        }
        e.push(("frames.dir", self.frames_dir.display().to_string()));
        e.push(("frames.rays", self.frames_rays.to_string()));
        if let Some(c) = self.cell_size {
            e.push(("index.cell_size", c.to_string()));
        }
        if let Some(ps) = &self.spawn_positions {
            let s: Vec<String> = ps
                .iter()
                .map(|p| format!("{} {} {}", p.x, p.y, p.theta))
                .collect();
            e.push(("spawn.positions", s.join("; ")));
        }
        e
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

struct Raw {
    values: BTreeMap<String, (String, Location)>,
}

impl Raw {
    fn take(&mut self, key: &str) -> Option<(String, Location)> {
        self.values.remove(key)
    }

    fn required<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, ConfigError> {
        match self.optional(key, parse)? {
            Some(v) => Ok(v),
            None => Err(ConfigError {
                key: key.to_string(),
                location: Location::Missing,
                kind: ConfigErrorKind::MissingKey,
            }),
        }
    }

    fn optional<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((text, location)) => parse(&text).map(Some).map_err(|why| ConfigError {
                key: key.to_string(),
                location,
                kind: ConfigErrorKind::BadValue(why),
            }),
        }
    }
}

fn split_pair(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k.to_string(), v.trim().to_string()))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.parse::<u64>().map_err(|e| format!("`{s}`: {e}"))
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|e| format!("`{s}`: {e}"))
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("`{s}`: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be > 0"))
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("`{s}` is not true/false")),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| parse_f64(t.trim())).collect()
}

fn parse_positions(s: &str) -> Result<Vec<Pose>, String> {
    let mut out = Vec::new();
    for entry in s.split(';') {
        let nums: Vec<f64> = entry
            .split_whitespace()
            .map(parse_f64)
            .collect::<Result<_, _>>()?;
        match nums[..] {
            [x, y] => out.push(Pose::new(x, y, 0.0)),
            [x, y, theta] => out.push(Pose::new(x, y, theta)),
            [] if s.trim().is_empty() => {}
            _ => return Err(format!("`{}` is not `x y [theta]`", entry.trim())),
        }
    }
    Ok(out)
}

/// Parses a config file body and applies `key=value` overrides on top.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<SimConfig, ConfigError> {
    let mut values = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let content = match line.find('#') {
            Some(at) => &line[..at],
            None => line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let location = Location::Line(i + 1);
        let (k, v) = split_pair(content).ok_or_else(|| ConfigError {
            key: content.trim().to_string(),
            location,
            kind: ConfigErrorKind::Syntax,
        })?;
        insert(&mut values, k, v, location)?;
    }
    for (i, o) in overrides.iter().enumerate() {
        let location = Location::Override(i + 1);
        let (k, v) = split_pair(o).ok_or_else(|| ConfigError {
            key: o.clone(),
            location,
            kind: ConfigErrorKind::Syntax,
        })?;
        insert(&mut values, k, v, location)?;
    }
    build(Raw { values })
}

fn insert(
    values: &mut BTreeMap<String, (String, Location)>,
    key: String,
    value: String,
    location: Location,
) -> Result<(), ConfigError> {
    if !KEYS.contains(&key.as_str()) {
        return Err(ConfigError {
            key,
            location,
            kind: ConfigErrorKind::UnknownKey,
        });
    }
    values.insert(key, (value, location));
    Ok(())
}

fn conflict(key: &str, location: Location, why: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        location,
        kind: ConfigErrorKind::Conflict(why.into()),
    }
}

fn location_of(raw: &Raw, key: &str) -> Location {
    raw.values
        .get(key)
        .map(|v| v.1)
        .unwrap_or(Location::Missing)
}

fn build(mut raw: Raw) -> Result<SimConfig, ConfigError> {
    let map_loc = location_of(&raw, "map.path");
    let map_path = raw.optional("map.path", |s| Ok(PathBuf::from(s)))?;
    let arena_w = raw.optional("arena.width", parse_usize)?;
    let arena_h = raw.optional("arena.height", parse_usize)?;
    let world = match (map_path, arena_w, arena_h) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(conflict(
                "map.path",
                map_loc,
                "cannot be combined with arena.*",
            ))
        }
        (Some(p), None, None) => World::Map(p),
        (None, Some(width), Some(height)) if width >= 1 && height >= 1 => {
            World::Arena { width, height }
        }
        (None, Some(_), Some(_)) => {
            return Err(ConfigError {
                key: "arena.width".into(),
                location: Location::Missing,
                kind: ConfigErrorKind::BadValue("arena must be at least 1x1".into()),
            })
        }
        (None, Some(_), None) => return Err(missing("arena.height")),
        (None, None, Some(_)) => return Err(missing("arena.width")),
        (None, None, None) => return Err(missing("map.path")),
    };

    let robots = raw.required("robots.count", parse_usize)?;
    let radius = raw
        .optional("robots.radius", positive)?
        .unwrap_or(DEFAULT_RADIUS);
    let count_loc = location_of(&raw, "sensors.count");
    let count = raw.optional("sensors.count", parse_usize)?;
    let angles_loc = location_of(&raw, "sensors.angles");
    let angles = raw.optional("sensors.angles", |s| {
        let a = parse_list(s)?;
        if let Some(bad) = a.iter().find(|a| !(-PI..PI).contains(*a)) {
            return Err(format!("angle {bad} outside [-pi, pi)"));
        }
        Ok(a)
    })?;
    let sensors = match (count, angles) {
        (Some(0), _) => {
            return Err(conflict(
                "sensors.count",
                count_loc,
                "need at least one sensor",
            ))
        }
        (_, Some(a)) if a.is_empty() => {
            return Err(conflict(
                "sensors.angles",
                angles_loc,
                "need at least one sensor",
            ))
        }
        (Some(k), Some(a)) if k != a.len() => {
            return Err(conflict(
                "sensors.angles",
                angles_loc,
                format!("{} angles but sensors.count = {k}", a.len()),
            ))
        }
        (_, Some(a)) => SensorLayout::Angles(a),
        (k, None) => SensorLayout::Even(k.unwrap_or(DEFAULT_SENSOR_COUNT)),
    };
    let range_loc = location_of(&raw, "sensors.range");
    let sensor_range = raw
        .optional("sensors.range", positive)?
        .unwrap_or(DEFAULT_SENSOR_RANGE);
    let v_max = raw
        .optional("limits.v_max", positive)?
        .unwrap_or(DEFAULT_V_MAX);
    let w_max = raw
        .optional("limits.w_max", positive)?
        .unwrap_or(DEFAULT_W_MAX);
    if sensor_range < v_max {
        return Err(conflict(
            "sensors.range",
            range_loc,
            format!("range {sensor_range} must be >= limits.v_max {v_max}"),
        ));
    }

    let controller = raw
        .optional("controller.type", |s| match s {
            "braitenberg" => Ok(ControllerKind::Braitenberg),
            "random_walk" => Ok(ControllerKind::RandomWalk),
            _ => Err(format!("`{s}` is not braitenberg or random_walk")),
        })?
        .unwrap_or(ControllerKind::Braitenberg);
    let weights_loc = location_of(&raw, "controller.weights");
    let weights = raw.optional("controller.weights", parse_list)?;
    if let Some(w) = &weights {
        if controller != ControllerKind::Braitenberg {
            return Err(conflict(
                "controller.weights",
                weights_loc,
                "only used by braitenberg",
            ));
        }
        if w.len() != sensors.count() {
            return Err(conflict(
                "controller.weights",
                weights_loc,
                format!("{} weights for {} sensors", w.len(), sensors.count()),
            ));
        }
    }
    let payload_cap = raw
        .optional("controller.payload_cap", parse_usize)?
        .unwrap_or(DEFAULT_PAYLOAD_CAP);

    let seed = raw.required("seed", parse_u64)?;
    let ticks = raw.required("ticks", parse_u64)?;
    let log_path = raw.optional("log.path", |s| Ok(PathBuf::from(s)))?;
    let frames_every = raw.optional("frames.every", |s| {
        let n = parse_u64(s)?;
        if n == 0 {
            Err("must be >= 1".to_string())
        } else {
            Ok(n)
        }
    })?;
    let frames_dir = raw
        .optional("frames.dir", |s| Ok(PathBuf::from(s)))?
        .unwrap_or_else(|| PathBuf::from(DEFAULT_FRAMES_DIR));
    let frames_rays = raw.optional("frames.rays", parse_bool)?.unwrap_or(false);
    let cell_size = raw.optional("index.cell_size", positive)?;
    let pos_loc = location_of(&raw, "spawn.positions");
    let spawn_positions = raw.optional("spawn.positions", parse_positions)?;
    if let Some(p) = &spawn_positions {
        if p.len() != robots {
            return Err(conflict(
                "spawn.positions",
                pos_loc,
                format!("{} positions for robots.count = {robots}", p.len()),
            ));
        }
    }
    debug_assert!(
        raw.values.is_empty(),
        "unconsumed keys: {:?}",
        raw.values.keys()
    );

    Ok(SimConfig {
        world,
        robots,
        radius,
        sensors,
        sensor_range,
        limits: Limits { v_max, w_max },
        controller,
        weights,
        payload_cap,
        seed,
        ticks,
        log_path,
        frames_every,
        frames_dir,
        frames_rays,
        cell_size,
        spawn_positions,
    })
}

fn missing(key: &str) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        location: Location::Missing,
        kind: ConfigErrorKind::MissingKey,
    }
}
