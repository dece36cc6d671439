//! Fixed-timestep simulation loop.
//!
//! One tick runs these phases in order:
//! 1. snapshot poses and rebuild the spatial index from them;
//! 2. read every robot's sensors against the snapshot;
//! 3. run every controller;
//! 4. move robots one at a time in id order, each seeing lower ids at
//!    their new positions and higher ids at snapshot positions;
//! 5. rebuild the index at final positions and deliver broadcasts;
//! 6. update metrics and advance the tick counter.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::controllers::{Broadcast, ControlInput, Controller, ControllerError, Message};
use crate::geom::Point;
use crate::index::RobotIndex;
use crate::kinematics::{apply_command, resolve_move, ActuatorCommand, Limits, Pose, RobotBody};
use crate::messaging::deliver_into;
use crate::rng::SplitMix64;
use crate::sensing::{sense_into, SensorReading, SensorSpec};
use crate::world::GridMap;

pub const DEFAULT_PAYLOAD_CAP: usize = 4096;

/// Spatial index bucket size used when none is configured.
pub fn default_cell_size(radius: f64) -> f64 {
    (2.0 * radius).max(16.0)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpawnError {
    #[error("spawn density too high: placed {accepted} of {requested} robots after {rejections} rejections")]
    Density {
        requested: usize,
        accepted: usize,
        rejections: u64,
    },
    #[error("spawn position {index} intersects an obstacle")]
    Blocked { index: usize },
    #[error("spawn position {index} overlaps robot {other}")]
    Overlap { index: usize, other: u32 },
    #[error("robot radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Spawn(#[from] SpawnError),
    #[error("controller failed for robot {robot} at tick {tick}: {source}")]
    Controller {
        robot: u32,
        tick: u64,
        source: ControllerError,
    },
    #[error("non-finite command ({v}, {w}) from robot {robot} at tick {tick}")]
    NonFiniteCommand {
        robot: u32,
        tick: u64,
        v: f64,
        w: f64,
    },
    #[error("payload of {len} bytes from robot {robot} at tick {tick} exceeds cap of {cap}")]
    PayloadTooLarge {
        robot: u32,
        tick: u64,
        len: usize,
        cap: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpawnSpec {
    pub count: usize,
    pub radius: f64,
    /// Explicit poses; bypasses sampling and fixes the count.
    pub positions: Option<Vec<Pose>>,
}

/// Places robots by rejection sampling from `master_rng`, or validates the
/// explicit positions. Ids follow acceptance order.
pub fn spawn(
    spec: &SpawnSpec,
    map: &GridMap,
    master_rng: &mut SplitMix64,
    cell_size: f64,
) -> Result<Vec<RobotBody>, SpawnError> {
    let r = spec.radius;
    if !(r > 0.0 && r.is_finite()) {
        return Err(SpawnError::BadRadius(r));
    }
    let extent = Point::new(map.width() as f64, map.height() as f64);
    let mut placed = RobotIndex::with_extent(cell_size, Point::default(), extent);
    let mut bodies = Vec::new();
    let overlap = |placed: &RobotIndex, c: Point| -> Option<u32> {
        placed
            .neighbors_within(c, 2.0 * r, None)
            .into_iter()
            .find(|&j| placed.position(j).dist_sq(c) < 4.0 * r * r)
    };

    if let Some(poses) = &spec.positions {
        for (i, pose) in poses.iter().enumerate() {
            let c = pose.center();
            if !map.disc_free(c, r) {
                return Err(SpawnError::Blocked { index: i });
            }
            if let Some(other) = overlap(&placed, c) {
                return Err(SpawnError::Overlap { index: i, other });
            }
            let id = placed.insert(c);
            bodies.push(RobotBody::new(id, Pose::new(pose.x, pose.y, pose.theta), r));
        }
        return Ok(bodies);
    }

    let max_rejections = 1000 * spec.count as u64;
    let mut rejections = 0u64;
    while bodies.len() < spec.count {
        let x = master_rng.uniform(0.0, extent.x);
        let y = master_rng.uniform(0.0, extent.y);
        let theta = master_rng.uniform(-PI, PI);
        let c = Point::new(x, y);
        if map.disc_free(c, r) && overlap(&placed, c).is_none() {
            let id = placed.insert(c);
            bodies.push(RobotBody::new(id, Pose::new(x, y, theta), r));
        } else {
            rejections += 1;
            if rejections > max_rejections {
                return Err(SpawnError::Density {
                    requested: spec.count,
                    accepted: bodies.len(),
                    rejections,
                });
            }
        }
    }
    Ok(bodies)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub ticks_run: u64,
    pub canceled_moves: u64,
    pub messages_delivered: u64,
    /// Filled in by whoever owns a clock.
    pub wall_seconds: f64,
    pub steps_per_sec: f64,
}

impl Metrics {
    /// Records elapsed time and derives `ticks_run * robots / wall_seconds`.
    pub fn set_wall_seconds(&mut self, wall_seconds: f64, robots: usize) {
        self.wall_seconds = wall_seconds;
        self.steps_per_sec = if wall_seconds > 0.0 {
            (self.ticks_run as f64 * robots as f64) / wall_seconds
        } else {
            0.0
        };
    }
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub tick: u64,
    pub map: GridMap,
    pub bodies: Vec<RobotBody>,
    pub index: RobotIndex,
    pub inboxes: Vec<Vec<Message>>,
    pub rng_streams: Vec<SplitMix64>,
    pub master_rng: SplitMix64,
    pub metrics: Metrics,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

impl SimState {
    /// FNV-1a over `round(v * 1e6)` as little-endian i64 for x, y, theta of
    /// every body in id order.
    pub fn digest(&self) -> u64 {
        let mut h = FNV_OFFSET;
        for b in &self.bodies {
            for v in [b.pose.x, b.pose.y, b.pose.theta] {
                let q = libm::round(v * 1e6) as i64;
                for byte in q.to_le_bytes() {
                    h ^= byte as u64;
                    h = h.wrapping_mul(FNV_PRIME);
                }
            }
        }
        h
    }

    pub fn robot_count(&self) -> usize {
        self.bodies.len()
    }
}

/// Everything the engine needs besides the map and the controller.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub seed: u64,
    pub spawn: SpawnSpec,
    pub sensors: SensorSpec,
    pub limits: Limits,
    pub cell_size: Option<f64>,
    pub payload_cap: usize,
}

pub struct Engine {
    state: SimState,
    controller: Box<dyn Controller>,
    sensors: SensorSpec,
    limits: Limits,
    payload_cap: usize,
    positions: Vec<Point>,
    readings: Vec<SensorReading>,
    commands: Vec<ActuatorCommand>,
    outboxes: Vec<Option<Broadcast>>,
}

impl Engine {
    pub fn new(
        map: GridMap,
        config: &EngineConfig,
        controller: Box<dyn Controller>,
    ) -> Result<Self, EngineError> {
        let cell_size = config
            .cell_size
            .unwrap_or_else(|| default_cell_size(config.spawn.radius));
        let mut master_rng = SplitMix64::new(config.seed);
        let bodies = spawn(&config.spawn, &map, &mut master_rng, cell_size)?;
        let n = bodies.len();
        let positions: Vec<Point> = bodies.iter().map(|b| b.pose.center()).collect();
        let index = RobotIndex::build(&positions, cell_size);
        let rng_streams = (0..n as u32)
            .map(|id| SplitMix64::for_robot(config.seed, id))
            .collect();
        let state = SimState {
            tick: 0,
            map,
            bodies,
            index,
            inboxes: (0..n).map(|_| Vec::new()).collect(),
            rng_streams,
            master_rng,
            metrics: Metrics::default(),
        };
        Ok(Engine {
            state,
            controller,
            sensors: config.sensors.clone(),
            limits: config.limits,
            payload_cap: config.payload_cap,
            positions,
            readings: Vec::new(),
            commands: Vec::new(),
            outboxes: Vec::new(),
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn sensors(&self) -> &SensorSpec {
        &self.sensors
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn metrics_mut(&mut self) -> &mut Metrics {
        &mut self.state.metrics
    }

    /// Readings of the last sensing phase, `sensors.angles.len()` per robot.
    pub fn last_readings(&self) -> &[SensorReading] {
        &self.readings
    }

    fn rebuild_index(&mut self) {
        self.positions.clear();
        self.positions
            .extend(self.state.bodies.iter().map(|b| b.pose.center()));
        self.state.index.rebuild(&self.positions);
    }

    pub fn step(&mut self) -> Result<(), EngineError> {
        let n = self.state.bodies.len();
        let k = self.sensors.angles.len();
        let tick = self.state.tick;

        self.rebuild_index();

        self.readings.clear();
        for body in &self.state.bodies {
            sense_into(
                body,
                &self.sensors,
                &self.state.map,
                &self.state.index,
                &mut self.readings,
            );
        }

        self.commands.clear();
        self.outboxes.clear();
        for i in 0..n {
            let body = &self.state.bodies[i];
            let input = ControlInput {
                id: body.id,
                tick,
                readings: &self.readings[i * k..(i + 1) * k],
                collided_last_tick: body.collided_last_tick,
                inbox: &self.state.inboxes[i],
            };
            let robot = body.id;
            let out = self
                .controller
                .step(&input, &mut self.state.rng_streams[i])
                .map_err(|source| EngineError::Controller {
                    robot,
                    tick,
                    source,
                })?;
            if !out.cmd.is_finite() {
                return Err(EngineError::NonFiniteCommand {
                    robot,
                    tick,
                    v: out.cmd.v,
                    w: out.cmd.w,
                });
            }
            if let Some(b) = &out.broadcast {
                if b.payload.len() > self.payload_cap {
                    return Err(EngineError::PayloadTooLarge {
                        robot,
                        tick,
                        len: b.payload.len(),
                        cap: self.payload_cap,
                    });
                }
            }
            self.commands.push(out.cmd);
            self.outboxes.push(out.broadcast);
        }

        let state = &mut self.state;
        for i in 0..n {
            let candidate = apply_command(state.bodies[i].pose, self.commands[i], self.limits);
            let (pose, collided) =
                resolve_move(&state.map, &state.index, &state.bodies[i], candidate);
            let body = &mut state.bodies[i];
            body.pose = pose;
            body.collided_last_tick = collided;
            state.index.move_to(body.id, pose.center());
            if collided {
                state.metrics.canceled_moves += 1;
            }
        }

        self.rebuild_index();
        let state = &mut self.state;
        let delivered = deliver_into(&state.index, &self.outboxes, &mut state.inboxes);

        state.metrics.messages_delivered += delivered;
        state.metrics.ticks_run += 1;
        state.tick += 1;
        Ok(())
    }

    pub fn run(&mut self, ticks: u64) -> Result<(), EngineError> {
        for _ in 0..ticks {
            self.step()?;
        }
        Ok(())
    }
}
