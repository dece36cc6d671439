//! Deterministic headless simulation of disc-shaped robots with IR ray
//! sensors on pixel occupancy grids.
//!
//! The crate is `no_std` (it needs `alloc`). All transcendental math goes
//! through `libm`, so a given seed produces bit-identical trajectories on
//! every platform. File formats, configuration, and the command-line runner
//! live in the `swarmgrid` companion crate.
//!
//! ```
//! use swarmgrid_core::engine::{Engine, EngineConfig, SpawnSpec};
//! use swarmgrid_core::{GridMap, Limits, RandomWalk, SensorSpec};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let limits = Limits { v_max: 2.0, w_max: 0.3 };
//! let config = EngineConfig {
//!     seed: 7,
//!     spawn: SpawnSpec { count: 50, radius: 4.0, positions: None },
//!     sensors: SensorSpec::evenly_spaced(8, 64.0),
//!     limits,
//!     cell_size: None,
//!     payload_cap: 4096,
//! };
//! let map = GridMap::walled_arena(256, 256)?;
//! let mut engine = Engine::new(map, &config, Box::new(RandomWalk::new(limits)))?;
//! engine.run(1000)?;
//! assert_eq!(engine.state().tick, 1000);
//! # Ok(())
//! # }
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod controllers;
pub mod engine;
pub mod geom;
pub mod index;
pub mod kinematics;
pub mod messaging;
pub mod rng;
pub mod sensing;
pub mod world;

pub use controllers::{
    Braitenberg, Broadcast, ControlInput, ControlOutput, Controller, ControllerError, Message,
    RandomWalk,
};
pub use engine::{spawn, Engine, EngineError, Metrics, SimState, SpawnError, SpawnSpec};
pub use geom::Point;
pub use index::RobotIndex;
pub use kinematics::{
    apply_command, resolve_move, wrap_angle, ActuatorCommand, Limits, Pose, RobotBody,
};
pub use messaging::deliver_messages;
pub use rng::SplitMix64;
pub use sensing::{cast_ray, sense_all, HitKind, RayHit, SensorReading, SensorSpec};
pub use world::{GridMap, MapError};
