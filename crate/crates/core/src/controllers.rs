//! The controller contract and the two reference controllers.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use crate::kinematics::{ActuatorCommand, Limits};
use crate::rng::SplitMix64;
use crate::sensing::SensorReading;

/// A received broadcast.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub sender: u32,
    pub payload: Arc<[u8]>,
}

/// A broadcast to every robot within `radius` of the sender, delivered next tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Broadcast {
    pub payload: Vec<u8>,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct ControlInput<'a> {
    pub id: u32,
    pub tick: u64,
    pub readings: &'a [SensorReading],
    pub collided_last_tick: bool,
    /// Previous tick's messages, ascending by sender.
    pub inbox: &'a [Message],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlOutput {
    pub cmd: ActuatorCommand,
    pub broadcast: Option<Broadcast>,
}

impl ControlOutput {
    pub fn drive(v: f64, w: f64) -> Self {
        ControlOutput {
            cmd: ActuatorCommand::new(v, w),
            broadcast: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ControllerError(pub String);

/// Decides one robot's command for one tick.
///
/// Implementations must be deterministic in `(input, rng state)`. Each robot
/// owns its rng stream, so calls for different robots are independent.
pub trait Controller: Send + Sync {
    fn step(
        &self,
        input: &ControlInput<'_>,
        rng: &mut SplitMix64,
    ) -> Result<ControlOutput, ControllerError>;
}

/// Obstacle avoider: slows down with the nearest frontal reading and steers
/// with a weighted sum of proximity activations.
#[derive(Debug, Clone, PartialEq)]
pub struct Braitenberg {
    limits: Limits,
    weights: Vec<f64>,
    front: Vec<usize>,
}

impl Braitenberg {
    /// `angles` are the sensor bearings; `weights[i]` pairs with `angles[i]`.
    pub fn new(limits: Limits, angles: &[f64], weights: Vec<f64>) -> Self {
        assert_eq!(angles.len(), weights.len(), "one weight per sensor");
        let front = angles
            .iter()
            .enumerate()
            .filter(|(_, a)| a.abs() <= FRAC_PI_4)
            .map(|(i, _)| i)
            .collect();
        Braitenberg {
            limits,
            weights,
            front,
        }
    }

    pub fn with_default_weights(limits: Limits, angles: &[f64]) -> Self {
        Braitenberg::new(limits, angles, Braitenberg::default_weights(angles))
    }

    /// `-sin(angle)`: a reading on the left (positive bearing) turns the
    /// robot right, mirrored bearings get equal magnitude, and the
    /// straight-ahead and straight-behind rays do not steer.
    pub fn default_weights(angles: &[f64]) -> Vec<f64> {
        angles
            .iter()
            .map(|&a| {
                let w = -libm::sin(a);
                // sin(-π) is not exactly zero.
                if w.abs() < 1e-12 {
                    0.0
                } else {
                    w
                }
            })
            .collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn command(&self, readings: &[SensorReading]) -> ActuatorCommand {
        let nearest_front = self
            .front
            .iter()
            .map(|&i| readings[i].normalized)
            .fold(1.0f64, f64::min);
        let v = self.limits.v_max * nearest_front;
        let turn: f64 = self
            .weights
            .iter()
            .zip(readings)
            .map(|(w, r)| w * (1.0 - r.normalized))
            .sum();
        let w = turn.clamp(-self.limits.w_max, self.limits.w_max);
        ActuatorCommand::new(v, w)
    }
}

impl Controller for Braitenberg {
    fn step(
        &self,
        input: &ControlInput<'_>,
        _rng: &mut SplitMix64,
    ) -> Result<ControlOutput, ControllerError> {
        if input.readings.len() != self.weights.len() {
            return Err(ControllerError(alloc::format!(
                "expected {} readings, got {}",
                self.weights.len(),
                input.readings.len()
            )));
        }
        Ok(ControlOutput {
            cmd: self.command(input.readings),
            broadcast: None,
        })
    }
}

/// Full speed ahead with a uniformly random turn rate each tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomWalk {
    pub limits: Limits,
}

impl RandomWalk {
    pub fn new(limits: Limits) -> Self {
        RandomWalk { limits }
    }
}

impl Controller for RandomWalk {
    fn step(
        &self,
        _input: &ControlInput<'_>,
        rng: &mut SplitMix64,
    ) -> Result<ControlOutput, ControllerError> {
        let w_max = self.limits.w_max;
        let w = w_max * (2.0 * rng.next_f64() - 1.0);
        Ok(ControlOutput::drive(self.limits.v_max, w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{HitKind, SensorSpec};
    use alloc::vec;
    use proptest::prelude::*;

    const LIM: Limits = Limits {
        v_max: 2.0,
        w_max: 0.3,
    };

    fn readings(values: &[f64]) -> Vec<SensorReading> {
        values
            .iter()
            .map(|&v| SensorReading {
                normalized: v,
                kind: if v < 1.0 {
                    HitKind::Wall
                } else {
                    HitKind::None
                },
            })
            .collect()
    }

    fn input<'a>(r: &'a [SensorReading]) -> ControlInput<'a> {
        ControlInput {
            id: 0,
            tick: 0,
            readings: r,
            collided_last_tick: false,
            inbox: &[],
        }
    }

    fn belt() -> Braitenberg {
        let spec = SensorSpec::evenly_spaced(8, 64.0);
        Braitenberg::with_default_weights(LIM, &spec.angles)
    }

    #[test]
    fn clear_view_drives_straight() {
        let r = readings(&[1.0; 8]);
        let out = belt().step(&input(&r), &mut SplitMix64::new(0)).unwrap();
        assert_eq!(out, ControlOutput::drive(2.0, 0.0));
    }

    #[test]
    fn left_obstacle_turns_right() {
        // Bearings 0, 45, 90, 135, -180, -135, -90, -45 degrees.
        let r = readings(&[1.0, 0.3, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let out = belt().step(&input(&r), &mut SplitMix64::new(0)).unwrap();
        assert!(out.cmd.w < 0.0);
        assert!(out.cmd.v < LIM.v_max);
    }

    #[test]
    fn symmetric_front_slows_without_turning() {
        let r = readings(&[0.2, 0.4, 1.0, 1.0, 1.0, 1.0, 1.0, 0.4]);
        let out = belt().step(&input(&r), &mut SplitMix64::new(0)).unwrap();
        assert_eq!(out.cmd.w, 0.0);
        assert!((out.cmd.v - 0.4).abs() < 1e-12);
    }

    #[test]
    fn default_weights_are_antisymmetric() {
        let spec = SensorSpec::evenly_spaced(8, 64.0);
        let w = Braitenberg::default_weights(&spec.angles);
        assert_eq!(w[0], 0.0);
        assert_eq!(w[4], 0.0);
        for (l, r) in [(1, 7), (2, 6), (3, 5)] {
            assert!(w[l] < 0.0);
            assert!((w[l] + w[r]).abs() < 1e-15);
        }
    }

    #[test]
    fn wrong_arity_is_an_error() {
        let r = readings(&[1.0; 3]);
        assert!(belt().step(&input(&r), &mut SplitMix64::new(0)).is_err());
    }

    #[test]
    fn random_walk_is_deterministic_and_draws_once() {
        let c = RandomWalk::new(LIM);
        let mut a = SplitMix64::for_robot(42, 0);
        let mut b = a.clone();
        let oa = c.step(&input(&[]), &mut a).unwrap();
        let ob = c.step(&input(&[]), &mut b).unwrap();
        assert_eq!(oa, ob);
        let mut probe = SplitMix64::for_robot(42, 0);
        probe.next_u64();
        assert_eq!(a, probe);
    }

    #[test]
    fn random_walk_first_value_for_robot_zero_seed_42() {
        // Frozen from an independent SplitMix64 reference:
        // first draw of stream (42 ^ 0x9E3779B97F4A7C15) = 2949826092126892291,
        // w = 0.3 * (2 * (draw >> 11) / 2^53 - 1).
        let c = RandomWalk::new(LIM);
        let mut rng = SplitMix64::for_robot(42, 0);
        let out = c.step(&input(&[]), &mut rng).unwrap();
        assert_eq!(out.cmd.w, -0.20405376427384794);
        assert_eq!(out.cmd.v, 2.0);
    }

    proptest! {
        #[test]
        fn braitenberg_output_bounds(vals in proptest::collection::vec(0.0f64..=1.0, 8)) {
            let r = readings(&vals);
            let out = belt().step(&input(&r), &mut SplitMix64::new(0)).unwrap();
            prop_assert!(out.cmd.w.abs() <= LIM.w_max);
            prop_assert!(out.cmd.v >= 0.0 && out.cmd.v <= LIM.v_max);
        }

        #[test]
        fn sum_preserving_rear_permutation_is_invisible(
            vals in proptest::collection::vec(0.0f64..=1.0, 8),
        ) {
            // Rear rays 2,3 share a weight, as do 5,6; swapping their
            // readings leaves the weighted sum unchanged.
            let spec = SensorSpec::evenly_spaced(8, 64.0);
            let w = vec![0.0, -1.0, -0.5, -0.5, 0.0, 0.5, 0.5, 1.0];
            let c = Braitenberg::new(LIM, &spec.angles, w);
            let mut swapped = vals.clone();
            swapped.swap(2, 3);
            swapped.swap(5, 6);
            let a = c.command(&readings(&vals));
            let b = c.command(&readings(&swapped));
            prop_assert_eq!(a.v, b.v);
            prop_assert!((a.w - b.w).abs() < 1e-12);
        }

        #[test]
        fn random_walk_range(seed in any::<u64>()) {
            let c = RandomWalk::new(LIM);
            let mut rng = SplitMix64::new(seed);
            let out = c.step(&input(&[]), &mut rng).unwrap();
            prop_assert!(out.cmd.w >= -LIM.w_max && out.cmd.w < LIM.w_max);
        }
    }

    #[test]
    fn empty_inbox_and_messages_are_valid_input() {
        let r = readings(&[1.0; 8]);
        let msgs = vec![Message {
            sender: 3,
            payload: Arc::from(&b"hi"[..]),
        }];
        let mut inp = input(&r);
        inp.inbox = &msgs;
        assert!(belt().step(&inp, &mut SplitMix64::new(0)).is_ok());
    }
}
