//! Disc robot bodies, the per-tick motion model, and move resolution.

use core::f64::consts::{PI, TAU};

use crate::geom::Point;
use crate::index::RobotIndex;
use crate::world::GridMap;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading in `[-π, π)`.
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn center(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotBody {
    pub id: u32,
    pub pose: Pose,
    pub radius: f64,
    pub collided_last_tick: bool,
}

impl RobotBody {
    pub fn new(id: u32, pose: Pose, radius: f64) -> Self {
        RobotBody {
            id,
            pose,
            radius,
            collided_last_tick: false,
        }
    }
}

/// Translational speed `v` (px/tick) and rotational speed `w` (rad/tick).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorCommand {
    pub v: f64,
    pub w: f64,
}

impl ActuatorCommand {
    pub fn new(v: f64, w: f64) -> Self {
        ActuatorCommand { v, w }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.w.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub v_max: f64,
    pub w_max: f64,
}

/// Maps `theta` onto `[-π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    if (-PI..PI).contains(&theta) {
        return theta;
    }
    let mut r = theta - TAU * libm::floor((theta + PI) / TAU);
    // The subtraction can land a rounding step outside the interval.
    if r >= PI {
        r -= TAU;
    }
    if r < -PI {
        r += TAU;
        if r >= PI {
            r = f64_prev(PI);
        }
    }
    r
}

fn f64_prev(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

/// Candidate pose after one tick: clamp, rotate, then translate along the
/// new heading.
pub fn apply_command(pose: Pose, cmd: ActuatorCommand, lim: Limits) -> Pose {
    let v = cmd.v.clamp(-lim.v_max, lim.v_max);
    let w = cmd.w.clamp(-lim.w_max, lim.w_max);
    let theta = wrap_angle(pose.theta + w);
    if v == 0.0 {
        return Pose { theta, ..pose };
    }
    Pose {
        x: pose.x + v * libm::cos(theta),
        y: pose.y + v * libm::sin(theta),
        theta,
    }
}

/// Resolves a candidate pose against walls and other robots.
///
/// The heading is always adopted. The translation is dropped (and `true`
/// returned) if the disc at the candidate center touches an obstacle cell
/// or comes closer than `2 * radius` to any other robot in `index`.
pub fn resolve_move(
    map: &GridMap,
    index: &RobotIndex,
    body: &RobotBody,
    candidate: Pose,
) -> (Pose, bool) {
    let c = candidate.center();
    if c == body.pose.center() {
        return (candidate, false);
    }
    let blocked = !map.disc_free(c, body.radius) || robot_conflict(index, body, c);
    if blocked {
        let kept = Pose {
            theta: candidate.theta,
            ..body.pose
        };
        (kept, true)
    } else {
        (candidate, false)
    }
}

fn robot_conflict(index: &RobotIndex, body: &RobotBody, c: Point) -> bool {
    let min_gap = 2.0 * body.radius;
    let min_gap_sq = min_gap * min_gap;
    let lo = Point::new(c.x - min_gap, c.y - min_gap);
    let hi = Point::new(c.x + min_gap, c.y + min_gap);
    let mut hit = false;
    index.for_each_in_box(lo, hi, |id, q| {
        if id != body.id && c.dist_sq(q) < min_gap_sq {
            hit = true;
        }
    });
    hit
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;
    use proptest::prelude::*;

    const LIM: Limits = Limits {
        v_max: 2.0,
        w_max: PI,
    };

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert_eq!(wrap_angle(PI), -PI);
        assert_eq!(wrap_angle(-PI), -PI);
        assert!((wrap_angle(5.0 * PI / 2.0) - FRAC_PI_2).abs() < 1e-12);
        assert!((wrap_angle(-3.0 * PI) - (-PI)).abs() < 1e-12);
        assert!(wrap_angle(f64_prev(PI)) < PI);
    }

    #[test]
    fn zero_command_is_identity() {
        let p = Pose::new(3.0, 4.0, 1.0);
        assert_eq!(apply_command(p, ActuatorCommand::default(), LIM), p);
    }

    #[test]
    fn unit_step_and_clamp() {
        let p = Pose::new(0.0, 0.0, 0.0);
        assert_eq!(
            apply_command(p, ActuatorCommand::new(1.0, 0.0), LIM),
            Pose::new(1.0, 0.0, 0.0)
        );
        assert_eq!(
            apply_command(p, ActuatorCommand::new(10.0, 0.0), LIM),
            Pose::new(2.0, 0.0, 0.0)
        );
    }

    #[test]
    fn rotate_then_translate() {
        let p = apply_command(Pose::default(), ActuatorCommand::new(1.0, FRAC_PI_2), LIM);
        assert!(p.x.abs() < 1e-12);
        assert!((p.y - 1.0).abs() < 1e-12);
        assert!((p.theta - FRAC_PI_2).abs() < 1e-12);
    }

    fn open_map() -> GridMap {
        GridMap::from_fn(64, 64, |_, _| false).unwrap()
    }

    #[test]
    fn free_candidate_is_adopted() {
        let map = open_map();
        let body = RobotBody::new(0, Pose::new(30.0, 30.0, 0.0), 2.0);
        let idx = RobotIndex::build(&[body.pose.center()], 16.0);
        let cand = Pose::new(31.0, 30.0, 0.2);
        assert_eq!(resolve_move(&map, &idx, &body, cand), (cand, false));
    }

    #[test]
    fn wall_cancels_translation_not_rotation() {
        let map = GridMap::from_fn(64, 64, |x, _| x >= 40).unwrap();
        let body = RobotBody::new(0, Pose::new(36.5, 30.5, 0.0), 3.0);
        let idx = RobotIndex::build(&[body.pose.center()], 16.0);
        let cand = Pose::new(37.5, 30.5, 0.1);
        let (p, hit) = resolve_move(&map, &idx, &body, cand);
        assert!(hit);
        assert_eq!(p, Pose::new(36.5, 30.5, 0.1));
    }

    #[test]
    fn sequential_resolution_in_id_order() {
        // A(0) at (10,10), B(1) at (13,10), r=2, both commanded +x by 1.
        // A's candidate (11,10) is 2 from B's snapshot center: blocked.
        // B's candidate (14,10) is exactly 4 = 2r from A: allowed.
        let map = open_map();
        let lim = Limits {
            v_max: 2.0,
            w_max: 1.0,
        };
        let cmd = ActuatorCommand::new(1.0, 0.0);
        let mut bodies = [
            RobotBody::new(0, Pose::new(10.0, 10.0, 0.0), 2.0),
            RobotBody::new(1, Pose::new(13.0, 10.0, 0.0), 2.0),
        ];
        let mut idx = RobotIndex::build(&[bodies[0].pose.center(), bodies[1].pose.center()], 16.0);
        let mut collided = [false; 2];
        for i in 0..2 {
            let cand = apply_command(bodies[i].pose, cmd, lim);
            let (p, hit) = resolve_move(&map, &idx, &bodies[i], cand);
            bodies[i].pose = p;
            collided[i] = hit;
            idx.move_to(i as u32, p.center());
        }
        assert_eq!(bodies[0].pose, Pose::new(10.0, 10.0, 0.0));
        assert_eq!(bodies[1].pose, Pose::new(14.0, 10.0, 0.0));
        assert_eq!(collided, [true, false]);
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent_and_in_range(t in -1.0e6f64..1.0e6) {
            let w = wrap_angle(t);
            prop_assert!((-PI..PI).contains(&w));
            prop_assert_eq!(wrap_angle(w), w);
            let k = ((t - w) / TAU).round();
            prop_assert!((t - w - k * TAU).abs() < 1e-6);
        }

        #[test]
        fn translation_bounded_by_v_max(
            x in -100.0f64..100.0, y in -100.0f64..100.0, th in -PI..PI,
            v in -50.0f64..50.0, w in -10.0f64..10.0,
        ) {
            let p = Pose::new(x, y, th);
            let q = apply_command(p, ActuatorCommand::new(v, w), LIM);
            prop_assert!(p.center().dist(q.center()) <= LIM.v_max * (1.0 + 1e-12));
            prop_assert!((-PI..PI).contains(&q.theta));
        }
    }
}
