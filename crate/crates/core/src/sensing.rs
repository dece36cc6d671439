//! IR proximity sensor belt: grid ray casting plus ray-disc intersection.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::geom::Point;
use crate::index::RobotIndex;
use crate::kinematics::{wrap_angle, RobotBody};
use crate::world::GridMap;

#[derive(Debug, Clone, PartialEq)]
pub struct SensorSpec {
    /// Ray bearings relative to the heading, each in `[-π, π)`.
    pub angles: Vec<f64>,
    pub range: f64,
}

impl SensorSpec {
    /// `count` rays spaced evenly around the body, the first pointing ahead.
    pub fn evenly_spaced(count: usize, range: f64) -> Self {
        let angles = (0..count)
            .map(|i| wrap_angle(i as f64 * TAU / count as f64))
            .collect();
        SensorSpec { angles, range }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitKind {
    None,
    Wall,
    Robot(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub dist: f64,
    pub kind: HitKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorReading {
    /// `dist / range`, in `[0, 1]`.
    pub normalized: f64,
    pub kind: HitKind,
}

/// Distance along the ray to the first obstacle cell it enters, if that is
/// within `range`. Out-of-map cells are obstacles.
pub fn wall_distance(map: &GridMap, origin: Point, dir: f64, range: f64) -> Option<f64> {
    let (dy, dx) = (libm::sin(dir), libm::cos(dir));
    let mut cx = libm::floor(origin.x) as i64;
    let mut cy = libm::floor(origin.y) as i64;
    if map.is_obstacle(cx, cy) {
        return Some(0.0);
    }
    let (step_x, mut t_max_x, t_delta_x) = axis_setup(origin.x, dx);
    let (step_y, mut t_max_y, t_delta_y) = axis_setup(origin.y, dy);
    loop {
        let t;
        if t_max_x < t_max_y {
            t = t_max_x;
            t_max_x += t_delta_x;
            cx += step_x;
        } else if t_max_y < t_max_x {
            t = t_max_y;
            t_max_y += t_delta_y;
            cy += step_y;
        } else {
            // Exactly through a corner: the ray passes into the diagonal cell.
            t = t_max_x;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
            cx += step_x;
            cy += step_y;
        }
        if t > range {
            return None;
        }
        if map.is_obstacle(cx, cy) {
            return Some(t);
        }
    }
}

/// Step direction, distance to the first boundary, distance between boundaries.
fn axis_setup(start: f64, d: f64) -> (i64, f64, f64) {
    if d > 0.0 {
        let boundary = libm::floor(start) + 1.0;
        (1, (boundary - start) / d, 1.0 / d)
    } else if d < 0.0 {
        let boundary = libm::floor(start);
        (-1, (boundary - start) / d, -1.0 / d)
    } else {
        (0, f64::INFINITY, f64::INFINITY)
    }
}

/// Distance along a unit ray to the entry point of a disc, if ahead of the
/// origin. An origin inside or on the disc gives 0.
#[inline]
pub fn ray_disc(origin: Point, ux: f64, uy: f64, center: Point, r: f64) -> Option<f64> {
    let mx = origin.x - center.x;
    let my = origin.y - center.y;
    let c = mx * mx + my * my - r * r;
    if c <= 0.0 {
        return Some(0.0);
    }
    let b = mx * ux + my * uy;
    if b > 0.0 {
        return None;
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b - libm::sqrt(disc);
    Some(if t < 0.0 { 0.0 } else { t })
}

/// Casts one ray against walls and every robot but `self_id`.
///
/// All robots share `robot_radius`. A wall and a robot at the same distance
/// report the wall; equal-distance robots report the lowest id.
pub fn cast_ray(
    map: &GridMap,
    index: &RobotIndex,
    origin: Point,
    dir: f64,
    range: f64,
    robot_radius: f64,
    self_id: Option<u32>,
) -> RayHit {
    let mut best = match wall_distance(map, origin, dir, range) {
        Some(d) => RayHit {
            dist: d,
            kind: HitKind::Wall,
        },
        None => RayHit {
            dist: range,
            kind: HitKind::None,
        },
    };
    if best.dist == 0.0 {
        return best;
    }
    let ux = libm::cos(dir);
    let uy = libm::sin(dir);
    let end = Point::new(origin.x + ux * best.dist, origin.y + uy * best.dist);
    let lo = Point::new(
        origin.x.min(end.x) - robot_radius,
        origin.y.min(end.y) - robot_radius,
    );
    let hi = Point::new(
        origin.x.max(end.x) + robot_radius,
        origin.y.max(end.y) + robot_radius,
    );
    let mut robot: Option<(f64, u32)> = None;
    index.for_each_in_box(lo, hi, |id, center| {
        if Some(id) == self_id {
            return;
        }
        if let Some(t) = ray_disc(origin, ux, uy, center, robot_radius) {
            let better = match robot {
                None => true,
                Some((bt, bid)) => t < bt || (t == bt && id < bid),
            };
            if better {
                robot = Some((t, id));
            }
        }
    });
    if let Some((t, id)) = robot {
        if t < best.dist {
            best = RayHit {
                dist: t,
                kind: HitKind::Robot(id),
            };
        }
    }
    best
}

/// Origin and world bearing of sensor ray `angle` on `body`.
#[inline]
pub fn ray_origin(body: &RobotBody, angle: f64) -> (Point, f64) {
    let dir = body.pose.theta + angle;
    (body.pose.center().offset(dir, body.radius), dir)
}

/// Reads every sensor of `body`, in `spec.angles` order.
pub fn sense_all(
    body: &RobotBody,
    spec: &SensorSpec,
    map: &GridMap,
    index: &RobotIndex,
) -> Vec<SensorReading> {
    let mut out = Vec::with_capacity(spec.angles.len());
    sense_into(body, spec, map, index, &mut out);
    out
}

/// Like [`sense_all`] but appends to `out`.
pub fn sense_into(
    body: &RobotBody,
    spec: &SensorSpec,
    map: &GridMap,
    index: &RobotIndex,
    out: &mut Vec<SensorReading>,
) {
    for &angle in &spec.angles {
        let (origin, dir) = ray_origin(body, angle);
        let hit = cast_ray(
            map,
            index,
            origin,
            dir,
            spec.range,
            body.radius,
            Some(body.id),
        );
        out.push(SensorReading {
            normalized: (hit.dist / spec.range).clamp(0.0, 1.0),
            kind: hit.kind,
        });
    }
}
