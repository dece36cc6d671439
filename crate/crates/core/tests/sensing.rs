use std::f64::consts::PI;

use proptest::prelude::*;
use swarmgrid_core::rng::SplitMix64;
use swarmgrid_core::sensing::{cast_ray, sense_all, HitKind, SensorSpec};
use swarmgrid_core::{GridMap, Point, Pose, RobotBody, RobotIndex};

fn speckled(seed: u64, w: usize, h: usize, p: f64) -> GridMap {
    let mut rng = SplitMix64::new(seed);
    GridMap::from_fn(w, h, |_, _| rng.next_f64() < p).unwrap()
}

/// First 0.01 px sample inside an obstacle or a disc, capped at `range`.
fn march(map: &GridMap, robots: &[Point], r: f64, o: Point, dir: f64, range: f64) -> f64 {
    let n = (range / 0.01).ceil() as usize;
    for i in 0..=n {
        let t = (i as f64 * 0.01).min(range);
        let p = Point::new(o.x + t * dir.cos(), o.y + t * dir.sin());
        if map.is_obstacle(p.x.floor() as i64, p.y.floor() as i64)
            || robots.iter().any(|c| c.dist(p) <= r)
        {
            return t;
        }
    }
    range
}

#[test]
fn agrees_with_march_on_axis_aligned_and_oblique_rays() {
    // Solid blocks only, so no sub-0.01 px corner clips of isolated cells.
    let map = GridMap::from_fn(120, 90, |x, y| {
        (30..40).contains(&x) && (20..70).contains(&y) || y < 3
    })
    .unwrap();
    let robots = [Point::new(80.0, 50.0), Point::new(60.5, 10.25)];
    let idx = RobotIndex::build(&robots, 16.0);
    let o = Point::new(55.3, 45.7);
    for k in 0..360 {
        let dir = (k as f64).to_radians() - PI;
        let hit = cast_ray(&map, &idx, o, dir, 70.0, 3.0, None);
        let m = march(&map, &robots, 3.0, o, dir, 70.0);
        assert!(
            (hit.dist - m).abs() <= 0.02,
            "dir {dir}: {} vs {m}",
            hit.dist
        );
    }
}

#[test]
fn sensing_twice_is_identical() {
    let map = speckled(3, 100, 100, 0.02);
    let bodies: Vec<RobotBody> = (0..5)
        .map(|i| RobotBody::new(i, Pose::new(15.0 + 17.0 * i as f64, 50.0, i as f64), 3.0))
        .collect();
    let pts: Vec<Point> = bodies.iter().map(|b| b.pose.center()).collect();
    let idx = RobotIndex::build(&pts, 16.0);
    let spec = SensorSpec::evenly_spaced(8, 40.0);
    for b in &bodies {
        assert_eq!(
            sense_all(b, &spec, &map, &idx),
            sense_all(b, &spec, &map, &idx)
        );
    }
}

#[test]
fn touching_robot_reads_near_zero() {
    let map = GridMap::from_fn(100, 100, |_, _| false).unwrap();
    let a = RobotBody::new(0, Pose::new(50.0, 50.0, 0.0), 4.0);
    let b = RobotBody::new(1, Pose::new(58.0, 50.0, 0.0), 4.0);
    let idx = RobotIndex::build(&[a.pose.center(), b.pose.center()], 16.0);
    let spec = SensorSpec::evenly_spaced(8, 64.0);
    let r = sense_all(&a, &spec, &map, &idx);
    assert_eq!(r[0].kind, HitKind::Robot(1));
    assert!(r[0].normalized < 1e-9);
    // Self is never reported.
    assert!(r.iter().all(|s| s.kind != HitKind::Robot(0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn adding_an_obstacle_never_increases_a_reading(
        seed in any::<u64>(),
        bx in 0usize..80, by in 0usize..80,
        theta in -PI..PI,
    ) {
        let map = speckled(seed, 80, 80, 0.01);
        let body = RobotBody::new(0, Pose::new(40.0, 40.0, theta), 3.0);
        prop_assume!(map.disc_free(body.pose.center(), 3.0));
        let idx = RobotIndex::build(&[body.pose.center()], 16.0);
        let spec = SensorSpec::evenly_spaced(8, 30.0);
        let before = sense_all(&body, &spec, &map, &idx);
        let mut cells = map.obstacles().to_vec();
        cells[by * 80 + bx] = true;
        let denser = GridMap::new(80, 80, cells).unwrap();
        let after = sense_all(&body, &spec, &denser, &idx);
        for (a, b) in after.iter().zip(&before) {
            prop_assert!(a.normalized <= b.normalized);
            prop_assert!((0.0..=1.0).contains(&a.normalized));
        }
    }

    #[test]
    fn none_means_full_range(seed in any::<u64>(), dir in -PI..PI) {
        let map = speckled(seed, 60, 60, 0.03);
        let idx = RobotIndex::build(&[], 16.0);
        let o = Point::new(30.5, 30.5);
        prop_assume!(!map.is_obstacle(30, 30));
        let hit = cast_ray(&map, &idx, o, dir, 20.0, 1.0, None);
        prop_assert!(hit.dist >= 0.0 && hit.dist <= 20.0);
        if hit.kind == HitKind::None {
            prop_assert_eq!(hit.dist, 20.0);
        }
    }
}
