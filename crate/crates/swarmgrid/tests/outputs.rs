use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use swarmgrid::bench::{bench, HEADER};
use swarmgrid::config::{ControllerKind, SensorLayout, World};
use swarmgrid::frame::render_frame;
use swarmgrid::runner::build_engine;
use swarmgrid::{parse_config, run, RunError, RunOptions, SimConfig};

const QUIET: RunOptions = RunOptions { quiet: true };

fn arena(n: usize, seed: u64, ticks: u64) -> SimConfig {
    SimConfig::new(
        World::Arena {
            width: 200,
            height: 200,
        },
        n,
        seed,
        ticks,
    )
}

fn logged(cfg: &SimConfig, path: PathBuf) -> String {
    let mut cfg = cfg.clone();
    cfg.log_path = Some(path.clone());
    run(&cfg, QUIET).unwrap();
    fs::read_to_string(path).unwrap()
}

#[test]
fn one_robot_two_ticks_gives_header_and_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let log = logged(&arena(1, 1, 2), dir.path().join("t.csv"));
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "tick,robot_id,x,y,theta,collided");
    assert!(lines[1].starts_with("1,0,"));
    assert!(lines[2].starts_with("2,0,"));
}

#[test]
fn equal_seeds_give_identical_logs_and_theta_stays_wrapped() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = arena(30, 77, 300);
    cfg.controller = ControllerKind::RandomWalk;
    let a = logged(&cfg, dir.path().join("a.csv"));
    let b = logged(&cfg, dir.path().join("b.csv"));
    assert_eq!(a, b);
    for line in a.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 6);
        let theta: f64 = f[4].parse().unwrap();
        assert!(
            (-std::f64::consts::PI..std::f64::consts::PI).contains(&theta),
            "{line}"
        );
        assert!(f[5] == "0" || f[5] == "1");
    }
}

#[test]
fn unwritable_log_fails_before_the_first_tick() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = arena(1, 1, 5);
    cfg.log_path = Some(dir.path().join("no/such/dir/t.csv"));
    assert!(matches!(run(&cfg, QUIET), Err(RunError::Log { .. })));
}

#[test]
fn frame_shows_every_robot() {
    let cfg = arena(100, 4, 0);
    let engine = build_engine(&cfg).unwrap();
    let ppm = render_frame(engine.state(), &cfg.sensor_spec(), false);
    let header = b"P6\n200 200\n255\n";
    assert!(ppm.starts_with(header));
    let pixels = &ppm[header.len()..];
    assert_eq!(pixels.len(), 200 * 200 * 3);
    let walls = engine
        .state()
        .map
        .obstacles()
        .iter()
        .filter(|&&o| o)
        .count();
    let non_white = pixels.chunks(3).filter(|p| *p != [255, 255, 255]).count();
    // Each disc of radius 4 covers at least the cells within radius 3.
    let per_robot = (-3i32..=3)
        .flat_map(|dx| (-3i32..=3).map(move |dy| (dx, dy)))
        .filter(|(dx, dy)| dx * dx + dy * dy <= 9)
        .count();
    assert!(
        non_white >= walls + 100 * per_robot,
        "{non_white} < {walls} + 100*{per_robot}"
    );
}

#[test]
fn failing_size_becomes_an_error_row() {
    let base = SimConfig::new(
        World::Arena {
            width: 40,
            height: 40,
        },
        1,
        1,
        5,
    );
    let rows = bench(&base, &[1, 2000], 5);
    assert!(rows[0].error.is_none());
    assert!(rows[1].error.is_some());
    let csv = swarmgrid::bench::to_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2].split(',').count(), 6);
    assert!(lines[2].starts_with("2000,5,,,,"));
}

fn any_config() -> impl Strategy<Value = SimConfig> {
    (
        prop_oneof![
            (16usize..500, 16usize..500).prop_map(|(width, height)| World::Arena { width, height }),
            "[a-z]{1,8}\\.pgm".prop_map(|p| World::Map(PathBuf::from(p))),
        ],
        0usize..10_000,
        any::<u64>(),
        0u64..1_000_000,
        (0.5f64..20.0, 1usize..32, 0.0f64..200.0),
        (0.1f64..10.0, 0.01f64..3.0),
        any::<bool>(),
        prop::option::of(1u64..1000),
        prop::option::of(2.0f64..100.0),
    )
        .prop_map(
            |(world, n, seed, ticks, (radius, k, range), (v, w), rw, every, cell)| {
                let mut c = SimConfig::new(world, n, seed, ticks);
                c.radius = radius;
                c.sensors = SensorLayout::Even(k);
                // Valid configs need a range of at least one tick's travel.
                c.sensor_range = v + range;
                c.limits.v_max = v;
                c.limits.w_max = w;
                if rw {
                    c.controller = ControllerKind::RandomWalk;
                }
                c.frames_every = every;
                c.cell_size = cell;
                c
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn properties_round_trip(cfg in any_config()) {
        let text = cfg.to_properties();
        prop_assert_eq!(parse_config(&text, &[]).unwrap(), cfg);
    }
}

proptest! {
    #[test]
    fn range_shorter_than_one_step_is_rejected(range in 0.1f64..5.0, extra in 0.01f64..5.0) {
        let text = format!(
            "arena.width = 50\narena.height = 50\nrobots.count = 1\nseed = 1\nticks = 1\n\
             sensors.range = {range}\nlimits.v_max = {}\n",
            range + extra
        );
        let e = parse_config(&text, &[]).unwrap_err();
        prop_assert_eq!(e.key, "sensors.range");
    }
}
