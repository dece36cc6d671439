//! Binary PPM (P6) snapshots of a simulation state.

use swarmgrid_core::rng::SplitMix64;
use swarmgrid_core::sensing::{cast_ray, ray_origin};
use swarmgrid_core::{SensorSpec, SimState};

const WHITE: [u8; 3] = [255, 255, 255];
const BLACK: [u8; 3] = [0, 0, 0];
const RAY: [u8; 3] = [128, 128, 128];

/// Deterministic per-robot color, never close to white.
pub fn robot_color(id: u32) -> [u8; 3] {
    let bits = SplitMix64::new(id as u64).next_u64();
    let mut c = [bits as u8, (bits >> 8) as u8, (bits >> 16) as u8];
    if c.iter().all(|&v| v > 200) {
        c.iter_mut().for_each(|v| *v /= 2);
    }
    c
}

pub fn ppm_header(width: usize, height: usize) -> String {
    format!("P6\n{width} {height}\n255\n")
}

struct Canvas {
    width: usize,
    height: usize,
    rgb: Vec<u8>,
}

impl Canvas {
    fn put(&mut self, x: i64, y: i64, c: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = 3 * (y as usize * self.width + x as usize);
        self.rgb[i..i + 3].copy_from_slice(&c);
    }

    /// Bresenham between pixel centers containing the endpoints.
    fn line(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, c: [u8; 3]) {
        let (mut x, mut y) = (x0.floor() as i64, y0.floor() as i64);
        let (xe, ye) = (x1.floor() as i64, y1.floor() as i64);
        let dx = (xe - x).abs();
        let dy = -(ye - y).abs();
        let sx = if x < xe { 1 } else { -1 };
        let sy = if y < ye { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.put(x, y, c);
            if x == xe && y == ye {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }
}

/// Renders the map (obstacles black, free white), optional sensor rays in
/// gray, then every robot as a filled disc of pixels whose centers lie
/// within its radius.
pub fn render_frame(state: &SimState, sensors: &SensorSpec, draw_rays: bool) -> Vec<u8> {
    let (w, h) = (state.map.width(), state.map.height());
    let mut canvas = Canvas {
        width: w,
        height: h,
        rgb: Vec::with_capacity(3 * w * h),
    };
    for &obstacle in state.map.obstacles() {
        canvas
            .rgb
            .extend_from_slice(if obstacle { &BLACK } else { &WHITE });
    }
    if draw_rays {
        for body in &state.bodies {
            for &angle in &sensors.angles {
                let (origin, dir) = ray_origin(body, angle);
                let hit = cast_ray(
                    &state.map,
                    &state.index,
                    origin,
                    dir,
                    sensors.range,
                    body.radius,
                    Some(body.id),
                );
                let end = origin.offset(dir, hit.dist);
                canvas.line(origin.x, origin.y, end.x, end.y, RAY);
            }
        }
    }
    for body in &state.bodies {
        let color = robot_color(body.id);
        let (cx, cy, r) = (body.pose.x, body.pose.y, body.radius);
        let r_sq = r * r;
        let x0 = (cx - r - 0.5).ceil() as i64;
        let x1 = (cx + r - 0.5).floor() as i64;
        let y0 = (cy - r - 0.5).ceil() as i64;
        let y1 = (cy + r - 0.5).floor() as i64;
        for py in y0..=y1 {
            for px in x0..=x1 {
                let dx = px as f64 + 0.5 - cx;
                let dy = py as f64 + 0.5 - cy;
                if dx * dx + dy * dy <= r_sq {
                    canvas.put(px, py, color);
                }
            }
        }
    }
    let mut out = ppm_header(w, h).into_bytes();
    out.extend_from_slice(&canvas.rgb);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use swarmgrid_core::engine::{Engine, EngineConfig, SpawnSpec};
    use swarmgrid_core::{GridMap, Limits, RandomWalk};

    fn engine(map: GridMap, robots: usize) -> Engine {
        let limits = Limits {
            v_max: 2.0,
            w_max: 0.3,
        };
        let cfg = EngineConfig {
            seed: 4,
            spawn: SpawnSpec {
                count: robots,
                radius: 4.0,
                positions: None,
            },
            sensors: SensorSpec::evenly_spaced(8, 64.0),
            limits,
            cell_size: None,
            payload_cap: 4096,
        };
        Engine::new(map, &cfg, Box::new(RandomWalk::new(limits))).unwrap()
    }

    #[test]
    fn single_free_pixel() {
        let e = engine(GridMap::new(1, 1, vec![false]).unwrap(), 0);
        let bytes = render_frame(e.state(), e.sensors(), true);
        let mut expected = b"P6\n1 1\n255\n".to_vec();
        expected.extend_from_slice(&[255, 255, 255]);
        assert_eq!(bytes, expected);
    }

    #[test]
    fn deterministic_and_sized() {
        let mut e = engine(GridMap::walled_arena(120, 80).unwrap(), 20);
        e.run(5).unwrap();
        let a = render_frame(e.state(), e.sensors(), true);
        let b = render_frame(e.state(), e.sensors(), true);
        assert_eq!(a, b);
        assert_eq!(a.len(), ppm_header(120, 80).len() + 3 * 120 * 80);
    }

    #[test]
    fn colors_avoid_white() {
        for id in 0..10_000 {
            let c = robot_color(id);
            assert!(!c.iter().all(|&v| v > 200));
        }
    }

    #[test]
    fn rays_are_gray() {
        let e = engine(GridMap::walled_arena(100, 100).unwrap(), 1);
        let plain = render_frame(e.state(), e.sensors(), false);
        let rays = render_frame(e.state(), e.sensors(), true);
        let gray = |img: &[u8]| {
            img[ppm_header(100, 100).len()..]
                .chunks(3)
                .filter(|p| *p == RAY)
                .count()
        };
        assert_eq!(gray(&plain), 0);
        assert!(gray(&rays) > 8);
    }
}
