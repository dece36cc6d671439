/// A point in world coordinates. One unit is one map pixel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        libm::sqrt(self.dist_sq(other))
    }

    /// The point `t` units from `self` along heading `angle`.
    #[inline]
    pub fn offset(self, angle: f64, t: f64) -> Point {
        Point::new(self.x + t * libm::cos(angle), self.y + t * libm::sin(angle))
    }
}
