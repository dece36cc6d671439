//! Static occupancy grid. One cell is one pixel is one world unit.

use alloc::vec::Vec;

use crate::geom::Point;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("map dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("occupancy has {got} cells, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

/// Immutable free/obstacle grid. Everything outside the grid is an obstacle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    obstacles: Vec<bool>,
}

impl GridMap {
    /// Row-major occupancy, `true` = obstacle.
    pub fn new(width: usize, height: usize, obstacles: Vec<bool>) -> Result<Self, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::EmptyDimensions { width, height });
        }
        let expected = width * height;
        if obstacles.len() != expected {
            return Err(MapError::SizeMismatch {
                expected,
                got: obstacles.len(),
            });
        }
        Ok(GridMap {
            width,
            height,
            obstacles,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, MapError> {
        let mut obstacles = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                obstacles.push(f(x, y));
            }
        }
        GridMap::new(width, height, obstacles)
    }

    /// Empty arena enclosed by a one-pixel obstacle border.
    pub fn walled_arena(width: usize, height: usize) -> Result<Self, MapError> {
        GridMap::from_fn(width, height, |x, y| {
            x == 0 || y == 0 || x + 1 == width || y + 1 == height
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn obstacles(&self) -> &[bool] {
        &self.obstacles
    }

    /// Occupancy of cell `(cx, cy)`; any out-of-range cell is an obstacle.
    #[inline]
    pub fn is_obstacle(&self, cx: i64, cy: i64) -> bool {
        if cx < 0 || cy < 0 || cx >= self.width as i64 || cy >= self.height as i64 {
            return true;
        }
        self.obstacles[cy as usize * self.width + cx as usize]
    }

    /// Number of free cells.
    pub fn free_cells(&self) -> usize {
        self.obstacles.iter().filter(|o| !**o).count()
    }

    /// True iff no obstacle cell has its center within distance `r` of
    /// `center`. Cells outside the grid count as obstacles.
    pub fn disc_free(&self, center: Point, r: f64) -> bool {
        let r_sq = r * r;
        let x0 = libm::ceil(center.x - r - 0.5) as i64;
        let x1 = libm::floor(center.x + r - 0.5) as i64;
        let y0 = libm::ceil(center.y - r - 0.5) as i64;
        let y1 = libm::floor(center.y + r - 0.5) as i64;
        for cy in y0..=y1 {
            let dy = cy as f64 + 0.5 - center.y;
            for cx in x0..=x1 {
                let dx = cx as f64 + 0.5 - center.x;
                if dx * dx + dy * dy <= r_sq && self.is_obstacle(cx, cy) {
                    return false;
                }
            }
        }
        true
    }
}
