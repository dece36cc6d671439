//! Uniform-grid spatial index over robot centers.
//!
//! Buckets cover the bounding box of the positions the index was built from.
//! Bucket coordinates are `floor(p / cell_size)` clamped onto that box, so a
//! robot that later moves outside the box lands in an edge bucket and every
//! query stays exact.

use alloc::vec::Vec;

use crate::geom::Point;

/// Upper bound on buckets per axis; beyond it the edge buckets absorb the rest.
const MAX_BUCKETS_PER_AXIS: i64 = 1024;

#[derive(Debug, Clone)]
pub struct RobotIndex {
    cell_size: f64,
    origin: (i64, i64),
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
    positions: Vec<Point>,
    slots: Vec<usize>,
}

impl RobotIndex {
    /// Index over `positions`; robot `i` is at `positions[i]`.
    pub fn build(positions: &[Point], cell_size: f64) -> Self {
        let mut index = RobotIndex::with_extent(cell_size, Point::default(), Point::default());
        index.rebuild(positions);
        index
    }

    /// Empty index whose buckets span the box `[min, max]`. Robots are added
    /// with [`RobotIndex::insert`].
    pub fn with_extent(cell_size: f64, min: Point, max: Point) -> Self {
        assert!(
            cell_size > 0.0 && cell_size.is_finite(),
            "cell_size must be positive"
        );
        let mut index = RobotIndex {
            cell_size,
            origin: (0, 0),
            cols: 0,
            rows: 0,
            buckets: Vec::new(),
            positions: Vec::new(),
            slots: Vec::new(),
        };
        index.reshape(min, max);
        index
    }

    fn reshape(&mut self, min: Point, max: Point) {
        let (x0, y0) = self.raw_coord(min);
        let (x1, y1) = self.raw_coord(max);
        let cols = (x1.saturating_sub(x0).saturating_add(1)).clamp(1, MAX_BUCKETS_PER_AXIS);
        let rows = (y1.saturating_sub(y0).saturating_add(1)).clamp(1, MAX_BUCKETS_PER_AXIS);
        self.origin = (x0, y0);
        self.cols = cols as usize;
        self.rows = rows as usize;
        let n = self.cols * self.rows;
        self.buckets.iter_mut().for_each(Vec::clear);
        self.buckets.resize_with(n, Vec::new);
    }

    /// Discards all robots and indexes `positions` from scratch.
    pub fn rebuild(&mut self, positions: &[Point]) {
        self.positions.clear();
        self.slots.clear();
        if positions.is_empty() {
            self.cols = 0;
            self.rows = 0;
            self.buckets.clear();
            return;
        }
        let mut min = positions[0];
        let mut max = positions[0];
        for p in positions {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        self.reshape(min, max);
        for &p in positions {
            self.push(p);
        }
    }

    /// Adds the next robot; its id is the current robot count.
    pub fn insert(&mut self, p: Point) -> u32 {
        assert!(self.cols > 0, "insert into an index without buckets");
        self.push(p)
    }

    fn push(&mut self, p: Point) -> u32 {
        let id = self.positions.len() as u32;
        let slot = self.slot_of(p);
        // ids arrive in increasing order, so push keeps buckets sorted.
        self.buckets[slot].push(id);
        self.positions.push(p);
        self.slots.push(slot);
        id
    }

    /// Moves robot `id` to `p`, keeping bucket lists sorted.
    pub fn move_to(&mut self, id: u32, p: Point) {
        let i = id as usize;
        self.positions[i] = p;
        let new_slot = self.slot_of(p);
        let old_slot = self.slots[i];
        if new_slot == old_slot {
            return;
        }
        let old = &mut self.buckets[old_slot];
        if let Ok(k) = old.binary_search(&id) {
            old.remove(k);
        }
        let new = &mut self.buckets[new_slot];
        let k = new.binary_search(&id).unwrap_or_else(|k| k);
        new.insert(k, id);
        self.slots[i] = new_slot;
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, id: u32) -> Point {
        self.positions[id as usize]
    }

    #[inline]
    fn raw_coord(&self, p: Point) -> (i64, i64) {
        (
            libm::floor(p.x / self.cell_size) as i64,
            libm::floor(p.y / self.cell_size) as i64,
        )
    }

    /// Bucket coordinate of `p`: floor division clamped onto the grid.
    pub fn bucket_coord(&self, p: Point) -> (i64, i64) {
        let (bx, by) = self.raw_coord(p);
        (
            bx.clamp(self.origin.0, self.origin.0 + self.cols as i64 - 1),
            by.clamp(self.origin.1, self.origin.1 + self.rows as i64 - 1),
        )
    }

    #[inline]
    fn slot_of(&self, p: Point) -> usize {
        let (bx, by) = self.bucket_coord(p);
        (by - self.origin.1) as usize * self.cols + (bx - self.origin.0) as usize
    }

    /// Ids in bucket `(bx, by)`, ascending. Empty outside the grid.
    pub fn bucket(&self, bx: i64, by: i64) -> &[u32] {
        let cx = bx - self.origin.0;
        let cy = by - self.origin.1;
        if cx < 0 || cy < 0 || cx >= self.cols as i64 || cy >= self.rows as i64 {
            return &[];
        }
        &self.buckets[cy as usize * self.cols + cx as usize]
    }

    /// Non-empty buckets in row-major order.
    pub fn buckets(&self) -> impl Iterator<Item = ((i64, i64), &[u32])> + '_ {
        self.buckets
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_empty())
            .map(|(k, b)| {
                let bx = self.origin.0 + (k % self.cols) as i64;
                let by = self.origin.1 + (k / self.cols) as i64;
                ((bx, by), b.as_slice())
            })
    }

    /// Visits every robot whose bucket intersects the box `[min, max]`.
    /// Callers filter by exact geometry.
    pub fn for_each_in_box(&self, min: Point, max: Point, mut f: impl FnMut(u32, Point)) {
        if self.cols == 0 {
            return;
        }
        let (x0, y0) = self.bucket_coord(min);
        let (x1, y1) = self.bucket_coord(max);
        for by in y0..=y1 {
            let row = (by - self.origin.1) as usize * self.cols;
            for bx in x0..=x1 {
                for &id in &self.buckets[row + (bx - self.origin.0) as usize] {
                    f(id, self.positions[id as usize]);
                }
            }
        }
    }

    /// Visits every robot with center distance `<= d` from `p`, in bucket order.
    pub fn for_each_within(&self, p: Point, d: f64, exclude: Option<u32>, mut f: impl FnMut(u32)) {
        let d_sq = d * d;
        let min = Point::new(p.x - d, p.y - d);
        let max = Point::new(p.x + d, p.y + d);
        self.for_each_in_box(min, max, |id, q| {
            if Some(id) != exclude && p.dist_sq(q) <= d_sq {
                f(id);
            }
        });
    }

    /// Ids whose center distance to `p` is `<= d`, minus `exclude`, ascending.
    pub fn neighbors_within(&self, p: Point, d: f64, exclude: Option<u32>) -> Vec<u32> {
        let mut out = Vec::new();
        self.for_each_within(p, d, exclude, |id| out.push(id));
        out.sort_unstable();
        out
    }
}
