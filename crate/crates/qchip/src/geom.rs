//! Cell-grid geometry. All legal positions live on a uniform grid with
//! pitch `pitch_um`; a cell is addressed by its lower-left corner index.

use serde::{Deserialize, Serialize};

/// Anchor of a component: the lower-left cell of its footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellPos {
    pub x: i32,
    pub y: i32,
}

impl CellPos {
    pub fn new(x: i32, y: i32) -> Self {
        CellPos { x, y }
    }

    pub fn neighbors4(self) -> [CellPos; 4] {
        [
            CellPos::new(self.x - 1, self.y),
            CellPos::new(self.x + 1, self.y),
            CellPos::new(self.x, self.y - 1),
            CellPos::new(self.x, self.y + 1),
        ]
    }

    /// Squared Euclidean distance from this cell's center to a point in
    /// cell units.
    pub fn center_dist2(self, tx: f64, ty: f64) -> f64 {
        let dx = self.x as f64 + 0.5 - tx;
        let dy = self.y as f64 + 0.5 - ty;
        dx * dx + dy * dy
    }
}

/// Axis-aligned cell rectangle: anchor plus width/height in cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRect {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

impl CellRect {
    pub fn new(x: i32, y: i32, w: i32, h: i32) -> Self {
        debug_assert!(w >= 0 && h >= 0);
        CellRect { x, y, w, h }
    }

    pub fn x1(&self) -> i32 {
        self.x + self.w
    }

    pub fn y1(&self) -> i32 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w as i64 * self.h as i64
    }

    pub fn contains(&self, c: CellPos) -> bool {
        c.x >= self.x && c.x < self.x1() && c.y >= self.y && c.y < self.y1()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellPos> + '_ {
        let (x0, y0, x1, y1) = (self.x, self.y, self.x1(), self.y1());
        (y0..y1).flat_map(move |y| (x0..x1).map(move |x| CellPos::new(x, y)))
    }

    pub fn intersect(&self, other: &CellRect) -> CellRect {
        let x = self.x.max(other.x);
        let y = self.y.max(other.y);
        let x1 = self.x1().min(other.x1());
        let y1 = self.y1().min(other.y1());
        CellRect::new(x, y, (x1 - x).max(0), (y1 - y).max(0))
    }

    /// Grow by `m` cells on every side.
    pub fn expand(&self, m: i32) -> CellRect {
        CellRect::new(self.x - m, self.y - m, self.w + 2 * m, self.h + 2 * m)
    }

    /// Clip to `[0,w) x [0,h)`.
    pub fn clip(&self, w: i32, h: i32) -> CellRect {
        self.intersect(&CellRect::new(0, 0, w, h))
    }

    /// Smallest rectangle covering both.
    pub fn union(&self, other: &CellRect) -> CellRect {
        if self.w == 0 || self.h == 0 {
            return *other;
        }
        if other.w == 0 || other.h == 0 {
            return *self;
        }
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        let x1 = self.x1().max(other.x1());
        let y1 = self.y1().max(other.y1());
        CellRect::new(x, y, x1 - x, y1 - y)
    }

    /// Signed separation along each axis: negative while the projections
    /// overlap, zero when edge-to-edge, positive once there is a gap.
    pub fn gaps(&self, other: &CellRect) -> (i32, i32) {
        let gx = (other.x - self.x1()).max(self.x - other.x1());
        let gy = (other.y - self.y1()).max(self.y - other.y1());
        (gx, gy)
    }

    /// Overlap area in cells^2 (0 when disjoint).
    pub fn overlap_area(&self, other: &CellRect) -> i64 {
        self.intersect(other).area()
    }

    /// Length of the shared boundary in cells: positive only when the
    /// rectangles touch edge-to-edge (corner contact counts as zero).
    pub fn shared_boundary_cells(&self, other: &CellRect) -> i32 {
        let (gx, gy) = self.gaps(other);
        if gx == 0 && gy < 0 {
            (self.y1().min(other.y1()) - self.y.max(other.y)).max(0)
        } else if gy == 0 && gx < 0 {
            (self.x1().min(other.x1()) - self.x.max(other.x)).max(0)
        } else {
            0
        }
    }

    /// Center in cell units.
    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }
}

/// Round half-up, used everywhere a continuous coordinate snaps to a cell.
pub fn round_cell(v: f64) -> i32 {
    (v + 0.5).floor() as i32
}
