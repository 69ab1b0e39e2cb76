//! Row-organized free-cell index. Each row keeps its free cells as sorted
//! disjoint x-intervals in a BTreeMap, so a nearest-free-cell query only
//! touches rows in increasing vertical distance and a constant number of
//! intervals per row.

use crate::error::{Error, Result};
use crate::geom::CellPos;
use crate::layout::Layout;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct BinIndex {
    /// rows[y]: interval start -> end (exclusive) of free cells.
    rows: Vec<BTreeMap<i32, i32>>,
    width: i32,
    free: usize,
}

impl BinIndex {
    /// Indexes every unoccupied in-bounds cell of the layout.
    pub fn build(layout: &Layout) -> Result<BinIndex> {
        let mut rows = Vec::with_capacity(layout.height_cells as usize);
        let mut free = 0usize;
        for y in 0..layout.height_cells {
            let mut row = BTreeMap::new();
            let mut start = None;
            for x in 0..=layout.width_cells {
                let cell_free =
                    x < layout.width_cells && layout.occupants(CellPos::new(x, y)).is_empty();
                match (cell_free, start) {
                    (true, None) => start = Some(x),
                    (false, Some(s)) => {
                        row.insert(s, x);
                        free += (x - s) as usize;
                        start = None;
                    }
                    _ => {}
                }
            }
            rows.push(row);
        }
        if free == 0 {
            return Err(Error::Capacity("no free cells on the substrate".into()));
        }
        Ok(BinIndex { rows, width: layout.width_cells, free })
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn is_free(&self, c: CellPos) -> bool {
        if c.y < 0 || c.y >= self.rows.len() as i32 || c.x < 0 || c.x >= self.width {
            return false;
        }
        match self.rows[c.y as usize].range(..=c.x).next_back() {
            Some((_, &end)) => c.x < end,
            None => false,
        }
    }

    /// Marks a free cell as occupied.
    pub fn occupy(&mut self, c: CellPos) {
        assert!(self.is_free(c), "occupy on non-free cell {c:?}");
        let row = &mut self.rows[c.y as usize];
        let (&s, &e) = row.range(..=c.x).next_back().unwrap();
        row.remove(&s);
        if s < c.x {
            row.insert(s, c.x);
        }
        if c.x + 1 < e {
            row.insert(c.x + 1, e);
        }
        self.free -= 1;
    }

    /// Marks an occupied in-bounds cell as free again.
    pub fn release(&mut self, c: CellPos) {
        assert!(
            c.y >= 0 && c.y < self.rows.len() as i32 && c.x >= 0 && c.x < self.width,
            "release outside substrate {c:?}"
        );
        assert!(!self.is_free(c), "release on free cell {c:?}");
        let row = &mut self.rows[c.y as usize];
        let left = row
            .range(..=c.x)
            .next_back()
            .filter(|&(_, &e)| e == c.x)
            .map(|(&s, _)| s);
        let right = row.get(&(c.x + 1)).copied();
        let start = left.unwrap_or(c.x);
        let end = right.unwrap_or(c.x + 1);
        if left.is_some() {
            row.remove(&start);
        }
        if right.is_some() {
            row.remove(&(c.x + 1));
        }
        row.insert(start, end);
        self.free += 1;
    }

    /// Free cell whose center minimizes squared Euclidean distance to the
    /// target (in cell units); ties by smaller y, then smaller x.
    pub fn nearest(&self, tx: f64, ty: f64) -> Option<CellPos> {
        if self.free == 0 {
            return None;
        }
        let h = self.rows.len() as i32;
        let y0 = ((ty - 0.5).floor() as i32).clamp(0, h - 1);
        let mut best: Option<(f64, CellPos)> = None;
        // visit rows outward; on equal vertical distance, smaller y first
        let mut lo = y0;
        let mut hi = y0 + 1;
        loop {
            let dlo = if lo >= 0 { (lo as f64 + 0.5 - ty).abs() } else { f64::INFINITY };
            let dhi = if hi < h { (hi as f64 + 0.5 - ty).abs() } else { f64::INFINITY };
            let y = if dlo <= dhi {
                if lo < 0 {
                    break;
                }
                let y = lo;
                lo -= 1;
                y
            } else {
                let y = hi;
                hi += 1;
                y
            };
            let dy = y as f64 + 0.5 - ty;
            if let Some((bd2, _)) = best {
                if dy * dy >= bd2 {
                    break;
                }
            }
            for x in self.row_candidates(y, tx) {
                let c = CellPos::new(x, y);
                let d2 = c.center_dist2(tx, ty);
                let better = match best {
                    None => true,
                    Some((bd2, bc)) => {
                        d2 < bd2 || (d2 == bd2 && (c.y, c.x) < (bc.y, bc.x))
                    }
                };
                if better {
                    best = Some((d2, c));
                }
            }
        }
        best.map(|(_, c)| c)
    }

    /// Up to four cells in the row that can be nearest to tx: the two cells
    /// straddling the target in the containing/left interval plus the first
    /// cell of the interval to the right.
    fn row_candidates(&self, y: i32, tx: f64) -> Vec<i32> {
        let row = &self.rows[y as usize];
        let xq = (tx - 0.5).floor() as i32;
        let mut out = Vec::with_capacity(4);
        if let Some((&s, &e)) = row.range(..=xq.max(i32::MIN + 1)).next_back() {
            for cand in [xq.clamp(s, e - 1), (xq + 1).clamp(s, e - 1)] {
                if !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
        if let Some((&s, _)) = row.range(xq.saturating_add(1)..).next() {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{EdgeDesc, NetGraph, QubitDesc};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn empty_layout(cells: i32) -> Layout {
        let qubits = vec![QubitDesc { id: 0, freq_ghz: 5.0, size_um: (400.0, 400.0) }];
        let net = NetGraph::build(&qubits, &[] as &[EdgeDesc], 300.0).unwrap();
        Layout::new(net, 300.0, cells, cells).unwrap()
    }

    fn linear_scan(layout_free: &dyn Fn(CellPos) -> bool, w: i32, h: i32, tx: f64, ty: f64) -> Option<CellPos> {
        let mut best: Option<(f64, CellPos)> = None;
        for y in 0..h {
            for x in 0..w {
                let c = CellPos::new(x, y);
                if !layout_free(c) {
                    continue;
                }
                let d2 = c.center_dist2(tx, ty);
                let better = match best {
                    None => true,
                    Some((bd2, bc)) => d2 < bd2 || (d2 == bd2 && (c.y, c.x) < (bc.y, bc.x)),
                };
                if better {
                    best = Some((d2, c));
                }
            }
        }
        best.map(|(_, c)| c)
    }

    #[test]
    fn empty_substrate_has_one_interval_per_row() {
        let l = empty_layout(4);
        let idx = BinIndex::build(&l).unwrap();
        assert_eq!(idx.free_count(), 16);
        for y in 0..4 {
            assert_eq!(idx.rows[y].len(), 1);
            assert_eq!(idx.rows[y].get(&0), Some(&4));
        }
    }

    #[test]
    fn fixed_qubit_at_origin_trims_two_rows() {
        let mut l = empty_layout(4);
        l.place(crate::netlist::CompId::Qubit(crate::netlist::QubitId(0)), CellPos::new(0, 0));
        let idx = BinIndex::build(&l).unwrap();
        assert_eq!(idx.rows[0].get(&2), Some(&4));
        assert_eq!(idx.rows[1].get(&2), Some(&4));
        assert_eq!(idx.rows[0].get(&0), None);
        assert_eq!(idx.free_count(), 12);
    }

    #[test]
    fn full_substrate_is_an_error() {
        let mut l = empty_layout(2);
        l.place(crate::netlist::CompId::Qubit(crate::netlist::QubitId(0)), CellPos::new(0, 0));
        assert!(matches!(BinIndex::build(&l), Err(Error::Capacity(_))));
    }

    #[test]
    fn occupy_and_release_maintain_intervals() {
        let l = empty_layout(3);
        let mut idx = BinIndex::build(&l).unwrap();
        idx.occupy(CellPos::new(1, 1));
        assert!(!idx.is_free(CellPos::new(1, 1)));
        assert_eq!(idx.rows[1].get(&0), Some(&1));
        assert_eq!(idx.rows[1].get(&2), Some(&3));
        idx.release(CellPos::new(1, 1));
        assert_eq!(idx.rows[1].len(), 1);
        assert_eq!(idx.rows[1].get(&0), Some(&3));
        assert_eq!(idx.free_count(), 9);
    }

    #[test]
    fn nearest_prefers_smaller_y_then_x_on_ties() {
        let l = empty_layout(5);
        let idx = BinIndex::build(&l).unwrap();
        // exact center of the grid: four cells tie
        assert_eq!(idx.nearest(2.5, 2.5), Some(CellPos::new(2, 2)));
        // between two cells horizontally
        assert_eq!(idx.nearest(3.0, 0.5), Some(CellPos::new(2, 0)));
        // between two rows
        assert_eq!(idx.nearest(0.5, 3.0), Some(CellPos::new(0, 2)));
    }

    #[test]
    fn randomized_queries_match_linear_scan() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..20 {
            let l = empty_layout(12);
            let mut idx = BinIndex::build(&l).unwrap();
            let mut occupied = std::collections::HashSet::new();
            for _ in 0..60 {
                let c = CellPos::new(rng.gen_range(0..12), rng.gen_range(0..12));
                if occupied.insert(c) {
                    idx.occupy(c);
                }
            }
            for _ in 0..50 {
                let tx = rng.gen_range(-2.0..14.0);
                let ty = rng.gen_range(-2.0..14.0);
                let is_free = |c: CellPos| !occupied.contains(&c);
                let want = linear_scan(&is_free, 12, 12, tx, ty);
                assert_eq!(idx.nearest(tx, ty), want, "target ({tx}, {ty})");
            }
        }
    }
}
