//! Resonator wire-block legalization. Three engines share the same free-cell
//! index: the contiguity-aware engine walks edges atomically and grows each
//! edge from an adjacency frontier, the tetris engine drops blocks one by one
//! at the nearest free cell, and the abacus engine packs rows with quadratic
//! displacement clustering.

use crate::bin_index::BinIndex;
use crate::config::{EdgeOrder, ResLgConfig};
use crate::error::{Error, Result};
use crate::geom::CellPos;
use crate::layout::Layout;
use crate::netlist::{BlockId, CompId, EdgeId};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, Default)]
pub struct ResLgReport {
    pub placed: usize,
    /// Sum of Euclidean GP-to-cell distances, in cell units.
    pub displacement_cells: f64,
}

/// Free cells 4-adjacent to the blocks of the edge being grown. Rebuilt from
/// scratch for every edge.
#[derive(Debug, Default)]
pub struct AdjacencyFrontier {
    cells: BTreeSet<CellPos>,
}

impl AdjacencyFrontier {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// Frontier cell nearest the target (cell units); ties by smaller y,
    /// then smaller x.
    pub fn nearest(&self, tx: f64, ty: f64) -> Option<CellPos> {
        let mut best: Option<(f64, CellPos)> = None;
        for &c in &self.cells {
            let d2 = c.center_dist2(tx, ty);
            let better = match best {
                None => true,
                Some((bd2, bc)) => d2 < bd2 || (d2 == bd2 && (c.y, c.x) < (bc.y, bc.x)),
            };
            if better {
                best = Some((d2, c));
            }
        }
        best.map(|(_, c)| c)
    }

    /// Records a placement: the cell leaves the frontier, its free neighbors
    /// join it.
    pub fn advance(&mut self, placed: CellPos, index: &BinIndex) {
        self.cells.remove(&placed);
        for nb in placed.neighbors4() {
            if index.is_free(nb) {
                self.cells.insert(nb);
            }
        }
    }
}

/// Edge processing order for the contiguity-aware engine.
pub fn edge_order(layout: &Layout, cfg: &ResLgConfig) -> Vec<EdgeId> {
    let mut ids: Vec<EdgeId> = layout.net.edges.iter().map(|e| e.id).collect();
    match cfg.order {
        EdgeOrder::DescBlocks => {
            ids.sort_by_key(|&e| (std::cmp::Reverse(layout.net.edge(e).blocks.len()), e.0));
        }
        EdgeOrder::AscId => ids.sort_by_key(|&e| e.0),
    }
    ids
}

fn gp_target(layout: &Layout, id: CompId) -> Result<(f64, f64)> {
    layout
        .gp_cells(id)
        .ok_or_else(|| Error::InvalidInput(format!("{id} has no global-placement position")))
}

/// Clears any previous block placements and checks that qubits are down.
fn prepare(layout: &mut Layout) -> Result<()> {
    for q in &layout.net.qubits {
        if layout.pos(CompId::Qubit(q.id)).is_none() {
            return Err(Error::InvalidInput(format!(
                "qubit q{} must be placed before resonator legalization",
                q.id.0
            )));
        }
    }
    let placed: Vec<BlockId> = layout
        .net
        .blocks
        .iter()
        .map(|b| b.id)
        .filter(|&b| layout.pos(CompId::Block(b)).is_some())
        .collect();
    for b in placed {
        layout.remove(CompId::Block(b));
    }
    Ok(())
}

fn place_block(
    layout: &mut Layout,
    index: &mut BinIndex,
    block: BlockId,
    cell: CellPos,
    report: &mut ResLgReport,
) -> Result<()> {
    let (tx, ty) = gp_target(layout, CompId::Block(block))?;
    index.occupy(cell);
    layout.place(CompId::Block(block), cell);
    report.placed += 1;
    report.displacement_cells += cell.center_dist2(tx, ty).sqrt();
    Ok(())
}

/// Places every edge's blocks as one atomic group: the first block goes to
/// the free cell nearest the edge GP, every later block prefers the edge's
/// own adjacency frontier so the chain stays connected.
pub fn legalize_resonators(layout: &mut Layout, order: &[EdgeId]) -> Result<ResLgReport> {
    prepare(layout)?;
    let mut index = BinIndex::build(layout)?;
    let mut report = ResLgReport::default();
    for &eid in order {
        let blocks = layout.net.edge(eid).blocks.clone();
        let mut frontier = AdjacencyFrontier::default();
        for block in blocks {
            let (tx, ty) = gp_target(layout, CompId::Block(block))?;
            let cell = frontier
                .nearest(tx, ty)
                .or_else(|| index.nearest(tx, ty))
                .ok_or_else(|| {
                    Error::Capacity(format!(
                        "no free cell left while legalizing edge e{}",
                        eid.0
                    ))
                })?;
            place_block(layout, &mut index, block, cell, &mut report)?;
            frontier.advance(cell, &index);
        }
    }
    Ok(report)
}

/// Baseline: blocks in ascending GP x order, each to the nearest free cell.
pub fn tetris_legalize(layout: &mut Layout) -> Result<ResLgReport> {
    prepare(layout)?;
    let mut blocks: Vec<BlockId> = layout.net.blocks.iter().map(|b| b.id).collect();
    let mut keys = Vec::with_capacity(blocks.len());
    for &b in &blocks {
        keys.push(gp_target(layout, CompId::Block(b))?.0);
    }
    blocks.sort_by(|&a, &b| {
        let ka = keys[a.0 as usize];
        let kb = keys[b.0 as usize];
        ka.partial_cmp(&kb).unwrap().then(a.0.cmp(&b.0))
    });
    let mut index = BinIndex::build(layout)?;
    let mut report = ResLgReport::default();
    for block in blocks {
        let (tx, ty) = gp_target(layout, CompId::Block(block))?;
        let cell = index.nearest(tx, ty).ok_or_else(|| {
            Error::Capacity(format!("no free cell left for block b{}", block.0))
        })?;
        place_block(layout, &mut index, block, cell, &mut report)?;
    }
    Ok(report)
}

/// One maximal free run of cells inside a row, filled left to right by
/// clusters of abutting blocks.
#[derive(Debug, Clone)]
struct Segment {
    start: i32,
    end: i32,
    clusters: Vec<RowCluster>,
}

#[derive(Debug, Clone)]
struct RowCluster {
    /// Committed integer position of the leftmost block.
    x: i32,
    /// Sum of (target x - offset within cluster) over members.
    q: f64,
    targets: Vec<(BlockId, f64)>,
}

impl RowCluster {
    fn width(&self) -> i32 {
        self.targets.len() as i32
    }

    /// Quadratic x displacement at the committed position.
    fn cost(&self) -> f64 {
        self.targets
            .iter()
            .enumerate()
            .map(|(k, &(_, t))| {
                let d = (self.x + k as i32) as f64 + 0.5 - t;
                d * d
            })
            .sum()
    }

    /// Integer position minimizing the quadratic cost, clamped into the
    /// segment; exact ties resolve to the smaller x.
    fn settle(&mut self, seg_start: i32, seg_end: i32) {
        let n = self.targets.len() as f64;
        // targets are cell centers; the leftmost block center sits at x + 0.5
        let ideal = self.q / n - 0.5;
        let xf = ideal.floor();
        // cost(xf + 1) - cost(xf) = n * (2 xf + 1) - 2 (q/1 - 0.5 n) ...
        // compare directly instead of expanding the algebra
        let cost_at = |x: f64| {
            self.targets
                .iter()
                .enumerate()
                .map(|(k, &(_, t))| {
                    let d = x + k as f64 + 0.5 - t;
                    d * d
                })
                .sum::<f64>()
        };
        let x = if cost_at(xf + 1.0) < cost_at(xf) { xf as i32 + 1 } else { xf as i32 };
        self.x = x.clamp(seg_start, seg_end - self.width());
    }
}

impl Segment {
    fn free_capacity(&self) -> i32 {
        (self.end - self.start) - self.clusters.iter().map(RowCluster::width).sum::<i32>()
    }

    fn total_cost(&self) -> f64 {
        self.clusters.iter().map(RowCluster::cost).sum()
    }

    /// Appends a block (targets arrive in ascending x) and re-settles,
    /// merging clusters that collide, exactly the classic row-packing step.
    fn insert(&mut self, block: BlockId, tx: f64) {
        self.clusters.push(RowCluster { x: 0, q: tx, targets: vec![(block, tx)] });
        let last = self.clusters.len() - 1;
        self.clusters[last].settle(self.start, self.end);
        while self.clusters.len() > 1 {
            let last = self.clusters.len() - 1;
            let prev = last - 1;
            if self.clusters[prev].x + self.clusters[prev].width() <= self.clusters[last].x {
                break;
            }
            let right = self.clusters.pop().unwrap();
            let left = self.clusters.last_mut().unwrap();
            let shift = left.width() as f64;
            left.q += right.q - shift * right.targets.len() as f64;
            left.targets.extend(right.targets);
            left.settle(self.start, self.end);
        }
    }
}

/// Baseline: classic row-based legalization. Blocks arrive in ascending GP x
/// and each picks the row segment where its insertion (including any shifts
/// of already-packed neighbors) costs the least quadratic displacement.
pub fn abacus_legalize(layout: &mut Layout) -> Result<ResLgReport> {
    prepare(layout)?;
    let mut rows: Vec<Vec<Segment>> = Vec::with_capacity(layout.height_cells as usize);
    for y in 0..layout.height_cells {
        let mut segs = Vec::new();
        let mut start = None;
        for x in 0..=layout.width_cells {
            let free =
                x < layout.width_cells && layout.is_free(CellPos::new(x, y));
            match (free, start) {
                (true, None) => start = Some(x),
                (false, Some(s)) => {
                    segs.push(Segment { start: s, end: x, clusters: Vec::new() });
                    start = None;
                }
                _ => {}
            }
        }
        rows.push(segs);
    }

    let mut blocks: Vec<BlockId> = layout.net.blocks.iter().map(|b| b.id).collect();
    let mut keys = Vec::with_capacity(blocks.len());
    for &b in &blocks {
        keys.push(gp_target(layout, CompId::Block(b))?.0);
    }
    blocks.sort_by(|&a, &b| {
        let ka = keys[a.0 as usize];
        let kb = keys[b.0 as usize];
        ka.partial_cmp(&kb).unwrap().then(a.0.cmp(&b.0))
    });

    for block in blocks {
        let (tx, ty) = gp_target(layout, CompId::Block(block))?;
        let mut best: Option<(f64, usize, usize)> = None;
        for (y, segs) in rows.iter().enumerate() {
            let dy = y as f64 + 0.5 - ty;
            if let Some((bc, _, _)) = best {
                if dy * dy >= bc {
                    continue;
                }
            }
            for (si, seg) in segs.iter().enumerate() {
                if seg.free_capacity() < 1 {
                    continue;
                }
                let mut trial = seg.clone();
                let before = trial.total_cost();
                trial.insert(block, tx);
                let cost = trial.total_cost() - before + dy * dy;
                if best.map_or(true, |(bc, _, _)| cost < bc) {
                    best = Some((cost, y, si));
                }
            }
        }
        let (_, y, si) = best.ok_or_else(|| {
            Error::Capacity(format!("no row capacity left for block b{}", block.0))
        })?;
        rows[y][si].insert(block, tx);
    }

    let mut report = ResLgReport::default();
    for (y, segs) in rows.iter().enumerate() {
        for seg in segs {
            for cluster in &seg.clusters {
                for (k, &(block, _)) in cluster.targets.iter().enumerate() {
                    let cell = CellPos::new(cluster.x + k as i32, y as i32);
                    debug_assert!(layout.is_free(cell), "abacus packed onto {cell:?}");
                    let (tx, ty) = gp_target(layout, CompId::Block(block))?;
                    layout.place(CompId::Block(block), cell);
                    report.placed += 1;
                    report.displacement_cells += cell.center_dist2(tx, ty).sqrt();
                }
            }
        }
    }
    Ok(report)
}
