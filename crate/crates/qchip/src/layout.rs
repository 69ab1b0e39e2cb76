//! Substrate layout: grid dimensions, component positions, and the
//! cell-occupancy index kept in sync with them.

use crate::error::{Error, Result};
use crate::geom::{round_cell, CellPos, CellRect};
use crate::netlist::{BlockId, CompId, EdgeId, NetGraph, QubitId};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone)]
pub struct Layout {
    pub net: NetGraph,
    pub pitch_um: f64,
    pub width_cells: i32,
    pub height_cells: i32,
    qubit_pos: Vec<Option<CellPos>>,
    block_pos: Vec<Option<CellPos>>,
    /// Global-placement centers in um, kept for displacement targets and
    /// routing heuristics after legalization has moved things.
    pub qubit_gp: Vec<Option<(f64, f64)>>,
    pub block_gp: Vec<Option<(f64, f64)>>,
    /// Cell -> occupants. Illegal (overlapping) placements are representable;
    /// legality is a property checked by `validate`, not enforced here.
    pub(crate) occupancy: HashMap<CellPos, Vec<CompId>>,
    fixed: BTreeSet<CompId>,
    /// Ordered cell paths of edges re-routed by detailed placement.
    pub routed: BTreeMap<EdgeId, Vec<CellPos>>,
    /// Minimum qubit spacing achieved by the qubit legalizer, in cells.
    pub qubit_spacing_cells: Option<i32>,
}

/// Position snapshot used for revert and displacement accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placements {
    pub positions: BTreeMap<CompId, CellPos>,
}

impl Layout {
    pub fn new(net: NetGraph, pitch_um: f64, width_cells: i32, height_cells: i32) -> Result<Layout> {
        if !(pitch_um > 0.0) || width_cells <= 0 || height_cells <= 0 {
            return Err(Error::InvalidInput(format!(
                "bad substrate: {width_cells}x{height_cells} cells at pitch {pitch_um}"
            )));
        }
        let nq = net.qubits.len();
        let nb = net.blocks.len();
        Ok(Layout {
            net,
            pitch_um,
            width_cells,
            height_cells,
            qubit_pos: vec![None; nq],
            block_pos: vec![None; nb],
            qubit_gp: vec![None; nq],
            block_gp: vec![None; nb],
            occupancy: HashMap::new(),
            fixed: BTreeSet::new(),
            routed: BTreeMap::new(),
            qubit_spacing_cells: None,
        })
    }

    pub fn substrate_um(&self) -> (f64, f64) {
        (
            self.width_cells as f64 * self.pitch_um,
            self.height_cells as f64 * self.pitch_um,
        )
    }

    pub fn in_bounds(&self, c: CellPos) -> bool {
        c.x >= 0 && c.x < self.width_cells && c.y >= 0 && c.y < self.height_cells
    }

    pub fn footprint(&self, id: CompId) -> (i32, i32) {
        match id {
            CompId::Qubit(q) => self.net.qubit(q).footprint,
            CompId::Block(_) => (1, 1),
        }
    }

    pub fn pos(&self, id: CompId) -> Option<CellPos> {
        match id {
            CompId::Qubit(q) => self.qubit_pos[q.0 as usize],
            CompId::Block(b) => self.block_pos[b.0 as usize],
        }
    }

    /// Footprint rectangle at the component's current position.
    pub fn rect(&self, id: CompId) -> Option<CellRect> {
        let p = self.pos(id)?;
        let (w, h) = self.footprint(id);
        Some(CellRect::new(p.x, p.y, w, h))
    }

    pub fn gp_center_um(&self, id: CompId) -> Option<(f64, f64)> {
        match id {
            CompId::Qubit(q) => self.qubit_gp[q.0 as usize],
            CompId::Block(b) => self.block_gp[b.0 as usize],
        }
    }

    pub fn set_gp(&mut self, id: CompId, center_um: (f64, f64)) {
        match id {
            CompId::Qubit(q) => self.qubit_gp[q.0 as usize] = Some(center_um),
            CompId::Block(b) => self.block_gp[b.0 as usize] = Some(center_um),
        }
    }

    /// GP center converted to cell units.
    pub fn gp_cells(&self, id: CompId) -> Option<(f64, f64)> {
        let (x, y) = self.gp_center_um(id)?;
        Some((x / self.pitch_um, y / self.pitch_um))
    }

    /// Anchor cell nearest the GP center.
    pub fn gp_anchor(&self, id: CompId) -> Option<CellPos> {
        let (cx, cy) = self.gp_cells(id)?;
        let (w, h) = self.footprint(id);
        Some(CellPos::new(
            round_cell(cx - w as f64 / 2.0),
            round_cell(cy - h as f64 / 2.0),
        ))
    }

    /// Current center in um.
    pub fn center_um(&self, id: CompId) -> Option<(f64, f64)> {
        let r = self.rect(id)?;
        let (cx, cy) = r.center();
        Some((cx * self.pitch_um, cy * self.pitch_um))
    }

    pub fn contains(&self, id: CompId) -> bool {
        match id {
            CompId::Qubit(q) => (q.0 as usize) < self.net.qubits.len(),
            CompId::Block(b) => (b.0 as usize) < self.net.blocks.len(),
        }
    }

    /// Anchor whose footprint center lands nearest the given center.
    pub fn center_to_anchor(&self, id: CompId, center_um: (f64, f64)) -> CellPos {
        let (w, h) = self.footprint(id);
        CellPos::new(
            round_cell(center_um.0 / self.pitch_um - w as f64 / 2.0),
            round_cell(center_um.1 / self.pitch_um - h as f64 / 2.0),
        )
    }

    pub fn place(&mut self, id: CompId, anchor: CellPos) {
        self.remove(id);
        let (w, h) = self.footprint(id);
        for c in CellRect::new(anchor.x, anchor.y, w, h).cells() {
            let occ = self.occupancy.entry(c).or_default();
            let at = occ.partition_point(|&o| o < id);
            occ.insert(at, id);
        }
        match id {
            CompId::Qubit(q) => self.qubit_pos[q.0 as usize] = Some(anchor),
            CompId::Block(b) => self.block_pos[b.0 as usize] = Some(anchor),
        }
    }

    pub fn remove(&mut self, id: CompId) {
        let Some(r) = self.rect(id) else { return };
        for c in r.cells() {
            if let Some(occ) = self.occupancy.get_mut(&c) {
                occ.retain(|&o| o != id);
                if occ.is_empty() {
                    self.occupancy.remove(&c);
                }
            }
        }
        match id {
            CompId::Qubit(q) => self.qubit_pos[q.0 as usize] = None,
            CompId::Block(b) => self.block_pos[b.0 as usize] = None,
        }
    }

    pub fn occupants(&self, c: CellPos) -> &[CompId] {
        self.occupancy.get(&c).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Free means inside the substrate and unoccupied.
    pub fn is_free(&self, c: CellPos) -> bool {
        self.in_bounds(c) && !self.occupancy.contains_key(&c)
    }

    pub fn set_fixed(&mut self, id: CompId, fixed: bool) {
        if fixed {
            self.fixed.insert(id);
        } else {
            self.fixed.remove(&id);
        }
    }

    pub fn is_fixed(&self, id: CompId) -> bool {
        self.fixed.contains(&id)
    }

    /// All component ids, qubits first, each in id order.
    pub fn comp_ids(&self) -> Vec<CompId> {
        let qs = (0..self.net.qubits.len() as u32).map(|i| CompId::Qubit(QubitId(i)));
        let bs = (0..self.net.blocks.len() as u32).map(|i| CompId::Block(BlockId(i)));
        qs.chain(bs).collect()
    }

    pub fn placements(&self) -> Placements {
        let mut positions = BTreeMap::new();
        for id in self.comp_ids() {
            if let Some(p) = self.pos(id) {
                positions.insert(id, p);
            }
        }
        Placements { positions }
    }

    /// Restore a snapshot taken from this same layout.
    pub fn restore(&mut self, snap: &Placements) {
        let ids: Vec<CompId> = self.comp_ids();
        for id in ids {
            match snap.positions.get(&id) {
                Some(&p) => self.place(id, p),
                None => self.remove(id),
            }
        }
    }

    /// Rebuild the occupancy index from positions (consistency check aid).
    pub fn rebuild_occupancy(&self) -> HashMap<CellPos, Vec<CompId>> {
        let mut occ: HashMap<CellPos, Vec<CompId>> = HashMap::new();
        for id in self.comp_ids() {
            if let Some(r) = self.rect(id) {
                for c in r.cells() {
                    let v = occ.entry(c).or_default();
                    let at = v.partition_point(|&o| o < id);
                    v.insert(at, id);
                }
            }
        }
        occ
    }

    pub fn occupancy_matches_positions(&self) -> bool {
        self.rebuild_occupancy() == self.occupancy
    }
}
