//! Legality checks for a placed layout: bounds, overlap, qubit spacing.

use crate::layout::Layout;
use crate::netlist::CompId;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Border,
    Overlap,
    QubitSpacing,
    Unplaced,
    /// Produced by the metrics module for overlays, never by validate().
    Hotspot,
    /// Produced by the metrics module for overlays, never by validate().
    Crossing,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Border => "border",
            ViolationKind::Overlap => "overlap",
            ViolationKind::QubitSpacing => "qubit-spacing",
            ViolationKind::Unplaced => "unplaced",
            ViolationKind::Hotspot => "hotspot",
            ViolationKind::Crossing => "crossing",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationEntry {
    pub kind: ViolationKind,
    pub components: Vec<CompId>,
    /// Cells outside for bounds, shared cells for overlap, missing gap for
    /// spacing, 1 for unplaced.
    pub magnitude: i64,
}

impl fmt::Display for ViolationEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{} [{}] magnitude {}", self.kind, comps.join(", "), self.magnitude)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViolationReport {
    pub entries: Vec<ViolationEntry>,
}

impl ViolationReport {
    pub fn is_legal(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.entries.iter().filter(|e| e.kind == kind).count()
    }
}

/// Full legality scan. Spacing uses Chebyshev gaps: two qubits need
/// max(gap_x, gap_y) >= s cells between their footprints. Overlapping qubit
/// pairs are reported once, as overlap only.
pub fn validate(layout: &Layout, qubit_spacing: i32) -> ViolationReport {
    let mut entries = Vec::new();

    for id in layout.comp_ids() {
        let Some(rect) = layout.rect(id) else {
            entries.push(ViolationEntry {
                kind: ViolationKind::Unplaced,
                components: vec![id],
                magnitude: 1,
            });
            continue;
        };
        let clipped = rect.clip(layout.width_cells, layout.height_cells);
        let outside = rect.area() - clipped.area();
        if outside > 0 {
            entries.push(ViolationEntry {
                kind: ViolationKind::Border,
                components: vec![id],
                magnitude: outside,
            });
        }
    }

    // overlap: group shared cells by unordered pair
    let mut pair_cells: HashMap<(CompId, CompId), i64> = HashMap::new();
    for occupants in layout.occupancy.values() {
        for i in 0..occupants.len() {
            for j in i + 1..occupants.len() {
                let key = (occupants[i], occupants[j]);
                *pair_cells.entry(key).or_insert(0) += 1;
            }
        }
    }
    let mut overlap_pairs: Vec<((CompId, CompId), i64)> = pair_cells.into_iter().collect();
    overlap_pairs.sort();
    for ((a, b), cells) in &overlap_pairs {
        entries.push(ViolationEntry {
            kind: ViolationKind::Overlap,
            components: vec![*a, *b],
            magnitude: *cells,
        });
    }

    // qubit spacing, skipping pairs already reported as overlapping
    let qs: Vec<_> = layout.net.qubits.iter().map(|q| q.id).collect();
    for i in 0..qs.len() {
        for j in i + 1..qs.len() {
            let (a, b) = (CompId::Qubit(qs[i]), CompId::Qubit(qs[j]));
            let (Some(ra), Some(rb)) = (layout.rect(a), layout.rect(b)) else {
                continue;
            };
            if overlap_pairs.iter().any(|((x, y), _)| (*x, *y) == (a, b)) {
                continue;
            }
            let (gx, gy) = ra.gaps(&rb);
            let gap = gx.max(gy);
            if gap < qubit_spacing {
                entries.push(ViolationEntry {
                    kind: ViolationKind::QubitSpacing,
                    components: vec![a, b],
                    magnitude: (qubit_spacing - gap) as i64,
                });
            }
        }
    }

    ViolationReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::CellPos;
    use crate::netlist::{EdgeDesc, NetGraph, QubitDesc};

    fn two_qubit_layout() -> Layout {
        let qubits = vec![
            QubitDesc { id: 0, freq_ghz: 5.0, size_um: (400.0, 400.0) },
            QubitDesc { id: 1, freq_ghz: 5.2, size_um: (400.0, 400.0) },
        ];
        let edges = vec![EdgeDesc {
            id: 0,
            q1: 0,
            q2: 1,
            freq_ghz: 6.5,
            length_um: 900.0,
            pad_um: 100.0,
        }];
        let net = NetGraph::build(&qubits, &edges, 300.0).unwrap();
        Layout::new(net, 300.0, 10, 10).unwrap()
    }

    fn place_all_legal(l: &mut Layout) {
        l.place(CompId::Qubit(crate::netlist::QubitId(0)), CellPos::new(0, 0));
        l.place(CompId::Qubit(crate::netlist::QubitId(1)), CellPos::new(6, 0));
        l.place(CompId::Block(crate::netlist::BlockId(0)), CellPos::new(3, 0));
    }

    #[test]
    fn legal_layout_reports_nothing() {
        let mut l = two_qubit_layout();
        place_all_legal(&mut l);
        let r = validate(&l, 2);
        assert!(r.is_legal(), "unexpected: {:?}", r.entries);
    }

    #[test]
    fn unplaced_components_are_reported() {
        let l = two_qubit_layout();
        let r = validate(&l, 2);
        assert_eq!(r.count(ViolationKind::Unplaced), 3);
    }

    #[test]
    fn coincident_qubits_overlap_four_cells() {
        let mut l = two_qubit_layout();
        l.place(CompId::Qubit(crate::netlist::QubitId(0)), CellPos::new(2, 2));
        l.place(CompId::Qubit(crate::netlist::QubitId(1)), CellPos::new(2, 2));
        l.place(CompId::Block(crate::netlist::BlockId(0)), CellPos::new(8, 8));
        let r = validate(&l, 2);
        let overlaps: Vec<_> = r
            .entries
            .iter()
            .filter(|e| e.kind == ViolationKind::Overlap)
            .collect();
        assert_eq!(overlaps.len(), 1);
        assert_eq!(overlaps[0].magnitude, 4);
        // overlapping pair is not double-reported as a spacing violation
        assert_eq!(r.count(ViolationKind::QubitSpacing), 0);
    }

    #[test]
    fn partial_qubit_overlap_counts_shared_cells() {
        let mut l = two_qubit_layout();
        l.place(CompId::Qubit(crate::netlist::QubitId(0)), CellPos::new(2, 2));
        l.place(CompId::Qubit(crate::netlist::QubitId(1)), CellPos::new(3, 3));
        l.place(CompId::Block(crate::netlist::BlockId(0)), CellPos::new(8, 8));
        let r = validate(&l, 2);
        let overlaps: Vec<_> = r
            .entries
            .iter()
            .filter(|e| e.kind == ViolationKind::Overlap)
            .collect();
        assert_eq!(overlaps.len(), 1);
        assert_eq!(overlaps[0].magnitude, 1);
    }

    #[test]
    fn spacing_violation_reports_missing_gap() {
        let mut l = two_qubit_layout();
        // gap of 1 cell in x, overlapping rows in y: chebyshev gap 1 < 2
        l.place(CompId::Qubit(crate::netlist::QubitId(0)), CellPos::new(0, 0));
        l.place(CompId::Qubit(crate::netlist::QubitId(1)), CellPos::new(3, 0));
        l.place(CompId::Block(crate::netlist::BlockId(0)), CellPos::new(8, 8));
        let r = validate(&l, 2);
        let sp: Vec<_> = r
            .entries
            .iter()
            .filter(|e| e.kind == ViolationKind::QubitSpacing)
            .collect();
        assert_eq!(sp.len(), 1);
        assert_eq!(sp[0].magnitude, 1);
    }

    #[test]
    fn diagonal_separation_satisfies_spacing() {
        let mut l = two_qubit_layout();
        // y gap is 2 even though x gap is 0
        l.place(CompId::Qubit(crate::netlist::QubitId(0)), CellPos::new(0, 0));
        l.place(CompId::Qubit(crate::netlist::QubitId(1)), CellPos::new(1, 4));
        l.place(CompId::Block(crate::netlist::BlockId(0)), CellPos::new(8, 8));
        let r = validate(&l, 2);
        assert_eq!(r.count(ViolationKind::QubitSpacing), 0);
    }

    #[test]
    fn out_of_bounds_counts_outside_cells() {
        let mut l = two_qubit_layout();
        // qubit is 2x2; anchor at (9,9) leaves 3 of 4 cells outside a 10x10 grid
        l.place(CompId::Qubit(crate::netlist::QubitId(0)), CellPos::new(9, 9));
        l.place(CompId::Qubit(crate::netlist::QubitId(1)), CellPos::new(0, 0));
        l.place(CompId::Block(crate::netlist::BlockId(0)), CellPos::new(5, 5));
        let r = validate(&l, 2);
        let oob: Vec<_> = r
            .entries
            .iter()
            .filter(|e| e.kind == ViolationKind::Border)
            .collect();
        assert_eq!(oob.len(), 1);
        assert_eq!(oob[0].magnitude, 3);
    }

    #[test]
    fn brute_force_overlap_agreement() {
        // place components on a small grid in a few fixed patterns and compare
        // the occupancy-derived overlap set against direct rect intersection
        let mut l = two_qubit_layout();
        let patterns: &[&[(i32, i32)]] = &[
            &[(0, 0), (1, 1), (4, 4)],
            &[(0, 0), (0, 0), (0, 0)],
            &[(2, 3), (3, 2), (2, 2)],
            &[(0, 0), (5, 5), (0, 1)],
        ];
        for pat in patterns {
            let ids = l.comp_ids();
            for (id, &(x, y)) in ids.iter().zip(pat.iter()) {
                l.place(*id, CellPos::new(x, y));
            }
            let r = validate(&l, 0);
            let mut expect = Vec::new();
            for i in 0..ids.len() {
                for j in i + 1..ids.len() {
                    let (ra, rb) = (l.rect(ids[i]).unwrap(), l.rect(ids[j]).unwrap());
                    let shared = ra.overlap_area(&rb);
                    if shared > 0 {
                        expect.push(((ids[i].min(ids[j]), ids[i].max(ids[j])), shared));
                    }
                }
            }
            expect.sort();
            let mut got: Vec<_> = r
                .entries
                .iter()
                .filter(|e| e.kind == ViolationKind::Overlap)
                .map(|e| ((e.components[0], e.components[1]), e.magnitude))
                .collect();
            got.sort();
            assert_eq!(got, expect, "pattern {:?}", pat);
        }
    }
}
