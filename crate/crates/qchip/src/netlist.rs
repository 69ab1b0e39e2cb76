//! Quantum netlist: qubits, resonator edges, and the wire blocks each
//! resonator is partitioned into.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockId(pub u32);

/// Any placeable component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CompId {
    Qubit(QubitId),
    Block(BlockId),
}

impl std::fmt::Display for CompId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompId::Qubit(q) => write!(f, "q{}", q.0),
            CompId::Block(b) => write!(f, "b{}", b.0),
        }
    }
}

/// Endpoint of a pseudo-connection net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PinRef {
    Qubit(QubitId),
    Block(BlockId),
}

#[derive(Debug, Clone)]
pub struct Qubit {
    pub id: QubitId,
    pub freq_ghz: f64,
    /// Physical size in um.
    pub size_um: (f64, f64),
    /// Grid footprint in cells, ceil(size / pitch) per axis.
    pub footprint: (i32, i32),
}

#[derive(Debug, Clone)]
pub struct ResonatorEdge {
    pub id: EdgeId,
    pub endpoints: (QubitId, QubitId),
    pub freq_ghz: f64,
    pub length_um: f64,
    pub pad_um: f64,
    /// Wire blocks in raster order.
    pub blocks: Vec<BlockId>,
    /// Artificial nets biasing global placement toward a compact raster.
    pub pseudo_pins: Vec<(PinRef, PinRef)>,
}

/// One grid cell of a partitioned resonator.
#[derive(Debug, Clone)]
pub struct WireBlock {
    pub id: BlockId,
    pub parent: EdgeId,
    pub index: u32,
    pub freq_ghz: f64,
}

/// Number of wire blocks a resonator reserves: the padded wire area
/// `pad * length` divided into `cell^2` units, rounded up so the reserved
/// area never under-provisions the wire.
pub fn partition_resonator(length_um: f64, pad_um: f64, cell_um: f64) -> Result<u32> {
    if !(length_um > 0.0) || !(pad_um > 0.0) || !(cell_um > 0.0) {
        return Err(Error::InvalidInput(format!(
            "partition_resonator arguments must be positive (length {length_um}, pad {pad_um}, cell {cell_um})"
        )));
    }
    let n = (pad_um * length_um / (cell_um * cell_um)).ceil();
    Ok((n as u32).max(1))
}

/// Raster shape for `n` blocks: near-square, `ceil(sqrt(n))` columns,
/// row-major.
pub fn raster_shape(n: u32) -> (u32, u32) {
    let cols = (n as f64).sqrt().ceil() as u32;
    let rows = n.div_ceil(cols);
    (cols, rows)
}

/// Raster coordinates (col, row) of block `index`.
pub fn raster_slot(n: u32, index: u32) -> (u32, u32) {
    let (cols, _) = raster_shape(n);
    (index % cols, index / cols)
}

/// Pseudo-connection pin pairs for an edge: every 4-adjacent pair on the
/// block raster, plus one pair tying each endpoint qubit to a raster corner
/// (first block for one qubit, last block for the other). The resulting net
/// spans both qubits and every block.
pub fn pseudo_connect(edge: &ResonatorEdge) -> Vec<(PinRef, PinRef)> {
    let n = edge.blocks.len() as u32;
    assert!(n >= 1, "edge {} has no blocks", edge.id.0);
    let (cols, _) = raster_shape(n);
    let mut pins = Vec::new();
    for k in 0..n {
        let col = k % cols;
        if col + 1 < cols && k + 1 < n {
            pins.push((
                PinRef::Block(edge.blocks[k as usize]),
                PinRef::Block(edge.blocks[(k + 1) as usize]),
            ));
        }
        if k + cols < n {
            pins.push((
                PinRef::Block(edge.blocks[k as usize]),
                PinRef::Block(edge.blocks[(k + cols) as usize]),
            ));
        }
    }
    pins.push((PinRef::Qubit(edge.endpoints.0), PinRef::Block(edge.blocks[0])));
    pins.push((
        PinRef::Qubit(edge.endpoints.1),
        PinRef::Block(edge.blocks[n as usize - 1]),
    ));
    pins
}

/// Full netlist with derived wire blocks.
#[derive(Debug, Clone, Default)]
pub struct NetGraph {
    pub qubits: Vec<Qubit>,
    pub edges: Vec<ResonatorEdge>,
    pub blocks: Vec<WireBlock>,
    /// Abstract lattice coordinates from the topology generator, if this
    /// netlist was generated rather than loaded. Used for synthetic global
    /// placement; never serialized.
    pub ideal_coords: Option<Vec<(f64, f64)>>,
}

/// Raw qubit description before block derivation.
#[derive(Debug, Clone)]
pub struct QubitDesc {
    pub id: u32,
    pub freq_ghz: f64,
    pub size_um: (f64, f64),
}

/// Raw edge description before block derivation.
#[derive(Debug, Clone)]
pub struct EdgeDesc {
    pub id: u32,
    pub q1: u32,
    pub q2: u32,
    pub freq_ghz: f64,
    pub length_um: f64,
    pub pad_um: f64,
}

impl NetGraph {
    /// Build a netlist: validate ids, derive footprints, partition each
    /// resonator into blocks and attach pseudo connections. Ids must be the
    /// contiguous range 0..n in order; block ids are assigned sequentially
    /// across edges in edge order.
    pub fn build(qubits: &[QubitDesc], edges: &[EdgeDesc], pitch_um: f64) -> Result<NetGraph> {
        if !(pitch_um > 0.0) {
            return Err(Error::InvalidInput(format!("pitch must be positive, got {pitch_um}")));
        }
        let mut net = NetGraph::default();
        for (i, q) in qubits.iter().enumerate() {
            if q.id as usize != i {
                return Err(Error::InvalidInput(format!(
                    "qubit ids must be contiguous from 0; expected {i}, got {}",
                    q.id
                )));
            }
            if !(q.freq_ghz > 0.0) {
                return Err(Error::InvalidInput(format!("qubit {} frequency must be positive", q.id)));
            }
            if !(q.size_um.0 > 0.0) || !(q.size_um.1 > 0.0) {
                return Err(Error::InvalidInput(format!("qubit {} size must be positive", q.id)));
            }
            let footprint = (
                (q.size_um.0 / pitch_um).ceil().max(1.0) as i32,
                (q.size_um.1 / pitch_um).ceil().max(1.0) as i32,
            );
            net.qubits.push(Qubit {
                id: QubitId(q.id),
                freq_ghz: q.freq_ghz,
                size_um: q.size_um,
                footprint,
            });
        }
        for (i, e) in edges.iter().enumerate() {
            if e.id as usize != i {
                return Err(Error::InvalidInput(format!(
                    "edge ids must be contiguous from 0; expected {i}, got {}",
                    e.id
                )));
            }
            if e.q1 == e.q2 {
                return Err(Error::InvalidInput(format!("edge {} is a self-loop on qubit {}", e.id, e.q1)));
            }
            for q in [e.q1, e.q2] {
                if q as usize >= net.qubits.len() {
                    return Err(Error::InvalidInput(format!("edge {} references unknown qubit {q}", e.id)));
                }
            }
            let n = partition_resonator(e.length_um, e.pad_um, pitch_um)?;
            let mut blocks = Vec::with_capacity(n as usize);
            for k in 0..n {
                let bid = BlockId(net.blocks.len() as u32);
                net.blocks.push(WireBlock {
                    id: bid,
                    parent: EdgeId(e.id),
                    index: k,
                    freq_ghz: e.freq_ghz,
                });
                blocks.push(bid);
            }
            let mut edge = ResonatorEdge {
                id: EdgeId(e.id),
                endpoints: (QubitId(e.q1), QubitId(e.q2)),
                freq_ghz: e.freq_ghz,
                length_um: e.length_um,
                pad_um: e.pad_um,
                blocks,
                pseudo_pins: Vec::new(),
            };
            edge.pseudo_pins = pseudo_connect(&edge);
            net.edges.push(edge);
        }
        Ok(net)
    }

    pub fn qubit(&self, id: QubitId) -> &Qubit {
        &self.qubits[id.0 as usize]
    }

    pub fn edge(&self, id: EdgeId) -> &ResonatorEdge {
        &self.edges[id.0 as usize]
    }

    pub fn block(&self, id: BlockId) -> &WireBlock {
        &self.blocks[id.0 as usize]
    }

    /// Total cells all components occupy: footprint area per qubit plus one
    /// cell per wire block.
    pub fn total_component_cells(&self) -> i64 {
        let q: i64 = self.qubits.iter().map(|q| q.footprint.0 as i64 * q.footprint.1 as i64).sum();
        q + self.blocks.len() as i64
    }

    /// Number of placeable components (each qubit and each block counts once).
    pub fn component_count(&self) -> usize {
        self.qubits.len() + self.blocks.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_exact_fit_is_one_block() {
        assert_eq!(partition_resonator(300.0, 300.0, 300.0).unwrap(), 1);
    }

    #[test]
    fn partition_exact_multiple() {
        assert_eq!(partition_resonator(9000.0, 100.0, 300.0).unwrap(), 10);
    }

    #[test]
    fn partition_rounds_up_and_covers_area() {
        let n = partition_resonator(10000.0, 100.0, 300.0).unwrap();
        assert_eq!(n, 12);
        assert!(n as f64 * 300.0 * 300.0 >= 100.0 * 10000.0);
    }

    #[test]
    fn partition_rejects_nonpositive() {
        assert!(partition_resonator(0.0, 100.0, 300.0).is_err());
        assert!(partition_resonator(100.0, -1.0, 300.0).is_err());
        assert!(partition_resonator(100.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn partition_monotone() {
        let base = partition_resonator(5000.0, 100.0, 300.0).unwrap();
        assert!(partition_resonator(6000.0, 100.0, 300.0).unwrap() >= base);
        assert!(partition_resonator(5000.0, 150.0, 300.0).unwrap() >= base);
        assert!(partition_resonator(5000.0, 100.0, 400.0).unwrap() <= base);
    }

    fn edge_with_n_blocks(n: u32) -> ResonatorEdge {
        ResonatorEdge {
            id: EdgeId(0),
            endpoints: (QubitId(0), QubitId(1)),
            freq_ghz: 6.5,
            length_um: 1.0,
            pad_um: 1.0,
            blocks: (0..n).map(BlockId).collect(),
            pseudo_pins: Vec::new(),
        }
    }

    #[test]
    fn pseudo_single_block_ties_both_qubits() {
        let pins = pseudo_connect(&edge_with_n_blocks(1));
        assert_eq!(pins.len(), 2);
        assert_eq!(pins[0], (PinRef::Qubit(QubitId(0)), PinRef::Block(BlockId(0))));
        assert_eq!(pins[1], (PinRef::Qubit(QubitId(1)), PinRef::Block(BlockId(0))));
    }

    #[test]
    fn pseudo_six_blocks_on_3x2_raster() {
        let pins = pseudo_connect(&edge_with_n_blocks(6));
        let block_pairs = pins
            .iter()
            .filter(|(a, b)| matches!(a, PinRef::Block(_)) && matches!(b, PinRef::Block(_)))
            .count();
        let qubit_pairs = pins.len() - block_pairs;
        assert_eq!(block_pairs, 7);
        assert_eq!(qubit_pairs, 2);
    }

    #[test]
    fn pseudo_net_is_connected() {
        for n in [1u32, 2, 3, 4, 5, 6, 9, 12, 13] {
            let edge = edge_with_n_blocks(n);
            let pins = pseudo_connect(&edge);
            // union-find over {q0, q1, blocks...}
            let node = |p: &PinRef| match p {
                PinRef::Qubit(q) => q.0 as usize,
                PinRef::Block(b) => 2 + b.0 as usize,
            };
            let mut parent: Vec<usize> = (0..2 + n as usize).collect();
            fn find(p: &mut Vec<usize>, i: usize) -> usize {
                if p[i] != i {
                    let r = find(p, p[i]);
                    p[i] = r;
                }
                p[i]
            }
            for (a, b) in &pins {
                let (ra, rb) = (find(&mut parent, node(a)), find(&mut parent, node(b)));
                parent[ra] = rb;
            }
            let root = find(&mut parent, 0);
            for i in 0..parent.len() {
                assert_eq!(find(&mut parent, i), root, "n={n}: node {i} disconnected");
            }
        }
    }

    #[test]
    fn build_assigns_contiguous_blocks() {
        let qubits = vec![
            QubitDesc { id: 0, freq_ghz: 5.0, size_um: (400.0, 400.0) },
            QubitDesc { id: 1, freq_ghz: 5.1, size_um: (400.0, 400.0) },
        ];
        let edges = vec![EdgeDesc {
            id: 0,
            q1: 0,
            q2: 1,
            freq_ghz: 6.5,
            length_um: 9000.0,
            pad_um: 100.0,
        }];
        let net = NetGraph::build(&qubits, &edges, 300.0).unwrap();
        assert_eq!(net.qubits[0].footprint, (2, 2));
        assert_eq!(net.edges[0].blocks.len(), 10);
        assert_eq!(net.blocks.len(), 10);
        assert_eq!(net.total_component_cells(), 2 * 4 + 10);
        assert_eq!(net.component_count(), 12);
        for (k, b) in net.blocks.iter().enumerate() {
            assert_eq!(b.id.0 as usize, k);
            assert_eq!(b.parent, EdgeId(0));
            assert_eq!(b.freq_ghz, 6.5);
        }
    }

    #[test]
    fn build_rejects_bad_references() {
        let qubits = vec![QubitDesc { id: 0, freq_ghz: 5.0, size_um: (400.0, 400.0) }];
        let edges = vec![EdgeDesc { id: 0, q1: 0, q2: 3, freq_ghz: 6.5, length_um: 9000.0, pad_um: 100.0 }];
        assert!(NetGraph::build(&qubits, &edges, 300.0).is_err());
        let edges = vec![EdgeDesc { id: 0, q1: 0, q2: 0, freq_ghz: 6.5, length_um: 9000.0, pad_um: 100.0 }];
        assert!(NetGraph::build(&qubits, &edges, 300.0).is_err());
    }
}
