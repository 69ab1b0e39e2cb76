//! Netlist and placement file formats (JSON, version 1).
//!
//! Placement files store component centers in micrometers keyed by component
//! id ("q3", "b17"). Maps are BTreeMaps so save -> load -> save is
//! byte-identical.

use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::netlist::{CompId, EdgeDesc, NetGraph, QubitDesc};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetlistFile {
    pub format_version: u32,
    pub pitch_um: f64,
    pub substrate_um: [f64; 2],
    pub qubits: Vec<QubitEntry>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QubitEntry {
    pub id: u32,
    pub freq_ghz: f64,
    pub size_um: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub id: u32,
    pub q1: u32,
    pub q2: u32,
    pub freq_ghz: f64,
    pub length_um: f64,
    pub pad_um: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Gp,
    Lg,
    Dp,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Gp => "gp",
            Stage::Lg => "lg",
            Stage::Dp => "dp",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacementFile {
    pub format_version: u32,
    pub stage: Stage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubit_spacing_cells: Option<i32>,
    pub positions: BTreeMap<String, [f64; 2]>,
}

pub fn netlist_to_file(net: &NetGraph, pitch_um: f64, substrate_um: (f64, f64)) -> NetlistFile {
    NetlistFile {
        format_version: FORMAT_VERSION,
        pitch_um,
        substrate_um: [substrate_um.0, substrate_um.1],
        qubits: net
            .qubits
            .iter()
            .map(|q| QubitEntry {
                id: q.id.0,
                freq_ghz: q.freq_ghz,
                size_um: [q.size_um.0, q.size_um.1],
            })
            .collect(),
        edges: net
            .edges
            .iter()
            .map(|e| EdgeEntry {
                id: e.id.0,
                q1: e.endpoints.0 .0,
                q2: e.endpoints.1 .0,
                freq_ghz: e.freq_ghz,
                length_um: e.length_um,
                pad_um: e.pad_um,
            })
            .collect(),
    }
}

/// Rebuilds the netlist; block partitioning is recomputed, so a loaded
/// netlist is structurally identical to the one saved.
pub fn netlist_from_file(file: &NetlistFile) -> Result<(NetGraph, f64, (f64, f64))> {
    if file.format_version != FORMAT_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported format_version {} (expected {})",
            file.format_version, FORMAT_VERSION
        )));
    }
    if file.pitch_um <= 0.0 {
        return Err(Error::InvalidInput("pitch_um must be positive".into()));
    }
    let qubits: Vec<QubitDesc> = file
        .qubits
        .iter()
        .map(|q| QubitDesc {
            id: q.id,
            freq_ghz: q.freq_ghz,
            size_um: (q.size_um[0], q.size_um[1]),
        })
        .collect();
    let edges: Vec<EdgeDesc> = file
        .edges
        .iter()
        .map(|e| EdgeDesc {
            id: e.id,
            q1: e.q1,
            q2: e.q2,
            freq_ghz: e.freq_ghz,
            length_um: e.length_um,
            pad_um: e.pad_um,
        })
        .collect();
    let net = NetGraph::build(&qubits, &edges, file.pitch_um)?;
    Ok((net, file.pitch_um, (file.substrate_um[0], file.substrate_um[1])))
}

pub fn save_netlist(path: &Path, file: &NetlistFile) -> Result<()> {
    write_json(path, file)
}

pub fn load_netlist(path: &Path) -> Result<NetlistFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Snapshot of the layout's positions (cell anchors converted to center µm)
/// plus GP centers for components without a legal position.
pub fn placement_from_layout(layout: &Layout, stage: Stage, spacing: Option<i32>) -> PlacementFile {
    let mut positions = BTreeMap::new();
    for id in layout.comp_ids() {
        let pos = match layout.pos(id) {
            Some(_) => layout.center_um(id).unwrap(),
            None => match layout.gp_center_um(id) {
                Some(c) => c,
                None => continue,
            },
        };
        positions.insert(id.to_string(), [pos.0, pos.1]);
    }
    PlacementFile {
        format_version: FORMAT_VERSION,
        stage,
        qubit_spacing_cells: spacing,
        positions,
    }
}

fn parse_comp_key(key: &str) -> Result<CompId> {
    let bad = || Error::InvalidInput(format!("bad component key {key:?}"));
    let (prefix, num) = key.split_at(1);
    let id: u32 = num.parse().map_err(|_| bad())?;
    match prefix {
        "q" => Ok(CompId::Qubit(crate::netlist::QubitId(id))),
        "b" => Ok(CompId::Block(crate::netlist::BlockId(id))),
        _ => Err(bad()),
    }
}

/// Applies a placement file onto a layout. GP-stage files set GP centers;
/// LG/DP-stage files snap centers to cell anchors and place components.
pub fn apply_placement(layout: &mut Layout, file: &PlacementFile) -> Result<()> {
    if file.format_version != FORMAT_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported format_version {} (expected {})",
            file.format_version, FORMAT_VERSION
        )));
    }
    for (key, pos) in &file.positions {
        let id = parse_comp_key(key)?;
        if !layout.contains(id) {
            return Err(Error::InvalidInput(format!("unknown component {key}")));
        }
        layout.set_gp(id, (pos[0], pos[1]));
        if file.stage != Stage::Gp {
            let anchor = layout.center_to_anchor(id, (pos[0], pos[1]));
            layout.place(id, anchor);
        }
    }
    if file.stage != Stage::Gp {
        let qubits: Vec<_> = layout.net.qubits.iter().map(|q| q.id).collect();
        for q in qubits {
            layout.set_fixed(CompId::Qubit(q), true);
        }
    }
    Ok(())
}

pub fn save_placement(path: &Path, file: &PlacementFile) -> Result<()> {
    write_json(path, file)
}

pub fn load_placement(path: &Path) -> Result<PlacementFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
