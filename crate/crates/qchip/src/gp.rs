//! Synthetic global placement. Qubits land on their abstract topology
//! coordinates stretched over the substrate, wire blocks on a near-square
//! raster centered between their endpoint qubits, both with optional
//! Gaussian jitter. The output is intentionally allowed to be illegal; it
//! exists to feed the legalizers something realistic.

use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::netlist::{CompId, NetGraph};
use crate::netlist::{raster_shape, raster_slot};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// Fallback drawing coordinates for netlists that arrived without any:
/// breadth-first layers from the lowest qubit id, one row per layer,
/// discovery order within a row.
pub fn bfs_layer_coords(net: &NetGraph) -> Vec<(f64, f64)> {
    let n = net.qubits.len();
    let mut adj = vec![Vec::new(); n];
    for e in &net.edges {
        adj[e.endpoints.0 .0 as usize].push(e.endpoints.1 .0 as usize);
        adj[e.endpoints.1 .0 as usize].push(e.endpoints.0 .0 as usize);
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
    }
    let mut coords = vec![(0.0, 0.0); n];
    let mut layer = vec![usize::MAX; n];
    let mut row_fill: Vec<usize> = Vec::new();
    for root in 0..n {
        if layer[root] != usize::MAX {
            continue;
        }
        layer[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(q) = queue.pop_front() {
            let l = layer[q];
            if row_fill.len() <= l {
                row_fill.resize(l + 1, 0);
            }
            coords[q] = (row_fill[l] as f64, l as f64);
            row_fill[l] += 1;
            for &o in &adj[q] {
                if layer[o] == usize::MAX {
                    layer[o] = l + 1;
                    queue.push_back(o);
                }
            }
        }
    }
    coords
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 in (0, 1] so the log stays finite
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Writes GP centers for every component. Qubit coordinates are the
/// netlist's drawing coordinates (or BFS layers when absent) stretched over
/// the substrate minus a margin, plus Gaussian jitter of `noise_cells`
/// cells; each edge's blocks sit on their pseudo-connection raster centered
/// on the midpoint of the jittered endpoint centers. Deterministic per seed.
pub fn synthetic_gp(layout: &mut Layout, seed: u64, noise_cells: f64) -> Result<()> {
    let cells = layout.width_cells as i64 * layout.height_cells as i64;
    if cells < layout.net.total_component_cells() {
        return Err(Error::Capacity(format!(
            "substrate has {cells} cells but components need {}",
            layout.net.total_component_cells()
        )));
    }
    let coords = match &layout.net.ideal_coords {
        Some(c) => c.clone(),
        None => bfs_layer_coords(&layout.net),
    };
    if coords.len() != layout.net.qubits.len() {
        return Err(Error::InvalidInput(format!(
            "{} drawing coordinates for {} qubits",
            coords.len(),
            layout.net.qubits.len()
        )));
    }
    let pitch = layout.pitch_um;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = 2.0;
    let span = |lo: f64, hi: f64, w: i32, v: f64| -> f64 {
        let usable = (w as f64 - 2.0 * margin).max(1.0);
        if hi > lo {
            margin + (v - lo) / (hi - lo) * usable
        } else {
            w as f64 / 2.0
        }
    };
    let (min_x, max_x) = coords
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.0), hi.max(c.0)));
    let (min_y, max_y) = coords
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.1), hi.max(c.1)));
    let qubit_ids: Vec<_> = layout.net.qubits.iter().map(|q| q.id).collect();
    for q in qubit_ids {
        let (ix, iy) = coords[q.0 as usize];
        let cx = span(min_x, max_x, layout.width_cells, ix) + noise_cells * gaussian(&mut rng);
        let cy = span(min_y, max_y, layout.height_cells, iy) + noise_cells * gaussian(&mut rng);
        layout.set_gp(CompId::Qubit(q), (cx * pitch, cy * pitch));
    }
    let edge_ids: Vec<_> = layout.net.edges.iter().map(|e| e.id).collect();
    for e in edge_ids {
        let (qa, qb) = layout.net.edge(e).endpoints;
        let a = layout.gp_center_um(CompId::Qubit(qa)).expect("endpoint GP set above");
        let b = layout.gp_center_um(CompId::Qubit(qb)).expect("endpoint GP set above");
        let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        let blocks = layout.net.edge(e).blocks.clone();
        let n = blocks.len() as u32;
        let (rc, rr) = raster_shape(n);
        for (k, b) in blocks.into_iter().enumerate() {
            let (col, row) = raster_slot(n, k as u32);
            let dx = col as f64 - (rc as f64 - 1.0) / 2.0 + noise_cells * gaussian(&mut rng);
            let dy = row as f64 - (rr as f64 - 1.0) / 2.0 + noise_cells * gaussian(&mut rng);
            layout.set_gp(CompId::Block(b), (mid.0 + dx * pitch, mid.1 + dy * pitch));
        }
    }
    Ok(())
}

/// Drops every component onto the cell anchor nearest its GP center,
/// ignoring collisions. Useful for inspecting raw GP quality.
pub fn snap_gp(layout: &mut Layout) -> Result<()> {
    for id in layout.comp_ids() {
        let anchor = layout
            .gp_anchor(id)
            .ok_or_else(|| Error::InvalidInput(format!("{id} has no GP center")))?;
        layout.place(id, anchor);
    }
    Ok(())
}
