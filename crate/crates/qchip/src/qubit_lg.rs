//! Qubit legalization. Qubits are treated as rigid macros: every pair gets a
//! separation arc in one of two axis constraint graphs, then each axis is
//! solved exactly for minimum total L1 displacement from the GP targets.
//!
//! The solver uses threshold decomposition: boolean level variables
//! z[i][t] = [x_i >= t] turn the piecewise-linear objective into unit-cost
//! cut edges and the difference constraints into infinite implication edges,
//! so one max-flow yields the exact optimum. Taking the minimal source side
//! of the cut picks the coordinate-wise smallest optimum, which makes the
//! result deterministic and lexicographically minimal by qubit id.

use crate::error::{Error, Result};
use crate::geom::CellPos;
use crate::layout::Layout;
use crate::maxflow::{Dinic, INF};
use crate::netlist::{CompId, QubitId};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Horizontal => f.write_str("horizontal"),
            Axis::Vertical => f.write_str("vertical"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpacingPolicy {
    /// Starting qubit-to-qubit spacing in cells.
    pub initial: i32,
    /// Relaxation floor in cells.
    pub min: i32,
    /// Decrement per relaxation round.
    pub step: i32,
}

impl Default for SpacingPolicy {
    fn default() -> Self {
        SpacingPolicy { initial: 2, min: 1, step: 1 }
    }
}

impl SpacingPolicy {
    pub fn new(initial: i32, min: i32) -> Result<Self> {
        if !(initial >= min && min >= 1) {
            return Err(Error::InvalidInput(format!(
                "spacing policy requires initial >= min >= 1, got ({initial}, {min})"
            )));
        }
        Ok(SpacingPolicy { initial, min, step: 1 })
    }

    /// Overlap/border-only fixup: no spacing requirement at all. Used by the
    /// baseline engines, which snap qubits to rounded GP with minimal
    /// displacement but promise nothing about pairwise gaps.
    pub fn relaxed() -> Self {
        SpacingPolicy { initial: 0, min: 0, step: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairArc {
    pub from: usize,
    pub to: usize,
    /// Minimum anchor-coordinate separation: coordinate(to) - coordinate(from) >= weight.
    pub weight: i32,
}

/// One axis's difference-constraint system. Border arcs are implicit:
/// source -> i with weight 0 and i -> sink with weight extents[i].
#[derive(Debug, Clone)]
pub struct ConstraintGraph {
    pub axis: Axis,
    pub n: usize,
    pub arcs: Vec<PairArc>,
    /// Footprint extent of each qubit along this axis, in cells.
    pub extents: Vec<i32>,
}

impl ConstraintGraph {
    pub fn new(axis: Axis, extents: Vec<i32>, arcs: Vec<PairArc>) -> Self {
        ConstraintGraph { axis, n: extents.len(), arcs, extents }
    }

    fn topo_order(&self) -> Result<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        for a in &self.arcs {
            indeg[a.to] += 1;
        }
        let mut queue: Vec<usize> = (0..self.n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            order.push(u);
            for a in &self.arcs {
                if a.from == u {
                    indeg[a.to] -= 1;
                    if indeg[a.to] == 0 {
                        queue.push(a.to);
                    }
                }
            }
        }
        if order.len() != self.n {
            return Err(Error::Internal(format!(
                "{} constraint graph contains a cycle",
                self.axis
            )));
        }
        Ok(order)
    }

    /// Per-node longest path from the border source (= coordinate lower
    /// bound) and longest path to the border sink.
    fn longest_paths(&self) -> Result<(Vec<i64>, Vec<i64>)> {
        let order = self.topo_order()?;
        let mut out: Vec<Vec<(usize, i32)>> = vec![Vec::new(); self.n];
        let mut inc: Vec<Vec<(usize, i32)>> = vec![Vec::new(); self.n];
        for a in &self.arcs {
            out[a.from].push((a.to, a.weight));
            inc[a.to].push((a.from, a.weight));
        }
        let mut from_src = vec![0i64; self.n];
        for &v in &order {
            for &(u, w) in &inc[v] {
                from_src[v] = from_src[v].max(from_src[u] + w as i64);
            }
        }
        let mut to_sink: Vec<i64> = self.extents.iter().map(|&e| e as i64).collect();
        for &u in order.iter().rev() {
            for &(v, w) in &out[u] {
                to_sink[u] = to_sink[u].max(w as i64 + to_sink[v]);
            }
        }
        Ok((from_src, to_sink))
    }

    /// Longest source -> sink path in cells (0 for an empty graph).
    pub fn span(&self) -> Result<i64> {
        let (from_src, to_sink) = self.longest_paths()?;
        Ok((0..self.n).map(|i| from_src[i] + to_sink[i]).max().unwrap_or(0))
    }

    /// The qubit ids along a longest source -> sink path.
    fn critical_path(&self) -> Result<Vec<u32>> {
        if self.n == 0 {
            return Ok(Vec::new());
        }
        let (from_src, to_sink) = self.longest_paths()?;
        let total: Vec<i64> = (0..self.n).map(|i| from_src[i] + to_sink[i]).collect();
        let best = *total.iter().max().unwrap();
        // walk forward from the earliest node on the critical path
        let mut cur = (0..self.n)
            .filter(|&i| total[i] == best && from_src[i] == 0)
            .min()
            .unwrap_or(0);
        let mut path = vec![cur as u32];
        loop {
            let mut next = None;
            for a in &self.arcs {
                if a.from == cur
                    && from_src[a.to] == from_src[cur] + a.weight as i64
                    && from_src[a.to] + to_sink[a.to] == best
                {
                    next = Some(next.map_or(a.to, |n: usize| n.min(a.to)));
                }
            }
            match next {
                Some(v) => {
                    path.push(v as u32);
                    cur = v;
                }
                None => break,
            }
        }
        Ok(path)
    }
}

/// True iff every qubit can be assigned a coordinate inside [0, extent].
pub fn feasible(graph: &ConstraintGraph, extent: i32) -> Result<bool> {
    Ok(graph.span()? <= extent as i64)
}

/// Builds both axis graphs from GP positions. Every qubit pair receives one
/// arc (on the axis with the larger gap relative to the required separation,
/// ties horizontal, oriented by ascending GP coordinate then id); arcs
/// implied by longer paths are pruned.
pub fn build_constraint_graphs(
    layout: &Layout,
    spacing: i32,
) -> Result<(ConstraintGraph, ConstraintGraph)> {
    let n = layout.net.qubits.len();
    let mut centers = Vec::with_capacity(n);
    for q in &layout.net.qubits {
        let id = CompId::Qubit(q.id);
        let Some(c) = layout.gp_cells(id) else {
            return Err(Error::InvalidInput(format!(
                "qubit q{} has no GP position",
                q.id.0
            )));
        };
        centers.push(c);
    }
    let fps: Vec<(i32, i32)> = layout
        .net
        .qubits
        .iter()
        .map(|q| q.footprint)
        .collect();

    let mut h_arcs = Vec::new();
    let mut v_arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let gap_x = (centers[i].0 - centers[j].0).abs();
            let gap_y = (centers[i].1 - centers[j].1).abs();
            let req_x = (fps[i].0 + fps[j].0) as f64 / 2.0 + spacing as f64;
            let req_y = (fps[i].1 + fps[j].1) as f64 / 2.0 + spacing as f64;
            let horizontal = gap_x / req_x >= gap_y / req_y;
            let (coord_i, coord_j) = if horizontal {
                (centers[i].0, centers[j].0)
            } else {
                (centers[i].1, centers[j].1)
            };
            let (u, v) = if coord_i < coord_j || (coord_i == coord_j && i < j) {
                (i, j)
            } else {
                (j, i)
            };
            let w = if horizontal { fps[u].0 } else { fps[u].1 } + spacing;
            let arc = PairArc { from: u, to: v, weight: w };
            if horizontal {
                h_arcs.push(arc);
            } else {
                v_arcs.push(arc);
            }
        }
    }

    let h_extents: Vec<i32> = fps.iter().map(|f| f.0).collect();
    let v_extents: Vec<i32> = fps.iter().map(|f| f.1).collect();
    let mut h = ConstraintGraph::new(Axis::Horizontal, h_extents, h_arcs);
    let mut v = ConstraintGraph::new(Axis::Vertical, v_extents, v_arcs);
    prune_implied(&mut h)?;
    prune_implied(&mut v)?;
    Ok((h, v))
}

/// Removes arcs already implied by a heavier path. Longest paths are taken
/// on the full graph: an arc whose endpoints are joined through a third node
/// with at least its weight adds nothing to the constraint system.
fn prune_implied(graph: &mut ConstraintGraph) -> Result<()> {
    if graph.arcs.len() < 2 {
        return Ok(());
    }
    let order = graph.topo_order()?;
    let n = graph.n;
    let mut pos = vec![0usize; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    const NEG: i64 = i64::MIN / 4;
    let mut dist = vec![vec![NEG; n]; n];
    let mut out: Vec<Vec<(usize, i32)>> = vec![Vec::new(); n];
    for a in &graph.arcs {
        out[a.from].push((a.to, a.weight));
    }
    for &u in order.iter().rev() {
        for &(m, w) in &out[u] {
            dist[u][m] = dist[u][m].max(w as i64);
            for v in 0..n {
                if dist[m][v] > NEG {
                    dist[u][v] = dist[u][v].max(w as i64 + dist[m][v]);
                }
            }
        }
    }
    graph.arcs.retain(|a| {
        let implied = (0..n).any(|m| {
            m != a.from
                && m != a.to
                && pos[m] > pos[a.from]
                && pos[m] < pos[a.to]
                && dist[a.from][m] > NEG
                && dist[m][a.to] > NEG
                && dist[a.from][m] + dist[m][a.to] >= a.weight as i64
        });
        !implied
    });
    Ok(())
}

/// Exact integer L1-minimal coordinates for one axis. Among optima, returns
/// the coordinate-wise (hence lexicographically) smallest assignment.
pub fn solve_axis(graph: &ConstraintGraph, targets: &[i32], extent: i32) -> Result<Vec<i32>> {
    assert_eq!(targets.len(), graph.n);
    if graph.n == 0 {
        return Ok(Vec::new());
    }
    let (from_src, to_sink) = graph.longest_paths()?;
    let lb: Vec<i64> = from_src;
    // to_sink already includes the node's own extent
    let ub: Vec<i64> = (0..graph.n).map(|i| extent as i64 - to_sink[i]).collect();
    if (0..graph.n).any(|i| lb[i] > ub[i]) {
        return Err(Error::Infeasible {
            axis: graph.axis,
            required: graph.span()?,
            available: extent as i64,
            path: graph.critical_path()?,
        });
    }
    // threshold level nodes: node (i, t) <=> [x_i >= t], t in (lb_i, ub_i]
    let mut offset = vec![0usize; graph.n];
    let mut total = 2usize; // 0 = source, 1 = sink
    for i in 0..graph.n {
        offset[i] = total;
        total += (ub[i] - lb[i]) as usize;
    }
    let node = |i: usize, t: i64| -> usize { offset[i] + (t - lb[i] - 1) as usize };
    let mut flow = Dinic::new(total);
    for i in 0..graph.n {
        for t in lb[i] + 1..=ub[i] {
            if t > lb[i] + 1 {
                flow.add_edge(node(i, t), node(i, t - 1), INF);
            }
            if t <= targets[i] as i64 {
                flow.add_edge(0, node(i, t), 1);
            } else {
                flow.add_edge(node(i, t), 1, 1);
            }
        }
    }
    for a in &graph.arcs {
        // x_u >= t implies x_v >= t + w; thresholds below the target's lower
        // bound hold vacuously, and the upper bounds keep t + w <= ub[to]
        for t in lb[a.from] + 1..=ub[a.from] {
            let t2 = t + a.weight as i64;
            if t2 <= lb[a.to] {
                continue;
            }
            debug_assert!(t2 <= ub[a.to]);
            flow.add_edge(node(a.from, t), node(a.to, t2), INF);
        }
    }
    flow.max_flow(0, 1);
    let side = flow.min_cut_source_side(0);
    let mut coords = Vec::with_capacity(graph.n);
    for i in 0..graph.n {
        let mut x = lb[i];
        for t in lb[i] + 1..=ub[i] {
            if side[node(i, t)] {
                x += 1;
            }
        }
        coords.push(x as i32);
    }
    debug_assert!(check_arcs(graph, &coords, extent));
    Ok(coords)
}

/// All arc and border constraints hold for the assignment.
pub fn check_arcs(graph: &ConstraintGraph, coords: &[i32], extent: i32) -> bool {
    coords
        .iter()
        .zip(&graph.extents)
        .all(|(&x, &e)| x >= 0 && x + e <= extent)
        && graph
            .arcs
            .iter()
            .all(|a| coords[a.to] - coords[a.from] >= a.weight)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitLgReport {
    pub achieved_spacing: i32,
    pub displacement_cells: i64,
    pub moved: usize,
}

/// Legalizes all qubits, relaxing the spacing from policy.initial down to
/// policy.min one step at a time until both axes fit. Qubits end up placed,
/// fixed, and at least `achieved_spacing` cells apart pairwise.
pub fn legalize_qubits(layout: &mut Layout, policy: &SpacingPolicy) -> Result<QubitLgReport> {
    let width = layout.width_cells;
    let height = layout.height_cells;
    let mut s = policy.initial;
    loop {
        let (h, v) = build_constraint_graphs(layout, s)?;
        let h_ok = feasible(&h, width)?;
        let v_ok = feasible(&v, height)?;
        if h_ok && v_ok {
            let ids: Vec<QubitId> = layout.net.qubits.iter().map(|q| q.id).collect();
            let targets_x: Vec<i32> = ids
                .iter()
                .map(|&q| layout.gp_anchor(CompId::Qubit(q)).unwrap().x)
                .collect();
            let targets_y: Vec<i32> = ids
                .iter()
                .map(|&q| layout.gp_anchor(CompId::Qubit(q)).unwrap().y)
                .collect();
            let xs = solve_axis(&h, &targets_x, width)?;
            let ys = solve_axis(&v, &targets_y, height)?;
            let mut displacement = 0i64;
            let mut moved = 0usize;
            for (k, &q) in ids.iter().enumerate() {
                let id = CompId::Qubit(q);
                let anchor = CellPos::new(xs[k], ys[k]);
                let d = (xs[k] - targets_x[k]).abs() as i64 + (ys[k] - targets_y[k]).abs() as i64;
                displacement += d;
                if d > 0 {
                    moved += 1;
                }
                layout.place(id, anchor);
                layout.set_fixed(id, true);
            }
            return Ok(QubitLgReport {
                achieved_spacing: s,
                displacement_cells: displacement,
                moved,
            });
        }
        if s - policy.step < policy.min {
            let (bad, avail) = if !h_ok { (&h, width) } else { (&v, height) };
            return Err(Error::Capacity(format!(
                "qubit legalization infeasible on {} axis at spacing {}: required {} cells, available {}",
                bad.axis,
                s,
                bad.span()?,
                avail
            )));
        }
        s -= policy.step;
    }
}
