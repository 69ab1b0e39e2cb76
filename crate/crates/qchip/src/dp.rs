//! Detailed placement: scan for split resonators and frequency hotspots,
//! carve a window around each offender, re-route its wire through the window
//! with a maze router, and keep the result only when the layout strictly
//! improves. Qubits never move here.

use crate::cluster::{compute_clusters, total_clusters};
use crate::config::{DpConfig, HotspotConfig};
use crate::error::{Error, Result};
use crate::geom::{CellPos, CellRect};
use crate::layout::Layout;
use crate::metrics::{count_crossings, hotspot_proportion, HotspotReport};
use crate::netlist::{CompId, EdgeId, QubitId};
use crate::validate::validate;
use serde::Serialize;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DpReason {
    MultiCluster,
    Hotspot,
}

/// Edges worth a detailed-placement attempt: split into several clusters or
/// carrying hotspot weight. Sorted by descending severity (cluster excess,
/// then hotspot share), ties by ascending id.
pub fn find_violations(
    layout: &Layout,
    hotspot: &HotspotConfig,
) -> Result<Vec<(EdgeId, DpReason)>> {
    let hot = hotspot_proportion(layout, hotspot);
    let mut rows: Vec<(i64, f64, EdgeId, DpReason)> = Vec::new();
    for e in &layout.net.edges {
        let clusters = compute_clusters(layout, e.id)?.count() as i64;
        let share = hot.edge_share(e.id);
        if clusters > 1 {
            rows.push((clusters - 1, share, e.id, DpReason::MultiCluster));
        } else if share > 0.0 {
            rows.push((0, share, e.id, DpReason::Hotspot));
        }
    }
    rows.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then(b.1.partial_cmp(&a.1).unwrap())
            .then(a.2 .0.cmp(&b.2 .0))
    });
    Ok(rows.into_iter().map(|(_, _, e, r)| (e, r)).collect())
}

/// Work area around one problematic edge.
#[derive(Debug, Clone)]
pub struct Window {
    pub rect: CellRect,
    pub target: EdgeId,
    /// Other edges owning at least one block inside the rect.
    pub neighbors: Vec<EdgeId>,
    /// Cells inside the rect held by qubits or non-target blocks.
    pub obstacles: BTreeSet<CellPos>,
}

/// Bounding box of the target's blocks and its endpoint qubits, grown by a
/// one-cell margin and clipped to the substrate.
pub fn build_window(layout: &Layout, edge: EdgeId) -> Result<Window> {
    let e = layout.net.edge(edge);
    let mut rect = CellRect::new(0, 0, 0, 0);
    for &b in &e.blocks {
        let r = layout.rect(CompId::Block(b)).ok_or_else(|| {
            Error::InvalidInput(format!("b{} is not placed", b.0))
        })?;
        rect = rect.union(&r);
    }
    for q in [e.endpoints.0, e.endpoints.1] {
        let r = layout.rect(CompId::Qubit(q)).ok_or_else(|| {
            Error::InvalidInput(format!("q{} is not placed", q.0))
        })?;
        rect = rect.union(&r);
    }
    let rect = rect.expand(1).clip(layout.width_cells, layout.height_cells);
    let mut neighbors = BTreeSet::new();
    for b in &layout.net.blocks {
        if b.parent == edge {
            continue;
        }
        if let Some(p) = layout.pos(CompId::Block(b.id)) {
            if rect.contains(p) {
                neighbors.insert(b.parent);
            }
        }
    }
    let mut obstacles = BTreeSet::new();
    for c in rect.cells() {
        let blocking = layout.occupants(c).iter().any(|&o| match o {
            CompId::Qubit(_) => true,
            CompId::Block(b) => layout.net.block(b).parent != edge,
        });
        if blocking {
            obstacles.insert(c);
        }
    }
    Ok(Window { rect, target: edge, neighbors: neighbors.into_iter().collect(), obstacles })
}

/// Window plus rip-up set for one target: the target itself and every
/// neighbor edge sharing an endpoint qubit with it. Those kin edges are what
/// wall an endpoint in, so they are re-routed together; the rect grows to
/// cover their qubits so their new attachments fit.
fn extraction_window(layout: &Layout, edge: EdgeId) -> Result<(Window, Vec<EdgeId>)> {
    let base = build_window(layout, edge)?;
    let (q1, q2) = layout.net.edge(edge).endpoints;
    let kin: Vec<EdgeId> = base
        .neighbors
        .iter()
        .copied()
        .filter(|&n| {
            let (a, b) = layout.net.edge(n).endpoints;
            a == q1 || a == q2 || b == q1 || b == q2
        })
        .collect();
    if kin.is_empty() {
        return Ok((base, vec![edge]));
    }
    let mut rect = base.rect;
    for &k in &kin {
        let e = layout.net.edge(k);
        for q in [e.endpoints.0, e.endpoints.1] {
            if let Some(r) = layout.rect(CompId::Qubit(q)) {
                rect = rect.union(&r.expand(1));
            }
        }
        for &b in &e.blocks {
            if let Some(p) = layout.pos(CompId::Block(b)) {
                rect = rect.union(&CellRect::new(p.x, p.y, 1, 1));
            }
        }
    }
    let rect = rect.clip(layout.width_cells, layout.height_cells);
    let extracted: BTreeSet<EdgeId> = kin.iter().copied().chain([edge]).collect();
    let mut neighbors = BTreeSet::new();
    for b in &layout.net.blocks {
        if b.parent == edge {
            continue;
        }
        if let Some(p) = layout.pos(CompId::Block(b.id)) {
            if rect.contains(p) {
                neighbors.insert(b.parent);
            }
        }
    }
    let mut obstacles = BTreeSet::new();
    for c in rect.cells() {
        let blocking = layout.occupants(c).iter().any(|&o| match o {
            CompId::Qubit(_) => true,
            CompId::Block(b) => !extracted.contains(&layout.net.block(b).parent),
        });
        if blocking {
            obstacles.insert(c);
        }
    }
    let window =
        Window { rect, target: edge, neighbors: neighbors.into_iter().collect(), obstacles };
    Ok((window, extracted.into_iter().collect()))
}

#[derive(Debug, Clone, Default)]
pub struct EdgeRoute {
    /// Endpoint-to-endpoint path in order.
    pub path: Vec<CellPos>,
    /// Extra cells absorbed to hit the reserved block count.
    pub meander: Vec<CellPos>,
    /// Path cells bridged over an earlier route of this call; the block
    /// sitting there belongs to the other edge.
    pub crossed: Vec<CellPos>,
}

impl EdgeRoute {
    /// Full footprint of the route, bridged cells included.
    pub fn cells(&self) -> impl Iterator<Item = CellPos> + '_ {
        self.path.iter().chain(self.meander.iter()).copied()
    }

    /// Cells that receive this edge's blocks: the path minus bridges, plus
    /// the meander.
    pub fn owned_cells(&self) -> impl Iterator<Item = CellPos> + '_ {
        self.path
            .iter()
            .filter(move |c| !self.crossed.contains(c))
            .chain(self.meander.iter())
            .copied()
    }

    pub fn len(&self) -> usize {
        self.path.len() + self.meander.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default)]
pub struct RouteResult {
    pub routes: Vec<(EdgeId, EdgeRoute)>,
    /// Cells where a path landed on an already-routed edge of this call.
    pub crossings: u64,
    pub success: bool,
}

impl RouteResult {
    pub fn route(&self, e: EdgeId) -> Option<&EdgeRoute> {
        self.routes.iter().find(|(id, _)| *id == e).map(|(_, r)| r)
    }
}

/// Average of the blocks' global-placement centers, in cell units; falls
/// back to the midpoint of the endpoint qubits when GP data is absent.
fn edge_centroid(layout: &Layout, edge: EdgeId) -> (f64, f64) {
    let e = layout.net.edge(edge);
    let mut sum = (0.0, 0.0);
    let mut n = 0usize;
    for &b in &e.blocks {
        if let Some((x, y)) = layout.gp_cells(CompId::Block(b)) {
            sum = (sum.0 + x, sum.1 + y);
            n += 1;
        }
    }
    if n == e.blocks.len() && n > 0 {
        return (sum.0 / n as f64, sum.1 / n as f64);
    }
    let mut sum = (0.0, 0.0);
    for q in [e.endpoints.0, e.endpoints.1] {
        let r = layout.rect(CompId::Qubit(q)).expect("endpoint qubit placed");
        let (x, y) = r.center();
        sum = (sum.0 + x, sum.1 + y);
    }
    (sum.0 / 2.0, sum.1 / 2.0)
}

/// Free cell hugging the qubit's perimeter nearest the target point; ties by
/// smaller y then smaller x.
fn attachment(
    layout: &Layout,
    rect: &CellRect,
    blocked: &BTreeSet<CellPos>,
    qubit: QubitId,
    toward: (f64, f64),
) -> Option<CellPos> {
    let qr = layout.rect(CompId::Qubit(qubit))?;
    let mut best: Option<(f64, CellPos)> = None;
    let mut consider = |c: CellPos| {
        if !rect.contains(c) || blocked.contains(&c) {
            return;
        }
        let d2 = c.center_dist2(toward.0, toward.1);
        let better = match best {
            None => true,
            Some((bd2, bc)) => d2 < bd2 || (d2 == bd2 && (c.y, c.x) < (bc.y, bc.x)),
        };
        if better {
            best = Some((d2, c));
        }
    };
    for x in qr.x..qr.x1() {
        consider(CellPos::new(x, qr.y - 1));
        consider(CellPos::new(x, qr.y1()));
    }
    for y in qr.y..qr.y1() {
        consider(CellPos::new(qr.x - 1, y));
        consider(CellPos::new(qr.x1(), y));
    }
    best.map(|(_, c)| c)
}

/// Routes the given edges through the window, shortest reserved length
/// first. Path cost is 1 per cell plus the crossing penalty on cells some
/// earlier path of this call already uses; cells under qubits or under
/// blocks of non-extracted edges are never entered. Every path is then
/// padded to the edge's reserved block count by absorbing free cells
/// adjacent to it.
pub fn maze_route(
    layout: &Layout,
    window: &Window,
    edges_to_route: &[EdgeId],
    crossing_penalty: u32,
) -> Result<RouteResult> {
    let rect = window.rect;
    let extracted: BTreeSet<EdgeId> = edges_to_route.iter().copied().collect();
    let mut blocked = BTreeSet::new();
    for c in rect.cells() {
        let blocking = layout.occupants(c).iter().any(|&o| match o {
            CompId::Qubit(_) => true,
            CompId::Block(b) => !extracted.contains(&layout.net.block(b).parent),
        });
        if blocking {
            blocked.insert(c);
        }
    }
    let mut order: Vec<EdgeId> = edges_to_route.to_vec();
    order.sort_by_key(|&e| (layout.net.edge(e).blocks.len(), e.0));

    let mut used: HashMap<CellPos, EdgeId> = HashMap::new();
    let mut result = RouteResult::default();
    for eid in order {
        let e = layout.net.edge(eid);
        let n = e.blocks.len();
        let toward = edge_centroid(layout, eid);
        let a = attachment(layout, &rect, &blocked, e.endpoints.0, toward);
        let b = attachment(layout, &rect, &blocked, e.endpoints.1, toward);
        let (Some(start), Some(goal)) = (a, b) else {
            return Err(Error::RouteFailure(format!(
                "e{}: no attachment cell next to an endpoint qubit",
                eid.0
            )));
        };
        let cell_cost = |c: CellPos| -> u64 {
            if used.contains_key(&c) {
                1 + crossing_penalty as u64
            } else {
                1
            }
        };
        // deterministic Dijkstra keyed by (cost, y, x)
        let mut dist: HashMap<CellPos, u64> = HashMap::new();
        let mut parent: HashMap<CellPos, CellPos> = HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(start, cell_cost(start));
        heap.push(std::cmp::Reverse((cell_cost(start), start.y, start.x)));
        while let Some(std::cmp::Reverse((d, y, x))) = heap.pop() {
            let c = CellPos::new(x, y);
            if dist.get(&c) != Some(&d) {
                continue;
            }
            if c == goal {
                break;
            }
            for nb in c.neighbors4() {
                if !rect.contains(nb) || blocked.contains(&nb) {
                    continue;
                }
                let nd = d + cell_cost(nb);
                if dist.get(&nb).map_or(true, |&old| nd < old) {
                    dist.insert(nb, nd);
                    parent.insert(nb, c);
                    heap.push(std::cmp::Reverse((nd, nb.y, nb.x)));
                }
            }
        }
        if !dist.contains_key(&goal) {
            return Err(Error::RouteFailure(format!(
                "e{}: no path between endpoint attachments",
                eid.0
            )));
        }
        let mut path = vec![goal];
        while *path.last().unwrap() != start {
            path.push(parent[path.last().unwrap()]);
        }
        path.reverse();
        let crossed: Vec<CellPos> =
            path.iter().copied().filter(|c| used.contains_key(c)).collect();
        let owned = path.len() - crossed.len();
        if owned > n {
            return Err(Error::RouteFailure(format!(
                "e{}: shortest path needs {} cells but only {} are reserved",
                eid.0, owned, n
            )));
        }
        // meander: absorb free unused cells adjacent to the route until the
        // reserved count is reached; bridged cells carry the earlier edge's
        // block, so they do not count toward the reserve
        let mut cells: BTreeSet<CellPos> =
            path.iter().copied().filter(|c| !used.contains_key(c)).collect();
        let mut meander = Vec::new();
        let mut queue: VecDeque<CellPos> = path.iter().copied().collect();
        while cells.len() < n {
            let Some(c) = queue.pop_front() else {
                return Err(Error::RouteFailure(format!(
                    "e{}: cannot absorb {} meander cells inside the window",
                    eid.0,
                    n - cells.len()
                )));
            };
            for nb in [
                CellPos::new(c.x, c.y - 1),
                CellPos::new(c.x - 1, c.y),
                CellPos::new(c.x + 1, c.y),
                CellPos::new(c.x, c.y + 1),
            ] {
                if cells.len() >= n {
                    break;
                }
                if !rect.contains(nb)
                    || blocked.contains(&nb)
                    || used.contains_key(&nb)
                    || cells.contains(&nb)
                {
                    continue;
                }
                cells.insert(nb);
                meander.push(nb);
                queue.push_back(nb);
            }
        }
        result.crossings += crossed.len() as u64;
        for &c in path.iter().chain(meander.iter()) {
            used.insert(c, eid);
        }
        result.routes.push((eid, EdgeRoute { path, meander, crossed }));
    }
    result.success = true;
    Ok(result)
}

/// One window attempt, accepted or not.
#[derive(Debug, Clone, Serialize)]
pub struct ChangeRecord {
    pub edge: EdgeId,
    pub reason: DpReason,
    pub window_rect: CellRect,
    pub before_clusters: usize,
    pub after_clusters: usize,
    pub before_h_e: f64,
    pub after_h_e: f64,
    pub crossings: u64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Default)]
pub struct DpReport {
    pub passes: usize,
    pub changes: Vec<ChangeRecord>,
}

impl DpReport {
    pub fn accepted(&self) -> usize {
        self.changes.iter().filter(|c| c.accepted).count()
    }
}

fn h_sum(rep: &HotspotReport) -> f64 {
    rep.per_edge.values().sum()
}

/// Repeatedly re-places flagged resonators, keeping a candidate only when
/// the cluster total strictly drops without hotspot growth, or the hotspot
/// total strictly drops without cluster growth (both strict behind the
/// strict-accept flag), and neither crossings nor hot-qubit count grows.
/// Rejected and failed windows leave the layout exactly as it was.
pub fn detailed_place(
    layout: &mut Layout,
    dp: &DpConfig,
    hotspot: &HotspotConfig,
) -> Result<DpReport> {
    if !validate(layout, 0).is_legal() {
        return Err(Error::InvalidInput(
            "detailed placement requires a legal layout".into(),
        ));
    }
    let mut report = DpReport::default();
    let mut cur_hot = hotspot_proportion(layout, hotspot);
    let mut cur_clusters = total_clusters(layout)? as i64;
    let mut cur_x = count_crossings(layout)?;
    for pass in 0..dp.max_passes {
        let flags = find_violations(layout, hotspot)?;
        if flags.is_empty() {
            break;
        }
        report.passes = (pass + 1) as usize;
        let mut accepted_any = false;
        for (edge, reason) in flags {
            let before_clusters = compute_clusters(layout, edge)?.count();
            let before_h_e = cur_hot.edge_share(edge);
            let single = build_window(layout, edge)?;
            let mut record = ChangeRecord {
                edge,
                reason,
                window_rect: single.rect,
                before_clusters,
                after_clusters: before_clusters,
                before_h_e,
                after_h_e: before_h_e,
                crossings: 0,
                accepted: false,
            };
            // try the gentlest rip-up first; escalate to the kin edges only
            // when the lone edge cannot be rerouted or is not an improvement
            let mut plans = vec![(single, vec![edge])];
            let kin = extraction_window(layout, edge)?;
            if kin.1.len() > 1 {
                plans.push(kin);
            }
            for (window, extracted) in plans {
                let snapshot = layout.placements();
                let old_routes: Vec<(EdgeId, Option<Vec<CellPos>>)> = extracted
                    .iter()
                    .map(|&e| (e, layout.routed.get(&e).cloned()))
                    .collect();
                for &e in &extracted {
                    let blocks = layout.net.edge(e).blocks.clone();
                    for &b in &blocks {
                        layout.remove(CompId::Block(b));
                    }
                }
                match maze_route(layout, &window, &extracted, dp.crossing_penalty) {
                    Err(_) => {
                        layout.restore(&snapshot);
                    }
                    Ok(routed) => {
                        for &e in &extracted {
                            let r = routed.route(e).expect("routed edge");
                            let cells: Vec<CellPos> = r.owned_cells().collect();
                            let blocks = layout.net.edge(e).blocks.clone();
                            debug_assert_eq!(cells.len(), blocks.len());
                            for (&b, &c) in blocks.iter().zip(cells.iter()) {
                                layout.place(CompId::Block(b), c);
                            }
                            layout.routed.insert(e, r.cells().collect());
                        }
                        let cand_hot = hotspot_proportion(layout, hotspot);
                        let cand_clusters = total_clusters(layout)? as i64;
                        let d_c = cand_clusters - cur_clusters;
                        let d_h = h_sum(&cand_hot) - h_sum(&cur_hot);
                        let improving = if dp.strict_accept {
                            d_c < 0 && d_h < 0.0
                        } else {
                            (d_c < 0 && d_h <= 0.0) || (d_h < 0.0 && d_c <= 0)
                        };
                        let guarded = improving && cand_hot.h_q <= cur_hot.h_q && {
                            let cand_x = count_crossings(layout)?;
                            cand_x <= cur_x && {
                                cur_x = cand_x;
                                true
                            }
                        };
                        if guarded {
                            record.window_rect = window.rect;
                            record.after_clusters = compute_clusters(layout, edge)?.count();
                            record.after_h_e = cand_hot.edge_share(edge);
                            record.crossings = routed.crossings;
                            record.accepted = true;
                            cur_hot = cand_hot;
                            cur_clusters = cand_clusters;
                            accepted_any = true;
                            debug_assert!(validate(layout, 0).is_legal());
                        } else {
                            layout.restore(&snapshot);
                            for (e, r) in old_routes {
                                match r {
                                    Some(r) => {
                                        layout.routed.insert(e, r);
                                    }
                                    None => {
                                        layout.routed.remove(&e);
                                    }
                                }
                            }
                        }
                    }
                }
                if record.accepted {
                    break;
                }
            }
            report.changes.push(record);
        }
        if !accepted_any {
            break;
        }
    }
    Ok(report)
}
