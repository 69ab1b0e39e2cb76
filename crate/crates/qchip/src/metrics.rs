//! Layout quality metrics: hotspot proportion over touching near-resonant
//! pairs, crossing counts (exact for routed paths, router-estimated for
//! unrouted ones), a Rabi-style pair crosstalk error, and a product fidelity
//! model over a program footprint. Every function here is a pure reader.

use crate::cluster::{compute_clusters, total_clusters, unified_fraction};
use crate::config::{EgConvention, EngineConfig, ErrorModelConfig, HotspotConfig, SamplerConfig};
use crate::error::{Error, Result};
use crate::geom::CellPos;
use crate::layout::{Layout, Placements};
use crate::netlist::{CompId, EdgeId, QubitId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, Default)]
pub struct HotspotReport {
    /// Weighted numerator over the total component area, as a fraction.
    pub p_h: f64,
    /// Per-edge numerator share: half per block-block pair, full per
    /// qubit-block pair.
    pub per_edge: BTreeMap<EdgeId, f64>,
    /// Qubits participating in at least one nonzero pair.
    pub h_q: usize,
}

impl HotspotReport {
    pub fn p_h_percent(&self) -> f64 {
        self.p_h * 100.0
    }

    pub fn edge_share(&self, e: EdgeId) -> f64 {
        self.per_edge.get(&e).copied().unwrap_or(0.0)
    }
}

fn comp_freq(layout: &Layout, id: CompId) -> f64 {
    match id {
        CompId::Qubit(q) => layout.net.qubit(q).freq_ghz,
        CompId::Block(b) => layout.net.block(b).freq_ghz,
    }
}

fn parent_edge(layout: &Layout, id: CompId) -> Option<EdgeId> {
    match id {
        CompId::Qubit(_) => None,
        CompId::Block(b) => Some(layout.net.block(b).parent),
    }
}

/// All unordered pairs of placed components in edge contact, found by
/// scanning each component's one-cell outward perimeter.
pub fn touching_pairs(layout: &Layout) -> Vec<(CompId, CompId)> {
    let mut pairs = BTreeSet::new();
    for id in layout.comp_ids() {
        let Some(r) = layout.rect(id) else { continue };
        let mut probe = |c: CellPos| {
            for &other in layout.occupants(c) {
                if other != id {
                    let (a, b) = if id < other { (id, other) } else { (other, id) };
                    pairs.insert((a, b));
                }
            }
        };
        for x in r.x..r.x1() {
            probe(CellPos::new(x, r.y - 1));
            probe(CellPos::new(x, r.y1()));
        }
        for y in r.y..r.y1() {
            probe(CellPos::new(r.x - 1, y));
            probe(CellPos::new(r.x1(), y));
        }
    }
    pairs.into_iter().collect()
}

/// Shared boundary in cells and centroid distance in cell units for a
/// touching pair.
fn pair_geometry(layout: &Layout, a: CompId, b: CompId) -> (i32, f64) {
    let ra = layout.rect(a).unwrap();
    let rb = layout.rect(b).unwrap();
    let shared = ra.shared_boundary_cells(&rb);
    let (ax, ay) = ra.center();
    let (bx, by) = rb.center();
    let d = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
    (shared, d)
}

/// Frequency-hotspot proportion: for every touching pair of distinct
/// components whose detuning is below the threshold, the shared boundary
/// length (cells) times the centroid distance (cells) enters the numerator;
/// the denominator is the total component area in cells. Pairs of blocks on
/// the same edge are skipped, they are one resonator wire.
pub fn hotspot_proportion(layout: &Layout, cfg: &HotspotConfig) -> HotspotReport {
    let mut report = HotspotReport::default();
    let mut hot_qubits = BTreeSet::new();
    let mut numerator = 0.0;
    for (a, b) in touching_pairs(layout) {
        let ea = parent_edge(layout, a);
        let eb = parent_edge(layout, b);
        if ea.is_some() && ea == eb {
            continue;
        }
        let detune = (comp_freq(layout, a) - comp_freq(layout, b)).abs();
        if detune >= cfg.detune_threshold_ghz {
            continue;
        }
        let (shared, dist) = pair_geometry(layout, a, b);
        if shared == 0 {
            continue;
        }
        let weight = if cfg.inverse_distance {
            if dist > 0.0 {
                1.0 / dist
            } else {
                0.0
            }
        } else {
            dist
        };
        let contribution = shared as f64 * weight;
        if contribution <= 0.0 {
            continue;
        }
        numerator += contribution;
        match (ea, eb) {
            (Some(x), Some(y)) => {
                *report.per_edge.entry(x).or_default() += contribution / 2.0;
                *report.per_edge.entry(y).or_default() += contribution / 2.0;
            }
            (Some(x), None) | (None, Some(x)) => {
                *report.per_edge.entry(x).or_default() += contribution;
            }
            (None, None) => {}
        }
        if let CompId::Qubit(q) = a {
            hot_qubits.insert(q);
        }
        if let CompId::Qubit(q) = b {
            hot_qubits.insert(q);
        }
    }
    report.p_h = numerator / layout.net.total_component_cells() as f64;
    report.h_q = hot_qubits.len();
    report
}

/// Exact crossing count for routed paths: cells traversed by two or more
/// different edges.
pub fn routed_crossings(layout: &Layout) -> u64 {
    let mut edges_at: HashMap<CellPos, BTreeSet<EdgeId>> = HashMap::new();
    for (&e, path) in &layout.routed {
        for &c in path {
            edges_at.entry(c).or_default().insert(e);
        }
    }
    edges_at.values().filter(|s| s.len() >= 2).count() as u64
}

/// Minimum foreign-block traversals needed to connect one edge's clusters,
/// found by the same relaxed router the detailed placer uses: free and
/// own-edge cells cost 0, foreign block cells cost 1, qubits are walls.
/// Clusters are connected greedily, nearest first.
pub fn edge_crossing_estimate(layout: &Layout, edge: EdgeId) -> Result<u64> {
    let parts = compute_clusters(layout, edge)?;
    if parts.count() <= 1 {
        return Ok(0);
    }
    let w = layout.width_cells;
    let h = layout.height_cells;
    let idx = |c: CellPos| (c.y * w + c.x) as usize;
    // per-cell traversal cost; None = impassable
    let mut cost = vec![Some(0u64); (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let c = CellPos::new(x, y);
            for &occ in layout.occupants(c) {
                match occ {
                    CompId::Qubit(_) => cost[idx(c)] = None,
                    CompId::Block(b) => {
                        if layout.net.block(b).parent != edge && cost[idx(c)].is_some() {
                            cost[idx(c)] = Some(1);
                        }
                    }
                }
            }
        }
    }
    let cluster_cells: Vec<Vec<CellPos>> = parts
        .clusters
        .iter()
        .map(|cl| {
            cl.iter()
                .map(|&b| layout.pos(CompId::Block(b)).unwrap())
                .collect()
        })
        .collect();
    let mut cell_cluster: HashMap<CellPos, usize> = HashMap::new();
    for (ci, cells) in cluster_cells.iter().enumerate() {
        for &c in cells {
            cell_cluster.insert(c, ci);
        }
    }
    let mut connected = vec![false; parts.count()];
    connected[0] = true;
    let mut sources = cluster_cells[0].clone();
    let mut total = 0u64;
    for _ in 1..parts.count() {
        // 0/1 BFS from all connected cells
        let mut dist: Vec<u64> = vec![u64::MAX; (w * h) as usize];
        let mut dq = VecDeque::new();
        for &s in &sources {
            dist[idx(s)] = 0;
            dq.push_back(s);
        }
        let mut best: Option<(u64, usize)> = None;
        while let Some(c) = dq.pop_front() {
            let d = dist[idx(c)];
            if let Some((bd, _)) = best {
                if d >= bd {
                    continue;
                }
            }
            if let Some(&ci) = cell_cluster.get(&c) {
                if !connected[ci] && best.map_or(true, |(bd, bc)| (d, ci) < (bd, bc)) {
                    best = Some((d, ci));
                }
            }
            for nb in c.neighbors4() {
                if nb.x < 0 || nb.x >= w || nb.y < 0 || nb.y >= h {
                    continue;
                }
                let Some(step) = cost[idx(nb)] else { continue };
                let nd = d + step;
                if nd < dist[idx(nb)] {
                    dist[idx(nb)] = nd;
                    if step == 0 {
                        dq.push_front(nb);
                    } else {
                        dq.push_back(nb);
                    }
                }
            }
        }
        let Some((d, ci)) = best else { break };
        total += d;
        connected[ci] = true;
        sources.extend_from_slice(&cluster_cells[ci]);
    }
    Ok(total)
}

/// Layout crossing count: exact coincidences on routed edges plus router
/// estimates for the edges that still sit in multiple clusters.
pub fn count_crossings(layout: &Layout) -> Result<u64> {
    let mut x = routed_crossings(layout);
    for e in &layout.net.edges {
        if !layout.routed.contains_key(&e.id) {
            x += edge_crossing_estimate(layout, e.id)?;
        }
    }
    Ok(x)
}

/// Rabi transition probability at a phase, folded into an error number under
/// the configured convention.
pub fn rabi_error(phase_rad: f64, convention: EgConvention) -> f64 {
    let p = phase_rad.sin().powi(2);
    match convention {
        EgConvention::Literal => 1.0 - p,
        EgConvention::Complement => p,
    }
}

/// Crosstalk error of one parasitic pair. The pair coupling is linear in the
/// parasitic capacitance; detuning suppresses it dispersively, clamped at
/// resonance. Phase accumulates as g_eff (MHz) times exposure (ns).
pub fn crosstalk_pair_error(
    delta_ghz: f64,
    t_ns: f64,
    c_par_ff: f64,
    cfg: &ErrorModelConfig,
) -> f64 {
    let g_pair = cfg.kappa_g_mhz_per_ff * c_par_ff;
    let delta_mhz = delta_ghz.abs() * 1000.0;
    let g_eff = if delta_mhz > 0.0 {
        (g_pair * g_pair / delta_mhz).min(g_pair)
    } else {
        g_pair
    };
    rabi_error(g_eff * t_ns * 1e-3, cfg.eg_convention)
}

/// Which components a benchmark actively drives.
#[derive(Debug, Clone, Default)]
pub struct ProgramFootprint {
    pub active_qubits: BTreeSet<QubitId>,
    pub active_edges: BTreeSet<EdgeId>,
    /// Single-qubit gate counts.
    pub gates1: BTreeMap<QubitId, u32>,
    /// Two-qubit gate counts.
    pub gates2: BTreeMap<QubitId, u32>,
    pub duration_us: f64,
}

impl ProgramFootprint {
    fn check(&self, layout: &Layout) -> Result<()> {
        for &q in self
            .active_qubits
            .iter()
            .chain(self.gates1.keys())
            .chain(self.gates2.keys())
        {
            if q.0 as usize >= layout.net.qubits.len() {
                return Err(Error::InvalidInput(format!("unknown qubit q{}", q.0)));
            }
        }
        for &e in &self.active_edges {
            if e.0 as usize >= layout.net.edges.len() {
                return Err(Error::InvalidInput(format!("unknown edge e{}", e.0)));
            }
            let (a, b) = layout.net.edge(e).endpoints;
            if !self.active_qubits.contains(&a) || !self.active_qubits.contains(&b) {
                return Err(Error::InvalidInput(format!(
                    "active edge e{} touches inactive qubits",
                    e.0
                )));
            }
        }
        Ok(())
    }

    fn is_active(&self, layout: &Layout, id: CompId) -> bool {
        match id {
            CompId::Qubit(q) => self.active_qubits.contains(&q),
            CompId::Block(b) => self.active_edges.contains(&layout.net.block(b).parent),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct FidelityReport {
    pub fidelity: f64,
    /// Per active qubit: gate and decoherence error.
    pub qubit_terms: Vec<(QubitId, f64)>,
    /// Per touching active pair: parasitic coupling error.
    pub pair_terms: Vec<(CompId, CompId, f64)>,
    /// Per crossing involving active edges.
    pub crossing_terms: Vec<f64>,
}

/// Product fidelity under a program footprint: per-qubit gate plus
/// decoherence factors, a parasitic term per touching active pair (coupling
/// scales with the shared boundary), and a term per crossing of active edges
/// (fixed crossing capacitance). Inactive components contribute nothing.
pub fn program_fidelity(
    layout: &Layout,
    program: &ProgramFootprint,
    cfg: &ErrorModelConfig,
) -> Result<FidelityReport> {
    program.check(layout)?;
    let mut report = FidelityReport { fidelity: 1.0, ..Default::default() };
    for &q in &program.active_qubits {
        let g1 = program.gates1.get(&q).copied().unwrap_or(0);
        let g2 = program.gates2.get(&q).copied().unwrap_or(0);
        let d = program.duration_us;
        let keep = (1.0 - cfg.e1).powi(g1 as i32)
            * (1.0 - cfg.e2).powi(g2 as i32)
            * (-d / cfg.t1_us).exp()
            * (-d / cfg.t2_us).exp();
        let eps_q = 1.0 - keep;
        report.fidelity *= 1.0 - eps_q;
        report.qubit_terms.push((q, eps_q));
    }
    for (a, b) in touching_pairs(layout) {
        if !program.is_active(layout, a) || !program.is_active(layout, b) {
            continue;
        }
        let ea = parent_edge(layout, a);
        let eb = parent_edge(layout, b);
        if ea.is_some() && ea == eb {
            continue;
        }
        let (shared, _) = pair_geometry(layout, a, b);
        if shared == 0 {
            continue;
        }
        let c_par = cfg.c_per_len_ff_per_um * shared as f64 * layout.pitch_um;
        let delta = (comp_freq(layout, a) - comp_freq(layout, b)).abs();
        let eps = crosstalk_pair_error(delta, cfg.t_gate_ns, c_par, cfg);
        report.fidelity *= 1.0 - eps;
        report.pair_terms.push((a, b, eps));
    }
    // crossings among routed active edges; router estimate for the rest.
    // BTreeMap keeps the term order, and with it the float product, stable
    let mut edges_at: BTreeMap<CellPos, BTreeSet<EdgeId>> = BTreeMap::new();
    for (&e, path) in &layout.routed {
        if !program.active_edges.contains(&e) {
            continue;
        }
        for &c in path {
            edges_at.entry(c).or_default().insert(e);
        }
    }
    let mut crossing_pairs: Vec<(f64, u64)> = Vec::new();
    for (_, set) in edges_at.iter().filter(|(_, s)| s.len() >= 2) {
        let ids: Vec<EdgeId> = set.iter().copied().collect();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                let delta = (layout.net.edge(ids[i]).freq_ghz
                    - layout.net.edge(ids[j]).freq_ghz)
                    .abs();
                crossing_pairs.push((delta, 1));
            }
        }
    }
    for &e in &program.active_edges {
        if !layout.routed.contains_key(&e) {
            let n = edge_crossing_estimate(layout, e)?;
            if n > 0 {
                // partner unknown for an estimate; worst case is resonance
                crossing_pairs.push((0.0, n));
            }
        }
    }
    for (delta, count) in crossing_pairs {
        for _ in 0..count {
            let eps = crosstalk_pair_error(delta, cfg.t_gate_ns, cfg.c_cross_ff, cfg);
            report.fidelity *= 1.0 - eps;
            report.crossing_terms.push(eps);
        }
    }
    Ok(report)
}

/// Draws a connected qubit subprogram and counts one single-qubit gate per
/// qubit plus one two-qubit gate per incident active edge.
pub fn sample_program(
    layout: &Layout,
    sampler: &SamplerConfig,
    rng: &mut ChaCha8Rng,
) -> ProgramFootprint {
    let nq = layout.net.qubits.len();
    let mut program = ProgramFootprint { duration_us: sampler.duration_us, ..Default::default() };
    if nq == 0 {
        return program;
    }
    let mut adjacency: Vec<Vec<QubitId>> = vec![Vec::new(); nq];
    for e in &layout.net.edges {
        adjacency[e.endpoints.0 .0 as usize].push(e.endpoints.1);
        adjacency[e.endpoints.1 .0 as usize].push(e.endpoints.0);
    }
    let start = QubitId(rng.gen_range(0..nq as u32));
    let mut frontier = vec![start];
    while program.active_qubits.len() < sampler.subgraph_qubits as usize && !frontier.is_empty() {
        let at = rng.gen_range(0..frontier.len());
        let q = frontier.swap_remove(at);
        if !program.active_qubits.insert(q) {
            continue;
        }
        for &nb in &adjacency[q.0 as usize] {
            if !program.active_qubits.contains(&nb) {
                frontier.push(nb);
            }
        }
    }
    for e in &layout.net.edges {
        if program.active_qubits.contains(&e.endpoints.0)
            && program.active_qubits.contains(&e.endpoints.1)
        {
            program.active_edges.insert(e.id);
        }
    }
    for &q in &program.active_qubits {
        program.gates1.insert(q, 1);
        let deg = layout
            .net
            .edges
            .iter()
            .filter(|e| {
                program.active_edges.contains(&e.id)
                    && (e.endpoints.0 == q || e.endpoints.1 == q)
            })
            .count() as u32;
        program.gates2.insert(q, deg);
    }
    program
}

/// Worst-case fidelity over sampled subprograms, deterministic per seed.
pub fn sampled_fidelity(layout: &Layout, cfg: &EngineConfig, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 1.0f64;
    for _ in 0..cfg.sampler.samples {
        let program = sample_program(layout, &cfg.sampler, &mut rng);
        let rep = program_fidelity(layout, &program, &cfg.error_model)?;
        worst = worst.min(rep.fidelity);
    }
    Ok(worst)
}

/// L1 displacement aggregates between two snapshots of the same components.
pub fn displacement_stats(before: &Placements, after: &Placements) -> Result<(i64, f64, i64)> {
    if before.positions.len() != after.positions.len()
        || !before.positions.keys().eq(after.positions.keys())
    {
        return Err(Error::InvalidInput(
            "displacement requires identical component sets".into(),
        ));
    }
    let mut total = 0i64;
    let mut max = 0i64;
    for (id, a) in &before.positions {
        let b = after.positions[id];
        let d = (a.x - b.x).abs() as i64 + (a.y - b.y).abs() as i64;
        total += d;
        max = max.max(d);
    }
    let n = before.positions.len().max(1);
    Ok((total, total as f64 / n as f64, max))
}

#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub sum_clusters: usize,
    pub unified_edges: usize,
    pub total_edges: usize,
    pub crossings: u64,
    pub p_h_percent: f64,
    pub h_q: usize,
    pub fidelity: f64,
}

pub fn metrics_report(layout: &Layout, cfg: &EngineConfig, seed: u64) -> Result<MetricsReport> {
    let hotspot = hotspot_proportion(layout, &cfg.hotspot);
    let (unified, total) = unified_fraction(layout)?;
    Ok(MetricsReport {
        sum_clusters: total_clusters(layout)?,
        unified_edges: unified,
        total_edges: total,
        crossings: count_crossings(layout)?,
        p_h_percent: hotspot.p_h_percent(),
        h_q: hotspot.h_q,
        fidelity: sampled_fidelity(layout, cfg, seed)?,
    })
}

/// Serializes a report with the fixed key set downstream tooling expects.
pub fn report_json(report: &MetricsReport, cfg: &EngineConfig) -> Result<serde_json::Value> {
    Ok(serde_json::json!({
        "sum_clusters": report.sum_clusters,
        "I_edge": [report.unified_edges, report.total_edges],
        "X": report.crossings,
        "P_h_percent": report.p_h_percent,
        "H_Q": report.h_q,
        "fidelity": report.fidelity,
        "config_echo": serde_json::to_value(cfg)?,
    }))
}
