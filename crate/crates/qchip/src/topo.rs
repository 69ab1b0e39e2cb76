//! Topology generators for the benchmark netlists: square grid, heavy-hex
//! processors, octagon grids, and X-trees. Each generator emits a connected
//! netlist with deterministic qubit and edge counts plus abstract lattice
//! coordinates consumed by the synthetic global placer.
//!
//! Qubit frequencies come from a greedy coloring of the connectivity graph,
//! colors spread evenly over the qubit band so coupled qubits sit far apart.
//! Resonator frequencies are an evenly spaced comb over the resonator band,
//! dealt out with a golden-ratio stride so edges with nearby ids (which the
//! generators emit in spatial scan order) land far apart in frequency.

use crate::config::GeometryConfig;
use crate::error::{Error, Result};
use crate::netlist::{EdgeDesc, NetGraph, QubitDesc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyKind {
    Grid { rows: u32, cols: u32 },
    /// Heavy-hex lattice sized like the published 27- and 127-qubit parts.
    HeavyHex { qubits: u32 },
    /// Grid of 8-qubit octagon rings joined by doubled links.
    Octagon { rows: u32, cols: u32 },
    /// Four trunks from a root, ternary branching below, leaves at `depth`.
    Xtree { depth: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologySpec {
    pub kind: TopologyKind,
    pub qubit_band_ghz: (f64, f64),
    pub res_band_ghz: (f64, f64),
}

impl TopologySpec {
    pub fn new(kind: TopologyKind) -> TopologySpec {
        TopologySpec { kind, qubit_band_ghz: (4.8, 5.2), res_band_ghz: (6.0, 7.0) }
    }

    pub fn grid25() -> TopologySpec {
        TopologySpec::new(TopologyKind::Grid { rows: 5, cols: 5 })
    }

    pub fn falcon() -> TopologySpec {
        TopologySpec::new(TopologyKind::HeavyHex { qubits: 27 })
    }

    pub fn eagle() -> TopologySpec {
        TopologySpec::new(TopologyKind::HeavyHex { qubits: 127 })
    }

    pub fn aspen11() -> TopologySpec {
        TopologySpec::new(TopologyKind::Octagon { rows: 1, cols: 5 })
    }

    pub fn aspen_m() -> TopologySpec {
        TopologySpec::new(TopologyKind::Octagon { rows: 2, cols: 5 })
    }

    pub fn xtree3() -> TopologySpec {
        TopologySpec::new(TopologyKind::Xtree { depth: 3 })
    }

    /// The six benchmark instances, in report order.
    pub fn benchmarks() -> Vec<TopologySpec> {
        vec![
            TopologySpec::grid25(),
            TopologySpec::xtree3(),
            TopologySpec::falcon(),
            TopologySpec::eagle(),
            TopologySpec::aspen11(),
            TopologySpec::aspen_m(),
        ]
    }

    pub fn name(&self) -> String {
        match self.kind {
            TopologyKind::Grid { rows: 5, cols: 5 } => "grid".into(),
            TopologyKind::Grid { rows, cols } => format!("grid-{rows}x{cols}"),
            TopologyKind::HeavyHex { qubits: 27 } => "falcon".into(),
            TopologyKind::HeavyHex { qubits: 127 } => "eagle".into(),
            TopologyKind::HeavyHex { qubits } => format!("heavy-hex-{qubits}"),
            TopologyKind::Octagon { rows: 1, cols: 5 } => "aspen-11".into(),
            TopologyKind::Octagon { rows: 2, cols: 5 } => "aspen-m".into(),
            TopologyKind::Octagon { rows, cols } => format!("octagon-{rows}x{cols}"),
            TopologyKind::Xtree { depth: 3 } => "xtree".into(),
            TopologyKind::Xtree { depth } => format!("xtree-{depth}"),
        }
    }

    pub fn parse(name: &str) -> Result<TopologySpec> {
        let dims = |s: &str| -> Option<(u32, u32)> {
            let (r, c) = s.split_once('x')?;
            Some((r.parse().ok()?, c.parse().ok()?))
        };
        let kind = match name {
            "grid" => TopologyKind::Grid { rows: 5, cols: 5 },
            "falcon" => TopologyKind::HeavyHex { qubits: 27 },
            "eagle" => TopologyKind::HeavyHex { qubits: 127 },
            "aspen-11" => TopologyKind::Octagon { rows: 1, cols: 5 },
            "aspen-m" => TopologyKind::Octagon { rows: 2, cols: 5 },
            "xtree" => TopologyKind::Xtree { depth: 3 },
            _ => {
                if let Some(rest) = name.strip_prefix("grid-") {
                    let (rows, cols) = dims(rest).ok_or_else(|| bad_name(name))?;
                    TopologyKind::Grid { rows, cols }
                } else if let Some(rest) = name.strip_prefix("octagon-") {
                    let (rows, cols) = dims(rest).ok_or_else(|| bad_name(name))?;
                    TopologyKind::Octagon { rows, cols }
                } else if let Some(rest) = name.strip_prefix("xtree-") {
                    let depth = rest.parse().map_err(|_| bad_name(name))?;
                    TopologyKind::Xtree { depth }
                } else {
                    return Err(bad_name(name));
                }
            }
        };
        Ok(TopologySpec::new(kind))
    }
}

fn bad_name(name: &str) -> Error {
    Error::InvalidInput(format!(
        "unknown topology {name:?}; try grid, grid-RxC, falcon, eagle, aspen-11, aspen-m, octagon-RxC, xtree, xtree-D"
    ))
}

/// Bare connectivity plus drawing coordinates, before frequency assignment.
struct Lattice {
    coords: Vec<(f64, f64)>,
    links: Vec<(u32, u32)>,
}

impl Lattice {
    fn new() -> Lattice {
        Lattice { coords: Vec::new(), links: Vec::new() }
    }

    fn qubit(&mut self, x: f64, y: f64) -> u32 {
        self.coords.push((x, y));
        (self.coords.len() - 1) as u32
    }

    fn link(&mut self, a: u32, b: u32) {
        self.links.push((a, b));
    }
}

fn grid_lattice(rows: u32, cols: u32) -> Result<Lattice> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("grid needs at least one row and column".into()));
    }
    let mut lat = Lattice::new();
    for r in 0..rows {
        for c in 0..cols {
            lat.qubit(c as f64, r as f64);
        }
    }
    let id = |r: u32, c: u32| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                lat.link(id(r, c), id(r, c + 1));
            }
            if r + 1 < rows {
                lat.link(id(r, c), id(r + 1, c));
            }
        }
    }
    Ok(lat)
}

/// Rows of qubit chains tied together by bridge qubits on alternating
/// columns. `row_cols` lists each chain row's column positions; `bridges`
/// lists (gap index, column) pairs. The published 27- and 127-qubit parts
/// are instances of this scheme.
fn heavy_hex_lattice(row_cols: &[Vec<u32>], bridges: &[(usize, u32)]) -> Lattice {
    let mut lat = Lattice::new();
    let mut row_ids: Vec<Vec<(u32, u32)>> = Vec::new();
    for (r, cols) in row_cols.iter().enumerate() {
        let mut ids = Vec::new();
        let mut prev: Option<u32> = None;
        for &c in cols {
            let q = lat.qubit(c as f64, (2 * r) as f64);
            ids.push((c, q));
            if let Some(p) = prev {
                lat.link(p, q);
            }
            prev = Some(q);
        }
        row_ids.push(ids);
    }
    let find = |row: &[(u32, u32)], col: u32| -> u32 {
        row.iter().find(|(c, _)| *c == col).expect("bridge column exists in row").1
    };
    for &(gap, col) in bridges {
        let b = lat.qubit(col as f64, (2 * gap + 1) as f64);
        lat.link(find(&row_ids[gap], col), b);
        lat.link(b, find(&row_ids[gap + 1], col));
    }
    lat
}

fn heavy_hex(qubits: u32) -> Result<Lattice> {
    match qubits {
        27 => {
            let rows = vec![(0..8).collect(), (0..7).collect(), (0..8).collect()];
            let bridges = [(0, 0), (0, 4), (1, 2), (1, 6)];
            Ok(heavy_hex_lattice(&rows, &bridges))
        }
        127 => {
            let mut rows: Vec<Vec<u32>> = vec![(0..14).collect()];
            for _ in 0..5 {
                rows.push((0..15).collect());
            }
            rows.push((1..15).collect());
            let mut bridges = Vec::new();
            for gap in 0..6 {
                let cols: [u32; 4] = if gap % 2 == 0 { [0, 4, 8, 12] } else { [2, 6, 10, 14] };
                for c in cols {
                    bridges.push((gap, c));
                }
            }
            Ok(heavy_hex_lattice(&rows, &bridges))
        }
        other => Err(Error::InvalidInput(format!(
            "heavy-hex generator supports 27 or 127 qubits, got {other}"
        ))),
    }
}

/// Ring offsets of one octagon, walk order, y up.
const OCTAGON_RING: [(u32, u32); 8] =
    [(1, 0), (2, 0), (3, 1), (3, 2), (2, 3), (1, 3), (0, 2), (0, 1)];

fn octagon_lattice(rows: u32, cols: u32) -> Result<Lattice> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("octagon grid needs at least one ring".into()));
    }
    let mut lat = Lattice::new();
    for r in 0..rows {
        for c in 0..cols {
            for (dx, dy) in OCTAGON_RING {
                lat.qubit((4 * c + dx) as f64, (4 * r + dy) as f64);
            }
        }
    }
    let at = |r: u32, c: u32, k: u32| (r * cols + c) * 8 + k;
    for r in 0..rows {
        for c in 0..cols {
            for k in 0..8 {
                lat.link(at(r, c, k), at(r, c, (k + 1) % 8));
            }
        }
    }
    // doubled junctions: right side to the next ring's left side
    for r in 0..rows {
        for c in 0..cols - 1 {
            lat.link(at(r, c, 2), at(r, c + 1, 7));
            lat.link(at(r, c, 3), at(r, c + 1, 6));
        }
    }
    // top side to the ring above's bottom side
    for r in 0..rows - 1 {
        for c in 0..cols {
            lat.link(at(r, c, 5), at(r + 1, c, 0));
            lat.link(at(r, c, 4), at(r + 1, c, 1));
        }
    }
    Ok(lat)
}

fn xtree_lattice(depth: u32) -> Lattice {
    use std::f64::consts::PI;
    let mut lat = Lattice::new();
    let root = lat.qubit(0.0, 0.0);
    // (id, sector start, sector end) of the previous level
    let mut level = vec![(root, 0.0f64, 2.0 * PI)];
    for d in 1..=depth {
        let fan = if d == 1 { 4 } else { 3 };
        let radius = d as f64 * 1.5;
        let mut next = Vec::new();
        for &(parent, a0, a1) in &level {
            for k in 0..fan {
                let lo = a0 + (a1 - a0) * k as f64 / fan as f64;
                let hi = a0 + (a1 - a0) * (k + 1) as f64 / fan as f64;
                let mid = (lo + hi) / 2.0;
                let q = lat.qubit(radius * mid.cos(), radius * mid.sin());
                lat.link(parent, q);
                next.push((q, lo, hi));
            }
        }
        level = next;
    }
    lat
}

/// Greedy coloring in id order; returns (color per qubit, color count).
fn greedy_colors(n: usize, links: &[(u32, u32)]) -> (Vec<u32>, u32) {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in links {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    let mut colors = vec![u32::MAX; n];
    let mut count = 0;
    for q in 0..n {
        let taken: Vec<u32> =
            adj[q].iter().filter(|&&o| o < q).map(|&o| colors[o]).collect();
        let mut c = 0;
        while taken.contains(&c) {
            c += 1;
        }
        colors[q] = c;
        count = count.max(c + 1);
    }
    (colors, count)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest stride coprime with `n` at or above the golden-ratio fraction.
fn golden_stride(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let mut s = ((n as f64 * 0.381_966).round() as usize).max(1);
    while gcd(s, n) != 1 {
        s += 1;
    }
    s
}

/// Build the netlist for a topology spec: connectivity from the lattice
/// builders, frequencies from the band rules, resonator lengths from the
/// half-wave relation, block partitioning from the geometry defaults.
pub fn gen_topology(spec: &TopologySpec, geo: &GeometryConfig) -> Result<NetGraph> {
    for (lo, hi) in [spec.qubit_band_ghz, spec.res_band_ghz] {
        if !(lo > 0.0) || !(hi >= lo) {
            return Err(Error::InvalidInput(format!(
                "frequency band ({lo}, {hi}) must be positive and ordered"
            )));
        }
    }
    let lat = match spec.kind {
        TopologyKind::Grid { rows, cols } => grid_lattice(rows, cols)?,
        TopologyKind::HeavyHex { qubits } => heavy_hex(qubits)?,
        TopologyKind::Octagon { rows, cols } => octagon_lattice(rows, cols)?,
        TopologyKind::Xtree { depth } => xtree_lattice(depth),
    };
    let (colors, color_count) = greedy_colors(lat.coords.len(), &lat.links);
    let (qlo, qhi) = spec.qubit_band_ghz;
    let qubit_freq = |c: u32| {
        if color_count <= 1 {
            (qlo + qhi) / 2.0
        } else {
            qlo + (qhi - qlo) * c as f64 / (color_count - 1) as f64
        }
    };
    let qubits: Vec<QubitDesc> = (0..lat.coords.len())
        .map(|i| QubitDesc {
            id: i as u32,
            freq_ghz: qubit_freq(colors[i]),
            size_um: (geo.qubit_um, geo.qubit_um),
        })
        .collect();
    let ec = lat.links.len();
    let (rlo, rhi) = spec.res_band_ghz;
    let stride = golden_stride(ec);
    let res_freq = |i: usize| {
        if ec <= 1 {
            (rlo + rhi) / 2.0
        } else {
            let slot = (i * stride) % ec;
            rlo + (rhi - rlo) * slot as f64 / (ec - 1) as f64
        }
    };
    let edges: Vec<EdgeDesc> = lat
        .links
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let f = res_freq(i);
            EdgeDesc {
                id: i as u32,
                q1: a,
                q2: b,
                freq_ghz: f,
                length_um: geo.resonator_length_um(f),
                pad_um: geo.pad_um,
            }
        })
        .collect();
    let mut net = NetGraph::build(&qubits, &edges, geo.pitch_um)?;
    net.ideal_coords = Some(lat.coords);
    Ok(net)
}

/// Substrate side in cells: smallest square with at least `area_factor`
/// times the total component cell area.
pub fn substrate_cells(net: &NetGraph, geo: &GeometryConfig) -> i32 {
    let area = net.total_component_cells() as f64 * geo.substrate_area_factor;
    (area.sqrt().ceil() as i32).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn counts(spec: &TopologySpec) -> (usize, usize) {
        let net = gen_topology(spec, &GeometryConfig::default()).unwrap();
        (net.qubits.len(), net.edges.len())
    }

    #[test]
    fn benchmark_counts_are_exact() {
        assert_eq!(counts(&TopologySpec::grid25()), (25, 40));
        assert_eq!(counts(&TopologySpec::xtree3()), (53, 52));
        assert_eq!(counts(&TopologySpec::falcon()), (27, 28));
        assert_eq!(counts(&TopologySpec::eagle()), (127, 144));
        assert_eq!(counts(&TopologySpec::aspen11()), (40, 48));
        assert_eq!(counts(&TopologySpec::aspen_m()), (80, 106));
    }

    #[test]
    fn component_totals_match_references_within_3_percent() {
        let targets = [
            (TopologySpec::grid25(), 490.0),
            (TopologySpec::xtree3(), 660.0),
            (TopologySpec::falcon(), 354.0),
            (TopologySpec::eagle(), 1801.0),
            (TopologySpec::aspen11(), 598.0),
            (TopologySpec::aspen_m(), 1310.0),
        ];
        for (spec, want) in targets {
            let net = gen_topology(&spec, &GeometryConfig::default()).unwrap();
            let got = net.component_count() as f64;
            let rel = (got - want).abs() / want;
            assert!(rel <= 0.03, "{}: {} vs {} ({:.2}%)", spec.name(), got, want, rel * 100.0);
        }
    }

    #[test]
    fn benchmark_graphs_are_connected() {
        for spec in TopologySpec::benchmarks() {
            let net = gen_topology(&spec, &GeometryConfig::default()).unwrap();
            let n = net.qubits.len();
            let mut adj = vec![Vec::new(); n];
            for e in &net.edges {
                adj[e.endpoints.0 .0 as usize].push(e.endpoints.1 .0 as usize);
                adj[e.endpoints.1 .0 as usize].push(e.endpoints.0 .0 as usize);
            }
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(q) = stack.pop() {
                for &o in &adj[q] {
                    if !seen[o] {
                        seen[o] = true;
                        stack.push(o);
                    }
                }
            }
            assert!(seen.iter().all(|&s| s), "{} is disconnected", spec.name());
        }
    }

    #[test]
    fn grid_counts_follow_closed_form() {
        for (r, c) in [(1, 1), (2, 3), (4, 4), (3, 7)] {
            let spec = TopologySpec::new(TopologyKind::Grid { rows: r, cols: c });
            let want_edges = (r * (c - 1) + c * (r - 1)) as usize;
            assert_eq!(counts(&spec), ((r * c) as usize, want_edges));
        }
    }

    #[test]
    fn xtree_is_a_tree_at_every_depth() {
        for d in 1..=4u32 {
            let spec = TopologySpec::new(TopologyKind::Xtree { depth: d });
            let (q, e) = counts(&spec);
            assert_eq!(q, 2 * 3usize.pow(d) - 1);
            assert_eq!(e, q - 1);
        }
    }

    #[test]
    fn coupled_qubits_are_detuned() {
        for spec in TopologySpec::benchmarks() {
            let net = gen_topology(&spec, &GeometryConfig::default()).unwrap();
            let (lo, hi) = spec.qubit_band_ghz;
            for q in &net.qubits {
                assert!(q.freq_ghz >= lo - 1e-12 && q.freq_ghz <= hi + 1e-12);
            }
            for e in &net.edges {
                let d = (net.qubit(e.endpoints.0).freq_ghz
                    - net.qubit(e.endpoints.1).freq_ghz)
                    .abs();
                assert!(d >= 0.1, "{}: edge {} detuning {}", spec.name(), e.id.0, d);
            }
        }
    }

    #[test]
    fn resonator_frequencies_fill_the_band() {
        let net = gen_topology(&TopologySpec::grid25(), &GeometryConfig::default()).unwrap();
        let freqs: BTreeSet<u64> = net.edges.iter().map(|e| e.freq_ghz.to_bits()).collect();
        assert_eq!(freqs.len(), net.edges.len(), "comb frequencies must be distinct");
        let min = net.edges.iter().map(|e| e.freq_ghz).fold(f64::INFINITY, f64::min);
        let max = net.edges.iter().map(|e| e.freq_ghz).fold(0.0, f64::max);
        assert_eq!(min, 6.0);
        assert_eq!(max, 7.0);
        let geo = GeometryConfig::default();
        for e in &net.edges {
            assert_eq!(e.length_um, geo.resonator_length_um(e.freq_ghz));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let geo = GeometryConfig::default();
        let a = gen_topology(&TopologySpec::aspen_m(), &geo).unwrap();
        let b = gen_topology(&TopologySpec::aspen_m(), &geo).unwrap();
        assert_eq!(a.qubits.len(), b.qubits.len());
        for (x, y) in a.qubits.iter().zip(&b.qubits) {
            assert_eq!(x.freq_ghz.to_bits(), y.freq_ghz.to_bits());
        }
        for (x, y) in a.edges.iter().zip(&b.edges) {
            assert_eq!(x.freq_ghz.to_bits(), y.freq_ghz.to_bits());
            assert_eq!(x.length_um.to_bits(), y.length_um.to_bits());
            assert_eq!(x.blocks.len(), y.blocks.len());
        }
        assert_eq!(a.ideal_coords, b.ideal_coords);
    }

    #[test]
    fn names_round_trip_through_parse() {
        for spec in TopologySpec::benchmarks() {
            assert_eq!(TopologySpec::parse(&spec.name()).unwrap(), spec);
        }
        assert_eq!(
            TopologySpec::parse("grid-3x7").unwrap().kind,
            TopologyKind::Grid { rows: 3, cols: 7 }
        );
        assert_eq!(
            TopologySpec::parse("octagon-2x2").unwrap().kind,
            TopologyKind::Octagon { rows: 2, cols: 2 }
        );
        assert_eq!(TopologySpec::parse("xtree-2").unwrap().kind, TopologyKind::Xtree { depth: 2 });
        assert!(TopologySpec::parse("klein-bottle").is_err());
        assert!(TopologySpec::parse("grid-x").is_err());
    }

    #[test]
    fn substrate_is_smallest_square_over_area_factor() {
        let geo = GeometryConfig::default();
        for spec in TopologySpec::benchmarks() {
            let net = gen_topology(&spec, &geo).unwrap();
            let w = substrate_cells(&net, &geo) as f64;
            let need = net.total_component_cells() as f64 * geo.substrate_area_factor;
            assert!(w * w >= need);
            assert!((w - 1.0) * (w - 1.0) < need);
        }
    }

    #[test]
    fn unsupported_sizes_are_rejected() {
        let geo = GeometryConfig::default();
        let hh = TopologySpec::new(TopologyKind::HeavyHex { qubits: 64 });
        assert!(matches!(gen_topology(&hh, &geo), Err(Error::InvalidInput(_))));
        let g = TopologySpec::new(TopologyKind::Grid { rows: 0, cols: 4 });
        assert!(matches!(gen_topology(&g, &geo), Err(Error::InvalidInput(_))));
        let mut bad = TopologySpec::grid25();
        bad.res_band_ghz = (7.0, 6.0);
        assert!(matches!(gen_topology(&bad, &geo), Err(Error::InvalidInput(_))));
    }
}
