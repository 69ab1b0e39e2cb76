//! Benchmark harness. Runs every (topology, engine) pair over a shared seed
//! list, aggregates per-seed metrics into mean/sigma rows, and renders the
//! result as CSV or Markdown. Per-seed failures are recorded on the row and
//! the sweep keeps going.

use crate::cluster::{total_clusters, unified_fraction};
use crate::config::EngineConfig;
use crate::error::Result;
use crate::gp::synthetic_gp;
use crate::layout::{Layout, Placements};
use crate::metrics::{
    count_crossings, displacement_stats, hotspot_proportion, program_fidelity, sample_program,
};
use crate::pipeline::{run_pipeline, Engine};
use crate::topo::{gen_topology, substrate_cells, TopologySpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

/// Mean and population standard deviation over the successful seeds.
#[derive(Debug, Clone, Copy)]
pub struct Stat {
    pub mean: f64,
    pub sigma: f64,
}

impl Stat {
    fn over(values: &[f64]) -> Stat {
        if values.is_empty() {
            return Stat { mean: f64::NAN, sigma: f64::NAN };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Stat { mean, sigma: var.sqrt() }
    }
}

/// One (topology, engine) cell aggregated over seeds.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub topology: String,
    pub engine: Engine,
    pub ok_seeds: usize,
    pub failures: Vec<String>,
    pub total_edges: usize,
    pub t_q_ms: Stat,
    pub t_e_ms: Stat,
    pub sum_clusters: Stat,
    pub unified_edges: Stat,
    pub crossings: Stat,
    pub p_h_percent: Stat,
    pub h_q: Stat,
    pub fidelity: Stat,
    pub disp_total: Stat,
    pub disp_mean: Stat,
    pub disp_max: Stat,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub seeds: Vec<u64>,
    pub noise_cells: f64,
    /// Crosstalk error convention the fidelity column was computed under.
    pub eg_convention: String,
}

struct SeedMetrics {
    t_q_ms: f64,
    t_e_ms: f64,
    sum_clusters: f64,
    unified_edges: f64,
    crossings: f64,
    p_h_percent: f64,
    h_q: f64,
    fidelity: f64,
    disp_total: f64,
    disp_mean: f64,
    disp_max: f64,
}

/// Average program fidelity over the sampled footprints (the headline report
/// keeps the worst case; comparison tables want the mean).
fn mean_fidelity(layout: &Layout, cfg: &EngineConfig, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.sampler.samples.max(1);
    let mut sum = 0.0;
    for _ in 0..n {
        let program = sample_program(layout, &cfg.sampler, &mut rng);
        sum += program_fidelity(layout, &program, &cfg.error_model)?.fidelity;
    }
    Ok(sum / n as f64)
}

fn run_cell(
    spec: &TopologySpec,
    engine: Engine,
    seed: u64,
    cfg: &EngineConfig,
    noise_cells: f64,
) -> Result<SeedMetrics> {
    let geo = &cfg.geometry;
    let net = gen_topology(spec, geo)?;
    let w = substrate_cells(&net, geo);
    let mut layout = Layout::new(net, geo.pitch_um, w, w)?;
    synthetic_gp(&mut layout, seed, noise_cells)?;
    let mut gp_snap = Placements { positions: Default::default() };
    for id in layout.comp_ids() {
        if let Some(anchor) = layout.gp_anchor(id) {
            gp_snap.positions.insert(id, anchor);
        }
    }

    let rep = run_pipeline(&mut layout, engine, cfg, false)?;
    let after = layout.placements();
    let (d_total, d_mean, d_max) = displacement_stats(&gp_snap, &after)?;
    let hotspot = hotspot_proportion(&layout, &cfg.hotspot);
    let (unified, _) = unified_fraction(&layout)?;
    Ok(SeedMetrics {
        t_q_ms: rep.t_q_ms,
        t_e_ms: rep.t_e_ms,
        sum_clusters: total_clusters(&layout)? as f64,
        unified_edges: unified as f64,
        crossings: count_crossings(&layout)? as f64,
        p_h_percent: hotspot.p_h_percent(),
        h_q: hotspot.h_q as f64,
        fidelity: mean_fidelity(&layout, cfg, seed)?,
        disp_total: d_total as f64,
        disp_mean: d_mean,
        disp_max: d_max as f64,
    })
}

/// Runs the full cross product. Rows come out topology-major in the order
/// given, engines in the order given, so repeat invocations line up.
pub fn bench(
    specs: &[TopologySpec],
    engines: &[Engine],
    seeds: &[u64],
    cfg: &EngineConfig,
    noise_cells: f64,
) -> BenchReport {
    let mut rows = Vec::new();
    for spec in specs {
        let total_edges =
            gen_topology(spec, &cfg.geometry).map(|n| n.edges.len()).unwrap_or(0);
        for &engine in engines {
            let mut runs: Vec<SeedMetrics> = Vec::new();
            let mut failures = Vec::new();
            for &seed in seeds {
                match run_cell(spec, engine, seed, cfg, noise_cells) {
                    Ok(m) => runs.push(m),
                    Err(e) => failures.push(format!("seed {seed}: {e}")),
                }
            }
            let col = |f: fn(&SeedMetrics) -> f64| {
                Stat::over(&runs.iter().map(f).collect::<Vec<_>>())
            };
            rows.push(BenchRow {
                topology: spec.name(),
                engine,
                ok_seeds: runs.len(),
                failures,
                total_edges,
                t_q_ms: col(|m| m.t_q_ms),
                t_e_ms: col(|m| m.t_e_ms),
                sum_clusters: col(|m| m.sum_clusters),
                unified_edges: col(|m| m.unified_edges),
                crossings: col(|m| m.crossings),
                p_h_percent: col(|m| m.p_h_percent),
                h_q: col(|m| m.h_q),
                fidelity: col(|m| m.fidelity),
                disp_total: col(|m| m.disp_total),
                disp_mean: col(|m| m.disp_mean),
                disp_max: col(|m| m.disp_max),
            });
        }
    }
    let eg_convention = serde_json::to_value(cfg.error_model.eg_convention)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    BenchReport { rows, seeds: seeds.to_vec(), noise_cells, eg_convention }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        String::new()
    }
}

impl BenchReport {
    /// Flat table, one row per (topology, engine). Runtime columns come
    /// first after the keys so they are easy to strip when diffing runs.
    pub fn csv(&self) -> String {
        let mut out = String::from(
            "topology,engine,ok_seeds,failures,t_q_ms_mean,t_q_ms_sigma,t_e_ms_mean,t_e_ms_sigma,\
             sum_clusters_mean,sum_clusters_sigma,unified_edges_mean,total_edges,crossings_mean,\
             crossings_sigma,p_h_percent_mean,p_h_percent_sigma,h_q_mean,fidelity_mean,\
             fidelity_sigma,disp_total_mean,disp_mean_mean,disp_max_mean\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.topology,
                r.engine,
                r.ok_seeds,
                r.failures.len(),
                num(r.t_q_ms.mean),
                num(r.t_q_ms.sigma),
                num(r.t_e_ms.mean),
                num(r.t_e_ms.sigma),
                num(r.sum_clusters.mean),
                num(r.sum_clusters.sigma),
                num(r.unified_edges.mean),
                r.total_edges,
                num(r.crossings.mean),
                num(r.crossings.sigma),
                num(r.p_h_percent.mean),
                num(r.p_h_percent.sigma),
                num(r.h_q.mean),
                num(r.fidelity.mean),
                num(r.fidelity.sigma),
                num(r.disp_total.mean),
                num(r.disp_mean.mean),
                num(r.disp_max.mean),
            );
        }
        out
    }

    /// Two tables: a runtime pivot (topology rows, engine columns) and a
    /// quality table (one row per topology and engine), plus any failures.
    pub fn markdown(&self) -> String {
        let mut engines: Vec<Engine> = Vec::new();
        for r in &self.rows {
            if !engines.contains(&r.engine) {
                engines.push(r.engine);
            }
        }
        let mut topologies: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !topologies.contains(&r.topology.as_str()) {
                topologies.push(&r.topology);
            }
        }
        let cell = |t: &str, e: Engine| {
            self.rows.iter().find(|r| r.topology == t && r.engine == e)
        };

        let mut out = String::from("# Legalization benchmark\n\n");
        let _ = writeln!(
            out,
            "Seeds: {:?} (n = {}). GP noise sigma {} cells. Crosstalk convention: {}. \
             Times in ms, other columns mean over seeds.\n",
            self.seeds,
            self.seeds.len(),
            self.noise_cells,
            self.eg_convention
        );

        out.push_str("## Runtime\n\n| Topology |");
        for e in &engines {
            let _ = write!(out, " {e} t_q | {e} t_e |");
        }
        out.push('\n');
        out.push_str("|---|");
        for _ in &engines {
            out.push_str("---|---|");
        }
        out.push('\n');
        for t in &topologies {
            let _ = write!(out, "| {t} |");
            for &e in &engines {
                match cell(t, e) {
                    Some(r) if r.ok_seeds > 0 => {
                        let _ = write!(out, " {:.2} | {:.2} |", r.t_q_ms.mean, r.t_e_ms.mean);
                    }
                    _ => out.push_str(" - | - |"),
                }
            }
            out.push('\n');
        }

        out.push_str(
            "\n## Quality\n\n| Topology | Engine | Sum clusters | I_edge | X | P_h % | H_Q | \
             Fidelity | Disp total | Disp mean | Disp max |\n\
             |---|---|---|---|---|---|---|---|---|---|---|\n",
        );
        for r in &self.rows {
            if r.ok_seeds == 0 {
                let _ = writeln!(out, "| {} | {} | - | - | - | - | - | - | - | - | - |", r.topology, r.engine);
                continue;
            }
            let _ = writeln!(
                out,
                "| {} | {} | {:.1} | {:.1}/{} | {:.1} | {:.2} | {:.1} | {:.4} | {:.1} | {:.2} | {:.1} |",
                r.topology,
                r.engine,
                r.sum_clusters.mean,
                r.unified_edges.mean,
                r.total_edges,
                r.crossings.mean,
                r.p_h_percent.mean,
                r.h_q.mean,
                r.fidelity.mean,
                r.disp_total.mean,
                r.disp_mean.mean,
                r.disp_max.mean,
            );
        }

        let mut failed: Vec<&BenchRow> = self.rows.iter().filter(|r| !r.failures.is_empty()).collect();
        if !failed.is_empty() {
            out.push_str("\n## Failures\n\n");
            for r in failed.drain(..) {
                for f in &r.failures {
                    let _ = writeln!(out, "- {} / {}: {}", r.topology, r.engine, f);
                }
            }
        }
        out
    }
}
