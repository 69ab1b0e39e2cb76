//! Command-line front end: generate topologies, synthesize jittered global
//! placements, legalize, refine, score, render, and benchmark.

use clap::{Parser, Subcommand};
use qchip::bench::bench;
use qchip::config::EngineConfig;
use qchip::dp::detailed_place;
use qchip::files::{
    apply_placement, load_netlist, load_placement, netlist_from_file, netlist_to_file,
    placement_from_layout, save_netlist, save_placement, Stage,
};
use qchip::gp::synthetic_gp;
use qchip::layout::Layout;
use qchip::metrics::{metrics_report, report_json};
use qchip::pipeline::{run_pipeline, Engine};
use qchip::render::render_svg;
use qchip::topo::{gen_topology, substrate_cells, TopologySpec};
use qchip::validate::validate;
use qchip::{Error, Result};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "qchip", version, about = "Quantum-chip layout legalization toolkit")]
struct Cli {
    /// JSON config with geometry, spacing, hotspot, error-model and DP knobs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for generation, jitter and fidelity sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a topology netlist file.
    Gen {
        /// grid, grid-RxC, falcon, eagle, aspen-11, aspen-m, octagon-RxC, xtree, xtree-D.
        #[arg(long)]
        topology: String,
    },
    /// Synthesize a jittered global placement for a netlist.
    Gp {
        #[arg(long)]
        netlist: PathBuf,
        /// Gaussian jitter sigma in cells.
        #[arg(long, default_value_t = 1.5)]
        noise: f64,
    },
    /// Legalize a gp-stage placement with the chosen engine.
    Legalize {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        placement: PathBuf,
        /// qgdp, tetris, abacus, q-tetris or q-abacus.
        #[arg(long)]
        engine: String,
        /// Run the detailed placer after legalization.
        #[arg(long)]
        dp: bool,
    },
    /// Refine a legalized placement with the detailed placer.
    Dp {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        placement: PathBuf,
    },
    /// Score a legalized placement and print the metrics report.
    Metrics {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        placement: PathBuf,
    },
    /// Render a placement to SVG.
    Render {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        placement: PathBuf,
        /// Overlay spacing/overlap/hotspot violations.
        #[arg(long)]
        overlay: bool,
    },
    /// Sweep topologies x engines x seeds; write CSV and Markdown tables.
    Bench {
        /// Comma-separated topology names; default is the six benchmarks.
        #[arg(long)]
        topologies: Option<String>,
        /// Comma-separated engine names; default is all five.
        #[arg(long)]
        engines: Option<String>,
        /// Seeds used per cell, consecutive starting at --seed.
        #[arg(long, default_value_t = 3)]
        seed_count: u32,
        /// Gaussian jitter sigma in cells for the synthetic placements.
        #[arg(long, default_value_t = 1.5)]
        noise: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn load_layout(netlist: &Path) -> Result<Layout> {
    let file = load_netlist(netlist)?;
    let (net, pitch, (w_um, h_um)) = netlist_from_file(&file)?;
    let w = (w_um / pitch).round() as i32;
    let h = (h_um / pitch).round() as i32;
    Layout::new(net, pitch, w, h)
}

fn load_staged(netlist: &Path, placement: &Path, want_legal: bool) -> Result<Layout> {
    let mut layout = load_layout(netlist)?;
    let file = load_placement(placement)?;
    if want_legal && file.stage == Stage::Gp {
        return Err(Error::InvalidInput(
            "placement is gp-stage; run legalize first".into(),
        ));
    }
    if !want_legal && file.stage != Stage::Gp {
        return Err(Error::InvalidInput(format!(
            "placement is {}-stage; legalize expects gp",
            file.stage
        )));
    }
    apply_placement(&mut layout, &file)?;
    layout.qubit_spacing_cells = file.qubit_spacing_cells;
    Ok(layout)
}

fn run(cli: Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.out)?;
    let cfg = match &cli.config {
        Some(p) => EngineConfig::load(p)?,
        None => EngineConfig::default(),
    };

    match cli.cmd {
        Cmd::Gen { topology } => {
            let spec = TopologySpec::parse(&topology)?;
            let net = gen_topology(&spec, &cfg.geometry)?;
            let w = substrate_cells(&net, &cfg.geometry) as f64 * cfg.geometry.pitch_um;
            let file = netlist_to_file(&net, cfg.geometry.pitch_um, (w, w));
            let path = cli.out.join(format!("{}-netlist.json", spec.name()));
            save_netlist(&path, &file)?;
            println!("wrote {}", path.display());
        }
        Cmd::Gp { netlist, noise } => {
            let mut layout = load_layout(&netlist)?;
            synthetic_gp(&mut layout, cli.seed, noise)?;
            let file = placement_from_layout(&layout, Stage::Gp, None);
            let path = cli.out.join("gp.json");
            save_placement(&path, &file)?;
            println!("wrote {}", path.display());
        }
        Cmd::Legalize { netlist, placement, engine, dp } => {
            let engine = Engine::parse(&engine)?;
            let mut layout = load_staged(&netlist, &placement, false)?;
            let rep = run_pipeline(&mut layout, engine, &cfg, dp)?;
            let stage = if dp { Stage::Dp } else { Stage::Lg };
            let file = placement_from_layout(&layout, stage, layout.qubit_spacing_cells);
            let path = cli.out.join(format!("{stage}-{engine}.json"));
            save_placement(&path, &file)?;
            let check = validate(&layout, layout.qubit_spacing_cells.unwrap_or(0));
            println!("wrote {}", path.display());
            println!(
                "qubit stage: moved {}, displaced {} cells, spacing {}, {:.1} ms",
                rep.qubit.moved, rep.qubit.displacement_cells, rep.qubit.achieved_spacing, rep.t_q_ms
            );
            println!(
                "block stage: placed {}, displaced {:.1} cells, {:.1} ms",
                rep.blocks.placed, rep.blocks.displacement_cells, rep.t_e_ms
            );
            if let Some(d) = &rep.dp {
                println!(
                    "dp stage: {} of {} changes accepted over {} passes, {:.1} ms",
                    d.accepted(),
                    d.changes.len(),
                    d.passes,
                    rep.t_dp_ms
                );
            }
            println!("violations: {}", check.entries.len());
        }
        Cmd::Dp { netlist, placement } => {
            let mut layout = load_staged(&netlist, &placement, true)?;
            let rep = detailed_place(&mut layout, &cfg.dp, &cfg.hotspot)?;
            let file = placement_from_layout(&layout, Stage::Dp, layout.qubit_spacing_cells);
            let path = cli.out.join("dp.json");
            save_placement(&path, &file)?;
            let report = serde_json::json!({
                "passes": rep.passes,
                "accepted": rep.accepted(),
                "changes": rep.changes,
            });
            let report_path = cli.out.join("dp-report.json");
            std::fs::write(&report_path, format!("{:#}\n", report))?;
            println!("wrote {}", path.display());
            println!("wrote {}", report_path.display());
            println!(
                "{} of {} changes accepted over {} passes",
                rep.accepted(),
                rep.changes.len(),
                rep.passes
            );
        }
        Cmd::Metrics { netlist, placement } => {
            let layout = load_staged(&netlist, &placement, true)?;
            let rep = metrics_report(&layout, &cfg, cli.seed)?;
            let json = report_json(&rep, &cfg)?;
            let text = format!("{:#}\n", json);
            let path = cli.out.join("metrics.json");
            std::fs::write(&path, &text)?;
            print!("{text}");
        }
        Cmd::Render { netlist, placement, overlay } => {
            let mut layout = load_layout(&netlist)?;
            let file = load_placement(&placement)?;
            apply_placement(&mut layout, &file)?;
            let report;
            let ov = if overlay {
                report = validate(&layout, file.qubit_spacing_cells.unwrap_or(0));
                Some(&report)
            } else {
                None
            };
            let path = cli.out.join("layout.svg");
            render_svg(&layout, &path, ov)?;
            println!("wrote {}", path.display());
        }
        Cmd::Bench { topologies, engines, seed_count, noise } => {
            let specs = match topologies {
                Some(list) => list
                    .split(',')
                    .map(|t| TopologySpec::parse(t.trim()))
                    .collect::<Result<Vec<_>>>()?,
                None => TopologySpec::benchmarks(),
            };
            let engines = match engines {
                Some(list) => list
                    .split(',')
                    .map(|e| Engine::parse(e.trim()))
                    .collect::<Result<Vec<_>>>()?,
                None => Engine::all().to_vec(),
            };
            if specs.is_empty() || engines.is_empty() || seed_count == 0 {
                return Err(Error::InvalidInput("bench needs topologies, engines and seeds".into()));
            }
            let seeds: Vec<u64> = (0..seed_count).map(|i| cli.seed + i as u64).collect();
            let report = bench(&specs, &engines, &seeds, &cfg, noise);
            let csv_path = cli.out.join("bench.csv");
            let md_path = cli.out.join("bench.md");
            std::fs::write(&csv_path, report.csv())?;
            std::fs::write(&md_path, report.markdown())?;
            println!("wrote {}", csv_path.display());
            println!("wrote {}", md_path.display());
            print!("{}", report.markdown());
        }
    }
    Ok(())
}
