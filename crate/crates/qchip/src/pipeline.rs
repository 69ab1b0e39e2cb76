//! Engine orchestration: the qubit stage, the block stage, and optional
//! detailed placement, with wall times per stage. The q-prefixed baselines
//! share the spacing-aware qubit stage; the plain baselines run it with no
//! spacing floor, which reduces it to a minimal-displacement overlap fixup.

use crate::config::EngineConfig;
use crate::dp::{detailed_place, DpReport};
use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::qubit_lg::{legalize_qubits, QubitLgReport, SpacingPolicy};
use crate::res_lg::{abacus_legalize, edge_order, legalize_resonators, tetris_legalize, ResLgReport};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Qgdp,
    Tetris,
    Abacus,
    QTetris,
    QAbacus,
}

impl Engine {
    pub fn parse(name: &str) -> Result<Engine> {
        match name {
            "qgdp" => Ok(Engine::Qgdp),
            "tetris" => Ok(Engine::Tetris),
            "abacus" => Ok(Engine::Abacus),
            "q-tetris" => Ok(Engine::QTetris),
            "q-abacus" => Ok(Engine::QAbacus),
            _ => Err(Error::InvalidInput(format!(
                "unknown engine {name:?}; expected qgdp, tetris, abacus, q-tetris or q-abacus"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Qgdp => "qgdp",
            Engine::Tetris => "tetris",
            Engine::Abacus => "abacus",
            Engine::QTetris => "q-tetris",
            Engine::QAbacus => "q-abacus",
        }
    }

    pub fn all() -> [Engine; 5] {
        [Engine::Qgdp, Engine::Tetris, Engine::Abacus, Engine::QTetris, Engine::QAbacus]
    }

    /// Spacing-aware engines take the configured policy; the plain baselines
    /// drop the spacing floor entirely.
    pub fn qubit_policy(&self, cfg: &EngineConfig) -> SpacingPolicy {
        match self {
            Engine::Qgdp | Engine::QTetris | Engine::QAbacus => cfg.qubit_spacing,
            Engine::Tetris | Engine::Abacus => SpacingPolicy::relaxed(),
        }
    }

    /// Minimum pairwise qubit spacing this engine promises.
    pub fn promised_spacing(&self, cfg: &EngineConfig) -> i32 {
        self.qubit_policy(cfg).min
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub engine: Engine,
    pub qubit: QubitLgReport,
    pub blocks: ResLgReport,
    pub dp: Option<DpReport>,
    pub t_q_ms: f64,
    pub t_e_ms: f64,
    pub t_dp_ms: f64,
}

fn tag(stage: &str, e: Error) -> Error {
    match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{stage}: {m}")),
        Error::Capacity(m) => Error::Capacity(format!("{stage}: {m}")),
        Error::RouteFailure(m) => Error::RouteFailure(format!("{stage}: {m}")),
        Error::Internal(m) => Error::Internal(format!("{stage}: {m}")),
        other => other,
    }
}

/// Runs the full legalization pipeline on a layout that has GP centers for
/// every component: qubit stage, block stage per engine, then detailed
/// placement when asked. Records wall time per stage.
pub fn run_pipeline(
    layout: &mut Layout,
    engine: Engine,
    cfg: &EngineConfig,
    with_dp: bool,
) -> Result<PipelineReport> {
    let t0 = Instant::now();
    let qubit = legalize_qubits(layout, &engine.qubit_policy(cfg))
        .map_err(|e| tag("qubit stage", e))?;
    layout.qubit_spacing_cells = Some(qubit.achieved_spacing);
    let t_q_ms = t0.elapsed().as_secs_f64() * 1e3;

    let t1 = Instant::now();
    let blocks = match engine {
        Engine::Qgdp => {
            let order = edge_order(layout, &cfg.res_lg);
            legalize_resonators(layout, &order)
        }
        Engine::Tetris | Engine::QTetris => tetris_legalize(layout),
        Engine::Abacus | Engine::QAbacus => abacus_legalize(layout),
    }
    .map_err(|e| tag("block stage", e))?;
    let t_e_ms = t1.elapsed().as_secs_f64() * 1e3;

    let t2 = Instant::now();
    let dp = if with_dp {
        Some(detailed_place(layout, &cfg.dp, &cfg.hotspot).map_err(|e| tag("dp stage", e))?)
    } else {
        None
    };
    let t_dp_ms = if with_dp { t2.elapsed().as_secs_f64() * 1e3 } else { 0.0 };

    Ok(PipelineReport { engine, qubit, blocks, dp, t_q_ms, t_e_ms, t_dp_ms })
}
