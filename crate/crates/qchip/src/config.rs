//! Engine configuration. Every knob serializes with serde defaults so a
//! partial JSON config file works, and the full config is echoed into
//! metrics reports.

use crate::error::Result;
use crate::qubit_lg::SpacingPolicy;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryConfig {
    /// Cell pitch (wire block side) in µm.
    pub pitch_um: f64,
    /// Qubit side in µm; footprint = ceil(size / pitch) cells.
    pub qubit_um: f64,
    /// Resonator padding width in µm.
    pub pad_um: f64,
    /// Phase velocity for the half-wave length relation, m/s.
    pub wave_velocity_m_per_s: f64,
    /// Substrate sizing: smallest square multiple of pitch with at least
    /// this multiple of the total component cell area.
    pub substrate_area_factor: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            pitch_um: 300.0,
            qubit_um: 400.0,
            pad_um: 100.0,
            wave_velocity_m_per_s: 1.3e8,
            substrate_area_factor: 1.8,
        }
    }
}

impl GeometryConfig {
    /// Resonator length in µm for a resonator frequency in GHz: L = v/(2f).
    pub fn resonator_length_um(&self, freq_ghz: f64) -> f64 {
        self.wave_velocity_m_per_s * 1e-3 / (2.0 * freq_ghz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HotspotConfig {
    /// Detuning threshold Δc in GHz; pairs closer than this are hotspots.
    pub detune_threshold_ghz: f64,
    /// Weight pair contributions by 1/distance instead of distance.
    pub inverse_distance: bool,
}

impl Default for HotspotConfig {
    fn default() -> Self {
        HotspotConfig { detune_threshold_ghz: 0.1, inverse_distance: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EgConvention {
    /// ε = 1 − sin²(g_eff t), the printed form (maximal at zero coupling).
    Literal,
    /// ε = sin²(g_eff t), zero when uncoupled.
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErrorModelConfig {
    /// Crosstalk exposure time in ns.
    pub t_gate_ns: f64,
    /// Coupling per parasitic capacitance, MHz/fF.
    pub kappa_g_mhz_per_ff: f64,
    /// Parasitic capacitance per crossing, fF.
    pub c_cross_ff: f64,
    /// Parasitic capacitance per µm of shared boundary, fF/µm.
    pub c_per_len_ff_per_um: f64,
    /// Single-qubit gate error rate.
    pub e1: f64,
    /// Two-qubit gate error rate.
    pub e2: f64,
    /// Relaxation constant, µs.
    pub t1_us: f64,
    /// Dephasing constant, µs.
    pub t2_us: f64,
    pub eg_convention: EgConvention,
}

impl Default for ErrorModelConfig {
    fn default() -> Self {
        ErrorModelConfig {
            t_gate_ns: 300.0,
            kappa_g_mhz_per_ff: 0.3,
            c_cross_ff: 3.5,
            c_per_len_ff_per_um: 0.05,
            e1: 1e-3,
            e2: 1e-2,
            t1_us: 100.0,
            t2_us: 100.0,
            eg_convention: EgConvention::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeOrder {
    /// Largest resonators first, ties by ascending edge id.
    DescBlocks,
    AscId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResLgConfig {
    pub order: EdgeOrder,
}

impl Default for ResLgConfig {
    fn default() -> Self {
        ResLgConfig { order: EdgeOrder::DescBlocks }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DpConfig {
    /// Extra cost for routing across an already-routed edge's cell.
    pub crossing_penalty: u32,
    pub max_passes: u32,
    /// Accept only when clusters and hotspots both strictly improve.
    pub strict_accept: bool,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig { crossing_penalty: 10, max_passes: 3, strict_accept: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Program footprints sampled per layout for fidelity averaging.
    pub samples: u32,
    /// Qubits per sampled connected subgraph.
    pub subgraph_qubits: u32,
    /// Program duration in µs.
    pub duration_us: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { samples: 50, subgraph_qubits: 5, duration_us: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct EngineConfig {
    pub geometry: GeometryConfig,
    pub qubit_spacing: SpacingPolicy,
    pub hotspot: HotspotConfig,
    pub error_model: ErrorModelConfig,
    pub res_lg: ResLgConfig,
    pub dp: DpConfig,
    pub sampler: SamplerConfig,
}

impl EngineConfig {
    pub fn load(path: &Path) -> Result<EngineConfig> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
