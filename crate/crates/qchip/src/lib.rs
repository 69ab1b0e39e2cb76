//! Grid legalization and detailed placement for superconducting chip
//! layouts: qubits as rigid 2x2-cell macros, resonators as chains of
//! unit wire blocks that should stay contiguous, both pushed from rough
//! global-placement coordinates to legal cells with minimal movement.

pub mod bench;
pub mod bin_index;
pub mod cluster;
pub mod config;
pub mod dp;
pub mod error;
pub mod files;
pub mod geom;
pub mod gp;
pub mod layout;
pub mod maxflow;
pub mod metrics;
pub mod netlist;
pub mod pipeline;
pub mod render;
pub mod qubit_lg;
pub mod res_lg;
pub mod topo;
pub mod validate;

pub use error::{Error, Result};
