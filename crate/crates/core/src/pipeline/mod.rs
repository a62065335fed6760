//! Configuration, run manifests and the stage commands behind the CLI.

mod commands;
mod config;
mod manifest;

pub use commands::{
    cmd_extract, cmd_metrics, cmd_pipeline, cmd_reconstruct, cmd_simulate, extract_into,
    list_frames, read_any, reconstruct_into, simulate_into, Method, ReconstructOutput,
    SimulateOutput, MANIFEST,
};
pub use config::{DiffuserParams, PipelineConfig, SpectrumParams};
pub use manifest::{sha256_hex, RunManifest};
