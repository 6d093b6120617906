//! Phase-map synthesis and far-field evaluation for reconfigurable
//! intelligent surfaces built from switchable (typically 1-bit) unit cells.
//!
//! The pipeline is:
//!
//! 1. describe the lattice ([`ArrayGeometry`]) and its illumination ([`FeedModel`]),
//! 2. compute the continuous compensation phase toward a target ([`continuous_phase_map`]),
//! 3. quantize it onto the available cell states ([`quantize_map`]), choosing the
//!    global offset that maximizes the quantized beam ([`optimize_offset`]),
//! 4. evaluate the array factor ([`array_factor`]) and its metrics ([`beam_metrics`]).
//!
//! Evaluation loops run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise; see [`exec`].

pub mod error;
pub mod exec;
pub mod export;
pub mod farfield;
pub mod geometry;
pub mod synthesis;
pub mod unitcell;

pub use error::{Result, RisError};
pub use exec::Execution;
pub use farfield::{
    array_factor, beam_metrics, brute_force_best_map, direct_sum_oracle, element_excitations,
    enhancement, frequency_sweep, BeamMetrics, Enhancement, EvalOptions, Observation, Pattern,
    SweepEntry, SweepOptions,
};
pub use geometry::{
    circular_distance, direction_to_unit, element_positions, wrap_phase, ArrayGeometry, Direction,
    FeedModel, Vec3,
};
pub use synthesis::{
    continuous_phase_map, optimize_offset, quantize_map, synthesize, OffsetChoice, PhaseMap,
    StateMap, Synthesis, SPEED_OF_LIGHT,
};
pub use unitcell::{state_phase_difference, CellState, Sample, UnitCellStateTable};
