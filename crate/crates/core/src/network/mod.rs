//! Generator models, network coupling and coherent aggregation.

mod aggregate;
mod coherence;
mod generator;
mod graph;

pub use aggregate::{aggregate_turbine, close_swing_loop, coherent_aggregate, CoherentGroup};
pub use coherence::{
    band_constants, band_grid, coherence_gap, coi_trajectory, lemma2_bound, network_response, BandConstants,
    CoupledRealization, SINGULAR_CONDITION,
};
pub use generator::{generator_transfer, GeneratorModel, SwingForm};
pub use graph::{random_connected_edges, Edge, NetworkSpec};
