//! Aggregate frequency dynamics of coherent generator groups.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod lyapunov;
pub mod metrics;
pub mod network;
pub mod partial_fractions;
pub mod poly;
pub mod reduction;
pub mod response;
pub mod statespace;
pub mod tf;

pub use error::{Error, Result};
pub use lyapunov::solve_lyapunov;
pub use metrics::{
    compare_models, hinf_diff, inertia_sweep, step_error_norms, ComparisonReport, ComparisonRow, DcRescale,
    ErrorTriple, ReductionMethod, ReductionPath, SimulationSettings,
};
pub use network::{coherent_aggregate, CoherentGroup, GeneratorModel, NetworkSpec};
pub use partial_fractions::{partial_fractions, LagTerm, PartialFractionTerms};
pub use reduction::{
    fw_balanced_truncation, interpret_reduced, match_dc, reduce_closed_loop_path, reduce_turbine_path, reduced_turbine,
    EquivalentGenerator, FrequencyWeight,
};
pub use response::{dc_gain, frequency_response, hinf_norm, step_response, Lti, Trajectory};
pub use statespace::{minimal_state_space, poles, transfer_of, Poles, StateSpace};
pub use tf::TransferFunction;
