//! Steering-ellipsoid geometry and measurement-based correlations of
//! two-qubit states.
//!
//! The crate computes, for an arbitrary two-qubit state:
//!
//! - the steered post-measurement states of Alice for projective
//!   measurements on Bob, and the steering ellipsoid of the canonical
//!   (filtered) form;
//! - the maximum squared trace distance between the two steered states over
//!   all measurement directions, analytically where a known family applies
//!   and numerically otherwise;
//! - quantum discord on Bob's side and the distinguishability-based upper
//!   bound obtained by measuring along the maximum-distance direction;
//! - reproducible random ensembles for scatter experiments comparing the
//!   bound against the discord.
//!
//! The `qsteer` binary exposes the experiments as subcommands emitting CSV
//! and JSON; see the crate README.

pub mod correlations;
pub mod experiments;
pub mod io;
pub mod optimize;
pub mod sampling;
pub mod state;
pub mod steering;

pub use correlations::{
    conditional_entropy, correlation_report, discord, is_zero_discord, mutual_information, q_star,
    two_param_discord_closed_form, two_param_state, CorrelationError, CorrelationReport,
};
pub use sampling::{sample, Category, SampleError, SamplerConfig};
pub use state::{
    binary_entropy, eigenvalues_hermitian, from_density_matrix, partial_trace, shannon_entropy,
    to_canonical, to_density_matrix, von_neumann_entropy, BlochState, DensityMatrix4, Mat3, Side,
    SingleQubitState, StateError, Vec3,
};
pub use steering::{
    canonical_ellipsoid, classify_branch, d_squared, max_distance, stationary_residual, steer,
    Branch, DistanceKernel, Ellipsoid, MeasurementDirection, OptimizationResult, SteerError,
    SteeredPair,
};
