//! Fourier phase retrieval from autocorrelation-like patterns.
//!
//! The Fourier modulus is read off the pattern (Wiener-Khinchin), then hybrid
//! input-output iterations with a decreasing feedback schedule are followed by
//! error reduction. Many random starts are run and one result is selected.

mod magnitude;
mod schedule;
mod steps;

pub use magnitude::{
    default_feature_radius, fourier_magnitude_from_ac, MagnitudeConstraint, MagnitudeOptions,
    Support,
};
pub use schedule::{
    best_of_restarts, center_by_mass, run_schedule, HioSchedule, ReconstructionResult,
    RestartSummary, Selector,
};
pub use steps::{er_step, hio_step, Projector};
