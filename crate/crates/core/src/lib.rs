//! Imaging through thin scattering layers.
//!
//! * [`optics`] simulates speckle frames of an incoherent object behind a
//!   random diffuser, for narrowband or broadband illumination.
//! * [`correlation`] extracts object structure from frames, either as the
//!   ensemble autocorrelation or as the shift-and-add R-autocorrelation.
//! * [`retrieval`] recovers the object from either pattern by HIO/ER phase
//!   retrieval.
//! * [`pipeline`] wires everything into reproducible, manifest-logged runs.

pub mod correlation;
pub mod error;
pub mod fft;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod objects;
pub mod optics;
pub mod pipeline;
pub mod retrieval;
pub mod seed;

pub use error::{Error, Result};
pub use grid::{ComplexField, ImageGrid};
pub use seed::{derive_seed, SeedSpec};
