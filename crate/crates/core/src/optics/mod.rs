//! Forward model: point source -> diffuser with iris -> camera.
//!
//! The object is treated as spatially incoherent and lies inside the
//! memory-effect range, so every camera frame is the object convolved with a
//! single speckle PSF (one per wavelength). Broadband frames are weighted sums
//! over the sampled spectrum.

mod diffuser;
mod propagate;
mod psf;
mod spectrum;
mod synth;

pub use diffuser::{make_diffuser, DiffuserScreen};
pub use propagate::{angular_spectrum_propagate, AngularSpectrum};
pub use psf::{psf_at_wavelength, PsfEngine, MAX_WAVELENGTH, MIN_WAVELENGTH};
pub use spectrum::{gaussian_weights, SpectralWeights};
pub use synth::{broadband_psf, broadband_speckle, monochromatic_speckle};

use crate::error::{Error, Result};

/// Geometry of the scattering imaging system.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticsConfig {
    /// Object to diffuser distance (m).
    pub object_distance: f64,
    /// Diffuser to camera distance (m).
    pub camera_distance: f64,
    /// Iris diameter at the diffuser plane (m).
    pub iris_diameter: f64,
    /// Camera pixel pitch (m); also the sampling of the diffuser plane.
    pub pixel_pitch: f64,
    /// Simulated plane is `grid_size` x `grid_size`.
    pub grid_size: usize,
    /// n - 1 of the diffuser material.
    pub refractive_index_minus_one: f64,
}

impl Default for OpticsConfig {
    /// Desk-scale geometry: 60 cm object distance, 12 cm to the camera,
    /// 3.3 mm iris, 6.5 um pixels on a 512 grid.
    fn default() -> Self {
        Self {
            object_distance: 0.60,
            camera_distance: 0.12,
            iris_diameter: 3.3e-3,
            pixel_pitch: 6.5e-6,
            grid_size: 512,
            refractive_index_minus_one: 0.52,
        }
    }
}

impl OpticsConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("optics.object_distance", self.object_distance),
            ("optics.camera_distance", self.camera_distance),
            ("optics.iris_diameter", self.iris_diameter),
            ("optics.pixel_pitch", self.pixel_pitch),
            (
                "optics.refractive_index_minus_one",
                self.refractive_index_minus_one,
            ),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(name, format!("must be positive, got {v}")));
            }
        }
        if self.grid_size < 64 || self.grid_size % 2 != 0 {
            return Err(Error::config(
                "optics.grid_size",
                format!("must be even and >= 64, got {}", self.grid_size),
            ));
        }
        let extent = self.grid_size as f64 * self.pixel_pitch;
        if self.iris_diameter > extent {
            return Err(Error::config(
                "optics.iris_diameter",
                format!(
                    "{} m does not fit the {extent} m simulated plane",
                    self.iris_diameter
                ),
            ));
        }
        Ok(())
    }

    /// Physical side length of the simulated plane.
    pub fn extent(&self) -> f64 {
        self.grid_size as f64 * self.pixel_pitch
    }

    /// Speckle grain size at the camera, lambda * v / D, in pixels.
    pub fn speckle_grain_pixels(&self, wavelength: f64) -> f64 {
        wavelength * self.camera_distance / self.iris_diameter / self.pixel_pitch
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_resolves_grains() {
        let cfg = OpticsConfig::default();
        cfg.validate().unwrap();
        assert!(cfg.speckle_grain_pixels(632.8e-9) >= 3.0);
    }

    #[test]
    fn rejects_bad_geometry() {
        let mut cfg = OpticsConfig {
            grid_size: 63,
            ..OpticsConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.grid_size = 512;
        cfg.iris_diameter = 1.0;
        assert!(
            matches!(cfg.validate(), Err(Error::Config { field, .. }) if field == "optics.iris_diameter")
        );
        cfg.iris_diameter = 3.3e-3;
        cfg.camera_distance = -0.1;
        assert!(cfg.validate().is_err());
    }
}
