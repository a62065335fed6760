use std::f64::consts::PI;

use num_complex::Complex64;

use super::{AngularSpectrum, DiffuserScreen, OpticsConfig};
use crate::error::{Error, Result};
use crate::grid::ImageGrid;

pub const MIN_WAVELENGTH: f64 = 400e-9;
pub const MAX_WAVELENGTH: f64 = 1000e-9;

/// Precomputed diffuser-plane quantities for one (config, screen) pair.
///
/// The field leaving the diffuser at wavelength `lambda` is
/// `mask / r * exp(i 2 pi / lambda * (r - u + (n - 1) h))`: the on-axis point
/// source's spherical wave (carrier `exp(i k u)` dropped), the diffuser phase
/// and the hard circular iris. Both the geometric path and the diffuser's
/// optical path scale with `1 / lambda`, so they share one table.
pub struct PsfEngine {
    n: usize,
    pitch: f64,
    camera_distance: f64,
    amplitude: Vec<f64>,
    optical_path: Vec<f64>,
}

/// Per-thread scratch: an FFT plan and a field buffer.
pub struct PsfWorkspace {
    asm: AngularSpectrum,
    field: Vec<Complex64>,
}

impl PsfEngine {
    pub fn new(cfg: &OpticsConfig, screen: &DiffuserScreen) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.grid_size;
        if screen.heights.width() != n || screen.heights.height() != n {
            return Err(Error::Dimension(format!(
                "screen is {}x{}, config grid is {n}",
                screen.heights.width(),
                screen.heights.height()
            )));
        }
        let p = cfg.pixel_pitch;
        let u = cfg.object_distance;
        let radius_sq = (cfg.iris_diameter / 2.0).powi(2);
        let center = (n / 2) as f64;
        let mut amplitude = Vec::with_capacity(n * n);
        let mut optical_path = Vec::with_capacity(n * n);
        for r in 0..n {
            let y = (r as f64 - center) * p;
            for c in 0..n {
                let x = (c as f64 - center) * p;
                let rho_sq = x * x + y * y;
                let dist = (rho_sq + u * u).sqrt();
                let inside = rho_sq <= radius_sq;
                amplitude.push(if inside { 1.0 / dist } else { 0.0 });
                // r - u without cancellation
                let geometric = rho_sq / (dist + u);
                optical_path
                    .push(geometric + cfg.refractive_index_minus_one * screen.heights.get(r, c));
            }
        }
        Ok(Self {
            n,
            pitch: p,
            camera_distance: cfg.camera_distance,
            amplitude,
            optical_path,
        })
    }

    pub fn workspace(&self) -> PsfWorkspace {
        PsfWorkspace {
            asm: AngularSpectrum::new(self.n, self.n, self.pitch),
            field: vec![Complex64::default(); self.n * self.n],
        }
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    /// Unnormalized camera-plane intensity, written into `out`; returns its sum.
    pub fn intensity_into(
        &self,
        ws: &mut PsfWorkspace,
        wavelength: f64,
        out: &mut [f64],
    ) -> Result<f64> {
        if !(MIN_WAVELENGTH..=MAX_WAVELENGTH).contains(&wavelength) {
            return Err(Error::Range(format!(
                "wavelength {wavelength} m outside [{MIN_WAVELENGTH}, {MAX_WAVELENGTH}]"
            )));
        }
        let k = 2.0 * PI / wavelength;
        for ((f, &a), &opl) in ws
            .field
            .iter_mut()
            .zip(&self.amplitude)
            .zip(&self.optical_path)
        {
            *f = if a == 0.0 {
                Complex64::default()
            } else {
                Complex64::from_polar(a, k * opl)
            };
        }
        ws.asm
            .propagate_in_place(&mut ws.field, self.camera_distance, wavelength);
        let mut total = 0.0;
        for (o, f) in out.iter_mut().zip(&ws.field) {
            *o = f.norm_sqr();
            total += *o;
        }
        Ok(total)
    }

    /// Unit-sum PSF at one wavelength.
    pub fn psf(&self, ws: &mut PsfWorkspace, wavelength: f64) -> Result<ImageGrid> {
        let mut out = vec![0.0; self.n * self.n];
        let total = self.intensity_into(ws, wavelength, &mut out)?;
        if !(total > 0.0) {
            return Err(Error::Degenerate("PSF carries no energy".into()));
        }
        for v in out.iter_mut() {
            *v /= total;
        }
        ImageGrid::new(self.n, self.n, self.pitch, out)
    }
}

/// Camera-plane intensity of an on-axis point source at `wavelength`,
/// normalized to unit sum.
pub fn psf_at_wavelength(
    cfg: &OpticsConfig,
    screen: &DiffuserScreen,
    wavelength: f64,
) -> Result<ImageGrid> {
    let engine = PsfEngine::new(cfg, screen)?;
    let mut ws = engine.workspace();
    engine.psf(&mut ws, wavelength)
}
