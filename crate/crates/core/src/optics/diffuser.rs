use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use super::OpticsConfig;
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::grid::ImageGrid;

/// Random surface-height map of a thin diffuser.
///
/// Phase delay at wavelength `lambda` is `2 pi (n - 1) h / lambda`, so a single
/// screen decorrelates across wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffuserScreen {
    pub heights: ImageGrid,
    pub correlation_length: f64,
}

impl DiffuserScreen {
    /// Perfectly flat screen (no scattering).
    pub fn flat(cfg: &OpticsConfig) -> Result<Self> {
        Ok(Self {
            heights: ImageGrid::zeros(cfg.grid_size, cfg.grid_size, cfg.pixel_pitch)?,
            correlation_length: cfg.pixel_pitch,
        })
    }

    /// Sample RMS height.
    pub fn rms(&self) -> f64 {
        let h = self.heights.samples();
        (h.iter().map(|v| v * v).sum::<f64>() / h.len() as f64).sqrt()
    }
}

/// Zero-mean Gaussian height field with covariance
/// `rms^2 * exp(-r^2 / (l^2 - pitch^2))`.
///
/// White noise is filtered with a periodic Gaussian kernel; the pixel pitch is
/// removed from the requested length so that `correlation_length == pitch`
/// gives independent pixels. The kernel is normalized to unit L2 norm, which
/// makes the process variance exactly `rms_height^2`.
pub fn make_diffuser(
    cfg: &OpticsConfig,
    rms_height: f64,
    correlation_length: f64,
    seed: u64,
) -> Result<DiffuserScreen> {
    cfg.validate()?;
    if !(rms_height.is_finite() && rms_height >= 0.0) {
        return Err(Error::Range(format!(
            "rms height must be >= 0, got {rms_height}"
        )));
    }
    let pitch = cfg.pixel_pitch;
    if !(correlation_length >= pitch * (1.0 - 1e-12)) {
        return Err(Error::Resolution {
            correlation_length,
            pitch,
        });
    }
    let n = cfg.grid_size;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let white: Vec<f64> = (0..n * n)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();

    let kernel_len_sq =
        (correlation_length * correlation_length - pitch * pitch).max(0.0) / (pitch * pitch);
    let heights = if kernel_len_sq < 1e-9 {
        white.into_iter().map(|v| v * rms_height).collect()
    } else {
        // periodic distance to the origin pixel
        let d = |i: usize| {
            let k = i.min(n - i) as f64;
            k * k
        };
        let mut kernel = vec![Complex64::default(); n * n];
        let mut norm_sq = 0.0;
        for r in 0..n {
            for c in 0..n {
                let g = (-2.0 * (d(r) + d(c)) / kernel_len_sq).exp();
                norm_sq += g * g;
                kernel[r * n + c] = Complex64::new(g, 0.0);
            }
        }
        let scale = rms_height / norm_sq.sqrt();
        let mut fft = Fft2::new(n, n);
        let mut field: Vec<Complex64> = white.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut field);
        fft.forward(&mut kernel);
        for (f, k) in field.iter_mut().zip(&kernel) {
            *f *= k;
        }
        fft.inverse(&mut field);
        field.into_iter().map(|z| z.re * scale).collect()
    };

    Ok(DiffuserScreen {
        heights: ImageGrid::new(n, n, pitch, heights)?,
        correlation_length,
    })
}
