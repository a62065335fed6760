use num_complex::Complex64;
use rayon::prelude::*;

use super::{DiffuserScreen, OpticsConfig, PsfEngine, SpectralWeights};
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::grid::ImageGrid;

/// Wavelengths summed per parallel task. Fixed so the floating-point
/// reduction order never depends on the worker count.
const SPECTRAL_CHUNK: usize = 16;

/// Circular convolution `object * psf`, with the PSF origin at pixel
/// `(h / 2, w / 2)`: a delta PSF there reproduces the object exactly, and a
/// delta object there reproduces the PSF.
pub fn monochromatic_speckle(object: &ImageGrid, psf: &ImageGrid) -> Result<ImageGrid> {
    if !object.same_shape(psf) {
        return Err(Error::Dimension(format!(
            "object {}x{} vs psf {}x{}",
            object.height(),
            object.width(),
            psf.height(),
            psf.width()
        )));
    }
    let (w, h) = (object.width(), object.height());
    let mut fft = Fft2::new(w, h);
    let mut a: Vec<Complex64> = object.to_complex().into_samples();
    let origin_first = psf.roll(-((h / 2) as isize), -((w / 2) as isize));
    let mut b: Vec<Complex64> = origin_first.to_complex().into_samples();
    fft.forward(&mut a);
    fft.forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft.inverse(&mut a);
    ImageGrid::new(
        w,
        h,
        object.pitch(),
        a.into_iter().map(|z| z.re.max(0.0)).collect(),
    )
}

/// Spectrally weighted PSF `sum_lambda alpha_lambda PSF(lambda)`.
pub fn broadband_psf(engine: &PsfEngine, weights: &SpectralWeights) -> Result<ImageGrid> {
    let n = engine.grid_size();
    let lines: Vec<(f64, f64)> = weights.iter().collect();
    let partials: Vec<Result<Vec<f64>>> = lines
        .par_chunks(SPECTRAL_CHUNK)
        .map_init(
            || (engine.workspace(), vec![0.0; n * n]),
            |(ws, scratch), chunk| {
                let mut acc = vec![0.0; n * n];
                for &(lambda, alpha) in chunk {
                    let total = engine.intensity_into(ws, lambda, scratch)?;
                    if !(total > 0.0) {
                        return Err(Error::Degenerate(format!(
                            "PSF at {lambda} m carries no energy"
                        )));
                    }
                    let scale = alpha / total;
                    for (a, s) in acc.iter_mut().zip(scratch.iter()) {
                        *a += scale * s;
                    }
                }
                Ok(acc)
            },
        )
        .collect();
    let mut sum = vec![0.0; n * n];
    for part in partials {
        for (s, p) in sum.iter_mut().zip(part?) {
            *s += p;
        }
    }
    ImageGrid::new(n, n, engine.pitch(), sum)
}

/// Broadband camera frame `sum_lambda alpha_lambda (O * PSF(lambda))`.
///
/// Convolution is linear, so this is evaluated as one convolution of the
/// object with the spectrally weighted PSF.
pub fn broadband_speckle(
    object: &ImageGrid,
    cfg: &OpticsConfig,
    screen: &DiffuserScreen,
    weights: &SpectralWeights,
) -> Result<ImageGrid> {
    if object.width() != cfg.grid_size || object.height() != cfg.grid_size {
        return Err(Error::Dimension(format!(
            "object {}x{} does not match grid {}",
            object.height(),
            object.width(),
            cfg.grid_size
        )));
    }
    let engine = PsfEngine::new(cfg, screen)?;
    let psf = broadband_psf(&engine, weights)?;
    monochromatic_speckle(object, &psf)
}
