use std::f64::consts::PI;

use num_complex::Complex64;

use crate::correlation::annulus_stats;
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::grid::ImageGrid;

/// Optional image-domain support: a centered `side` x `side` square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support {
    pub side: usize,
}

impl Support {
    /// Side `(window + 1) / 2`, the largest object an autocorrelation window of
    /// that size can describe.
    pub fn for_window(window: usize) -> Self {
        Self {
            side: (window + 1) / 2,
        }
    }

    pub(crate) fn mask(&self, width: usize, height: usize) -> Vec<bool> {
        let top = height.saturating_sub(self.side) / 2;
        let left = width.saturating_sub(self.side) / 2;
        let mut mask = vec![false; width * height];
        for r in top..(top + self.side).min(height) {
            for c in left..(left + self.side).min(width) {
                mask[r * width + c] = true;
            }
        }
        mask
    }
}

/// Fourier-modulus constraint for phase retrieval.
///
/// `magnitude` is stored in FFT order: the DC term is at pixel (0, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeConstraint {
    pub magnitude: ImageGrid,
    /// Whether the DC bin was replaced by the mean of its four neighbours.
    pub dc_mask: bool,
    pub support: Option<Support>,
}

impl MagnitudeConstraint {
    pub fn new(magnitude: ImageGrid) -> Result<Self> {
        if magnitude
            .samples()
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::Input(
                "Fourier magnitude must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            magnitude,
            dc_mask: false,
            support: None,
        })
    }

    /// Exact magnitude `|FFT(object)|`.
    pub fn from_object(object: &ImageGrid) -> Result<Self> {
        let mut buf = object.to_complex().into_samples();
        Fft2::new(object.width(), object.height()).forward(&mut buf);
        Self::new(ImageGrid::new(
            object.width(),
            object.height(),
            object.pitch(),
            buf.iter().map(|z| z.norm()).collect(),
        )?)
    }

    pub fn with_support(mut self, support: Option<Support>) -> Self {
        self.support = support;
        self
    }

    pub fn width(&self) -> usize {
        self.magnitude.width()
    }

    pub fn height(&self) -> usize {
        self.magnitude.height()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeOptions {
    /// Radius of the feature disk; the annulus outside it defines the background.
    pub feature_radius: f64,
    /// Fraction of the window, per edge, covered by the raised-cosine taper. 0 disables it.
    pub taper_fraction: f64,
    /// Replace the DC bin by the mean of its four neighbours.
    pub dc_interpolate: bool,
}

impl MagnitudeOptions {
    pub fn for_window(window: usize) -> Self {
        Self {
            feature_radius: default_feature_radius(window),
            taper_fraction: 0.1,
            dc_interpolate: false,
        }
    }
}

/// Default feature radius for an `window`-pixel correlation map.
pub fn default_feature_radius(window: usize) -> f64 {
    (0.4 * window as f64).floor()
}

/// Separable raised-cosine edge weights; 0 at the border, 1 inside.
fn taper_weights(n: usize, fraction: f64) -> Vec<f64> {
    let width = (fraction * n as f64).ceil() as usize;
    (0..n)
        .map(|i| {
            let d = i.min(n - 1 - i);
            if d >= width {
                1.0
            } else {
                0.5 * (1.0 - (PI * d as f64 / width as f64).cos())
            }
        })
        .collect()
}

/// Fourier magnitude implied by a centered autocorrelation-like pattern.
///
/// Steps: subtract the annulus median, taper the edges, move the center pixel
/// to the origin, FFT, keep the real part clipped at zero, square root.
pub fn fourier_magnitude_from_ac(
    ac: &ImageGrid,
    opts: &MagnitudeOptions,
) -> Result<MagnitudeConstraint> {
    let (w, h) = (ac.width(), ac.height());
    let background = annulus_stats(ac, opts.feature_radius)?.median;
    let tr = taper_weights(h, opts.taper_fraction);
    let tc = taper_weights(w, opts.taper_fraction);
    let mut any_positive = false;
    let mut treated = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            let v = ac.get(r, c) - background;
            any_positive |= v > 0.0;
            treated[r * w + c] = v * tr[r] * tc[c];
        }
    }
    if !any_positive {
        return Err(Error::Degenerate(
            "pattern never rises above its background".into(),
        ));
    }
    let centered =
        ImageGrid::new(w, h, ac.pitch(), treated)?.roll(-((h / 2) as isize), -((w / 2) as isize));
    let mut buf: Vec<Complex64> = centered.to_complex().into_samples();
    Fft2::new(w, h).forward(&mut buf);
    let mut mag: Vec<f64> = buf.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    if opts.dc_interpolate && w > 1 && h > 1 {
        mag[0] = 0.25 * (mag[1] + mag[w - 1] + mag[w] + mag[(h - 1) * w]);
    }
    let mut c = MagnitudeConstraint::new(ImageGrid::new(w, h, ac.pitch(), mag)?)?;
    c.dc_mask = opts.dc_interpolate;
    Ok(c)
}
