use crate::error::{Error, Result};

/// Sampled illumination spectrum: wavelengths (m) with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWeights {
    wavelengths: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralWeights {
    pub fn new(wavelengths: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if wavelengths.is_empty() || wavelengths.len() != weights.len() {
            return Err(Error::Range(format!(
                "{} wavelengths vs {} weights",
                wavelengths.len(),
                weights.len()
            )));
        }
        if wavelengths.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Range(
                "wavelengths must be strictly increasing".into(),
            ));
        }
        if wavelengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::Range("wavelengths must be positive".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Range(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Range(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self {
            wavelengths,
            weights,
        })
    }

    /// Monochromatic source.
    pub fn single(wavelength: f64) -> Result<Self> {
        Self::new(vec![wavelength], vec![1.0])
    }

    /// Normalizes arbitrary non-negative weights to unit sum.
    pub fn normalized(wavelengths: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Range(format!("weights sum to {total}")));
        }
        Self::new(
            wavelengths,
            weights.into_iter().map(|w| w / total).collect(),
        )
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelengths.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.wavelengths
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }
}

/// Gaussian spectrum with the given FWHM sampled at `lo, lo + step, ... <= hi`.
pub fn gaussian_weights(
    center: f64,
    fwhm: f64,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<SpectralWeights> {
    if !(fwhm > 0.0 && step > 0.0) {
        return Err(Error::Range(format!(
            "fwhm {fwhm} and step {step} must be positive"
        )));
    }
    if !(lo <= hi) {
        return Err(Error::Range(format!("empty wavelength range [{lo}, {hi}]")));
    }
    // tolerate representation error in (hi - lo) / step
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let wavelengths: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
    let sigma_sq_inv = 4.0 * std::f64::consts::LN_2 / (fwhm * fwhm);
    let weights = wavelengths
        .iter()
        .map(|l| (-(l - center) * (l - center) * sigma_sq_inv).exp())
        .collect();
    SpectralWeights::normalized(wavelengths, weights)
        .map_err(|_| Error::Range("spectrum has no weight inside the sampled range".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broadband_sampling_count() {
        let w = gaussian_weights(632e-9, 104e-9, 500e-9, 764e-9, 0.5e-9).unwrap();
        assert_eq!(w.len(), 529);
        assert!((w.wavelengths()[528] - 764e-9).abs() < 1e-15);
        let w2 = gaussian_weights(632e-9, 104e-9, 500e-9, 764e-9, 2e-9).unwrap();
        assert_eq!(w2.len(), 133);
    }

    #[test]
    fn degenerate_range_is_single_line() {
        let w = gaussian_weights(632.8e-9, 1e-9, 632.8e-9, 632.8e-9, 0.5e-9).unwrap();
        assert_eq!(w.wavelengths(), &[632.8e-9]);
        assert_eq!(w.weights(), &[1.0]);
    }

    #[test]
    fn symmetric_about_center() {
        let w = gaussian_weights(630e-9, 20e-9, 600e-9, 660e-9, 1e-9).unwrap();
        let n = w.len();
        assert_eq!(n, 61);
        for k in 0..n / 2 {
            let (a, b) = (w.weights()[k], w.weights()[n - 1 - k]);
            assert!((a - b).abs() <= 1e-12 * a.max(b), "{k}: {a} vs {b}");
        }
    }

    #[test]
    fn fwhm_is_half_maximum() {
        let w = gaussian_weights(600e-9, 100e-9, 500e-9, 700e-9, 50e-9).unwrap();
        let peak = w.weights()[2];
        assert!((w.weights()[1] / peak - 0.5).abs() < 1e-12);
        assert!((w.weights()[3] / peak - 0.5).abs() < 1e-12);
        assert!((w.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(gaussian_weights(600e-9, 10e-9, 700e-9, 600e-9, 1e-9).is_err());
        assert!(gaussian_weights(600e-9, 0.0, 500e-9, 700e-9, 1e-9).is_err());
        // all samples underflow
        assert!(gaussian_weights(100e-9, 1e-12, 600e-9, 700e-9, 1e-9).is_err());
        assert!(SpectralWeights::new(vec![2.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(SpectralWeights::new(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
    }
}
