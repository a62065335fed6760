use std::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::{bin_frequency, Fft2};
use crate::grid::ComplexField;

/// Reusable angular-spectrum propagator for one grid geometry.
///
/// Transfer function `exp(i 2 pi z (sqrt(1/lambda^2 - f^2) - 1/lambda))`, i.e.
/// exact scalar free-space propagation without the constant carrier phase
/// `exp(i k z)`. Evanescent spatial frequencies (`|f| >= 1/lambda`) are zeroed.
pub struct AngularSpectrum {
    width: usize,
    height: usize,
    freq_sq: Vec<f64>,
    fft: Fft2,
}

impl AngularSpectrum {
    pub fn new(width: usize, height: usize, pitch: f64) -> Self {
        let mut freq_sq = Vec::with_capacity(width * height);
        for r in 0..height {
            let fy = bin_frequency(r, height) / pitch;
            for c in 0..width {
                let fx = bin_frequency(c, width) / pitch;
                freq_sq.push(fx * fx + fy * fy);
            }
        }
        Self {
            width,
            height,
            freq_sq,
            fft: Fft2::new(width, height),
        }
    }

    /// Propagates `data` (row-major, matching this geometry) in place.
    pub fn propagate_in_place(&mut self, data: &mut [Complex64], distance: f64, wavelength: f64) {
        assert_eq!(data.len(), self.width * self.height);
        if distance == 0.0 {
            return;
        }
        let inv_lambda = 1.0 / wavelength;
        let inv_lambda_sq = inv_lambda * inv_lambda;
        self.fft.forward(data);
        for (z, &f2) in data.iter_mut().zip(&self.freq_sq) {
            if f2 >= inv_lambda_sq {
                *z = Complex64::default();
            } else {
                // sqrt(a^2 - f^2) - a, rearranged to avoid cancellation
                let kz = -f2 / (inv_lambda + (inv_lambda_sq - f2).sqrt());
                *z *= Complex64::cis(2.0 * PI * distance * kz);
            }
        }
        self.fft.inverse(data);
    }
}

/// Propagates `field` by `distance` meters (negative = back-propagation).
pub fn angular_spectrum_propagate(
    field: &ComplexField,
    distance: f64,
    wavelength: f64,
) -> ComplexField {
    let mut asm = AngularSpectrum::new(field.width(), field.height(), field.pitch());
    let mut data = field.samples().to_vec();
    asm.propagate_in_place(&mut data, distance, wavelength);
    ComplexField::new(field.width(), field.height(), field.pitch(), data)
        .expect("propagation preserves shape and finiteness")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(n: usize, pitch: f64, seed: u64) -> ComplexField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = (0..n * n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        ComplexField::new(n, n, pitch, s).unwrap()
    }

    #[test]
    fn zero_distance_is_identity() {
        let f = random_field(32, 6.5e-6, 1);
        let g = angular_spectrum_propagate(&f, 0.0, 632.8e-9);
        for (a, b) in f.samples().iter().zip(g.samples()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn forward_back_and_energy() {
        let f = random_field(64, 6.5e-6, 2);
        let g = angular_spectrum_propagate(&f, 0.12, 632.8e-9);
        assert!((g.energy() / f.energy() - 1.0).abs() < 1e-10);
        let back = angular_spectrum_propagate(&g, -0.12, 632.8e-9);
        let err = f
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "max error {err}");
    }

    #[test]
    fn evanescent_components_removed() {
        // 0.2 um pitch puts the Nyquist frequency beyond 1/lambda
        let f = random_field(32, 0.2e-6, 3);
        let g = angular_spectrum_propagate(&f, 1e-6, 632.8e-9);
        assert!(g.energy() < f.energy());
        let mut spec = g.into_samples();
        let mut fft = Fft2::new(32, 32);
        fft.forward(&mut spec);
        let nyq = 16 * 32 + 16;
        assert!(spec[nyq].norm() < 1e-9);
    }

    #[test]
    fn plane_wave_only_gains_phase() {
        let n = 16;
        let f = ComplexField::new(n, n, 5e-6, vec![Complex64::new(1.0, 0.0); n * n]).unwrap();
        let g = angular_spectrum_propagate(&f, 0.5, 500e-9);
        for z in g.samples() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
