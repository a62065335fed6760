//! Figures of merit shared by tests, reports and the pipeline.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::grid::ImageGrid;

/// A named scalar with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub name: String,
    pub value: f64,
    pub context: Vec<(String, String)>,
}

impl MetricReport {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            context: Vec::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.context.push((key.into(), value.to_string()));
        self
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.name, self.value)
    }
}

/// Standard deviation over mean (population statistics).
pub fn speckle_contrast(img: &ImageGrid) -> Result<f64> {
    if img.len() < 2 {
        return Err(Error::Degenerate(
            "speckle contrast needs at least 2 pixels".into(),
        ));
    }
    let mean = img.mean();
    if !(mean > 0.0) {
        return Err(Error::Degenerate(format!("image mean is {mean}")));
    }
    let var = img
        .samples()
        .iter()
        .map(|v| (v - mean).powi(2))
        .sum::<f64>()
        / img.len() as f64;
    Ok(var.sqrt() / mean)
}

fn zero_mean_unit(img: &ImageGrid, which: &str) -> Result<Vec<f64>> {
    let mean = img.mean();
    let centered: Vec<f64> = img.samples().iter().map(|v| v - mean).collect();
    let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!(
            "{which} image has zero variance"
        )));
    }
    Ok(centered.into_iter().map(|v| v / norm).collect())
}

/// Best zero-normalized cross-correlation of `a` against every circular
/// translation of `b` and of its 180 degree rotation.
///
/// Both searches are done at once in the Fourier domain: for real images the
/// spectrum of the point-reflected `b` is the conjugate spectrum of `b`.
pub fn aligned_ncc(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::Dimension(format!(
            "aligned_ncc needs equal shapes, got {}x{} and {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    let (w, h) = (a.width(), a.height());
    let za = zero_mean_unit(a, "first")?;
    let zb = zero_mean_unit(b, "second")?;
    let mut fft = Fft2::new(w, h);
    let mut fa: Vec<Complex64> = za.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let mut fb: Vec<Complex64> = zb.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut fa);
    fft.forward(&mut fb);
    let mut shifted: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y.conj()).collect();
    let mut reflected: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    fft.inverse(&mut shifted);
    fft.inverse(&mut reflected);
    let best = shifted
        .iter()
        .chain(&reflected)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best.clamp(-1.0, 1.0))
}

/// One column of `img`, top to bottom.
pub fn line_profile(img: &ImageGrid, column: usize) -> Result<Vec<f64>> {
    if column >= img.width() {
        return Err(Error::Dimension(format!(
            "column {column} outside width {}",
            img.width()
        )));
    }
    Ok((0..img.height()).map(|r| img.get(r, column)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp1};

    fn random_grid(n: usize, seed: u64) -> ImageGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ImageGrid::from_fn(n, n, 1.0, |_, _| rng.random::<f64>()).unwrap()
    }

    /// Shift-by-shift reference for aligned_ncc.
    fn naive_aligned_ncc(a: &ImageGrid, b: &ImageGrid) -> f64 {
        let zncc = |x: &ImageGrid, y: &ImageGrid| {
            let (mx, my) = (x.mean(), y.mean());
            let mut num = 0.0;
            let (mut sx, mut sy) = (0.0, 0.0);
            for (p, q) in x.samples().iter().zip(y.samples()) {
                num += (p - mx) * (q - my);
                sx += (p - mx).powi(2);
                sy += (q - my).powi(2);
            }
            num / (sx * sy).sqrt()
        };
        let mut best = f64::NEG_INFINITY;
        for cand in [b.clone(), b.point_reflect()] {
            for dr in 0..b.height() as isize {
                for dc in 0..b.width() as isize {
                    best = best.max(zncc(a, &cand.roll(dr, dc)));
                }
            }
        }
        best
    }

    #[test]
    fn contrast_of_constant_and_checkerboard() {
        let flat = ImageGrid::new(4, 4, 1.0, vec![3.0; 16]).unwrap();
        assert_eq!(speckle_contrast(&flat).unwrap(), 0.0);
        let checker =
            ImageGrid::from_fn(4, 4, 1.0, |r, c| if (r + c) % 2 == 0 { 0.0 } else { 2.0 }).unwrap();
        assert_eq!(speckle_contrast(&checker).unwrap(), 1.0);
    }

    #[test]
    fn contrast_errors() {
        let zero = ImageGrid::zeros(4, 4, 1.0).unwrap();
        assert!(matches!(speckle_contrast(&zero), Err(Error::Degenerate(_))));
        let one = ImageGrid::new(1, 1, 1.0, vec![1.0]).unwrap();
        assert!(speckle_contrast(&one).is_err());
    }

    #[test]
    fn exponential_speckle_has_unit_contrast() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let img = ImageGrid::from_fn(512, 512, 1.0, |_, _| Exp1.sample(&mut rng)).unwrap();
        let c = speckle_contrast(&img).unwrap();
        assert!((c - 1.0).abs() < 0.05, "contrast {c}");
    }

    #[test]
    fn contrast_is_scale_invariant() {
        let img = random_grid(16, 4);
        let scaled = img.map(|v| 7.5 * v);
        assert!(
            (speckle_contrast(&img).unwrap() - speckle_contrast(&scaled).unwrap()).abs() < 1e-12
        );
    }

    #[test]
    fn ncc_identity_and_reflection() {
        let a = random_grid(12, 1);
        assert!((aligned_ncc(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!((aligned_ncc(&a, &a.point_reflect()).unwrap() - 1.0).abs() < 1e-12);
        assert!((aligned_ncc(&a, &a.roll(3, -5).point_reflect()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ncc_matches_naive_search() {
        let a = random_grid(9, 2);
        let b = random_grid(9, 3);
        let fast = aligned_ncc(&a, &b).unwrap();
        let slow = naive_aligned_ncc(&a, &b);
        assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
    }

    #[test]
    fn ncc_is_symmetric() {
        let a = random_grid(10, 5);
        let b = random_grid(10, 6);
        assert!((aligned_ncc(&a, &b).unwrap() - aligned_ncc(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ncc_null_distribution() {
        let a = random_grid(64, 7);
        let b = random_grid(64, 8);
        assert!(aligned_ncc(&a, &b).unwrap().abs() < 0.2);
    }

    #[test]
    fn ncc_rejects_flat_input() {
        let a = random_grid(4, 1);
        let flat = ImageGrid::new(4, 4, 1.0, vec![1.0; 16]).unwrap();
        assert!(matches!(aligned_ncc(&a, &flat), Err(Error::Degenerate(_))));
    }

    #[test]
    fn profile() {
        let img = ImageGrid::from_fn(3, 3, 1.0, |r, c| (r * 3 + c) as f64).unwrap();
        assert_eq!(line_profile(&img, 1).unwrap(), vec![1.0, 4.0, 7.0]);
        assert!(line_profile(&img, 3).is_err());
        let flat = ImageGrid::new(3, 2, 1.0, vec![2.0; 6]).unwrap();
        assert_eq!(line_profile(&flat, 2).unwrap(), vec![2.0, 2.0]);
    }
}
