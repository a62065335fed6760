use num_complex::Complex64;

use super::MagnitudeConstraint;
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::grid::ImageGrid;

/// Fourier-modulus projection with reusable buffers.
///
/// `P(g) = Re IFFT(M * G / |G|)` with the zero-phase convention where `G = 0`.
pub struct Projector {
    width: usize,
    height: usize,
    fft: Fft2,
    buf: Vec<Complex64>,
    magnitude: Vec<f64>,
    magnitude_norm: f64,
    support: Option<Vec<bool>>,
}

impl Projector {
    pub fn new(c: &MagnitudeConstraint) -> Self {
        let (w, h) = (c.width(), c.height());
        let magnitude = c.magnitude.samples().to_vec();
        let magnitude_norm = magnitude.iter().map(|m| m * m).sum::<f64>().sqrt();
        Self {
            width: w,
            height: h,
            fft: Fft2::new(w, h),
            buf: vec![Complex64::default(); w * h],
            magnitude,
            magnitude_norm,
            support: c.support.map(|s| s.mask(w, h)),
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `P(estimate)` into `out` and returns the Fourier residual of `estimate`.
    pub fn project(&mut self, estimate: &[f64], out: &mut [f64]) -> f64 {
        for (b, &g) in self.buf.iter_mut().zip(estimate) {
            *b = Complex64::new(g, 0.0);
        }
        self.fft.forward(&mut self.buf);
        let mut err = 0.0;
        for (b, &m) in self.buf.iter_mut().zip(&self.magnitude) {
            let a = b.norm();
            err += (a - m) * (a - m);
            *b = if a > 0.0 {
                *b * (m / a)
            } else {
                Complex64::new(m, 0.0)
            };
        }
        self.fft.inverse(&mut self.buf);
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re;
        }
        self.relative(err)
    }

    /// `|| |FFT(image)| - M ||_2 / ||M||_2`.
    pub fn residual(&mut self, image: &[f64]) -> f64 {
        for (b, &g) in self.buf.iter_mut().zip(image) {
            *b = Complex64::new(g, 0.0);
        }
        self.fft.forward(&mut self.buf);
        let err: f64 = self
            .buf
            .iter()
            .zip(&self.magnitude)
            .map(|(b, &m)| (b.norm() - m).powi(2))
            .sum();
        self.relative(err)
    }

    fn relative(&self, err_sq: f64) -> f64 {
        if self.magnitude_norm > 0.0 {
            err_sq.sqrt() / self.magnitude_norm
        } else {
            err_sq.sqrt()
        }
    }

    #[inline]
    fn satisfied(&self, i: usize, v: f64) -> bool {
        v >= 0.0 && self.support.as_ref().is_none_or(|s| s[i])
    }

    /// Error reduction: keep projected pixels that satisfy the object
    /// constraints, zero the rest.
    pub fn er(&mut self, estimate: &[f64], out: &mut [f64]) -> f64 {
        let res = self.project(estimate, out);
        for i in 0..out.len() {
            if !self.satisfied(i, out[i]) {
                out[i] = 0.0;
            }
        }
        res
    }

    /// Hybrid input-output: projected value where constraints hold,
    /// `previous - beta * projected` where they are violated.
    pub fn hio(&mut self, estimate: &[f64], previous: &[f64], beta: f64, out: &mut [f64]) -> f64 {
        let res = self.project(estimate, out);
        for i in 0..out.len() {
            if !self.satisfied(i, out[i]) {
                out[i] = previous[i] - beta * out[i];
            }
        }
        res
    }
}

fn check_grid(img: &ImageGrid, c: &MagnitudeConstraint, what: &str) -> Result<()> {
    if img.width() != c.width() || img.height() != c.height() {
        return Err(Error::Dimension(format!(
            "{what} is {}x{}, constraint is {}x{}",
            img.height(),
            img.width(),
            c.height(),
            c.width()
        )));
    }
    Ok(())
}

/// One error-reduction iteration.
pub fn er_step(estimate: &ImageGrid, c: &MagnitudeConstraint) -> Result<ImageGrid> {
    check_grid(estimate, c, "estimate")?;
    let mut out = vec![0.0; estimate.len()];
    Projector::new(c).er(estimate.samples(), &mut out);
    ImageGrid::new(estimate.width(), estimate.height(), estimate.pitch(), out)
}

/// One hybrid input-output iteration.
pub fn hio_step(
    estimate: &ImageGrid,
    previous: &ImageGrid,
    c: &MagnitudeConstraint,
    beta: f64,
) -> Result<ImageGrid> {
    check_grid(estimate, c, "estimate")?;
    check_grid(previous, c, "previous")?;
    let mut out = vec![0.0; estimate.len()];
    Projector::new(c).hio(estimate.samples(), previous.samples(), beta, &mut out);
    ImageGrid::new(estimate.width(), estimate.height(), estimate.pitch(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::Support;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn blob(n: usize) -> ImageGrid {
        ImageGrid::from_fn(n, n, 1.0, |r, c| {
            let (dr, dc) = (r as f64 - n as f64 / 2.0, c as f64 - n as f64 / 2.0);
            if dr.abs() < 3.0 && dc.abs() < 2.0 {
                1.0 + 0.1 * (r + c) as f64
            } else {
                0.0
            }
        })
        .unwrap()
    }

    fn random_grid(n: usize, seed: u64, lo: f64) -> ImageGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ImageGrid::from_fn(n, n, 1.0, |_, _| lo + rng.random::<f64>()).unwrap()
    }

    #[test]
    fn er_fixed_point() {
        let obj = blob(16);
        let c = MagnitudeConstraint::from_object(&obj)
            .unwrap()
            .with_support(Some(Support { side: 8 }));
        let out = er_step(&obj, &c).unwrap();
        for (a, b) in out.samples().iter().zip(obj.samples()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn er_residual_never_increases() {
        let obj = blob(20);
        let c = MagnitudeConstraint::from_object(&obj).unwrap();
        let mut p = Projector::new(&c);
        let mut g = random_grid(20, 4, 0.0).into_samples();
        let mut next = vec![0.0; g.len()];
        // first step lands inside the object constraint set
        p.er(&g, &mut next);
        std::mem::swap(&mut g, &mut next);
        let mut last = p.residual(&g);
        for _ in 0..50 {
            p.er(&g, &mut next);
            std::mem::swap(&mut g, &mut next);
            let r = p.residual(&g);
            assert!(r <= last * (1.0 + 1e-12) + 1e-15, "{r} > {last}");
            last = r;
        }
    }

    #[test]
    fn er_of_zero_estimate_uses_zero_phase() {
        let obj = blob(8);
        let c = MagnitudeConstraint::from_object(&obj).unwrap();
        let zero = ImageGrid::zeros(8, 8, 1.0).unwrap();
        let out = er_step(&zero, &c).unwrap();
        let mut spec: Vec<Complex64> = c
            .magnitude
            .samples()
            .iter()
            .map(|&m| Complex64::new(m, 0.0))
            .collect();
        Fft2::new(8, 8).inverse(&mut spec);
        for (o, s) in out.samples().iter().zip(&spec) {
            assert!((o - s.re.max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn hio_with_zero_beta_keeps_previous_on_violations() {
        let obj = blob(12);
        let c = MagnitudeConstraint::from_object(&obj).unwrap();
        let est = random_grid(12, 1, -0.5);
        let prev = random_grid(12, 2, 0.0);
        let out = hio_step(&est, &prev, &c, 0.0).unwrap();
        let proj = {
            let mut o = vec![0.0; 144];
            Projector::new(&c).project(est.samples(), &mut o);
            o
        };
        for i in 0..144 {
            if proj[i] < 0.0 {
                assert_eq!(out.samples()[i], prev.samples()[i]);
            } else {
                assert_eq!(out.samples()[i], proj[i]);
            }
        }
    }

    #[test]
    fn hio_on_consistent_estimate_equals_er() {
        let obj = blob(16);
        let c = MagnitudeConstraint::from_object(&obj).unwrap();
        let h = hio_step(&obj, &obj, &c, 0.9).unwrap();
        let e = er_step(&obj, &c).unwrap();
        for (a, b) in h.samples().iter().zip(e.samples()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    /// HIO step written with explicit DFT sums.
    fn scalar_hio(
        est: &ImageGrid,
        prev: &ImageGrid,
        mag: &[f64],
        beta: f64,
        support: &[bool],
    ) -> Vec<f64> {
        let n = est.width();
        let nn = n * n;
        let mut spectrum = vec![(0.0f64, 0.0f64); nn];
        for u in 0..n {
            for v in 0..n {
                let (mut re, mut im) = (0.0, 0.0);
                for y in 0..n {
                    for x in 0..n {
                        let ph = -2.0 * PI * ((u * y + v * x) as f64) / n as f64;
                        re += est.get(y, x) * ph.cos();
                        im += est.get(y, x) * ph.sin();
                    }
                }
                let a = (re * re + im * im).sqrt();
                let m = mag[u * n + v];
                spectrum[u * n + v] = if a > 0.0 {
                    (re * m / a, im * m / a)
                } else {
                    (m, 0.0)
                };
            }
        }
        let mut out = vec![0.0; nn];
        for y in 0..n {
            for x in 0..n {
                let mut re = 0.0;
                for u in 0..n {
                    for v in 0..n {
                        let ph = 2.0 * PI * ((u * y + v * x) as f64) / n as f64;
                        let (sr, si) = spectrum[u * n + v];
                        re += sr * ph.cos() - si * ph.sin();
                    }
                }
                let p = re / nn as f64;
                let i = y * n + x;
                out[i] = if p >= 0.0 && support[i] {
                    p
                } else {
                    prev.samples()[i] - beta * p
                };
            }
        }
        out
    }

    #[test]
    fn hio_matches_scalar_reference() {
        let n = 4;
        let truth = random_grid(n, 10, 0.0);
        let c = MagnitudeConstraint::from_object(&truth)
            .unwrap()
            .with_support(Some(Support { side: 2 }));
        let est = random_grid(n, 11, -0.6);
        let prev = random_grid(n, 12, -0.2);
        let fast = hio_step(&est, &prev, &c, 0.7).unwrap();
        let mask = Support { side: 2 }.mask(n, n);
        let slow = scalar_hio(&est, &prev, c.magnitude.samples(), 0.7, &mask);
        for (a, b) in fast.samples().iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn size_mismatch() {
        let c = MagnitudeConstraint::from_object(&blob(8)).unwrap();
        let wrong = ImageGrid::zeros(9, 8, 1.0).unwrap();
        assert!(matches!(er_step(&wrong, &c), Err(Error::Dimension(_))));
    }
}
