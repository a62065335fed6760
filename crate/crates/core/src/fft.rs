//! 2-D complex FFTs built from rustfft row transforms.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned forward/inverse 2-D transform for a fixed `height` x `width` grid.
///
/// The inverse is normalized by `1 / (width * height)` so that
/// `inverse(forward(x)) == x`.
pub struct Fft2 {
    width: usize,
    height: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    transposed: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(width);
        let row_inv = planner.plan_fft_inverse(width);
        let col_fwd = planner.plan_fft_forward(height);
        let col_inv = planner.plan_fft_inverse(height);
        let scratch_len = [&row_fwd, &row_inv, &col_fwd, &col_inv]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            width,
            height,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            transposed: vec![Complex64::default(); width * height],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.run(data, false);
        let scale = 1.0 / (self.width * self.height) as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn run(&mut self, data: &mut [Complex64], forward: bool) {
        assert_eq!(data.len(), self.width * self.height, "fft buffer size");
        let (rows, cols) = if forward {
            (&self.row_fwd, &self.col_fwd)
        } else {
            (&self.row_inv, &self.col_inv)
        };
        rows.process_with_scratch(data, &mut self.scratch);
        transpose(data, &mut self.transposed, self.width, self.height);
        cols.process_with_scratch(&mut self.transposed, &mut self.scratch);
        transpose(&self.transposed, data, self.height, self.width);
    }
}

/// `src` is `rows` x `cols` row-major; `dst` receives the `cols` x `rows` transpose.
fn transpose(src: &[Complex64], dst: &mut [Complex64], cols: usize, rows: usize) {
    const BLOCK: usize = 16;
    for rb in (0..rows).step_by(BLOCK) {
        for cb in (0..cols).step_by(BLOCK) {
            for r in rb..(rb + BLOCK).min(rows) {
                for c in cb..(cb + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Signed frequency (cycles per sample) of FFT bin `k` on an `n`-point axis.
#[inline]
pub fn bin_frequency(k: usize, n: usize) -> f64 {
    let k = k as isize;
    let n_i = n as isize;
    let signed = if k < (n_i + 1) / 2 { k } else { k - n_i };
    signed as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(data: &[Complex64], w: usize, h: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); w * h];
        for kr in 0..h {
            for kc in 0..w {
                let mut acc = Complex64::default();
                for r in 0..h {
                    for c in 0..w {
                        let ph =
                            -2.0 * PI * ((kr * r) as f64 / h as f64 + (kc * c) as f64 / w as f64);
                        acc += data[r * w + c] * Complex64::from_polar(1.0, ph);
                    }
                }
                out[kr * w + kc] = acc;
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_on_rectangle() {
        let (w, h) = (6, 5);
        let data: Vec<Complex64> = (0..w * h)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let mut fast = data.clone();
        Fft2::new(w, h).forward(&mut fast);
        for (a, b) in fast.iter().zip(naive_dft(&data, w, h)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let (w, h) = (9, 4);
        let data: Vec<Complex64> = (0..w * h)
            .map(|i| Complex64::new(i as f64, -(i as f64)))
            .collect();
        let mut buf = data.clone();
        let mut plan = Fft2::new(w, h);
        plan.forward(&mut buf);
        plan.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bin_frequencies() {
        assert_eq!(bin_frequency(0, 4), 0.0);
        assert_eq!(bin_frequency(1, 4), 0.25);
        assert_eq!(bin_frequency(2, 4), -0.5);
        assert_eq!(bin_frequency(3, 4), -0.25);
        assert_eq!(bin_frequency(2, 5), 0.4);
        assert_eq!(bin_frequency(3, 5), -0.4);
    }
}
