//! Row-major 2-D containers for real intensity maps and complex optical fields.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real-valued 2-D map with a physical pixel pitch in meters.
///
/// Holds camera frames, objects, PSFs and correlation maps. The constructor
/// only enforces shape and pitch; intensity-specific checks live in
/// [`ImageGrid::validate_intensity`] because height maps and mean-removed
/// correlations are legitimately signed.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    pitch: f64,
    samples: Vec<f64>,
}

fn check_shape(width: usize, height: usize, pitch: f64, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Dimension(format!(
            "grid must be at least 1x1, got {width}x{height}"
        )));
    }
    if !(pitch.is_finite() && pitch > 0.0) {
        return Err(Error::Range(format!("pitch must be positive, got {pitch}")));
    }
    if len != width * height {
        return Err(Error::Dimension(format!(
            "{width}x{height} grid needs {} samples, got {len}",
            width * height
        )));
    }
    Ok(())
}

impl ImageGrid {
    pub fn new(width: usize, height: usize, pitch: f64, samples: Vec<f64>) -> Result<Self> {
        check_shape(width, height, pitch, samples.len())?;
        Ok(Self {
            width,
            height,
            pitch,
            samples,
        })
    }

    pub fn zeros(width: usize, height: usize, pitch: f64) -> Result<Self> {
        Self::new(width, height, pitch, vec![0.0; width * height])
    }

    /// Builds a grid by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        pitch: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self::new(width, height, pitch, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.samples[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.samples[row * self.width..(row + 1) * self.width]
    }

    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn sum(&self) -> f64 {
        self.samples.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.samples.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.samples
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Returns a copy with every sample mapped through `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ImageGrid {
        ImageGrid {
            width: self.width,
            height: self.height,
            pitch: self.pitch,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Checks the camera-frame invariant: all samples finite and non-negative.
    pub fn validate_intensity(&self) -> Result<()> {
        match self.samples.iter().position(|v| !v.is_finite() || *v < 0.0) {
            None => Ok(()),
            Some(i) => Err(Error::Input(format!(
                "intensity sample at ({}, {}) is {}",
                i / self.width,
                i % self.width,
                self.samples[i]
            ))),
        }
    }

    /// Copies the `height` x `width` block whose top-left pixel is (`top`, `left`).
    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<ImageGrid> {
        if top + height > self.height || left + width > self.width {
            return Err(Error::Dimension(format!(
                "crop {height}x{width} at ({top}, {left}) exceeds {}x{} grid",
                self.height, self.width
            )));
        }
        let mut samples = Vec::with_capacity(width * height);
        for r in top..top + height {
            let start = r * self.width + left;
            samples.extend_from_slice(&self.samples[start..start + width]);
        }
        ImageGrid::new(width, height, self.pitch, samples)
    }

    /// Central `size` x `size` crop. When the margin is odd the extra
    /// row/column is removed from the high-index side.
    pub fn crop_center(&self, size: usize) -> Result<ImageGrid> {
        if size == 0 || size > self.width || size > self.height {
            return Err(Error::Dimension(format!(
                "center crop of {size} does not fit a {}x{} grid",
                self.width, self.height
            )));
        }
        self.crop(
            (self.height - size) / 2,
            (self.width - size) / 2,
            size,
            size,
        )
    }

    /// Circular shift: the sample at (r, c) moves to (r + dr, c + dc) modulo the grid.
    pub fn roll(&self, dr: isize, dc: isize) -> ImageGrid {
        let (h, w) = (self.height as isize, self.width as isize);
        let mut out = vec![0.0; self.samples.len()];
        for r in 0..h {
            let nr = (r + dr).rem_euclid(h) as usize;
            for c in 0..w {
                let nc = (c + dc).rem_euclid(w) as usize;
                out[nr * self.width + nc] = self.samples[(r * w + c) as usize];
            }
        }
        ImageGrid {
            width: self.width,
            height: self.height,
            pitch: self.pitch,
            samples: out,
        }
    }

    /// Point reflection about the origin pixel in the circular sense:
    /// (r, c) -> (-r mod h, -c mod w).
    pub fn point_reflect(&self) -> ImageGrid {
        let (h, w) = (self.height, self.width);
        let mut out = vec![0.0; self.samples.len()];
        for r in 0..h {
            for c in 0..w {
                out[((h - r) % h) * w + (w - c) % w] = self.samples[r * w + c];
            }
        }
        ImageGrid {
            width: w,
            height: h,
            pitch: self.pitch,
            samples: out,
        }
    }

    /// Places `self` at the center of a larger zero grid of the given size.
    pub fn embed_center(&self, height: usize, width: usize) -> Result<ImageGrid> {
        if height < self.height || width < self.width {
            return Err(Error::Dimension(format!(
                "cannot embed {}x{} into {height}x{width}",
                self.height, self.width
            )));
        }
        let top = (height - self.height) / 2;
        let left = (width - self.width) / 2;
        let mut out = ImageGrid::zeros(width, height, self.pitch)?;
        for r in 0..self.height {
            let dst = (top + r) * width + left;
            out.samples[dst..dst + self.width].copy_from_slice(self.row(r));
        }
        Ok(out)
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            width: self.width,
            height: self.height,
            pitch: self.pitch,
            samples: self
                .samples
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        }
    }
}

/// Complex optical field sampled on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    width: usize,
    height: usize,
    pitch: f64,
    samples: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(width: usize, height: usize, pitch: f64, samples: Vec<Complex64>) -> Result<Self> {
        check_shape(width, height, pitch, samples.len())?;
        if let Some(i) = samples
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Input(format!(
                "non-finite field sample at index {i}"
            )));
        }
        Ok(Self {
            width,
            height,
            pitch,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Total energy, the sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Squared magnitude of every sample.
    pub fn intensity(&self) -> ImageGrid {
        ImageGrid {
            width: self.width,
            height: self.height,
            pitch: self.pitch,
            samples: self.samples.iter().map(|z| z.norm_sqr()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> ImageGrid {
        ImageGrid::from_fn(n, n, 1.0, |r, c| (r * n + c) as f64).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ImageGrid::new(0, 2, 1.0, vec![]).is_err());
        assert!(ImageGrid::new(2, 2, 0.0, vec![0.0; 4]).is_err());
        assert!(ImageGrid::new(2, 2, 1.0, vec![0.0; 3]).is_err());
    }

    #[test]
    fn crop_center_index_arithmetic() {
        let c = ramp(4).crop_center(2).unwrap();
        assert_eq!(c.samples(), &[5.0, 6.0, 9.0, 10.0]);
    }

    #[test]
    fn crop_center_odd_margin_drops_high_side() {
        // 5 -> 2 leaves a margin of 3: one row off the top, two off the bottom.
        let c = ramp(5).crop_center(2).unwrap();
        assert_eq!(c.samples(), &[6.0, 7.0, 11.0, 12.0]);
    }

    #[test]
    fn crop_center_full_size_is_identity() {
        let img = ramp(6);
        assert_eq!(img.crop_center(6).unwrap(), img);
    }

    #[test]
    fn crop_center_too_large() {
        let img = ImageGrid::zeros(6, 4, 1.0).unwrap();
        assert!(matches!(img.crop_center(5), Err(Error::Dimension(_))));
        assert!(matches!(img.crop_center(0), Err(Error::Dimension(_))));
    }

    #[test]
    fn crop_center_preserves_pitch() {
        let img = ImageGrid::zeros(10, 10, 6.5e-6).unwrap();
        assert_eq!(img.crop_center(3).unwrap().pitch(), 6.5e-6);
    }

    #[test]
    fn roll_and_reflect() {
        let img = ramp(3);
        let r = img.roll(1, 0);
        assert_eq!(r.row(0), &[6.0, 7.0, 8.0]);
        let p = img.point_reflect();
        assert_eq!(p.get(0, 0), 0.0);
        assert_eq!(p.get(1, 1), img.get(2, 2));
        assert_eq!(p.point_reflect(), img);
    }

    #[test]
    fn intensity_validation() {
        let mut img = ImageGrid::zeros(2, 2, 1.0).unwrap();
        assert!(img.validate_intensity().is_ok());
        img.set(1, 0, -1.0);
        assert!(img.validate_intensity().is_err());
        img.set(1, 0, f64::NAN);
        assert!(img.validate_intensity().is_err());
    }
}
