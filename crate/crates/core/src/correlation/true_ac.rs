use num_complex::Complex64;
use rayon::prelude::*;

use super::check_frames;
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::grid::ImageGrid;

/// Circular autocorrelation of one mean-subtracted frame, normalized to 1 at
/// zero lag, in FFT order (zero lag at index 0).
fn normalized_autocorrelation(frame: &ImageGrid) -> Result<Vec<f64>> {
    let (w, h) = (frame.width(), frame.height());
    let mean = frame.mean();
    let mut buf: Vec<Complex64> = frame
        .samples()
        .iter()
        .map(|&v| Complex64::new(v - mean, 0.0))
        .collect();
    let mut fft = Fft2::new(w, h);
    fft.forward(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    fft.inverse(&mut buf);
    let zero_lag = buf[0].re;
    if !(zero_lag > 0.0) {
        return Err(Error::Degenerate("frame has zero variance".into()));
    }
    Ok(buf.into_iter().map(|z| z.re / zero_lag).collect())
}

/// Ensemble autocorrelation: per-frame normalized autocorrelation of the
/// mean-subtracted frame, averaged over frames, returned as an
/// `out_size` x `out_size` window with zero lag at pixel `(out_size / 2, out_size / 2)`.
pub fn true_autocorrelation(frames: &[ImageGrid], out_size: usize) -> Result<ImageGrid> {
    check_frames(frames)?;
    let (w, h) = (frames[0].width(), frames[0].height());
    if out_size == 0 || out_size > w || out_size > h {
        return Err(Error::Dimension(format!(
            "output size {out_size} exceeds {h}x{w} frames"
        )));
    }
    let per_frame: Vec<Result<Vec<f64>>> =
        frames.par_iter().map(normalized_autocorrelation).collect();
    let mut acc = vec![0.0; w * h];
    for ac in per_frame {
        for (a, v) in acc.iter_mut().zip(ac?) {
            *a += v;
        }
    }
    let inv = 1.0 / frames.len() as f64;
    let half = (out_size / 2) as isize;
    ImageGrid::from_fn(out_size, out_size, frames[0].pitch(), |r, c| {
        let lr = (r as isize - half).rem_euclid(h as isize) as usize;
        let lc = (c as isize - half).rem_euclid(w as isize) as usize;
        acc[lr * w + lc] * inv
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct shift-and-multiply autocorrelation, same normalization and layout.
    pub(crate) fn brute_autocorrelation(frame: &ImageGrid, out_size: usize) -> ImageGrid {
        let (w, h) = (frame.width(), frame.height());
        let mean = frame.mean();
        let f = |r: usize, c: usize| frame.get(r % h, c % w) - mean;
        let lag = |dr: usize, dc: usize| {
            let mut s = 0.0;
            for r in 0..h {
                for c in 0..w {
                    s += f(r, c) * f(r + dr, c + dc);
                }
            }
            s
        };
        let zero = lag(0, 0);
        let half = (out_size / 2) as isize;
        ImageGrid::from_fn(out_size, out_size, frame.pitch(), |r, c| {
            let dr = (r as isize - half).rem_euclid(h as isize) as usize;
            let dc = (c as isize - half).rem_euclid(w as isize) as usize;
            lag(dr, dc) / zero
        })
        .unwrap()
    }

    fn random_frame(n: usize, seed: u64) -> ImageGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ImageGrid::from_fn(n, n, 1.0, |_, _| rng.random::<f64>()).unwrap()
    }

    #[test]
    fn matches_brute_force() {
        let frame = random_frame(16, 3);
        let fast = true_autocorrelation(std::slice::from_ref(&frame), 16).unwrap();
        let slow = brute_autocorrelation(&frame, 16);
        for (a, b) in fast.samples().iter().zip(slow.samples()) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-3), "{a} vs {b}");
        }
    }

    #[test]
    fn single_pixel_frame() {
        let n = 8;
        let mut frame = ImageGrid::zeros(n, n, 1.0).unwrap();
        frame.set(2, 5, 4.0);
        let ac = true_autocorrelation(&[frame], 7).unwrap();
        let background = -1.0 / ((n * n) as f64 - 1.0);
        for r in 0..7 {
            for c in 0..7 {
                let expect = if (r, c) == (3, 3) { 1.0 } else { background };
                assert!((ac.get(r, c) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn point_symmetric() {
        let frames = [random_frame(20, 1), random_frame(20, 2)];
        let ac = true_autocorrelation(&frames, 11).unwrap();
        for r in 0..11 {
            for c in 0..11 {
                assert!((ac.get(r, c) - ac.get(10 - r, 10 - c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(true_autocorrelation(&[], 3), Err(Error::Input(_))));
        let a = random_frame(8, 1);
        let b = random_frame(6, 1);
        assert!(matches!(
            true_autocorrelation(&[a.clone(), b], 3),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            true_autocorrelation(&[a], 9),
            Err(Error::Dimension(_))
        ));
    }
}
