use rand::Rng;
use rayon::prelude::*;

use super::check_frames;
use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::seed::{SeedSpec, WINDOW};

/// Sub-window sampling parameters for the R-autocorrelation.
#[derive(Debug, Clone, PartialEq)]
pub struct SubRegionSpec {
    /// Requested window side; even values are bumped to the next odd size.
    pub window_size: usize,
    pub windows_per_frame: usize,
    pub seed: u64,
    /// Rejected draws tolerated per window before selection gives up.
    pub max_redraws: usize,
}

impl SubRegionSpec {
    /// Odd window side actually used, so the brightest pixel sits on an exact center.
    pub fn effective_window(&self) -> usize {
        let l = self.window_size.max(3);
        if l % 2 == 0 {
            l + 1
        } else {
            l
        }
    }

    pub fn half(&self) -> usize {
        self.effective_window() / 2
    }

    pub fn validate_for(&self, width: usize, height: usize) -> Result<()> {
        if self.windows_per_frame == 0 {
            return Err(Error::config(
                "subregions.windows_per_frame",
                "must be at least 1",
            ));
        }
        let l = self.effective_window();
        let limit = width.min(height).saturating_sub(2);
        if l > limit {
            return Err(Error::Dimension(format!(
                "window {l} exceeds {limit} (smallest frame side minus 2) for {height}x{width} frames"
            )));
        }
        Ok(())
    }
}

/// Center of a recentered window: the brightest pixel of its initial window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowCenter {
    pub row: usize,
    pub col: usize,
    pub frame_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSelection {
    pub centers: Vec<WindowCenter>,
    /// Draws rejected because the recentered window crossed the frame border.
    pub redraws: usize,
}

/// Brightest pixel of the `l` x `l` window with top-left (top, left); ties go
/// to the lowest row-major index.
fn window_argmax(frame: &ImageGrid, top: usize, left: usize, l: usize) -> (usize, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut at = (top, left);
    for r in top..top + l {
        let row = &frame.row(r)[left..left + l];
        for (dc, &v) in row.iter().enumerate() {
            if v > best {
                best = v;
                at = (r, left + dc);
            }
        }
    }
    at
}

/// Draws `windows_per_frame` random windows, recenters each once on its
/// brightest pixel, and redraws any whose recentered window would leave the
/// frame. The random stream is derived from `(spec.seed, "window", frame_index)`.
pub fn select_subregions(
    frame: &ImageGrid,
    spec: &SubRegionSpec,
    frame_index: usize,
) -> Result<WindowSelection> {
    let (w, h) = (frame.width(), frame.height());
    spec.validate_for(w, h)?;
    let l = spec.effective_window();
    let half = l / 2;
    let mut rng = SeedSpec::new(spec.seed).rng(WINDOW, frame_index as u64);
    let mut centers = Vec::with_capacity(spec.windows_per_frame);
    let mut redraws = 0;
    while centers.len() < spec.windows_per_frame {
        let mut rejected = 0;
        loop {
            let top = rng.random_range(0..=h - l);
            let left = rng.random_range(0..=w - l);
            let (row, col) = window_argmax(frame, top, left, l);
            if row >= half && row + half < h && col >= half && col + half < w {
                centers.push(WindowCenter {
                    row,
                    col,
                    frame_index,
                });
                break;
            }
            rejected += 1;
            redraws += 1;
            if rejected > spec.max_redraws {
                return Err(Error::Selection {
                    succeeded: centers.len(),
                    requested: spec.windows_per_frame,
                });
            }
        }
    }
    Ok(WindowSelection { centers, redraws })
}

/// R-autocorrelation result with selection bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftAddOutput {
    /// `L` x `L` mean of all recentered windows; the brightest point sits at the center pixel.
    pub pattern: ImageGrid,
    pub windows: usize,
    pub redraws: usize,
}

fn accumulate_windows(frame: &ImageGrid, centers: &[WindowCenter], l: usize) -> Vec<f64> {
    let half = l / 2;
    let mut acc = vec![0.0; l * l];
    for c in centers {
        for dr in 0..l {
            let src = &frame.row(c.row + dr - half)[c.col - half..c.col - half + l];
            for (a, v) in acc[dr * l..(dr + 1) * l].iter_mut().zip(src) {
                *a += v;
            }
        }
    }
    acc
}

/// Shift-and-add over random sub-windows of every frame: the pixel-wise mean
/// of all `frames.len() * windows_per_frame` recentered windows.
///
/// Frames are processed independently; per-frame sums are combined in frame
/// order so the result does not depend on the number of workers.
pub fn r_autocorrelation(frames: &[ImageGrid], spec: &SubRegionSpec) -> Result<ShiftAddOutput> {
    check_frames(frames)?;
    let l = spec.effective_window();
    let per_frame: Vec<Result<(Vec<f64>, usize)>> = frames
        .par_iter()
        .enumerate()
        .map(|(i, frame)| {
            let sel = select_subregions(frame, spec, i)?;
            Ok((accumulate_windows(frame, &sel.centers, l), sel.redraws))
        })
        .collect();
    let mut acc = vec![0.0; l * l];
    let mut redraws = 0;
    for part in per_frame {
        let (sum, r) = part?;
        redraws += r;
        for (a, s) in acc.iter_mut().zip(sum) {
            *a += s;
        }
    }
    let windows = frames.len() * spec.windows_per_frame;
    let inv = 1.0 / windows as f64;
    for a in acc.iter_mut() {
        *a *= inv;
    }
    Ok(ShiftAddOutput {
        pattern: ImageGrid::new(l, l, frames[0].pitch(), acc)?,
        windows,
        redraws,
    })
}
