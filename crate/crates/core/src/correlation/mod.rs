//! Object-structure extraction from speckle frames.
//!
//! Two extractors are provided: the ensemble autocorrelation of
//! mean-subtracted frames, and the shift-and-add R-autocorrelation obtained by
//! averaging many sub-windows recentered on their brightest pixel.

mod ratio;
mod shift_add;
mod true_ac;

pub use ratio::{annulus_stats, peak_background_ratio, AnnulusStats, PeakBackground};
pub use shift_add::{
    r_autocorrelation, select_subregions, ShiftAddOutput, SubRegionSpec, WindowCenter,
    WindowSelection,
};
pub use true_ac::true_autocorrelation;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

pub(crate) fn check_frames(frames: &[ImageGrid]) -> Result<()> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Input("no frames supplied".into()))?;
    if let Some((i, f)) = frames
        .iter()
        .enumerate()
        .find(|(_, f)| !f.same_shape(first))
    {
        return Err(Error::Dimension(format!(
            "frame {i} is {}x{}, frame 0 is {}x{}",
            f.height(),
            f.width(),
            first.height(),
            first.width()
        )));
    }
    Ok(())
}
