use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Statistics of the pixels farther than `feature_radius` from the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusStats {
    pub median: f64,
    pub max: f64,
    pub count: usize,
}

/// Center pixel convention shared by every correlation window: `(h / 2, w / 2)`.
pub(crate) fn center_of(img: &ImageGrid) -> (usize, usize) {
    (img.height() / 2, img.width() / 2)
}

pub fn annulus_stats(ac: &ImageGrid, feature_radius: f64) -> Result<AnnulusStats> {
    let (cr, cc) = center_of(ac);
    let limit = ac.width().min(ac.height()) as f64 / 2.0;
    if !(feature_radius >= 0.0 && feature_radius < limit) {
        return Err(Error::Range(format!(
            "feature radius {feature_radius} must be below half the window ({limit})"
        )));
    }
    let r2 = feature_radius * feature_radius;
    let mut values = Vec::new();
    for r in 0..ac.height() {
        let dy = r as f64 - cr as f64;
        for c in 0..ac.width() {
            let dx = c as f64 - cc as f64;
            if dx * dx + dy * dy > r2 {
                values.push(ac.get(r, c));
            }
        }
    }
    let count = values.len();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = count / 2;
    let (_, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    let median = if count % 2 == 1 {
        upper
    } else {
        let lower = values[..mid]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    };
    Ok(AnnulusStats { median, max, count })
}

/// Peak-to-background figure of a centered correlation pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeakBackground {
    /// `(center - median) / (max - median)` over the background annulus.
    Ratio(f64),
    /// Background is perfectly flat but the center rises above it.
    Unbounded,
    /// Background is flat and the center sits on it (0 / 0); reported as 0.
    Flat,
}

impl PeakBackground {
    pub fn value(self) -> f64 {
        match self {
            PeakBackground::Ratio(v) => v,
            PeakBackground::Unbounded => f64::INFINITY,
            PeakBackground::Flat => 0.0,
        }
    }
}

/// Height of the center pixel above the annulus median, in units of the
/// largest background excursion above that median.
pub fn peak_background_ratio(ac: &ImageGrid, feature_radius: f64) -> Result<PeakBackground> {
    let stats = annulus_stats(ac, feature_radius)?;
    let (cr, cc) = center_of(ac);
    let peak = ac.get(cr, cc) - stats.median;
    let spread = stats.max - stats.median;
    Ok(if spread > 0.0 {
        PeakBackground::Ratio(peak / spread)
    } else if peak == 0.0 {
        PeakBackground::Flat
    } else {
        PeakBackground::Unbounded
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_delta_is_unbounded() {
        let mut ac = ImageGrid::zeros(9, 9, 1.0).unwrap();
        ac.set(4, 4, 1.0);
        assert_eq!(
            peak_background_ratio(&ac, 2.0).unwrap(),
            PeakBackground::Unbounded
        );
    }

    #[test]
    fn constant_is_flat() {
        let ac = ImageGrid::new(9, 9, 1.0, vec![0.3; 81]).unwrap();
        let pb = peak_background_ratio(&ac, 2.0).unwrap();
        assert_eq!(pb, PeakBackground::Flat);
        assert_eq!(pb.value(), 0.0);
    }

    #[test]
    fn ratio_uses_median_and_max() {
        let mut ac = ImageGrid::zeros(9, 9, 1.0).unwrap();
        ac.set(4, 4, 10.0);
        ac.set(0, 0, 2.0); // single background spike
        match peak_background_ratio(&ac, 3.0).unwrap() {
            PeakBackground::Ratio(v) => assert!((v - 5.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn annulus_excludes_feature_disk() {
        let ac = ImageGrid::from_fn(5, 5, 1.0, |r, c| (r * 5 + c) as f64).unwrap();
        let s = annulus_stats(&ac, 1.0).unwrap();
        // 25 pixels minus the center and its 4 direct neighbours
        assert_eq!(s.count, 20);
        assert_eq!(s.max, 24.0);
        assert!(annulus_stats(&ac, 2.5).is_err());
    }

    #[test]
    fn even_count_median() {
        let ac = ImageGrid::new(2, 2, 1.0, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let s = annulus_stats(&ac, 0.0).unwrap();
        // center (1,1) at distance 0 is excluded
        assert_eq!(s.count, 3);
        assert_eq!(s.median, 2.0);
        let ac = ImageGrid::new(5, 1, 1.0, vec![1.0, 5.0, 2.0, 8.0, 3.0]).unwrap();
        let s = annulus_stats(&ac, 0.0).unwrap();
        assert_eq!(s.count, 4);
        assert_eq!(s.median, 4.0);
    }
}
