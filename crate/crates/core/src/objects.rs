//! Built-in test objects rasterized at camera-pixel scale.

use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::io;

const GLYPH_W: usize = 5;
const GLYPH_H: usize = 7;

// 5x7 bitmaps, one string per row, '#' = lit.
const GLYPHS: &[(char, [&str; GLYPH_H])] = &[
    (
        'A',
        [
            " ### ", "#   #", "#   #", "#####", "#   #", "#   #", "#   #",
        ],
    ),
    (
        'C',
        [
            " ####", "#    ", "#    ", "#    ", "#    ", "#    ", " ####",
        ],
    ),
    (
        'E',
        [
            "#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####",
        ],
    ),
    (
        'F',
        [
            "#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#    ",
        ],
    ),
    (
        'H',
        [
            "#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #",
        ],
    ),
    (
        'K',
        [
            "#   #", "#  # ", "# #  ", "##   ", "# #  ", "#  # ", "#   #",
        ],
    ),
    (
        'L',
        [
            "#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####",
        ],
    ),
    (
        'P',
        [
            "#### ", "#   #", "#   #", "#### ", "#    ", "#    ", "#    ",
        ],
    ),
    (
        'T',
        [
            "#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ",
        ],
    ),
    (
        'U',
        [
            "#   #", "#   #", "#   #", "#   #", "#   #", "#   #", " ### ",
        ],
    ),
    (
        'X',
        [
            "#   #", "#   #", " # # ", "  #  ", " # # ", "#   #", "#   #",
        ],
    ),
    (
        'Y',
        [
            "#   #", "#   #", " # # ", "  #  ", "  #  ", "  #  ", "  #  ",
        ],
    ),
    (
        'Z',
        [
            "#####", "    #", "   # ", "  #  ", " #   ", "#    ", "#####",
        ],
    ),
];

/// Letter glyph scaled by an integer factor: `5 * scale` wide, `7 * scale` tall.
pub fn letter(ch: char, scale: usize, pitch: f64) -> Result<ImageGrid> {
    let rows = GLYPHS
        .iter()
        .find(|(c, _)| *c == ch.to_ascii_uppercase())
        .map(|(_, rows)| rows)
        .ok_or_else(|| Error::Input(format!("no built-in glyph for `{ch}`")))?;
    let scale = scale.max(1);
    ImageGrid::from_fn(GLYPH_W * scale, GLYPH_H * scale, pitch, |r, c| {
        if rows[r / scale].as_bytes()[c / scale] == b'#' {
            1.0
        } else {
            0.0
        }
    })
}

/// Two points on a row, `separation` pixels apart; the left one is half as bright.
pub fn two_point(separation: usize, pitch: f64) -> Result<ImageGrid> {
    let mut o = ImageGrid::zeros(separation + 1, 1, pitch)?;
    o.set(0, 0, 0.5);
    o.set(0, separation, 1.0);
    Ok(o)
}

/// `size` x `size` binary object with each pixel lit with probability `fill`.
pub fn random_binary(size: usize, fill: f64, seed: u64, pitch: f64) -> Result<ImageGrid> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut img = ImageGrid::from_fn(size, size, pitch, |_, _| {
        if rng.random::<f64>() < fill {
            1.0
        } else {
            0.0
        }
    })?;
    if img.sum() == 0.0 {
        img.set(size / 2, size / 2, 1.0);
    }
    Ok(img)
}

/// Where a pipeline object comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectSpec {
    TwoPoint { separation: usize },
    Letter { ch: char, height: usize },
    Pgm(PathBuf),
}

impl FromStr for ObjectSpec {
    type Err = Error;

    /// `two-point:<sep>`, `letter:<char>:<height px>`, or a path to a PGM file.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::config("object", format!("`{s}`: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["two-point", sep] => Ok(ObjectSpec::TwoPoint {
                separation: sep
                    .parse()
                    .map_err(|_| bad("separation must be an integer"))?,
            }),
            ["letter", ch, height] => {
                let mut chars = ch.chars();
                let (Some(ch), None) = (chars.next(), chars.next()) else {
                    return Err(bad("expected a single character"));
                };
                Ok(ObjectSpec::Letter {
                    ch,
                    height: height
                        .parse()
                        .map_err(|_| bad("height must be an integer"))?,
                })
            }
            _ if s.ends_with(".pgm") => Ok(ObjectSpec::Pgm(PathBuf::from(s))),
            _ => Err(bad(
                "expected two-point:<sep>, letter:<c>:<height> or a .pgm path",
            )),
        }
    }
}

impl std::fmt::Display for ObjectSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectSpec::TwoPoint { separation } => write!(f, "two-point:{separation}"),
            ObjectSpec::Letter { ch, height } => write!(f, "letter:{ch}:{height}"),
            ObjectSpec::Pgm(p) => write!(f, "{}", p.display()),
        }
    }
}

impl ObjectSpec {
    /// Object raster alone (tight bounding box).
    pub fn raster(&self, pitch: f64) -> Result<ImageGrid> {
        match self {
            ObjectSpec::TwoPoint { separation } => two_point(*separation, pitch),
            ObjectSpec::Letter { ch, height } => letter(*ch, (height / GLYPH_H).max(1), pitch),
            ObjectSpec::Pgm(path) => io::read_pgm(path, pitch),
        }
    }

    /// Object centered in an `n` x `n` field.
    pub fn render(&self, n: usize, pitch: f64) -> Result<ImageGrid> {
        self.raster(pitch)?.embed_center(n, n)
    }
}

/// Bounding box `(top, left, height, width)` of the pixels above zero.
pub fn bounding_box(img: &ImageGrid) -> Option<(usize, usize, usize, usize)> {
    let (mut top, mut left, mut bottom, mut right) = (usize::MAX, usize::MAX, 0, 0);
    for r in 0..img.height() {
        for c in 0..img.width() {
            if img.get(r, c) > 0.0 {
                top = top.min(r);
                bottom = bottom.max(r);
                left = left.min(c);
                right = right.max(c);
            }
        }
    }
    (top != usize::MAX).then(|| (top, left, bottom - top + 1, right - left + 1))
}

/// Re-frames `img` into a `size` x `size` grid with its lit region centered,
/// e.g. to compare a full-field ground truth with a reconstruction window.
pub fn fit_to_window(img: &ImageGrid, size: usize) -> Result<ImageGrid> {
    let (top, left, h, w) =
        bounding_box(img).ok_or_else(|| Error::Degenerate("object has no lit pixels".into()))?;
    if h > size || w > size {
        return Err(Error::Dimension(format!(
            "object extent {h}x{w} exceeds the {size} window"
        )));
    }
    img.crop(top, left, h, w)?.embed_center(size, size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_scaling() {
        let a = letter('a', 4, 1.0).unwrap();
        assert_eq!((a.width(), a.height()), (20, 28));
        assert_eq!(a.get(0, 0), 0.0);
        assert_eq!(a.get(0, 4), 1.0);
        assert!(letter('?', 1, 1.0).is_err());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            "two-point:12".parse::<ObjectSpec>().unwrap(),
            ObjectSpec::TwoPoint { separation: 12 }
        );
        assert_eq!(
            "letter:H:28".parse::<ObjectSpec>().unwrap(),
            ObjectSpec::Letter {
                ch: 'H',
                height: 28
            }
        );
        assert!(matches!(
            "obj.pgm".parse::<ObjectSpec>().unwrap(),
            ObjectSpec::Pgm(_)
        ));
        assert!("letter:AB:3".parse::<ObjectSpec>().is_err());
        assert!("circle".parse::<ObjectSpec>().is_err());
        let s = ObjectSpec::Letter {
            ch: 'F',
            height: 21,
        };
        assert_eq!(s.to_string().parse::<ObjectSpec>().unwrap(), s);
    }

    #[test]
    fn render_and_fit() {
        let full = ObjectSpec::Letter {
            ch: 'T',
            height: 14,
        }
        .render(64, 1.0)
        .unwrap();
        assert_eq!(full.sum(), 11.0 * 4.0);
        let win = fit_to_window(&full, 21).unwrap();
        assert_eq!(win.sum(), full.sum());
        assert_eq!(bounding_box(&win), Some((3, 5, 14, 10)));
        assert!(fit_to_window(&full, 9).is_err());
    }

    #[test]
    fn random_binary_is_reproducible() {
        let a = random_binary(16, 0.4, 3, 1.0).unwrap();
        assert_eq!(a, random_binary(16, 0.4, 3, 1.0).unwrap());
        assert!(a.samples().iter().all(|&v| v == 0.0 || v == 1.0));
    }
}
