//! On-disk image formats.
//!
//! The native format is a 64-byte ASCII header followed by little-endian
//! `f64` samples in row-major order:
//!
//! ```text
//! SPKIMG1\n
//! w=<int>\n
//! h=<int>\n
//! pitch=<decimal meters>\n
//! <spaces up to byte 64>
//! ```
//!
//! PGM export (16-bit, min-max normalized) exists for eyeballing results;
//! PGM import accepts 8- and 16-bit binary files and promotes to `f64`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

pub const MAGIC: &[u8; 8] = b"SPKIMG1\n";
pub const HEADER_LEN: usize = 64;

/// Conventional extension for raw-float image files.
pub const EXTENSION: &str = "spkimg";

fn format_pitch(pitch: f64) -> String {
    let plain = format!("{pitch}");
    if plain.len() <= 24 {
        plain
    } else {
        format!("{pitch:e}")
    }
}

/// Serializes a grid into the raw-float byte layout.
pub fn encode_image(img: &ImageGrid) -> Result<Vec<u8>> {
    let mut header = format!(
        "SPKIMG1\nw={}\nh={}\npitch={}\n",
        img.width(),
        img.height(),
        format_pitch(img.pitch())
    )
    .into_bytes();
    if header.len() > HEADER_LEN {
        return Err(Error::Format {
            field: "header",
            detail: format!("header needs {} bytes, limit is {HEADER_LEN}", header.len()),
        });
    }
    header.resize(HEADER_LEN, b' ');
    let mut out = header;
    out.reserve(img.len() * 8);
    for v in img.samples() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn header_field<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    key: &'static str,
) -> Result<&'a str> {
    let line = lines.next().ok_or(Error::Format {
        field: key,
        detail: "missing line".into(),
    })?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| Error::Format {
            field: key,
            detail: format!("expected `{key}=...`, found `{line}`"),
        })
}

fn parse_dim(text: &str, key: &'static str) -> Result<usize> {
    match text.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::Format {
            field: key,
            detail: format!("`{text}` is not a positive integer"),
        }),
    }
}

/// Parses raw-float bytes back into a grid.
pub fn decode_image(bytes: &[u8]) -> Result<ImageGrid> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format {
            field: "header",
            detail: format!(
                "file is {} bytes, header alone needs {HEADER_LEN}",
                bytes.len()
            ),
        });
    }
    let (header, payload) = bytes.split_at(HEADER_LEN);
    if &header[..MAGIC.len()] != MAGIC {
        return Err(Error::Format {
            field: "magic",
            detail: "expected `SPKIMG1`".into(),
        });
    }
    let text = std::str::from_utf8(&header[MAGIC.len()..]).map_err(|_| Error::Format {
        field: "header",
        detail: "header is not ASCII".into(),
    })?;
    let mut lines = text.split('\n');
    let width = parse_dim(header_field(&mut lines, "w")?, "w")?;
    let height = parse_dim(header_field(&mut lines, "h")?, "h")?;
    let pitch_text = header_field(&mut lines, "pitch")?;
    let pitch = match pitch_text.parse::<f64>() {
        Ok(p) if p.is_finite() && p > 0.0 => p,
        _ => {
            return Err(Error::Format {
                field: "pitch",
                detail: format!("`{pitch_text}` is not a positive decimal"),
            })
        }
    };
    let padding: String = lines.collect::<Vec<_>>().join("\n");
    if padding.bytes().any(|b| b != b' ') {
        return Err(Error::Format {
            field: "padding",
            detail: "header must be padded with spaces".into(),
        });
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(8))
        .ok_or(Error::Format {
            field: "w",
            detail: "dimensions overflow".into(),
        })?;
    if payload.len() != expected {
        return Err(Error::Truncated {
            expected,
            found: payload.len(),
        });
    }
    let samples = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    ImageGrid::new(width, height, pitch, samples)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageGrid> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

pub fn write_image(path: impl AsRef<Path>, img: &ImageGrid) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_image(img)?).map_err(|e| Error::io(path, e))
}

/// 16-bit binary PGM, linearly stretched so min -> 0 and max -> 65535.
pub fn encode_pgm(img: &ImageGrid) -> Vec<u8> {
    let (lo, hi) = (img.min(), img.max());
    let span = hi - lo;
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    out.reserve(img.len() * 2);
    for &v in img.samples() {
        let level = if span > 0.0 && span.is_finite() {
            ((v - lo) / span * 65535.0).round().clamp(0.0, 65535.0) as u16
        } else {
            0
        };
        out.extend_from_slice(&level.to_be_bytes());
    }
    out
}

pub fn write_pgm(path: impl AsRef<Path>, img: &ImageGrid) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

fn pgm_token(bytes: &[u8], pos: &mut usize, field: &'static str) -> Result<usize> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or(Error::Format {
            field,
            detail: "expected a decimal integer".into(),
        })
}

/// Decodes a binary (P5) PGM with 8- or 16-bit samples.
pub fn decode_pgm(bytes: &[u8], pitch: f64) -> Result<ImageGrid> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::Format {
            field: "magic",
            detail: "expected binary PGM (`P5`)".into(),
        });
    }
    let mut pos = 2;
    let width = pgm_token(bytes, &mut pos, "width")?;
    let height = pgm_token(bytes, &mut pos, "height")?;
    let maxval = pgm_token(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format {
            field: "maxval",
            detail: format!("{maxval} outside 1..=65535"),
        });
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let bytes_per = if maxval < 256 { 1 } else { 2 };
    let expected = width * height * bytes_per;
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: raster.len(),
        });
    }
    let samples = if bytes_per == 1 {
        raster[..expected].iter().map(|&b| b as f64).collect()
    } else {
        raster[..expected]
            .chunks_exact(2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64)
            .collect()
    };
    ImageGrid::new(width, height, pitch, samples)
}

pub fn read_pgm(path: impl AsRef<Path>, pitch: f64) -> Result<ImageGrid> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes, pitch)
}
