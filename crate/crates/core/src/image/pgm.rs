//! Netpbm graymap (PGM) reading and writing, binary (P5) and ASCII (P2).

use super::GrayImage;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// Binary raster.
    P5,
    /// ASCII raster.
    P2,
}

fn format_err(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Format {
        field,
        reason: reason.into(),
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, field: &'static str) -> Result<u32> {
        let tok = self
            .token()
            .ok_or_else(|| format_err(field, "unexpected end of header"))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| {
                format_err(field, format!("`{}` is not a non-negative integer", String::from_utf8_lossy(tok)))
            })
    }
}

/// Decodes a P5 or P2 graymap with `maxval ≤ 255`.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || bytes[0] != b'P' || !matches!(bytes[1], b'2' | b'5') {
        return Err(format_err("magic", "expected `P5` or `P2`"));
    }
    let binary = bytes[1] == b'5';
    let mut hdr = Header { bytes, pos: 2 };
    if hdr.pos < bytes.len() && !bytes[hdr.pos].is_ascii_whitespace() && bytes[hdr.pos] != b'#' {
        return Err(format_err("magic", "magic number must be followed by whitespace"));
    }
    let width = hdr.number("width")?;
    let height = hdr.number("height")?;
    let maxval = hdr.number("maxval")?;
    if width == 0 {
        return Err(format_err("width", "must be at least 1"));
    }
    if height == 0 {
        return Err(format_err("height", "must be at least 1"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(format_err("maxval", format!("{maxval} is outside 1..=255")));
    }
    let n = width as usize * height as usize;

    let data = if binary {
        // exactly one whitespace byte separates maxval from the raster
        if hdr.pos >= bytes.len() || !bytes[hdr.pos].is_ascii_whitespace() {
            return Err(format_err("raster", "missing whitespace after maxval"));
        }
        let start = hdr.pos + 1;
        let raster = bytes.get(start..start + n).ok_or_else(|| {
            format_err(
                "raster",
                format!("truncated: expected {n} bytes, found {}", bytes.len().saturating_sub(start)),
            )
        })?;
        if let Some(&v) = raster.iter().find(|&&v| v as u32 > maxval) {
            return Err(format_err("raster", format!("sample {v} exceeds maxval {maxval}")));
        }
        raster.to_vec()
    } else {
        let mut data = Vec::with_capacity(n);
        for i in 0..n {
            let tok = hdr.token().ok_or_else(|| {
                format_err("raster", format!("truncated: expected {n} samples, found {i}"))
            })?;
            let v = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse::<u32>().ok())
                .filter(|&v| v <= maxval)
                .ok_or_else(|| {
                    format_err(
                        "raster",
                        format!("invalid sample `{}`", String::from_utf8_lossy(tok)),
                    )
                })?;
            data.push(v as u8);
        }
        data
    };
    GrayImage::new(width, height, data)
}

/// Encodes with maxval 255. The P5 header is exactly `P5\n<w> <h>\n255\n`.
pub fn save_pgm(image: &GrayImage, format: PgmFormat) -> Vec<u8> {
    let (w, h) = image.dimensions();
    match format {
        PgmFormat::P5 => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.extend_from_slice(image.data());
            out
        }
        PgmFormat::P2 => {
            let mut out = format!("P2\n{w} {h}\n255\n");
            for y in 0..h {
                let row: Vec<String> = image.row(y).iter().map(|v| v.to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}
