//! 8-bit image file I/O: PNG (1 or 3 channel) plus binary PPM/PGM.
//!
//! Loaded images carry the `Byte` range tag with integral samples, so a
//! write/read round trip of byte-range data is bit-exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{Image, Range};

/// Reads a PNG, PPM (P6) or PGM (P5) file by extension.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    match extension(path)?.as_str() {
        "png" => read_png(path),
        "ppm" | "pgm" => read_pnm(path),
        other => Err(Error::UnsupportedFormat(format!("unknown extension .{other}"))),
    }
}

/// Writes a PNG, PPM or PGM file by extension. Unit-range images are scaled
/// by 255; byte-range samples are rounded to the nearest integer.
pub fn write_image(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let path = path.as_ref();
    let bytes = quantize(img)?;
    match extension(path)?.as_str() {
        "png" => write_png(path, img, &bytes),
        "ppm" => {
            if img.channels() != 3 {
                return Err(Error::UnsupportedFormat("PPM requires 3 channels".into()));
            }
            write_pnm(path, b"P6", img, &bytes)
        }
        "pgm" => {
            if img.channels() != 1 {
                return Err(Error::UnsupportedFormat("PGM requires 1 channel".into()));
            }
            write_pnm(path, b"P5", img, &bytes)
        }
        other => Err(Error::UnsupportedFormat(format!("unknown extension .{other}"))),
    }
}

fn extension(path: &Path) -> Result<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .ok_or_else(|| Error::UnsupportedFormat(format!("{} has no extension", path.display())))
}

fn quantize(img: &Image) -> Result<Vec<u8>> {
    let scale = match img.range() {
        Range::Unit => 255.0,
        Range::Byte => 1.0,
        Range::Real => {
            return Err(Error::UnsupportedFormat(
                "real-range images must be converted before writing".into(),
            ))
        }
    };
    Ok(img
        .data()
        .iter()
        .map(|v| (v * scale).round().clamp(0.0, 255.0) as u8)
        .collect())
}

fn read_png(path: &Path) -> Result<Image> {
    let dynimg = image::open(path).map_err(|e| Error::io(path, e))?;
    let (w, h, channels, bytes) = match dynimg {
        image::DynamicImage::ImageLuma8(buf) => {
            (buf.width(), buf.height(), 1, buf.into_raw())
        }
        image::DynamicImage::ImageRgb8(buf) => (buf.width(), buf.height(), 3, buf.into_raw()),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "only 8-bit grayscale/RGB PNG supported, got {:?}",
                other.color()
            )))
        }
    };
    Image::new(
        h as usize,
        w as usize,
        channels,
        Range::Byte,
        bytes.iter().map(|&b| b as f64).collect(),
    )
}

fn write_png(path: &Path, img: &Image, bytes: &[u8]) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let color = if img.channels() == 1 {
        image::ExtendedColorType::L8
    } else {
        image::ExtendedColorType::Rgb8
    };
    image::save_buffer(path, bytes, w, h, color).map_err(|e| Error::io(path, e))
}

fn write_pnm(path: &Path, magic: &[u8], img: &Image, bytes: &[u8]) -> Result<()> {
    let mut out = Vec::with_capacity(bytes.len() + 32);
    out.extend_from_slice(magic);
    out.extend_from_slice(format!("\n{} {}\n255\n", img.width(), img.height()).as_bytes());
    out.extend_from_slice(bytes);
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn read_pnm(path: &Path) -> Result<Image> {
    let raw = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |msg: &str| Error::io(path, msg);

    let channels = match raw.get(0..2) {
        Some(b"P6") => 3,
        Some(b"P5") => 1,
        _ => return Err(bad("not a binary PPM/PGM (expected P5/P6 magic)")),
    };

    // Header: three whitespace-separated fields after the magic, with
    // '#' comments allowed, then a single whitespace byte before the data.
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        while pos < raw.len() && (raw[pos].is_ascii_whitespace() || raw[pos] == b'#') {
            if raw[pos] == b'#' {
                while pos < raw.len() && raw[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < raw.len() && raw[pos].is_ascii_digit() {
            pos += 1;
        }
        *field = std::str::from_utf8(&raw[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed PNM header"))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "only 8-bit PNM supported (maxval 255), got {maxval}"
        )));
    }
    pos += 1; // single whitespace between header and data
    let expected = width * height * channels;
    let data = raw
        .get(pos..pos + expected)
        .ok_or_else(|| bad("truncated PNM payload"))?;
    Image::new(
        height,
        width,
        channels,
        Range::Byte,
        data.iter().map(|&b| b as f64).collect(),
    )
}
