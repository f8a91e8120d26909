//! Plain-text PGM (P2) images.

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major samples in `0..=maxval`.
    pub pixels: Vec<u16>,
}

/// Parses a P2 file. `#` starts a comment running to end of line.
pub fn read_pgm(text: &str) -> Result<GrayImage> {
    let mut tokens = text.lines().enumerate().flat_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        body.split_whitespace().map(move |t| (i + 1, t))
    });
    let mut next = |what: &str| {
        tokens.next().ok_or_else(|| Error::Parse {
            line: text.lines().count().max(1),
            msg: format!("unexpected end of file, expected {what}"),
        })
    };
    let (line, magic) = next("magic number")?;
    if magic != "P2" {
        return Err(Error::Parse {
            line,
            msg: format!("expected plain PGM 'P2', found '{magic}'"),
        });
    }
    let mut header = |what: &str| -> Result<usize> {
        let (line, tok) = next(what)?;
        tok.parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid {what} '{tok}'"),
        })
    };
    let width = header("width")?;
    let height = header("height")?;
    let maxval = header("maxval")?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::Parse {
            line,
            msg: format!("bad header {width}×{height} maxval {maxval}"),
        });
    }
    let mut pixels = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        let v = header("sample")?;
        if v > maxval {
            return Err(Error::Parse {
                line,
                msg: format!("sample {v} exceeds maxval {maxval}"),
            });
        }
        pixels.push(v as u16);
    }
    if let Some((line, tok)) = tokens.next() {
        return Err(Error::Parse {
            line,
            msg: format!("trailing data '{tok}'"),
        });
    }
    Ok(GrayImage {
        width,
        height,
        maxval: maxval as u16,
        pixels,
    })
}

/// Serialises with one image row per line.
pub fn write_pgm(img: &GrayImage) -> String {
    let mut out = format!("P2\n{} {}\n{}\n", img.width, img.height, img.maxval);
    for row in img.pixels.chunks(img.width.max(1)) {
        let line: Vec<String> = row.iter().map(u16::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
