use super::{Element, FeatureMap};
use crate::{Error, Result};

/// Odd square window of side `k` with same-size zero padding `p = k / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowConfig {
    k: usize,
}

impl WindowConfig {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Window { k, reason: "window must be at least 1" });
        }
        if k.is_multiple_of(2) {
            return Err(Error::Window { k, reason: "window side must be odd" });
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn padding(&self) -> usize {
        self.k / 2
    }

    /// Window positions per pixel, `k²`.
    pub fn area(&self) -> usize {
        self.k * self.k
    }

    /// Rejects windows that would not fit inside the padded image.
    pub fn check_fits(&self, h: usize, w: usize) -> Result<()> {
        if self.k > 2 * h.min(w) + 1 {
            return Err(Error::Window {
                k: self.k,
                reason: "window exceeds the padded image",
            });
        }
        Ok(())
    }
}

/// im2col output: `[b, c·k·k, h·w]`, row `(ch·k + dy)·k + dx`, column = pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct UnfoldedMap<T = f64> {
    pub batch: usize,
    pub rows: usize,
    pub pixels: usize,
    pub data: Vec<T>,
}

impl<T: Element> UnfoldedMap<T> {
    #[inline]
    pub fn at(&self, b: usize, row: usize, pixel: usize) -> T {
        self.data[(b * self.rows + row) * self.pixels + pixel]
    }

    /// Contiguous `[rows, pixels]` block of one batch entry.
    pub fn batch_slice(&self, b: usize) -> &[T] {
        let stride = self.rows * self.pixels;
        &self.data[b * stride..(b + 1) * stride]
    }

    pub fn column(&self, b: usize, pixel: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.at(b, r, pixel)).collect()
    }
}

/// Sliding extraction of zero-padded `k×k` windows around every pixel.
pub fn unfold<T: Element>(f: &FeatureMap<T>, cfg: WindowConfig) -> Result<UnfoldedMap<T>> {
    let [b, c, h, w] = f.dims();
    cfg.check_fits(h, w)?;
    let k = cfg.k();
    let p = cfg.padding() as isize;
    let n = h * w;
    let rows = c * k * k;
    let mut data = vec![T::zero(); b * rows * n];
    for bi in 0..b {
        for ch in 0..c {
            let plane = &f.data()[(bi * c + ch) * n..(bi * c + ch + 1) * n];
            for dy in 0..k {
                for dx in 0..k {
                    let row = (ch * k + dy) * k + dx;
                    let out = &mut data[(bi * rows + row) * n..(bi * rows + row + 1) * n];
                    let oy = dy as isize - p;
                    let ox = dx as isize - p;
                    for y in 0..h {
                        let sy = y as isize + oy;
                        if sy < 0 || sy >= h as isize {
                            continue;
                        }
                        let src_row = &plane[sy as usize * w..(sy as usize + 1) * w];
                        let dst_row = &mut out[y * w..(y + 1) * w];
                        // valid x range: 0 <= x + ox < w
                        let x0 = (-ox).max(0) as usize;
                        let x1 = (w as isize - ox).min(w as isize).max(0) as usize;
                        if x0 < x1 {
                            let s0 = (x0 as isize + ox) as usize;
                            dst_row[x0..x1].copy_from_slice(&src_row[s0..s0 + (x1 - x0)]);
                        }
                    }
                }
            }
        }
    }
    Ok(UnfoldedMap {
        batch: b,
        rows,
        pixels: n,
        data,
    })
}
