//! Straight-line HOG used as an independent cross-check of [`super::hog`].
//!
//! Written as one pass over cells with inline gradients and no shared helpers,
//! so a bug in the staged pipeline cannot hide in both.

use std::f64::consts::PI;

use super::{Binning, HogParams};

/// Flat descriptor of a row-major `h×w` grayscale image (no channel averaging).
pub fn straight_line_hog(pixels: &[f64], h: usize, w: usize, params: &HogParams) -> Vec<f64> {
    let read = |y: isize, x: isize| -> f64 {
        let yy = y.clamp(0, h as isize - 1) as usize;
        let xx = x.clamp(0, w as isize - 1) as usize;
        let v = pixels[yy * w + xx];
        match params.gamma {
            Some(g) => v.max(0.0).powf(g),
            None => v,
        }
    };
    let cs = params.cell_size;
    let nb = params.n_bins;
    let mut out = Vec::new();
    for cy in 0..h / cs {
        for cx in 0..w / cs {
            let mut hist = vec![0.0f64; nb];
            for y in (cy * cs) as isize..((cy + 1) * cs) as isize {
                for x in (cx * cs) as isize..((cx + 1) * cs) as isize {
                    let dx = 0.5 * (read(y, x + 1) - read(y, x - 1));
                    let dy = 0.5 * (read(y + 1, x) - read(y - 1, x));
                    let mag = (dx * dx + dy * dy).sqrt();
                    if mag == 0.0 {
                        continue;
                    }
                    let mut angle = dy.atan2(dx);
                    while angle < 0.0 {
                        angle += PI;
                    }
                    while angle >= PI {
                        angle -= PI;
                    }
                    let bin = ((angle * nb as f64 / PI).floor() as usize).min(nb - 1);
                    hist[bin] += if params.binning == Binning::Count { 1.0 } else { mag };
                }
            }
            let norm = (hist.iter().map(|v| v * v).sum::<f64>() + params.epsilon * params.epsilon).sqrt();
            out.extend(hist.iter().map(|v| if norm > 0.0 { v / norm } else { 0.0 }));
        }
    }
    out
}
