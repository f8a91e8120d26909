//! HOG descriptors and the reconstruction losses built on them.
//!
//! Pipeline: grayscale (channel mean) → optional gamma `I^γ` → central
//! differences with replicated borders → unsigned orientation in `[0, π)` →
//! per-cell histograms over non-overlapping `cell_size` squares → per-cell L2
//! standardisation → concatenation in row-major cell order.
//!
//! Pixels with zero gradient magnitude are skipped since their orientation is
//! undefined, so a flat image has an all-zero descriptor. Trailing rows and
//! columns that do not fill a whole cell are dropped.

pub mod reference;

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::tensor::FeatureMap;
use crate::{Error, Result};

/// Relative weight of the contour term in [`ir_loss`].
pub const DEFAULT_LCA_WEIGHT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binning {
    /// Each pixel adds 1 to its orientation bin.
    Count,
    /// Each pixel adds its gradient magnitude.
    Magnitude,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HogParams {
    pub cell_size: usize,
    pub n_bins: usize,
    pub binning: Binning,
    /// Power-law exponent applied to intensities clamped at zero; `None` disables it.
    pub gamma: Option<f64>,
    pub epsilon: f64,
}

impl Default for HogParams {
    fn default() -> Self {
        Self {
            cell_size: 8,
            n_bins: 9,
            binning: Binning::Count,
            gamma: Some(0.5),
            epsilon: 1e-6,
        }
    }
}

impl HogParams {
    fn validate(&self) -> Result<()> {
        if self.cell_size == 0 || self.n_bins == 0 {
            return Err(Error::Argument("cell_size and n_bins must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-pixel derivatives, magnitude and unsigned orientation of one image.
#[derive(Clone, Debug)]
pub struct GradientField {
    pub h: usize,
    pub w: usize,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub direction: Vec<f64>,
}

/// Raw per-cell histograms, `[cells_y, cells_x, n_bins]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellHistograms {
    pub cells_y: usize,
    pub cells_x: usize,
    pub n_bins: usize,
    pub values: Vec<f64>,
}

/// Standardised histograms of all cells concatenated row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HogDescriptor {
    pub cells_y: usize,
    pub cells_x: usize,
    pub n_bins: usize,
    pub values: Vec<f64>,
}

impl HogDescriptor {
    pub fn cell(&self, cy: usize, cx: usize) -> &[f64] {
        let start = (cy * self.cells_x + cx) * self.n_bins;
        &self.values[start..start + self.n_bins]
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        (self.cells_y, self.cells_x, self.n_bins) == (other.cells_y, other.cells_x, other.n_bins)
            && self.values.iter().zip(&other.values).all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// `cells_y cells_x n_bins` header, then one line of bin values per cell.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.cells_y, self.cells_x, self.n_bins);
        for cell in self.values.chunks(self.n_bins.max(1)) {
            let line: Vec<String> = cell.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header: Vec<usize> = lines
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
        let [cells_y, cells_x, n_bins] = header[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: "expected 'cells_y cells_x n_bins'".into(),
            });
        };
        let mut values = Vec::with_capacity(cells_y * cells_x * n_bins);
        for (i, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line: i + 2, msg: e.to_string() })?;
            if row.len() != n_bins {
                return Err(Error::Parse {
                    line: i + 2,
                    msg: format!("expected {n_bins} bins, found {}", row.len()),
                });
            }
            values.extend(row);
        }
        if values.len() != cells_y * cells_x * n_bins {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {} cells", cells_y * cells_x),
            });
        }
        Ok(Self {
            cells_y,
            cells_x,
            n_bins,
            values,
        })
    }
}

/// Channel mean per pixel, `[b, c, h, w] → [b, 1, h, w]`.
pub fn to_grayscale(img: &FeatureMap) -> FeatureMap {
    let [b, c, h, w] = img.dims();
    FeatureMap::from_fn([b, 1, h, w], |bi, _, y, x| {
        (0..c).map(|ch| img.at(bi, ch, y, x)).sum::<f64>() / c as f64
    })
    .expect("dims come from a valid map")
}

/// Central differences with replicated borders on a single-channel image.
pub fn image_gradients(img: &FeatureMap) -> Result<GradientField> {
    let [b, c, h, w] = img.dims();
    if b != 1 || c != 1 {
        return Err(Error::shape(format!("gradients need a [1, 1, h, w] image, got {:?}", img.dims())));
    }
    if h < 2 || w < 2 {
        return Err(Error::shape(format!("gradients need h, w >= 2, got {h}×{w}")));
    }
    let px = |y: usize, x: usize| img.at(0, 0, y, x);
    let mut field = GradientField {
        h,
        w,
        gx: Vec::with_capacity(h * w),
        gy: Vec::with_capacity(h * w),
        magnitude: Vec::with_capacity(h * w),
        direction: Vec::with_capacity(h * w),
    };
    for y in 0..h {
        for x in 0..w {
            let gx = (px(y, (x + 1).min(w - 1)) - px(y, x.saturating_sub(1))) / 2.0;
            let gy = (px((y + 1).min(h - 1), x) - px(y.saturating_sub(1), x)) / 2.0;
            field.gx.push(gx);
            field.gy.push(gy);
            field.magnitude.push(gx.hypot(gy));
            field.direction.push(unsigned_orientation(gx, gy));
        }
    }
    Ok(field)
}

/// `atan2(gy, gx)` folded into `[0, π)`.
pub fn unsigned_orientation(gx: f64, gy: f64) -> f64 {
    let mut d = gy.atan2(gx);
    if d < 0.0 {
        d += PI;
    }
    if d >= PI {
        d -= PI;
    }
    d
}

/// Half-open bin of an orientation in `[0, π)`.
pub fn orientation_bin(direction: f64, n_bins: usize) -> usize {
    ((direction / (PI / n_bins as f64)) as usize).min(n_bins - 1)
}

pub fn orientation_histograms(gf: &GradientField, params: &HogParams) -> Result<CellHistograms> {
    params.validate()?;
    let cs = params.cell_size;
    let (cells_y, cells_x) = (gf.h / cs, gf.w / cs);
    if cells_y == 0 || cells_x == 0 {
        return Err(Error::shape(format!(
            "{}×{} image holds no complete {cs}×{cs} cell",
            gf.h, gf.w
        )));
    }
    let nb = params.n_bins;
    let mut values = vec![0.0; cells_y * cells_x * nb];
    for cy in 0..cells_y {
        for cx in 0..cells_x {
            let hist = &mut values[(cy * cells_x + cx) * nb..(cy * cells_x + cx + 1) * nb];
            for y in cy * cs..(cy + 1) * cs {
                for x in cx * cs..(cx + 1) * cs {
                    let i = y * gf.w + x;
                    let mag = gf.magnitude[i];
                    if mag <= 0.0 {
                        continue;
                    }
                    hist[orientation_bin(gf.direction[i], nb)] += match params.binning {
                        Binning::Count => 1.0,
                        Binning::Magnitude => mag,
                    };
                }
            }
        }
    }
    Ok(CellHistograms {
        cells_y,
        cells_x,
        n_bins: nb,
        values,
    })
}

/// Divides each cell's block by `√(‖block‖² + ε²)`.
pub fn normalize_descriptor(hists: &CellHistograms, params: &HogParams) -> HogDescriptor {
    let eps2 = params.epsilon * params.epsilon;
    let mut values = hists.values.clone();
    for block in values.chunks_mut(hists.n_bins) {
        let norm = (block.iter().map(|v| v * v).sum::<f64>() + eps2).sqrt();
        if norm > 0.0 {
            block.iter_mut().for_each(|v| *v /= norm);
        }
    }
    HogDescriptor {
        cells_y: hists.cells_y,
        cells_x: hists.cells_x,
        n_bins: hists.n_bins,
        values,
    }
}

/// HOG descriptor of a single image (`b = 1`, any channel count).
pub fn hog(img: &FeatureMap, params: &HogParams) -> Result<HogDescriptor> {
    if img.batch() != 1 {
        return Err(Error::shape(format!("hog takes one image, got batch {}", img.batch())));
    }
    let mut gray = to_grayscale(img);
    if let Some(gamma) = params.gamma {
        gray = gray.map(|v| v.max(0.0).powf(gamma));
    }
    let field = image_gradients(&gray)?;
    Ok(normalize_descriptor(&orientation_histograms(&field, params)?, params))
}

/// One descriptor per batch entry.
pub fn hog_batch(img: &FeatureMap, params: &HogParams) -> Result<Vec<HogDescriptor>> {
    let [b, c, h, w] = img.dims();
    (0..b)
        .map(|bi| hog(&FeatureMap::new([1, c, h, w], img.batch_slice(bi).to_vec())?, params))
        .collect()
}

/// L1 distance between HOG descriptors, summed over the batch.
pub fn lca_loss(hr: &FeatureMap, sr: &FeatureMap, params: &HogParams) -> Result<f64> {
    check_same(hr, sr)?;
    let a = hog_batch(hr, params)?;
    let b = hog_batch(sr, params)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| x.values.iter().zip(&y.values).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .sum())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PixReduction {
    /// `‖hr − sr‖₂`.
    #[default]
    Norm,
    /// Mean squared difference.
    Mean,
}

pub fn pix_loss(hr: &FeatureMap, sr: &FeatureMap, reduction: PixReduction) -> Result<f64> {
    check_same(hr, sr)?;
    let ss: f64 = hr.data().iter().zip(sr.data()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(match reduction {
        PixReduction::Norm => ss.sqrt(),
        PixReduction::Mean => ss / hr.len() as f64,
    })
}

/// `pix_loss + lca_weight · lca_loss`.
pub fn ir_loss(hr: &FeatureMap, sr: &FeatureMap, params: &HogParams, lca_weight: f64) -> Result<f64> {
    if lca_weight.is_nan() || lca_weight < 0.0 {
        return Err(Error::Argument(format!("lca weight must be >= 0, got {lca_weight}")));
    }
    Ok(pix_loss(hr, sr, PixReduction::Norm)? + lca_weight * lca_loss(hr, sr, params)?)
}

fn check_same(a: &FeatureMap, b: &FeatureMap) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::shape(format!("{:?} vs {:?}", a.dims(), b.dims())));
    }
    Ok(())
}
