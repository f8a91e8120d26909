//! Upsampling versus pixel-attention refinement on a grayscale image.

use super::pgm::GrayImage;
use crate::attention::{pam_forward, PamWeights};
use crate::tensor::{pixel_shuffle, FeatureMap, LinearWeights, SeededRng, WindowConfig};
use crate::Result;

pub const DEMO_SCALE: usize = 2;
pub const DEMO_CHANNELS: usize = 4;
pub const DEMO_K: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct DemoOutput {
    /// Pixel-shuffled image, rescaled to 8 bits.
    pub shuffle: GrayImage,
    /// Pixel attention applied to the upsampled features.
    pub pam: GrayImage,
}

/// Lifts `[1,1,h,w]` to `c·r²` channels. A seeded 1×1 map produces `c` base
/// channels which are repeated for every sub-pixel position, so the shuffled
/// result has `c` channels and constant input stays constant.
fn lift(img: &FeatureMap, seed: u64) -> Result<FeatureMap> {
    let mut rng = SeededRng::new(seed);
    let base = LinearWeights::<f64>::random(DEMO_CHANNELS, 1, &mut rng, true);
    let [_, _, h, w] = img.dims();
    let r2 = DEMO_SCALE * DEMO_SCALE;
    FeatureMap::from_fn([1, DEMO_CHANNELS * r2, h, w], |_, ch, y, x| {
        let c = ch / r2;
        base.weight(c, 0) * img.at(0, 0, y, x) + base.bias[c]
    })
}

fn channel_mean(f: &FeatureMap) -> Vec<f64> {
    let [_, c, h, w] = f.dims();
    (0..h * w)
        .map(|p| (0..c).map(|ch| f.data()[ch * h * w + p]).sum::<f64>() / c as f64)
        .collect()
}

/// Affine map of `values` onto 0..=255. A flat image maps to all zeros.
pub fn rescale_to_u8(values: &[f64], width: usize, height: usize) -> GrayImage {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let pixels = values
        .iter()
        .map(|&v| if span > 0.0 { ((v - lo) / span * 255.0).round() as u16 } else { 0 })
        .collect();
    GrayImage {
        width,
        height,
        maxval: 255,
        pixels,
    }
}

pub fn run_demo(img: &GrayImage, seed: u64) -> Result<DemoOutput> {
    let (h, w) = (img.height, img.width);
    let scale = f64::from(img.maxval);
    let input = FeatureMap::from_fn([1, 1, h, w], |_, _, y, x| f64::from(img.pixels[y * w + x]) / scale)?;
    let lifted = lift(&input, seed)?;
    let up = pixel_shuffle(&lifted, DEMO_SCALE)?;
    let (oh, ow) = (up.height(), up.width());
    let shuffle = rescale_to_u8(&channel_mean(&up), ow, oh);

    let cfg = WindowConfig::new(DEMO_K)?;
    let wts = PamWeights::<f64>::random(DEMO_CHANNELS, seed.wrapping_add(1), true);
    let (refined, _) = pam_forward(&up, &wts, cfg)?;
    let pam = rescale_to_u8(&channel_mean(&refined), ow, oh);
    Ok(DemoOutput { shuffle, pam })
}
