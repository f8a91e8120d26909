use super::{Element, FeatureMap};
use crate::{Error, Result};

/// Sub-pixel rearrangement `[b, c·r², h, w] → [b, c, h·r, w·r]`:
/// `out[b, c, r·i + di, r·j + dj] = in[b, c·r² + di·r + dj, i, j]`.
pub fn pixel_shuffle<T: Element>(f: &FeatureMap<T>, r: usize) -> Result<FeatureMap<T>> {
    let [b, c, h, w] = f.dims();
    if r == 0 || c % (r * r) != 0 {
        return Err(Error::shape(format!("{c} channels not divisible by r² = {}", r * r)));
    }
    let oc = c / (r * r);
    let (oh, ow) = (h * r, w * r);
    FeatureMap::from_fn([b, oc, oh, ow], |bi, ci, y, x| {
        let (i, di) = (y / r, y % r);
        let (j, dj) = (x / r, x % r);
        f.at(bi, ci * r * r + di * r + dj, i, j)
    })
}

/// Exact inverse of [`pixel_shuffle`].
pub fn pixel_unshuffle<T: Element>(f: &FeatureMap<T>, r: usize) -> Result<FeatureMap<T>> {
    let [b, c, h, w] = f.dims();
    if r == 0 || h % r != 0 || w % r != 0 {
        return Err(Error::shape(format!("spatial dims {h}×{w} not divisible by r = {r}")));
    }
    FeatureMap::from_fn([b, c * r * r, h / r, w / r], |bi, ci, i, j| {
        let (oc, sub) = (ci / (r * r), ci % (r * r));
        f.at(bi, oc, i * r + sub / r, j * r + sub % r)
    })
}
