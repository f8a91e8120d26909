use rayon::prelude::*;

use super::{dot, pixel_major_qkv, sqrt_channels, PamWeights};
use crate::tensor::{softmax_in_place, Element, FeatureMap};
use crate::{Error, Result};

/// Blocked local attention: the image is cut into `block×block` tiles and
/// every query in a tile attends over the tile grown by `halo` pixels on each
/// side. Tiles overhanging the bottom or right edge are kept whole. Positions
/// outside the image are zero keys and values that still enter the softmax,
/// the same convention as the sliding-window kernel.
pub fn halo_attention<T: Element>(
    f: &FeatureMap<T>,
    wts: &PamWeights<T>,
    block: usize,
    halo: usize,
) -> Result<FeatureMap<T>> {
    let [b, c, h, w] = f.dims();
    wts.check(c)?;
    if block == 0 {
        return Err(Error::shape("halo tiles need block >= 1"));
    }
    let n = h * w;
    let (tiles_y, tiles_x) = (h.div_ceil(block), w.div_ceil(block));
    let side = block + 2 * halo;
    let scale: T = sqrt_channels(c);
    let qkv = pixel_major_qkv(f, wts)?;

    let mut out = vec![T::zero(); b * c * n];
    for (bi, x) in qkv.iter().enumerate() {
        let tiles: Vec<Vec<T>> = (0..tiles_y * tiles_x)
            .into_par_iter()
            .map(|t| {
                let (y0, x0) = ((t / tiles_x) * block, (t % tiles_x) * block);
                let mut keys = vec![T::zero(); side * side * c];
                let mut vals = vec![T::zero(); side * side * c];
                for ry in 0..side {
                    for rx in 0..side {
                        let sy = (y0 + ry) as isize - halo as isize;
                        let sx = (x0 + rx) as isize - halo as isize;
                        if sy < 0 || sx < 0 || sy >= h as isize || sx >= w as isize {
                            continue;
                        }
                        let src = sy as usize * w + sx as usize;
                        let dst = (ry * side + rx) * c;
                        keys[dst..dst + c].copy_from_slice(&x.k[src * c..(src + 1) * c]);
                        vals[dst..dst + c].copy_from_slice(&x.v[src * c..(src + 1) * c]);
                    }
                }
                let mut scores = vec![T::zero(); block * block * side * side];
                let mut tile_out = vec![T::zero(); block * block * c];
                for (qi, row) in scores.chunks_mut(side * side).enumerate() {
                    let (qy, qx) = (y0 + qi / block, x0 + qi % block);
                    if qy >= h || qx >= w {
                        continue;
                    }
                    let p = qy * w + qx;
                    let q = &x.q[p * c..(p + 1) * c];
                    for (r, s) in row.iter_mut().enumerate() {
                        *s = dot(q, &keys[r * c..(r + 1) * c]) / scale;
                    }
                    softmax_in_place(row);
                    let o = &mut tile_out[qi * c..(qi + 1) * c];
                    for (r, &a) in row.iter().enumerate() {
                        for (acc, &v) in o.iter_mut().zip(&vals[r * c..(r + 1) * c]) {
                            *acc = *acc + a * v;
                        }
                    }
                }
                tile_out
            })
            .collect();

        let ob = &mut out[bi * c * n..(bi + 1) * c * n];
        for (t, tile_out) in tiles.iter().enumerate() {
            let (y0, x0) = ((t / tiles_x) * block, (t % tiles_x) * block);
            for qi in 0..block * block {
                let (qy, qx) = (y0 + qi / block, x0 + qi % block);
                if qy >= h || qx >= w {
                    continue;
                }
                let p = qy * w + qx;
                for ch in 0..c {
                    ob[ch * n + p] = tile_out[qi * c + ch];
                }
            }
        }
    }
    FeatureMap::new([b, c, h, w], out)
}
