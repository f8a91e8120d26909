use rayon::prelude::*;

use super::{dot, pixel_major_qkv, sqrt_channels, PamWeights};
use crate::tensor::{softmax_in_place, Element, FeatureMap};
use crate::Result;

/// Full scaled dot-product attention over all `n = h·w` pixels. Materialises
/// the `n×n` score matrix of each batch entry.
pub fn global_attention<T: Element>(f: &FeatureMap<T>, wts: &PamWeights<T>) -> Result<FeatureMap<T>> {
    let [b, c, h, w] = f.dims();
    wts.check(c)?;
    let n = h * w;
    let scale: T = sqrt_channels(c);
    let qkv = pixel_major_qkv(f, wts)?;

    let mut scores = vec![T::zero(); n * n];
    let mut out = vec![T::zero(); b * c * n];
    for (bi, x) in qkv.iter().enumerate() {
        scores.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let q = &x.q[i * c..(i + 1) * c];
            for (j, s) in row.iter_mut().enumerate() {
                *s = dot(q, &x.k[j * c..(j + 1) * c]) / scale;
            }
            softmax_in_place(row);
        });
        let pixel_major: Vec<T> = scores
            .par_chunks(n)
            .flat_map_iter(|row| {
                let mut o = vec![T::zero(); c];
                for (j, &a) in row.iter().enumerate() {
                    for (acc, &v) in o.iter_mut().zip(&x.v[j * c..(j + 1) * c]) {
                        *acc = *acc + a * v;
                    }
                }
                o
            })
            .collect();
        let ob = &mut out[bi * c * n..(bi + 1) * c * n];
        for i in 0..n {
            for ch in 0..c {
                ob[ch * n + i] = pixel_major[i * c + ch];
            }
        }
    }
    FeatureMap::new([b, c, h, w], out)
}
