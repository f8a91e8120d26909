use rayon::prelude::*;

use super::{sqrt_channels, PamWeights, RelationTensor};
use crate::tensor::{pointwise_linear, unfold, Element, FeatureMap, WindowConfig};
use crate::Result;

/// Pixels handled per parallel work item.
const PIXEL_CHUNK: usize = 256;

/// Sliding-window pixel graph attention.
///
/// `q = θ(f)`, `K = unfold(φ(f))`, `V = unfold(ω(f))`; each pixel's logits are
/// `q·K / √c` over its `k²` window slots, softmax-normalised, and the output
/// is the attention-weighted sum of the window values. Returns the output map
/// and the attention weights.
pub fn pam_forward<T: Element>(
    f: &FeatureMap<T>,
    wts: &PamWeights<T>,
    cfg: WindowConfig,
) -> Result<(FeatureMap<T>, RelationTensor<T>)> {
    let [b, c, h, w] = f.dims();
    wts.check(c)?;
    cfg.check_fits(h, w)?;
    let n = h * w;
    let kk = cfg.area();
    let scale: T = sqrt_channels(c);

    let q = pointwise_linear(f, &wts.theta)?;
    let keys = unfold(&pointwise_linear(f, &wts.phi)?, cfg)?;
    let values = unfold(&pointwise_linear(f, &wts.omega)?, cfg)?;

    let mut att = vec![T::zero(); b * n * kk];
    let mut out = vec![T::zero(); b * c * n];
    for bi in 0..b {
        let qb = q.batch_slice(bi);
        let kb = keys.batch_slice(bi);
        let vb = values.batch_slice(bi);

        // Each chunk works slot-major, `[kk, len]`, so every inner loop runs
        // over contiguous pixels. Per-pixel reduction order is fixed.
        let chunks: Vec<(Vec<T>, Vec<T>)> = (0..n.div_ceil(PIXEL_CHUNK))
            .into_par_iter()
            .map(|chunk_idx| {
                let p0 = chunk_idx * PIXEL_CHUNK;
                let len = PIXEL_CHUNK.min(n - p0);
                let mut s = vec![T::zero(); kk * len];
                for ch in 0..c {
                    let qrow = &qb[ch * n + p0..ch * n + p0 + len];
                    for (j, srow) in s.chunks_mut(len).enumerate() {
                        let krow = &kb[(ch * kk + j) * n + p0..(ch * kk + j) * n + p0 + len];
                        for ((acc, &qv), &kv) in srow.iter_mut().zip(qrow).zip(krow) {
                            *acc = *acc + qv * kv;
                        }
                    }
                }
                for v in s.iter_mut() {
                    *v = *v / scale;
                }
                softmax_slots(&mut s, len);

                let mut o = vec![T::zero(); c * len];
                for (ch, orow) in o.chunks_mut(len).enumerate() {
                    for (j, arow) in s.chunks(len).enumerate() {
                        let vrow = &vb[(ch * kk + j) * n + p0..(ch * kk + j) * n + p0 + len];
                        for ((acc, &a), &v) in orow.iter_mut().zip(arow).zip(vrow) {
                            *acc = *acc + a * v;
                        }
                    }
                }
                (s, o)
            })
            .collect();

        let att_b = &mut att[bi * n * kk..(bi + 1) * n * kk];
        let out_b = &mut out[bi * c * n..(bi + 1) * c * n];
        for (chunk_idx, (s, o)) in chunks.iter().enumerate() {
            let p0 = chunk_idx * PIXEL_CHUNK;
            let len = s.len() / kk;
            for (j, arow) in s.chunks(len).enumerate() {
                for (p, &a) in arow.iter().enumerate() {
                    att_b[(p0 + p) * kk + j] = a;
                }
            }
            for (ch, orow) in o.chunks(len).enumerate() {
                out_b[ch * n + p0..ch * n + p0 + len].copy_from_slice(orow);
            }
        }
    }

    let relation = RelationTensor {
        batch: b,
        pixels: n,
        window: kk,
        values: att,
    };
    Ok((FeatureMap::new([b, c, h, w], out)?, relation))
}

/// Softmax down each column of a slot-major `[kk, len]` block, with the same
/// per-pixel operation order as
/// [`softmax_in_place`](crate::tensor::softmax_in_place).
fn softmax_slots<T: Element>(s: &mut [T], len: usize) {
    let mut max = vec![T::neg_infinity(); len];
    for row in s.chunks(len) {
        for (m, &v) in max.iter_mut().zip(row) {
            if v > *m || v.is_nan() {
                *m = v;
            }
        }
    }
    let mut sum = vec![T::zero(); len];
    for row in s.chunks_mut(len) {
        for ((v, &m), acc) in row.iter_mut().zip(&max).zip(sum.iter_mut()) {
            *v = (*v - m).exp();
            *acc = *acc + *v;
        }
    }
    for row in s.chunks_mut(len) {
        for (v, &z) in row.iter_mut().zip(&sum) {
            *v = *v / z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize) -> WindowConfig {
        WindowConfig::new(k).unwrap()
    }

    #[test]
    fn zero_input_is_a_fixed_point() {
        let f = FeatureMap::<f64>::zeros([2, 4, 5, 6]).unwrap();
        let (out, rel) = pam_forward(&f, &PamWeights::random(4, 1, false), cfg(3)).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
        for row in rel.rows() {
            assert!(row.iter().all(|&a| (a - 1.0 / 9.0).abs() < 1e-15));
        }
    }

    #[test]
    fn unit_window_identity_weights_is_identity() {
        let f = FeatureMap::<f64>::random([2, 3, 4, 5], 2).unwrap();
        let (out, rel) = pam_forward(&f, &PamWeights::identity(3), cfg(1)).unwrap();
        assert!(out.bit_eq(&f));
        assert!(rel.values.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn relation_rows_are_distributions() {
        let f = FeatureMap::<f64>::random([2, 4, 7, 5], 3).unwrap().scale(3.0);
        let (_, rel) = pam_forward(&f, &PamWeights::random(4, 4, true), cfg(5)).unwrap();
        assert_eq!((rel.batch, rel.pixels, rel.window), (2, 35, 25));
        assert!(rel.max_row_sum_error() <= 1e-12);
        assert!(rel.values.iter().all(|&a| a > 0.0));
    }

    #[test]
    fn rejects_channel_mismatch_and_bad_window() {
        let f = FeatureMap::<f64>::zeros([1, 3, 2, 2]).unwrap();
        assert!(pam_forward(&f, &PamWeights::identity(4), cfg(3)).is_err());
        assert!(pam_forward(&f, &PamWeights::identity(3), cfg(7)).is_err());
    }

    #[test]
    fn scaling_value_matrix_scales_output() {
        let f = FeatureMap::<f64>::random([1, 4, 6, 6], 5).unwrap();
        let wts = PamWeights::random(4, 6, false);
        let mut scaled = wts.clone();
        scaled.omega.w.iter_mut().for_each(|v| *v *= 2.5);
        let (a, _) = pam_forward(&f, &wts, cfg(3)).unwrap();
        let (b, _) = pam_forward(&f, &scaled, cfg(3)).unwrap();
        assert!(b.max_abs_diff(&a.scale(2.5)).unwrap() < 1e-14);
    }

    #[test]
    fn f32_mode_tracks_f64() {
        let f = FeatureMap::<f64>::random([1, 4, 9, 9], 8).unwrap();
        let wts = PamWeights::random(4, 9, true);
        let (a, _) = pam_forward(&f, &wts, cfg(3)).unwrap();
        let (b, _) = pam_forward(&f.cast::<f32>(), &wts.cast::<f32>(), cfg(3)).unwrap();
        assert!(b.cast::<f64>().max_abs_diff(&a).unwrap() < 1e-5);
    }
}
