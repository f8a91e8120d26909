use super::{dot, pixel_major_qkv, sqrt_channels, PamWeights, PgaGraph, PAD};
use crate::tensor::{Element, FeatureMap};
use crate::{Error, Result};

/// Adjacency-matrix pixel graph attention.
///
/// Scores every node pair into a dense `n×n` matrix, keeps the entries the
/// graph's adjacency marks, normalises each row together with the node's
/// padded window slots (zero logit, zero value) and aggregates the values
/// with a dense `n×n` by `n×c` product. Computes the same function as
/// [`pam_forward`](super::pam_forward) at `O(n²c)` cost and `O(n²)` memory.
/// Runs on the calling thread only.
pub fn pga_reference<T: Element>(f: &FeatureMap<T>, wts: &PamWeights<T>, graph: &PgaGraph) -> Result<FeatureMap<T>> {
    let [b, c, h, w] = f.dims();
    check_graph(f, wts, graph)?;
    let n = h * w;
    let scale: T = sqrt_channels(c);
    let qkv = pixel_major_qkv(f, wts)?;

    let mut scores = vec![T::zero(); n * n];
    let mut attention = vec![T::zero(); n * n];
    let mut out = vec![T::zero(); b * c * n];
    for (bi, x) in qkv.iter().enumerate() {
        for i in 0..n {
            let qi = &x.q[i * c..(i + 1) * c];
            for j in 0..n {
                scores[i * n + j] = dot(qi, &x.k[j * c..(j + 1) * c]) / scale;
            }
        }

        for i in 0..n {
            let mask = graph.mask_row(i);
            let row = &scores[i * n..(i + 1) * n];
            let pads = graph.pad_count(i);
            let mut max = if pads > 0 { T::zero() } else { T::neg_infinity() };
            for j in 0..n {
                if mask[j] && row[j] > max {
                    max = row[j];
                }
            }
            let mut z = T::from_f64_lossy(pads as f64) * (-max).exp();
            let arow = &mut attention[i * n..(i + 1) * n];
            for j in 0..n {
                arow[j] = if mask[j] { (row[j] - max).exp() } else { T::zero() };
                z = z + arow[j];
            }
            for a in arow.iter_mut() {
                *a = *a / z;
            }
        }

        let ob = &mut out[bi * c * n..(bi + 1) * c * n];
        for i in 0..n {
            let arow = &attention[i * n..(i + 1) * n];
            for ch in 0..c {
                let mut acc = T::zero();
                for j in 0..n {
                    acc = acc + arow[j] * x.v[j * c + ch];
                }
                ob[ch * n + i] = acc;
            }
        }
    }
    FeatureMap::new([b, c, h, w], out)
}

/// Same semantics as [`pga_reference`] walking each node's neighbor list
/// instead of the dense matrices. Correctness cross-check only.
pub fn pga_adjacency_list<T: Element>(
    f: &FeatureMap<T>,
    wts: &PamWeights<T>,
    graph: &PgaGraph,
) -> Result<FeatureMap<T>> {
    let [b, c, h, w] = f.dims();
    check_graph(f, wts, graph)?;
    let n = h * w;
    let scale: T = sqrt_channels(c);
    let qkv = pixel_major_qkv(f, wts)?;
    let mut out = vec![T::zero(); b * c * n];
    let mut logits = vec![T::zero(); graph.slots()];
    for (bi, x) in qkv.iter().enumerate() {
        for i in 0..n {
            let qi = &x.q[i * c..(i + 1) * c];
            for (slot, &j) in logits.iter_mut().zip(graph.neighbors(i)) {
                *slot = if j == PAD {
                    T::zero()
                } else {
                    dot(qi, &x.k[j as usize * c..(j as usize + 1) * c]) / scale
                };
            }
            crate::tensor::softmax_in_place(&mut logits);
            for ch in 0..c {
                let mut acc = T::zero();
                for (&a, &j) in logits.iter().zip(graph.neighbors(i)) {
                    if j != PAD {
                        acc = acc + a * x.v[j as usize * c + ch];
                    }
                }
                out[(bi * c + ch) * n + i] = acc;
            }
        }
    }
    FeatureMap::new([b, c, h, w], out)
}

fn check_graph<T: Element>(f: &FeatureMap<T>, wts: &PamWeights<T>, graph: &PgaGraph) -> Result<()> {
    wts.check(f.channels())?;
    if (graph.h, graph.w) != (f.height(), f.width()) {
        return Err(Error::shape(format!(
            "graph built for {}×{}, features are {}×{}",
            graph.h,
            graph.w,
            f.height(),
            f.width()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::{build_pixel_graph, pam_forward, WindowConfig};

    #[test]
    fn dense_and_list_forms_agree_with_pam() {
        let f = FeatureMap::<f64>::random([2, 4, 5, 7], 12).unwrap();
        let wts = PamWeights::random(4, 13, true);
        let cfg = WindowConfig::new(3).unwrap();
        let g = build_pixel_graph(5, 7, cfg).unwrap();
        let dense = pga_reference(&f, &wts, &g).unwrap();
        let list = pga_adjacency_list(&f, &wts, &g).unwrap();
        let (pam, _) = pam_forward(&f, &wts, cfg).unwrap();
        assert!(dense.max_abs_diff(&pam).unwrap() < 1e-12);
        assert!(list.max_abs_diff(&pam).unwrap() < 1e-12);
    }

    #[test]
    fn zero_and_identity() {
        let cfg = WindowConfig::new(1).unwrap();
        let g = build_pixel_graph(3, 3, cfg).unwrap();
        let f = FeatureMap::<f64>::random([1, 2, 3, 3], 1).unwrap();
        assert!(pga_reference(&f, &PamWeights::identity(2), &g).unwrap().bit_eq(&f));
        let z = FeatureMap::<f64>::zeros([1, 2, 3, 3]).unwrap();
        let out = pga_reference(&z, &PamWeights::random(2, 3, false), &build_pixel_graph(3, 3, WindowConfig::new(3).unwrap()).unwrap()).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn graph_size_mismatch_rejected() {
        let g = build_pixel_graph(3, 4, WindowConfig::new(3).unwrap()).unwrap();
        let f = FeatureMap::<f64>::zeros([1, 2, 4, 3]).unwrap();
        assert!(pga_reference(&f, &PamWeights::identity(2), &g).is_err());
    }
}
