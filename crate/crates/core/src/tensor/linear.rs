use super::{Element, FeatureMap, SeededRng};
use crate::{Error, Result};

/// 1×1 convolution weights: `[c_out, c_in]` matrix plus `[c_out]` bias.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearWeights<T = f64> {
    c_out: usize,
    c_in: usize,
    pub w: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Element> LinearWeights<T> {
    pub fn new(c_out: usize, c_in: usize, w: Vec<T>, bias: Vec<T>) -> Result<Self> {
        if c_out == 0 || c_in == 0 {
            return Err(Error::shape("linear weights need c_out, c_in >= 1"));
        }
        if w.len() != c_out * c_in || bias.len() != c_out {
            return Err(Error::shape(format!(
                "linear [{c_out}, {c_in}] got {} weights and {} biases",
                w.len(),
                bias.len()
            )));
        }
        Ok(Self { c_out, c_in, w, bias })
    }

    pub fn zeros(c_out: usize, c_in: usize) -> Self {
        Self {
            c_out,
            c_in,
            w: vec![T::zero(); c_out * c_in],
            bias: vec![T::zero(); c_out],
        }
    }

    pub fn identity(c: usize) -> Self {
        Self::scaled_identity(c, T::one())
    }

    pub fn scaled_identity(c: usize, s: T) -> Self {
        let mut out = Self::zeros(c, c);
        for i in 0..c {
            out.w[i * c + i] = s;
        }
        out
    }

    /// Weights uniform in `[-1/√c_in, 1/√c_in]`; bias the same when `with_bias`, else zero.
    pub fn random(c_out: usize, c_in: usize, rng: &mut SeededRng, with_bias: bool) -> Self {
        let scale = 1.0 / (c_in as f64).sqrt();
        let w = rng.vec_uniform(c_out * c_in, scale).into_iter().map(T::from_f64_lossy).collect();
        let bias = if with_bias {
            rng.vec_uniform(c_out, scale).into_iter().map(T::from_f64_lossy).collect()
        } else {
            vec![T::zero(); c_out]
        };
        Self { c_out, c_in, w, bias }
    }

    pub fn c_out(&self) -> usize {
        self.c_out
    }

    pub fn c_in(&self) -> usize {
        self.c_in
    }

    #[inline]
    pub fn weight(&self, o: usize, i: usize) -> T {
        self.w[o * self.c_in + i]
    }

    pub fn cast<U: Element>(&self) -> LinearWeights<U> {
        LinearWeights {
            c_out: self.c_out,
            c_in: self.c_in,
            w: self.w.iter().map(|v| U::from_f64_lossy(v.to_f64_lossy())).collect(),
            bias: self.bias.iter().map(|v| U::from_f64_lossy(v.to_f64_lossy())).collect(),
        }
    }

    /// `W·x + bias` for a single channel vector.
    pub fn apply_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.c_out)
            .map(|o| {
                let row = &self.w[o * self.c_in..(o + 1) * self.c_in];
                row.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b) + self.bias[o]
            })
            .collect()
    }

    /// `Wᵀ·y` (no bias), the backward map of [`apply_vec`](Self::apply_vec).
    pub fn apply_transpose_vec(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.c_in];
        for (o, &g) in y.iter().enumerate() {
            let row = &self.w[o * self.c_in..(o + 1) * self.c_in];
            for (acc, &a) in out.iter_mut().zip(row) {
                *acc = *acc + a * g;
            }
        }
        out
    }
}

/// Applies `W·f[b, :, y, x] + bias` at every pixel independently.
pub fn pointwise_linear<T: Element>(f: &FeatureMap<T>, wts: &LinearWeights<T>) -> Result<FeatureMap<T>> {
    let [b, c, h, w] = f.dims();
    if wts.c_in != c {
        return Err(Error::shape(format!("linear expects {} input channels, map has {c}", wts.c_in)));
    }
    let n = h * w;
    let mut out = vec![T::zero(); b * wts.c_out * n];
    for bi in 0..b {
        let src = f.batch_slice(bi);
        let dst = &mut out[bi * wts.c_out * n..(bi + 1) * wts.c_out * n];
        for (o, plane) in dst.chunks_mut(n).enumerate() {
            for i in 0..c {
                let wv = wts.weight(o, i);
                for (acc, &x) in plane.iter_mut().zip(&src[i * n..(i + 1) * n]) {
                    *acc = *acc + wv * x;
                }
            }
            let bias = wts.bias[o];
            for acc in plane.iter_mut() {
                *acc = *acc + bias;
            }
        }
    }
    FeatureMap::new([b, wts.c_out, h, w], out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_doubling() {
        let f = FeatureMap::<f64>::random([2, 3, 4, 4], 5).unwrap();
        assert!(pointwise_linear(&f, &LinearWeights::identity(3)).unwrap().bit_eq(&f));
        let doubled = pointwise_linear(&f, &LinearWeights::scaled_identity(3, 2.0)).unwrap();
        assert!(doubled.bit_eq(&f.scale(2.0)));
    }

    #[test]
    fn channel_mismatch_rejected() {
        let f = FeatureMap::<f64>::zeros([1, 3, 2, 2]).unwrap();
        assert!(pointwise_linear(&f, &LinearWeights::identity(4)).is_err());
        assert!(LinearWeights::<f64>::new(2, 2, vec![0.0; 3], vec![0.0; 2]).is_err());
    }

    #[test]
    fn map_and_vector_paths_agree() {
        let mut rng = SeededRng::new(3);
        let wts = LinearWeights::<f64>::random(5, 3, &mut rng, true);
        let f = FeatureMap::<f64>::random([1, 3, 2, 3], 4).unwrap();
        let out = pointwise_linear(&f, &wts).unwrap();
        let x: Vec<f64> = (0..3).map(|c| f.at(0, c, 1, 2)).collect();
        let y = wts.apply_vec(&x);
        for o in 0..5 {
            assert!((out.at(0, o, 1, 2) - y[o]).abs() < 1e-15);
        }
    }
}
