//! Pixel-wise attention kernels.
//!
//! [`pam_forward`] is the sliding-window formulation: every pixel attends over
//! the `k×k` zero-padded window around itself, computed with unfold so that
//! all pixels run in parallel. [`pga_reference`] computes the same function the
//! way adjacency-matrix graph attention does (dense `n×n` scores masked by
//! the pixel graph) and serves as the correctness oracle and the memory-heavy
//! baseline. [`halo_attention`] and [`global_attention`] are the blocked and
//! full-image baselines.
//!
//! Padded window slots take part in the softmax with zero-valued keys and
//! values, exactly as pad-then-unfold produces them. Border pixels therefore
//! give some weight (from a zero logit) to padding.

mod backward;
mod flops;
mod global;
mod graph;
mod halo;
mod pam;
mod pga;

use crate::tensor::{Element, FeatureMap, LinearWeights, SeededRng};
use crate::{Error, Result};

pub use crate::tensor::WindowConfig;
pub use backward::{pam_backward, PamGradients};
pub use flops::{flops_estimate, halo_geometry, AttentionKind, HALO_BLOCK};
pub use global::global_attention;
pub use graph::{build_pixel_graph, PgaGraph, PAD};
pub use halo::halo_attention;
pub use pam::pam_forward;
pub use pga::{pga_adjacency_list, pga_reference};

/// Query (`theta`), key (`phi`) and value (`omega`) 1×1 transforms, all `c → c`.
#[derive(Clone, Debug, PartialEq)]
pub struct PamWeights<T = f64> {
    pub theta: LinearWeights<T>,
    pub phi: LinearWeights<T>,
    pub omega: LinearWeights<T>,
}

impl<T: Element> PamWeights<T> {
    pub fn new(theta: LinearWeights<T>, phi: LinearWeights<T>, omega: LinearWeights<T>) -> Result<Self> {
        let c = theta.c_in();
        for (name, t) in [("theta", &theta), ("phi", &phi), ("omega", &omega)] {
            if t.c_in() != c || t.c_out() != c {
                return Err(Error::shape(format!(
                    "{name} is [{}, {}], expected square {c}×{c}",
                    t.c_out(),
                    t.c_in()
                )));
            }
        }
        Ok(Self { theta, phi, omega })
    }

    pub fn identity(c: usize) -> Self {
        Self {
            theta: LinearWeights::identity(c),
            phi: LinearWeights::identity(c),
            omega: LinearWeights::identity(c),
        }
    }

    pub fn random(c: usize, seed: u64, with_bias: bool) -> Self {
        let mut rng = SeededRng::new(seed);
        Self {
            theta: LinearWeights::random(c, c, &mut rng, with_bias),
            phi: LinearWeights::random(c, c, &mut rng, with_bias),
            omega: LinearWeights::random(c, c, &mut rng, with_bias),
        }
    }

    pub fn channels(&self) -> usize {
        self.theta.c_in()
    }

    pub fn cast<U: Element>(&self) -> PamWeights<U> {
        PamWeights {
            theta: self.theta.cast(),
            phi: self.phi.cast(),
            omega: self.omega.cast(),
        }
    }

    pub(crate) fn check(&self, c: usize) -> Result<()> {
        if self.channels() != c {
            return Err(Error::shape(format!(
                "attention weights are for {} channels, input has {c}",
                self.channels()
            )));
        }
        Ok(())
    }
}

/// Per-pixel attention weights over the `k²` window slots, `[b, n, k²]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationTensor<T = f64> {
    pub batch: usize,
    pub pixels: usize,
    pub window: usize,
    pub values: Vec<T>,
}

impl<T: Element> RelationTensor<T> {
    pub fn row(&self, b: usize, pixel: usize) -> &[T] {
        let start = (b * self.pixels + pixel) * self.window;
        &self.values[start..start + self.window]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks(self.window)
    }

    /// Largest `|Σ row − 1|` over all rows.
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows()
            .map(|r| (r.iter().fold(T::zero(), |a, &v| a + v).to_f64_lossy() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Query, key and value maps of one batch entry in pixel-major `[n, c]` layout.
pub(crate) struct PixelMajorQkv<T> {
    pub q: Vec<T>,
    pub k: Vec<T>,
    pub v: Vec<T>,
}

pub(crate) fn pixel_major_qkv<T: Element>(f: &FeatureMap<T>, wts: &PamWeights<T>) -> Result<Vec<PixelMajorQkv<T>>> {
    let q = crate::tensor::pointwise_linear(f, &wts.theta)?;
    let k = crate::tensor::pointwise_linear(f, &wts.phi)?;
    let v = crate::tensor::pointwise_linear(f, &wts.omega)?;
    Ok((0..f.batch())
        .map(|b| PixelMajorQkv {
            q: transpose_planes(q.batch_slice(b), f.channels(), f.pixels()),
            k: transpose_planes(k.batch_slice(b), f.channels(), f.pixels()),
            v: transpose_planes(v.batch_slice(b), f.channels(), f.pixels()),
        })
        .collect())
}

/// `[rows, cols]` → `[cols, rows]`.
pub(crate) fn transpose_planes<T: Element>(src: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut out = vec![T::zero(); rows * cols];
    for r in 0..rows {
        for col in 0..cols {
            out[col * rows + r] = src[r * cols + col];
        }
    }
    out
}

#[inline]
pub(crate) fn dot<T: Element>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn sqrt_channels<T: Element>(c: usize) -> T {
    T::from_f64_lossy((c as f64).sqrt())
}
