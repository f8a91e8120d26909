//! Dense rank-4 tensor substrate shared by every kernel in the crate.
//!
//! Layout is fixed row-major `(b, c, h, w)`. All reductions inside the
//! kernels run serially in ascending channel / window-position order, so the
//! results are bit-identical no matter how work is split across threads.

mod linear;
mod rng;
mod shuffle;
mod softmax;
mod unfold;

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

use crate::{Error, Result};

pub use linear::{pointwise_linear, LinearWeights};
pub use rng::SeededRng;
pub use shuffle::{pixel_shuffle, pixel_unshuffle};
pub use softmax::{softmax_in_place, softmax_lastdim};
pub use unfold::{unfold, UnfoldedMap, WindowConfig};

/// Scalar type a kernel can run in. `f64` is the verification precision,
/// `f32` exists for benchmark timing.
pub trait Element: Float + FromPrimitive + Default + Debug + Send + Sync + 'static {
    const BYTES: usize;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to every Element")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Element for f32 {
    const BYTES: usize = 4;
}

impl Element for f64 {
    const BYTES: usize = 8;
}

/// Dense `[batch, channels, height, width]` array.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap<T = f64> {
    dims: [usize; 4],
    data: Vec<T>,
}

impl<T: Element> FeatureMap<T> {
    pub fn new(dims: [usize; 4], data: Vec<T>) -> Result<Self> {
        check_dims(dims)?;
        let expected = dims.iter().product::<usize>();
        if data.len() != expected {
            return Err(Error::shape(format!(
                "data length {} does not match dims {:?} ({} elements)",
                data.len(),
                dims,
                expected
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: [usize; 4]) -> Result<Self> {
        Self::filled(dims, T::zero())
    }

    pub fn filled(dims: [usize; 4], value: T) -> Result<Self> {
        check_dims(dims)?;
        Ok(Self {
            dims,
            data: vec![value; dims.iter().product()],
        })
    }

    /// Uniform `[-1, 1]` entries drawn from a [`SeededRng`] in layout order.
    pub fn random(dims: [usize; 4], seed: u64) -> Result<Self> {
        check_dims(dims)?;
        let mut rng = SeededRng::new(seed);
        let data = (0..dims.iter().product::<usize>())
            .map(|_| T::from_f64_lossy(rng.next_uniform()))
            .collect();
        Ok(Self { dims, data })
    }

    pub fn from_fn(dims: [usize; 4], mut f: impl FnMut(usize, usize, usize, usize) -> T) -> Result<Self> {
        check_dims(dims)?;
        let [b, c, h, w] = dims;
        let mut data = Vec::with_capacity(b * c * h * w);
        for bi in 0..b {
            for ci in 0..c {
                for y in 0..h {
                    for x in 0..w {
                        data.push(f(bi, ci, y, x));
                    }
                }
            }
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn batch(&self) -> usize {
        self.dims[0]
    }

    pub fn channels(&self) -> usize {
        self.dims[1]
    }

    pub fn height(&self) -> usize {
        self.dims[2]
    }

    pub fn width(&self) -> usize {
        self.dims[3]
    }

    /// Pixels per channel plane, `h·w`.
    pub fn pixels(&self) -> usize {
        self.dims[2] * self.dims[3]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, b: usize, c: usize, y: usize, x: usize) -> usize {
        let [_, cs, hs, ws] = self.dims;
        ((b * cs + c) * hs + y) * ws + x
    }

    #[inline]
    pub fn at(&self, b: usize, c: usize, y: usize, x: usize) -> T {
        self.data[self.index(b, c, y, x)]
    }

    #[inline]
    pub fn set(&mut self, b: usize, c: usize, y: usize, x: usize, v: T) {
        let i = self.index(b, c, y, x);
        self.data[i] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// `[c, h, w]` slab of one batch entry.
    pub fn batch_slice(&self, b: usize) -> &[T] {
        let stride = self.dims[1] * self.pixels();
        &self.data[b * stride..(b + 1) * stride]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, alpha: T) -> Self {
        self.map(|v| v * alpha)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::shape(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(Self {
            dims: self.dims,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::shape(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs().to_f64_lossy())
            .fold(0.0, f64::max))
    }

    /// Equal dims and identical bit patterns (distinguishes `-0.0`, matches NaN payloads).
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_f64_lossy().to_bits() == b.to_f64_lossy().to_bits())
    }

    pub fn cast<U: Element>(&self) -> FeatureMap<U> {
        FeatureMap {
            dims: self.dims,
            data: self.data.iter().map(|v| U::from_f64_lossy(v.to_f64_lossy())).collect(),
        }
    }

    /// Concatenate along channels. Batch and spatial dims must agree.
    pub fn concat_channels(&self, other: &Self) -> Result<Self> {
        let [b, c0, h, w] = self.dims;
        let [b1, c1, h1, w1] = other.dims;
        if (b, h, w) != (b1, h1, w1) {
            return Err(Error::shape(format!(
                "cannot concatenate {:?} with {:?} along channels",
                self.dims, other.dims
            )));
        }
        let n = h * w;
        let mut data = Vec::with_capacity(b * (c0 + c1) * n);
        for bi in 0..b {
            data.extend_from_slice(self.batch_slice(bi));
            data.extend_from_slice(other.batch_slice(bi));
        }
        Ok(Self {
            dims: [b, c0 + c1, h, w],
            data,
        })
    }

    /// Reverse the width axis.
    pub fn flip_width(&self) -> Self {
        let [_, _, _, w] = self.dims;
        let mut out = self.clone();
        for (dst, src) in out.data.chunks_mut(w).zip(self.data.chunks(w)) {
            for (d, s) in dst.iter_mut().zip(src.iter().rev()) {
                *d = *s;
            }
        }
        out
    }
}

impl FeatureMap<f64> {
    /// Four little-endian `u64` dims followed by the little-endian `f64` values.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + 8 * self.data.len());
        for d in self.dims {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 32 || !(bytes.len() - 32).is_multiple_of(8) {
            return Err(Error::shape(format!("dump of {} bytes is not a feature map", bytes.len())));
        }
        let word = |i: usize| -> [u8; 8] { bytes[i * 8..i * 8 + 8].try_into().unwrap() };
        let mut dims = [0usize; 4];
        for (i, d) in dims.iter_mut().enumerate() {
            *d = u64::from_le_bytes(word(i)) as usize;
        }
        let data = (4..bytes.len() / 8).map(|i| f64::from_le_bytes(word(i))).collect();
        Self::new(dims, data)
    }
}

fn check_dims(dims: [usize; 4]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::shape(format!("all dims must be >= 1, got {:?}", dims)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length_and_zero_dims() {
        assert!(FeatureMap::<f64>::new([1, 1, 2, 2], vec![0.0; 3]).is_err());
        assert!(FeatureMap::<f64>::zeros([1, 0, 2, 2]).is_err());
    }

    #[test]
    fn layout_is_bchw_row_major() {
        let f = FeatureMap::<f64>::from_fn([2, 3, 4, 5], |b, c, y, x| (b * 1000 + c * 100 + y * 10 + x) as f64).unwrap();
        assert_eq!(f.data()[f.index(1, 2, 3, 4)], 1234.0);
        assert_eq!(f.index(0, 0, 1, 0), 5);
        assert_eq!(f.index(0, 1, 0, 0), 20);
    }

    #[test]
    fn byte_dump_round_trips() {
        let f = FeatureMap::<f64>::random([2, 3, 4, 5], 11).unwrap();
        let bytes = f.to_le_bytes();
        assert_eq!(bytes.len(), 32 + 8 * 120);
        assert_eq!(&bytes[..8], &2u64.to_le_bytes());
        assert!(FeatureMap::from_le_bytes(&bytes).unwrap().bit_eq(&f));
        assert!(FeatureMap::from_le_bytes(&bytes[..40]).is_err());
    }

    #[test]
    fn equal_seeds_give_identical_maps() {
        let a = FeatureMap::<f64>::random([1, 4, 6, 6], 7).unwrap();
        let b = FeatureMap::<f64>::random([1, 4, 6, 6], 7).unwrap();
        let c = FeatureMap::<f64>::random([1, 4, 6, 6], 8).unwrap();
        assert!(a.bit_eq(&b));
        assert!(!a.bit_eq(&c));
    }

    #[test]
    fn concat_and_flip() {
        let a = FeatureMap::<f64>::from_fn([2, 1, 1, 3], |b, _, _, x| (b * 10 + x) as f64).unwrap();
        let b = a.scale(-1.0);
        let cat = a.concat_channels(&b).unwrap();
        assert_eq!(cat.dims(), [2, 2, 1, 3]);
        assert_eq!(cat.at(1, 1, 0, 2), -12.0);
        assert_eq!(a.flip_width().data(), &[2.0, 1.0, 0.0, 12.0, 11.0, 10.0]);
    }
}
