//! Forward pass of the axial-MLP sequential residual block.
//!
//! ```text
//! msrb(x, clue) = blstm([ffn(madm(x)), clue])
//! madm(x)       = x + fuse(Σ_axis  A_t·(z ⊙ cos θ) + A_i·(z ⊙ sin θ))
//! ```
//!
//! `madm` mixes along height and width with full-axis FC layers, lifts each
//! axis branch to an amplitude `z` and phase `θ` with shared channel FCs and
//! recombines the branches with per-axis amplitude matrices. The BLSTM runs
//! over the width axis of every row; forward and backward hidden states are
//! summed and projected back to `c` channels.
//!
//! LSTM cell (gate order `i, f, g, o`):
//!
//! ```text
//! [i f g o] = W_ih·x_t + b_ih + W_hh·h_{t-1}
//! c_t = σ(f)·c_{t-1} + σ(i)·tanh(g)
//! h_t = σ(o)·tanh(c_t)
//! ```

mod lstm;
mod mixing;

use crate::tensor::{FeatureMap, LinearWeights, SeededRng};
use crate::{Error, Result};

pub use lstm::{blstm_forward, LstmParams};
pub use mixing::{axial_fc, gelu, madm, mlp_ffn, patm_fuse, Axis};

/// Stacked blocks in the reference network.
pub const DEFAULT_LAYERS: usize = 5;

/// One square matrix per spatial axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisPair {
    pub height: LinearWeights,
    pub width: LinearWeights,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FfnWeights {
    pub fc1: LinearWeights,
    pub fc2: LinearWeights,
}

/// Shape of a block: feature channels, clue channels, spatial size and FFN width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MsrbShape {
    pub channels: usize,
    pub clue_channels: usize,
    pub height: usize,
    pub width: usize,
    pub ffn_hidden: usize,
}

impl MsrbShape {
    /// FFN hidden width defaults to `2c`.
    pub fn new(channels: usize, clue_channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            clue_channels,
            height,
            width,
            ffn_hidden: 2 * channels,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MsrbWeights {
    pub shape: MsrbShape,
    pub axial_h: LinearWeights,
    pub axial_w: LinearWeights,
    /// `W^c`: amplitude `z`.
    pub channel_fc: LinearWeights,
    /// `W^θ`: phase `θ`.
    pub phase_fc: LinearWeights,
    pub amp_t: AxisPair,
    pub amp_i: AxisPair,
    /// Pointwise output layer of the wave fusion.
    pub fuse: LinearWeights,
    pub ffn: FfnWeights,
    pub lstm_fwd: LstmParams,
    pub lstm_bwd: LstmParams,
    pub proj: LinearWeights,
}

impl MsrbWeights {
    pub fn zeros(shape: MsrbShape) -> Self {
        let MsrbShape {
            channels: c,
            clue_channels: ct,
            height: h,
            width: w,
            ffn_hidden: hid,
        } = shape;
        Self {
            shape,
            axial_h: LinearWeights::zeros(h, h),
            axial_w: LinearWeights::zeros(w, w),
            channel_fc: LinearWeights::zeros(c, c),
            phase_fc: LinearWeights::zeros(c, c),
            amp_t: AxisPair {
                height: LinearWeights::zeros(h, h),
                width: LinearWeights::zeros(w, w),
            },
            amp_i: AxisPair {
                height: LinearWeights::zeros(h, h),
                width: LinearWeights::zeros(w, w),
            },
            fuse: LinearWeights::zeros(c, c),
            ffn: FfnWeights {
                fc1: LinearWeights::zeros(hid, c),
                fc2: LinearWeights::zeros(c, hid),
            },
            lstm_fwd: LstmParams::zeros(c + ct, c),
            lstm_bwd: LstmParams::zeros(c + ct, c),
            proj: LinearWeights::zeros(c, c),
        }
    }

    /// Seeded initialisation. Amplitude matrices carry no bias, so a zero
    /// amplitude map stays zero through the axis mixing.
    pub fn random(shape: MsrbShape, seed: u64) -> Self {
        let MsrbShape {
            channels: c,
            clue_channels: ct,
            height: h,
            width: w,
            ffn_hidden: hid,
        } = shape;
        let mut rng = SeededRng::new(seed);
        let r = &mut rng;
        Self {
            shape,
            axial_h: LinearWeights::random(h, h, r, true),
            axial_w: LinearWeights::random(w, w, r, true),
            channel_fc: LinearWeights::random(c, c, r, true),
            phase_fc: LinearWeights::random(c, c, r, true),
            amp_t: AxisPair {
                height: LinearWeights::random(h, h, r, false),
                width: LinearWeights::random(w, w, r, false),
            },
            amp_i: AxisPair {
                height: LinearWeights::random(h, h, r, false),
                width: LinearWeights::random(w, w, r, false),
            },
            fuse: LinearWeights::random(c, c, r, true),
            ffn: FfnWeights {
                fc1: LinearWeights::random(hid, c, r, true),
                fc2: LinearWeights::random(c, hid, r, true),
            },
            lstm_fwd: LstmParams::random(c + ct, c, r),
            lstm_bwd: LstmParams::random(c + ct, c, r),
            proj: LinearWeights::random(c, c, r, true),
        }
    }

    /// Every tensor in serialization order.
    pub fn tensors(&self) -> Vec<(&'static str, &LinearWeights)> {
        vec![
            ("axial_h", &self.axial_h),
            ("axial_w", &self.axial_w),
            ("channel_fc", &self.channel_fc),
            ("phase_fc", &self.phase_fc),
            ("amp_t.height", &self.amp_t.height),
            ("amp_t.width", &self.amp_t.width),
            ("amp_i.height", &self.amp_i.height),
            ("amp_i.width", &self.amp_i.width),
            ("fuse", &self.fuse),
            ("ffn.fc1", &self.ffn.fc1),
            ("ffn.fc2", &self.ffn.fc2),
            ("lstm_fwd.input", &self.lstm_fwd.input),
            ("lstm_fwd.hidden", &self.lstm_fwd.hidden),
            ("lstm_bwd.input", &self.lstm_bwd.input),
            ("lstm_bwd.hidden", &self.lstm_bwd.hidden),
            ("proj", &self.proj),
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut LinearWeights> {
        vec![
            &mut self.axial_h,
            &mut self.axial_w,
            &mut self.channel_fc,
            &mut self.phase_fc,
            &mut self.amp_t.height,
            &mut self.amp_t.width,
            &mut self.amp_i.height,
            &mut self.amp_i.width,
            &mut self.fuse,
            &mut self.ffn.fc1,
            &mut self.ffn.fc2,
            &mut self.lstm_fwd.input,
            &mut self.lstm_fwd.hidden,
            &mut self.lstm_bwd.input,
            &mut self.lstm_bwd.hidden,
            &mut self.proj,
        ]
    }

    /// Manifest text plus flat little-endian `f64` dump.
    ///
    /// The manifest's first line is
    /// `msrb channels=<c> clue=<c_t> height=<h> width=<w> hidden=<ffn>`; each
    /// following line is `<name> <rows> <cols>` for one tensor in
    /// [`tensors`](Self::tensors) order. For every tensor the dump holds its
    /// `rows·cols` weights (row-major) followed by its `rows` biases.
    pub fn serialize(&self) -> (String, Vec<u8>) {
        let s = self.shape;
        let mut manifest = format!(
            "msrb channels={} clue={} height={} width={} hidden={}\n",
            s.channels, s.clue_channels, s.height, s.width, s.ffn_hidden
        );
        let mut bytes = Vec::new();
        for (name, t) in self.tensors() {
            manifest.push_str(&format!("{name} {} {}\n", t.c_out(), t.c_in()));
            for v in t.w.iter().chain(&t.bias) {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        (manifest, bytes)
    }

    pub fn deserialize(manifest: &str, bytes: &[u8]) -> Result<Self> {
        let mut lines = manifest.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty manifest".into(),
        })?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("msrb") {
            return Err(Error::Parse {
                line: 1,
                msg: "manifest must start with 'msrb'".into(),
            });
        }
        let mut get = |key: &str| -> Result<usize> {
            let field = fields.next().unwrap_or("");
            field
                .strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    msg: format!("expected {key}=<n>, found '{field}'"),
                })
        };
        let shape = MsrbShape {
            channels: get("channels")?,
            clue_channels: get("clue")?,
            height: get("height")?,
            width: get("width")?,
            ffn_hidden: get("hidden")?,
        };
        let mut weights = Self::zeros(shape);
        let names: Vec<&str> = weights.tensors().into_iter().map(|(n, _)| n).collect();
        let mut values = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap()));
        if !bytes.len().is_multiple_of(8) {
            return Err(Error::shape("weight dump length is not a multiple of 8"));
        }
        for (expected, t) in names.into_iter().zip(weights.tensors_mut()) {
            let (idx, line) = lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("manifest ends before tensor '{expected}'"),
            })?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let dims = (t.c_out().to_string(), t.c_in().to_string());
            if parts.len() != 3 || parts[0] != expected || parts[1] != dims.0 || parts[2] != dims.1 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected '{expected} {} {}', found '{line}'", dims.0, dims.1),
                });
            }
            for slot in t.w.iter_mut().chain(t.bias.iter_mut()) {
                *slot = values.next().ok_or_else(|| Error::shape("weight dump is truncated"))?;
            }
        }
        if values.next().is_some() {
            return Err(Error::shape("weight dump has trailing values"));
        }
        Ok(weights)
    }

    pub(crate) fn check_features(&self, f: &FeatureMap) -> Result<()> {
        let [_, c, h, w] = f.dims();
        let s = self.shape;
        if (c, h, w) != (s.channels, s.height, s.width) {
            return Err(Error::shape(format!(
                "block built for [{}, {}, {}], input is [{c}, {h}, {w}]",
                s.channels, s.height, s.width
            )));
        }
        Ok(())
    }
}

/// Text-clue features concatenated before the BLSTM. Empty means no clue channels.
#[derive(Clone, Debug, Default)]
pub struct ClueMap(Option<FeatureMap>);

impl ClueMap {
    pub fn empty() -> Self {
        Self(None)
    }

    pub fn zeros(b: usize, c: usize, h: usize, w: usize) -> Result<Self> {
        Ok(Self(Some(FeatureMap::zeros([b, c, h, w])?)))
    }

    pub fn new(map: FeatureMap) -> Self {
        Self(Some(map))
    }

    pub fn channels(&self) -> usize {
        self.0.as_ref().map_or(0, |m| m.channels())
    }

    pub fn map(&self) -> Option<&FeatureMap> {
        self.0.as_ref()
    }
}

/// `blstm([ffn(madm(i_lr)), h_t])`.
pub fn msrb_forward(i_lr: &FeatureMap, h_t: &ClueMap, wts: &MsrbWeights) -> Result<FeatureMap> {
    wts.check_features(i_lr)?;
    if h_t.channels() != wts.shape.clue_channels {
        return Err(Error::shape(format!(
            "block expects {} clue channels, got {}",
            wts.shape.clue_channels,
            h_t.channels()
        )));
    }
    let features = mlp_ffn(&madm(i_lr, wts)?, wts)?;
    let joined = match h_t.map() {
        Some(clue) => features.concat_channels(clue)?,
        None => features,
    };
    blstm_forward(&joined, wts)
}

/// Applies `layers` blocks in sequence with the same clue map.
pub fn msrb_stack(i_lr: &FeatureMap, h_t: &ClueMap, layers: &[MsrbWeights]) -> Result<FeatureMap> {
    layers.iter().try_fold(i_lr.clone(), |x, wts| msrb_forward(&x, h_t, wts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialization_round_trips() {
        let wts = MsrbWeights::random(MsrbShape::new(3, 2, 4, 5), 17);
        let (manifest, bytes) = wts.serialize();
        assert!(manifest.starts_with("msrb channels=3 clue=2 height=4 width=5 hidden=6\naxial_h 4 4\n"));
        assert_eq!(MsrbWeights::deserialize(&manifest, &bytes).unwrap(), wts);
        assert!(MsrbWeights::deserialize(&manifest, &bytes[..bytes.len() - 8]).is_err());
        let broken = manifest.replace("fuse 3 3", "fuse 3 4");
        assert!(matches!(MsrbWeights::deserialize(&broken, &bytes), Err(Error::Parse { line: 10, .. })));
    }

    #[test]
    fn output_shape_matches_input() {
        let shape = MsrbShape::new(8, 0, 4, 10);
        let x = FeatureMap::random([1, 8, 4, 10], 1).unwrap();
        let out = msrb_forward(&x, &ClueMap::empty(), &MsrbWeights::random(shape, 2)).unwrap();
        assert_eq!(out.dims(), [1, 8, 4, 10]);
    }

    #[test]
    fn clue_mismatches_rejected() {
        let shape = MsrbShape::new(2, 1, 3, 3);
        let wts = MsrbWeights::random(shape, 2);
        let x = FeatureMap::random([1, 2, 3, 3], 1).unwrap();
        assert!(msrb_forward(&x, &ClueMap::empty(), &wts).is_err());
        assert!(msrb_forward(&x, &ClueMap::zeros(1, 1, 3, 4).unwrap(), &wts).is_err());
        assert!(msrb_forward(&x, &ClueMap::zeros(1, 1, 3, 3).unwrap(), &wts).is_ok());
    }

    #[test]
    fn stack_applies_every_layer() {
        let shape = MsrbShape::new(2, 0, 3, 4);
        let layers: Vec<_> = (0..DEFAULT_LAYERS as u64).map(|s| MsrbWeights::random(shape, s)).collect();
        let x = FeatureMap::random([1, 2, 3, 4], 9).unwrap();
        let mut manual = x.clone();
        for l in &layers {
            manual = msrb_forward(&manual, &ClueMap::empty(), l).unwrap();
        }
        assert!(msrb_stack(&x, &ClueMap::empty(), &layers).unwrap().bit_eq(&manual));
    }
}
