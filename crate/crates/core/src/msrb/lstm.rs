use super::MsrbWeights;
use crate::tensor::{FeatureMap, LinearWeights, SeededRng};
use crate::{Error, Result};

/// One LSTM direction: `input` is `[4H, C_in]` with the gate bias, `hidden`
/// is `[4H, H]` (its bias is unused and kept at zero). Gate rows are ordered
/// input, forget, cell, output.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmParams {
    pub input: LinearWeights,
    pub hidden: LinearWeights,
}

impl LstmParams {
    pub fn zeros(c_in: usize, hidden: usize) -> Self {
        Self {
            input: LinearWeights::zeros(4 * hidden, c_in),
            hidden: LinearWeights::zeros(4 * hidden, hidden),
        }
    }

    pub fn random(c_in: usize, hidden: usize, rng: &mut SeededRng) -> Self {
        let mut hh = LinearWeights::random(4 * hidden, hidden, rng, false);
        hh.bias.iter_mut().for_each(|b| *b = 0.0);
        Self {
            input: LinearWeights::random(4 * hidden, c_in, rng, true),
            hidden: hh,
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden.c_in()
    }

    pub fn input_size(&self) -> usize {
        self.input.c_in()
    }

    /// Advances `(h, c)` by one step on input `x`.
    pub fn step(&self, x: &[f64], h: &mut [f64], c: &mut [f64]) {
        let hs = self.hidden_size();
        let gx = self.input.apply_vec(x);
        let gh = self.hidden.apply_vec(h);
        for u in 0..hs {
            let i = sigmoid(gx[u] + gh[u]);
            let f = sigmoid(gx[hs + u] + gh[hs + u]);
            let g = (gx[2 * hs + u] + gh[2 * hs + u]).tanh();
            let o = sigmoid(gx[3 * hs + u] + gh[3 * hs + u]);
            c[u] = f * c[u] + i * g;
            h[u] = o * c[u].tanh();
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Bidirectional LSTM along the width axis of every `(batch, row)`; channel
/// vectors are the step features. Output is `proj(h_fwd + h_bwd)` per pixel.
pub fn blstm_forward(f: &FeatureMap, wts: &MsrbWeights) -> Result<FeatureMap> {
    let [b, c, h, w] = f.dims();
    for (name, p) in [("forward", &wts.lstm_fwd), ("backward", &wts.lstm_bwd)] {
        if p.input_size() != c {
            return Err(Error::shape(format!(
                "{name} LSTM takes {} input channels, map has {c}",
                p.input_size()
            )));
        }
    }
    let hs = wts.lstm_fwd.hidden_size();
    if wts.lstm_bwd.hidden_size() != hs || wts.proj.c_in() != hs {
        return Err(Error::shape("LSTM hidden sizes and projection disagree"));
    }
    let c_out = wts.proj.c_out();
    let mut out = FeatureMap::zeros([b, c_out, h, w])?;
    let mut summed = vec![vec![0.0; hs]; w];
    for bi in 0..b {
        for y in 0..h {
            let steps: Vec<Vec<f64>> = (0..w).map(|x| (0..c).map(|ch| f.at(bi, ch, y, x)).collect()).collect();
            let (mut hf, mut cf) = (vec![0.0; hs], vec![0.0; hs]);
            for x in 0..w {
                wts.lstm_fwd.step(&steps[x], &mut hf, &mut cf);
                summed[x].copy_from_slice(&hf);
            }
            let (mut hb, mut cb) = (vec![0.0; hs], vec![0.0; hs]);
            for x in (0..w).rev() {
                wts.lstm_bwd.step(&steps[x], &mut hb, &mut cb);
                for (s, v) in summed[x].iter_mut().zip(&hb) {
                    *s += v;
                }
            }
            for (x, hsum) in summed.iter().enumerate() {
                for (o, v) in wts.proj.apply_vec(hsum).into_iter().enumerate() {
                    out.set(bi, o, y, x, v);
                }
            }
        }
    }
    Ok(out)
}
