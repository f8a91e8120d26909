use super::MsrbWeights;
use crate::tensor::{pointwise_linear, FeatureMap, LinearWeights};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Height,
    Width,
}

/// Full-axis FC: every `(b, c, other-axis)` fiber along `axis` becomes `W·fiber + bias`.
pub fn axial_fc(f: &FeatureMap, axis: Axis, wts: &LinearWeights) -> Result<FeatureMap> {
    let [b, c, h, w] = f.dims();
    let len = match axis {
        Axis::Height => h,
        Axis::Width => w,
    };
    if wts.c_in() != len || wts.c_out() != len {
        return Err(Error::shape(format!(
            "{axis:?} mixing needs a {len}×{len} matrix, got {}×{}",
            wts.c_out(),
            wts.c_in()
        )));
    }
    let mut out = FeatureMap::zeros([b, c, h, w])?;
    for bi in 0..b {
        for ci in 0..c {
            match axis {
                Axis::Width => {
                    for y in 0..h {
                        let fiber: Vec<f64> = (0..w).map(|x| f.at(bi, ci, y, x)).collect();
                        for (x, v) in wts.apply_vec(&fiber).into_iter().enumerate() {
                            out.set(bi, ci, y, x, v);
                        }
                    }
                }
                Axis::Height => {
                    for x in 0..w {
                        let fiber: Vec<f64> = (0..h).map(|y| f.at(bi, ci, y, x)).collect();
                        for (y, v) in wts.apply_vec(&fiber).into_iter().enumerate() {
                            out.set(bi, ci, y, x, v);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Exact GELU, `x·Φ(x)`.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Wave recombination shared by [`patm_fuse`] and [`madm`]: branch `k` gives
/// amplitude `z_k = W^c·x_k` and phase `θ_k = W^θ·x_k`, mixed along its axis as
/// `A_t,k·(z_k ⊙ cos θ_k) + A_i,k·(z_k ⊙ sin θ_k)`; the two axis terms are
/// summed and passed through the pointwise fuse layer.
fn wave_mix(height_branch: &FeatureMap, width_branch: &FeatureMap, wts: &MsrbWeights) -> Result<FeatureMap> {
    let mut acc: Option<FeatureMap> = None;
    for (x, axis, amp_t, amp_i) in [
        (height_branch, Axis::Height, &wts.amp_t.height, &wts.amp_i.height),
        (width_branch, Axis::Width, &wts.amp_t.width, &wts.amp_i.width),
    ] {
        let z = pointwise_linear(x, &wts.channel_fc)?;
        let theta = pointwise_linear(x, &wts.phase_fc)?;
        let cos_part = z.zip_with(&theta, |z, t| z * t.cos())?;
        let sin_part = z.zip_with(&theta, |z, t| z * t.sin())?;
        let term = axial_fc(&cos_part, axis, amp_t)?.add(&axial_fc(&sin_part, axis, amp_i)?)?;
        acc = Some(match acc {
            Some(a) => a.add(&term)?,
            None => term,
        });
    }
    pointwise_linear(&acc.expect("two axis terms"), &wts.fuse)
}

/// `fuse(Σ_axis A_t·(z ⊙ cos θ) + A_i·(z ⊙ sin θ))` with `z = W^c·f`, `θ = W^θ·f`.
pub fn patm_fuse(f: &FeatureMap, wts: &MsrbWeights) -> Result<FeatureMap> {
    wts.check_features(f)?;
    wave_mix(f, f, wts)
}

/// Multi-axis dynamic mixing with residual: height and width FC branches,
/// wave fusion across both, plus the input.
pub fn madm(f: &FeatureMap, wts: &MsrbWeights) -> Result<FeatureMap> {
    wts.check_features(f)?;
    let xh = axial_fc(f, Axis::Height, &wts.axial_h)?;
    let xw = axial_fc(f, Axis::Width, &wts.axial_w)?;
    f.add(&wave_mix(&xh, &xw, wts)?)
}

/// Pointwise `fc2(gelu(fc1(f))) + f`.
pub fn mlp_ffn(f: &FeatureMap, wts: &MsrbWeights) -> Result<FeatureMap> {
    let hidden = pointwise_linear(f, &wts.ffn.fc1)?.map(gelu);
    f.add(&pointwise_linear(&hidden, &wts.ffn.fc2)?)
}
