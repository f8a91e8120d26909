use super::{dot, pixel_major_qkv, PamWeights};
use crate::tensor::{softmax_in_place, FeatureMap, LinearWeights, WindowConfig};
use crate::{Error, Result};

/// Gradients of `Σ upstream ⊙ pam_forward(f)`.
#[derive(Clone, Debug)]
pub struct PamGradients {
    pub d_input: FeatureMap<f64>,
    pub d_theta: LinearWeights<f64>,
    pub d_phi: LinearWeights<f64>,
    pub d_omega: LinearWeights<f64>,
}

/// Analytic backward pass of [`pam_forward`](super::pam_forward).
///
/// With `s = q·k/√c`, `a = softmax(s)` and `o = Σ a·v` per pixel:
/// `∂s = a ⊙ (∂a − ⟨a, ∂a⟩)` with `∂a_j = g·v_j`, then `∂q = Σ ∂s_j k_j / √c`,
/// `∂k_j += ∂s_j q / √c`, `∂v_j += a_j g`. Padded slots have constant zero
/// keys and values and receive no gradient. Parameter gradients follow from
/// the 1×1 transforms.
pub fn pam_backward(
    f: &FeatureMap<f64>,
    wts: &PamWeights<f64>,
    cfg: WindowConfig,
    upstream: &FeatureMap<f64>,
) -> Result<PamGradients> {
    let [b, c, h, w] = f.dims();
    wts.check(c)?;
    cfg.check_fits(h, w)?;
    if upstream.dims() != f.dims() {
        return Err(Error::shape(format!(
            "upstream gradient {:?} does not match output {:?}",
            upstream.dims(),
            f.dims()
        )));
    }
    let n = h * w;
    let k = cfg.k();
    let pad = cfg.padding() as isize;
    let inv_scale = 1.0 / (c as f64).sqrt();
    let qkv = pixel_major_qkv(f, wts)?;

    let mut d_theta = LinearWeights::zeros(c, c);
    let mut d_phi = LinearWeights::zeros(c, c);
    let mut d_omega = LinearWeights::zeros(c, c);
    let mut d_input = vec![0.0; b * c * n];

    let mut slots: Vec<Option<usize>> = Vec::with_capacity(k * k);
    let mut att = vec![0.0; k * k];
    let mut d_att = vec![0.0; k * k];
    for (bi, x) in qkv.iter().enumerate() {
        let mut dq = vec![0.0; n * c];
        let mut dk = vec![0.0; n * c];
        let mut dv = vec![0.0; n * c];
        let g_all = upstream.batch_slice(bi);

        for i in 0..n {
            let (y, xx) = ((i / w) as isize, (i % w) as isize);
            slots.clear();
            for dy in -pad..=pad {
                for dx in -pad..=pad {
                    let (ny, nx) = (y + dy, xx + dx);
                    let inside = ny >= 0 && nx >= 0 && ny < h as isize && nx < w as isize;
                    slots.push(inside.then(|| ny as usize * w + nx as usize));
                }
            }

            let qi = &x.q[i * c..(i + 1) * c];
            for (a, slot) in att.iter_mut().zip(&slots) {
                *a = match slot {
                    Some(j) => dot(qi, &x.k[j * c..(j + 1) * c]) * inv_scale,
                    None => 0.0,
                };
            }
            softmax_in_place(&mut att);

            let g: Vec<f64> = (0..c).map(|ch| g_all[ch * n + i]).collect();
            for (da, slot) in d_att.iter_mut().zip(&slots) {
                *da = match slot {
                    Some(j) => dot(&g, &x.v[j * c..(j + 1) * c]),
                    None => 0.0,
                };
            }
            let weighted: f64 = att.iter().zip(&d_att).map(|(a, da)| a * da).sum();

            for ((&a, &da), slot) in att.iter().zip(&d_att).zip(&slots) {
                let Some(j) = *slot else { continue };
                let ds = a * (da - weighted) * inv_scale;
                for ch in 0..c {
                    dq[i * c + ch] += ds * x.k[j * c + ch];
                    dk[j * c + ch] += ds * qi[ch];
                    dv[j * c + ch] += a * g[ch];
                }
            }
        }

        let fb = f.batch_slice(bi);
        let d_in = &mut d_input[bi * c * n..(bi + 1) * c * n];
        for (grad, lin, d_lin) in [
            (&dq, &wts.theta, &mut d_theta),
            (&dk, &wts.phi, &mut d_phi),
            (&dv, &wts.omega, &mut d_omega),
        ] {
            for p in 0..n {
                let gp = &grad[p * c..(p + 1) * c];
                for o in 0..c {
                    d_lin.bias[o] += gp[o];
                    for ci in 0..c {
                        d_lin.w[o * c + ci] += gp[o] * fb[ci * n + p];
                    }
                }
                for (ci, v) in lin.apply_transpose_vec(gp).into_iter().enumerate() {
                    d_in[ci * n + p] += v;
                }
            }
        }
    }

    Ok(PamGradients {
        d_input: FeatureMap::new([b, c, h, w], d_input)?,
        d_theta,
        d_phi,
        d_omega,
    })
}
