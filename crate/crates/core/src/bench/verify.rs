use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::hash::Hasher;

use crate::attention::{
    build_pixel_graph, global_attention, halo_attention, pam_backward, pam_forward, pga_adjacency_list,
    pga_reference, PamWeights,
};
use crate::contour::{hog, reference::straight_line_hog, HogParams};
use crate::tensor::{FeatureMap, LinearWeights, SeededRng, WindowConfig};
use crate::{Error, Result};

pub const EQUIVALENCE_TOL: f64 = 1e-9;
pub const ROW_SUM_TOL: f64 = 1e-12;
pub const HOG_TOL: f64 = 1e-12;

/// One checked case.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseResult {
    pub name: String,
    pub shape: [usize; 4],
    /// Window size; 0 when the case has no window.
    pub k: usize,
    pub max_abs_diff: f64,
    pub tolerance: f64,
    /// Worst relation row-sum error, when the case produces one.
    pub row_sum_error: Option<f64>,
    /// Hash of the bit patterns of every output the case computed.
    pub fingerprint: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub cases: Vec<CaseResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let [b, ch, h, w] = c.shape;
            let _ = write!(
                out,
                "{} {:<28} [{b},{ch},{h},{w}] k={} diff={:.3e} tol={:.0e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                if c.k == 0 { "-".to_string() } else { c.k.to_string() },
                c.max_abs_diff,
                c.tolerance
            );
            if let Some(e) = c.row_sum_error {
                let _ = write!(out, " rowsum={e:.3e}");
            }
            let _ = writeln!(out, " fp={:016x}", c.fingerprint);
        }
        let _ = writeln!(
            out,
            "{}: {} cases, {} failed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases.len(),
            self.failures()
        );
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub cases: usize,
    /// Added to the first ω weight of the sliding-window path only.
    pub perturb: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            cases: 20,
            perturb: 0.0,
        }
    }
}

fn fingerprint<'a>(parts: impl IntoIterator<Item = &'a [f64]>) -> u64 {
    let mut hasher = DefaultHasher::new();
    for part in parts {
        hasher.write_usize(part.len());
        for v in part {
            hasher.write_u64(v.to_bits());
        }
    }
    hasher.finish()
}

/// Draws the sweep parameters of case `i`.
pub fn sweep_case(seed: u64, i: usize) -> ([usize; 4], usize, bool) {
    let mut rng = SeededRng::new(seed ^ (0x9e37_79b9 * (i as u64 + 1)));
    let b = rng.next_range(1, 2);
    let c = [1, 4, 8][rng.next_range(0, 2)];
    let h = rng.next_range(4, 12);
    let w = rng.next_range(4, 12);
    let k = [1, 3, 5][rng.next_range(0, 2)];
    ([b, c, h, w], k, i % 2 == 1)
}

fn equivalence_case(opts: &VerifyOptions, i: usize) -> Result<CaseResult> {
    let (dims, k, with_bias) = sweep_case(opts.seed, i);
    let case_seed = opts.seed.wrapping_add(1000 + 2 * i as u64);
    let f = FeatureMap::<f64>::random(dims, case_seed)?;
    let wts = PamWeights::<f64>::random(dims[1], case_seed + 1, with_bias);
    let cfg = WindowConfig::new(k)?;

    let mut pam_wts = wts.clone();
    pam_wts.omega.w[0] += opts.perturb;
    let (pam, rel) = pam_forward(&f, &pam_wts, cfg)?;
    let graph = build_pixel_graph(dims[2], dims[3], cfg)?;
    let dense = pga_reference(&f, &wts, &graph)?;
    let list = pga_adjacency_list(&f, &wts, &graph)?;

    let diff = pam.max_abs_diff(&dense)?.max(pam.max_abs_diff(&list)?);
    let row_err = rel.max_row_sum_error();
    let positive = rel.values.iter().all(|&a| a > 0.0);
    Ok(CaseResult {
        name: format!("pam-vs-pga #{i}{}", if with_bias { " +bias" } else { "" }),
        shape: dims,
        k,
        max_abs_diff: diff,
        tolerance: EQUIVALENCE_TOL,
        row_sum_error: Some(row_err),
        fingerprint: fingerprint([pam.data(), &rel.values, dense.data(), list.data()]),
        pass: diff <= EQUIVALENCE_TOL && row_err <= ROW_SUM_TOL && positive,
    })
}

/// One tile covering the whole image with no halo is global attention.
fn halo_global_case(seed: u64) -> Result<CaseResult> {
    let dims = [1, 4, 8, 8];
    let f = FeatureMap::<f64>::random(dims, seed.wrapping_add(7))?;
    let wts = PamWeights::<f64>::random(4, seed.wrapping_add(8), true);
    let halo = halo_attention(&f, &wts, 8, 0)?;
    let global = global_attention(&f, &wts)?;
    let diff = halo.max_abs_diff(&global)?;
    Ok(CaseResult {
        name: "halo-vs-global single tile".into(),
        shape: dims,
        k: 0,
        max_abs_diff: diff,
        tolerance: EQUIVALENCE_TOL,
        row_sum_error: None,
        fingerprint: fingerprint([halo.data(), global.data()]),
        pass: diff <= EQUIVALENCE_TOL,
    })
}

fn hog_case(seed: u64) -> Result<CaseResult> {
    let (h, w) = (16, 16);
    let mut rng = SeededRng::new(seed.wrapping_add(9));
    let img = FeatureMap::<f64>::from_fn([1, 1, h, w], |_, _, y, x| {
        let base = if (y / 2 + x / 2) % 2 == 0 { 0.8 } else { 0.2 };
        base + 0.1 * rng.next_uniform()
    })?;
    let params = HogParams {
        cell_size: 4,
        ..HogParams::default()
    };
    let lib = hog(&img, &params)?;
    let oracle = straight_line_hog(img.data(), h, w, &params);
    let diff = if oracle.len() == lib.values.len() {
        lib.values.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(CaseResult {
        name: "hog-vs-straight-line".into(),
        shape: [1, 1, h, w],
        k: 0,
        max_abs_diff: diff,
        tolerance: HOG_TOL,
        row_sum_error: None,
        fingerprint: fingerprint([lib.values.as_slice()]),
        pass: diff <= HOG_TOL,
    })
}

/// The equivalence sweep plus the halo and HOG cross-checks. Zero cases
/// yields an empty, passing report.
pub fn verify_suite(opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    if opts.cases == 0 {
        return Ok(report);
    }
    for i in 0..opts.cases {
        report.cases.push(equivalence_case(opts, i)?);
    }
    report.cases.push(halo_global_case(opts.seed)?);
    report.cases.push(hog_case(opts.seed)?);
    Ok(report)
}

/// `|a − n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Central finite differences over every input and parameter coordinate of
/// a `[1,3,5,5]`, `k = 3` instance. One case per tensor.
pub fn gradcheck_suite(seed: u64, eps: f64, tol: f64) -> Result<VerifyReport> {
    if !eps.is_finite() || eps <= 0.0 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::Argument(format!("eps and tol must be positive, got eps={eps} tol={tol}")));
    }
    let dims = [1, 3, 5, 5];
    let cfg = WindowConfig::new(3)?;
    let f = FeatureMap::<f64>::random(dims, seed)?;
    let wts = PamWeights::<f64>::random(3, seed.wrapping_add(1), true);
    let upstream = FeatureMap::<f64>::random(dims, seed.wrapping_add(2))?;
    let grads = pam_backward(&f, &wts, cfg, &upstream)?;

    let objective = |f: &FeatureMap, wts: &PamWeights| -> Result<f64> {
        let (out, _) = pam_forward(f, wts, cfg)?;
        Ok(out.data().iter().zip(upstream.data()).map(|(a, b)| a * b).sum())
    };
    let case = |name: &str, errs: Vec<f64>, analytic: &[f64]| {
        let worst = errs.iter().copied().fold(0.0, f64::max);
        CaseResult {
            name: name.to_string(),
            shape: dims,
            k: 3,
            max_abs_diff: worst,
            tolerance: tol,
            row_sum_error: None,
            fingerprint: fingerprint([analytic]),
            pass: worst <= tol,
        }
    };

    let mut report = VerifyReport::default();
    let mut errs = Vec::with_capacity(f.len());
    for idx in 0..f.len() {
        let mut plus = f.clone();
        plus.data_mut()[idx] += eps;
        let mut minus = f.clone();
        minus.data_mut()[idx] -= eps;
        let numeric = (objective(&plus, &wts)? - objective(&minus, &wts)?) / (2.0 * eps);
        errs.push(relative_error(grads.d_input.data()[idx], numeric));
    }
    report.cases.push(case("d_input", errs, grads.d_input.data()));

    type Pick = fn(&mut PamWeights) -> &mut LinearWeights;
    let params: [(&str, Pick, &LinearWeights); 3] = [
        ("theta", |w| &mut w.theta, &grads.d_theta),
        ("phi", |w| &mut w.phi, &grads.d_phi),
        ("omega", |w| &mut w.omega, &grads.d_omega),
    ];
    for (name, pick, analytic) in params {
        for bias in [false, true] {
            let count = if bias { analytic.bias.len() } else { analytic.w.len() };
            let mut errs = Vec::with_capacity(count);
            for idx in 0..count {
                let mut plus = wts.clone();
                let mut minus = wts.clone();
                *slot(pick(&mut plus), bias, idx) += eps;
                *slot(pick(&mut minus), bias, idx) -= eps;
                let numeric = (objective(&f, &plus)? - objective(&f, &minus)?) / (2.0 * eps);
                let a = if bias { analytic.bias[idx] } else { analytic.w[idx] };
                errs.push(relative_error(a, numeric));
            }
            let label = format!("d_{name}.{}", if bias { "bias" } else { "weight" });
            let values = if bias { &analytic.bias } else { &analytic.w };
            report.cases.push(case(&label, errs, values));
        }
    }
    Ok(report)
}

fn slot(lw: &mut LinearWeights, bias: bool, idx: usize) -> &mut f64 {
    if bias {
        &mut lw.bias[idx]
    } else {
        &mut lw.w[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_stays_in_range() {
        for i in 0..200 {
            let ([b, c, h, w], k, _) = sweep_case(7, i);
            assert!((1..=2).contains(&b) && [1, 4, 8].contains(&c));
            assert!((4..=12).contains(&h) && (4..=12).contains(&w));
            assert!([1, 3, 5].contains(&k));
        }
    }

    #[test]
    fn default_suite_passes_and_zero_cases_is_empty() {
        let report = verify_suite(&VerifyOptions { cases: 4, ..Default::default() }).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.cases.len(), 6);
        let empty = verify_suite(&VerifyOptions { cases: 0, ..Default::default() }).unwrap();
        assert!(empty.cases.is_empty() && empty.passed());
    }

    #[test]
    fn perturbation_is_detected() {
        let opts = VerifyOptions {
            cases: 3,
            perturb: 1e-3,
            ..Default::default()
        };
        assert!(!verify_suite(&opts).unwrap().passed());
    }

    #[test]
    fn gradcheck_rejects_bad_arguments() {
        assert!(gradcheck_suite(1, 0.0, 1e-6).is_err());
        assert!(gradcheck_suite(1, 1e-5, 0.0).is_err());
    }
}
