use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use super::memory::track_bytes;
use super::record::BenchRecord;
use crate::attention::{
    build_pixel_graph, flops_estimate, global_attention, halo_attention, halo_geometry, pam_forward, pga_reference,
    AttentionKind, PamWeights, WindowConfig,
};
use crate::tensor::{Element, FeatureMap};
use crate::{Error, Result};

/// Largest pga input (pixels) allowed without `allow_large`.
pub const PGA_PIXEL_CAP: usize = 128 * 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    F32,
    F64,
}

impl Precision {
    pub fn bytes(self) -> usize {
        match self {
            Precision::F32 => 4,
            Precision::F64 => 8,
        }
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32" => Ok(Precision::F32),
            "f64" => Ok(Precision::F64),
            _ => Err(Error::Argument(format!("precision must be f32 or f64, got '{s}'"))),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Square resolutions.
    pub sizes: Vec<usize>,
    pub batch: usize,
    pub channels: usize,
    pub k: usize,
    pub kernels: Vec<AttentionKind>,
    pub reps: usize,
    pub seed: u64,
    pub precision: Precision,
    pub allow_large: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![16, 32, 64, 128],
            batch: 1,
            channels: 16,
            k: 3,
            kernels: AttentionKind::ALL.to_vec(),
            reps: 5,
            seed: 42,
            precision: Precision::F32,
            allow_large: false,
        }
    }
}

/// Runs one kernel on prepared inputs. pga converts the image to its graph
/// inside the timed region.
pub fn run_kernel<T: Element>(
    kind: AttentionKind,
    f: &FeatureMap<T>,
    wts: &PamWeights<T>,
    cfg: WindowConfig,
) -> Result<FeatureMap<T>> {
    match kind {
        AttentionKind::Pam => pam_forward(f, wts, cfg).map(|(out, _)| out),
        AttentionKind::Pga => {
            let graph = build_pixel_graph(f.height(), f.width(), cfg)?;
            pga_reference(f, wts, &graph)
        }
        AttentionKind::Halo => {
            let (block, halo) = halo_geometry(cfg);
            halo_attention(f, wts, block, halo)
        }
        AttentionKind::Global => global_attention(f, wts),
    }
}

/// One warm-up run, then `reps` timed runs; returns the median in nanoseconds.
pub fn time_kernel<T: Element>(
    kind: AttentionKind,
    f: &FeatureMap<T>,
    wts: &PamWeights<T>,
    cfg: WindowConfig,
    reps: usize,
) -> Result<u64> {
    run_kernel(kind, f, wts, cfg)?;
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let out = run_kernel(kind, f, wts, cfg)?;
        samples.push(start.elapsed().as_nanos() as u64);
        drop(out);
    }
    samples.sort_unstable();
    let mid = samples.len() / 2;
    let median = if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2
    };
    Ok(median.max(1))
}

pub fn bench_one(cfg: &BenchConfig, kind: AttentionKind, size: usize) -> Result<BenchRecord> {
    let window = WindowConfig::new(cfg.k)?;
    window.check_fits(size, size)?;
    if kind == AttentionKind::Pga && size * size > PGA_PIXEL_CAP && !cfg.allow_large {
        return Err(Error::Argument(format!(
            "pga at {size}×{size} materialises a {}² matrix; pass --allow-large to run it",
            size * size
        )));
    }
    let dims = [cfg.batch, cfg.channels, size, size];
    let input = FeatureMap::<f64>::random(dims, cfg.seed)?;
    let weights = PamWeights::<f64>::random(cfg.channels, cfg.seed.wrapping_add(1), false);
    let wall_ns_median = match cfg.precision {
        Precision::F32 => time_kernel(kind, &input.cast::<f32>(), &weights.cast::<f32>(), window, cfg.reps)?,
        Precision::F64 => time_kernel(kind, &input, &weights, window, cfg.reps)?,
    };
    Ok(BenchRecord {
        kernel: kind,
        b: cfg.batch,
        c: cfg.channels,
        h: size,
        w: size,
        k: cfg.k,
        reps: cfg.reps,
        wall_ns_median,
        peak_bytes: track_bytes(kind, cfg.batch, cfg.channels, size, size, window, cfg.precision.bytes()),
        flops_est: flops_estimate(kind, cfg.batch, cfg.channels, size, size, window),
    })
}

/// Benchmarks every kernel at every size, kernel-major in the configured order.
/// Validates all arguments before timing anything.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.reps < 3 {
        return Err(Error::Argument(format!("reps must be >= 3, got {}", cfg.reps)));
    }
    if cfg.sizes.is_empty() || cfg.sizes.contains(&0) || cfg.channels == 0 || cfg.batch == 0 {
        return Err(Error::Argument("sizes, channels and batch must be positive".into()));
    }
    let window = WindowConfig::new(cfg.k)?;
    for &s in &cfg.sizes {
        window.check_fits(s, s)?;
        if cfg.kernels.contains(&AttentionKind::Pga) && s * s > PGA_PIXEL_CAP && !cfg.allow_large {
            return Err(Error::Argument(format!(
                "pga at {s}×{s} exceeds the {}-pixel cap; pass --allow-large to run it",
                PGA_PIXEL_CAP
            )));
        }
    }
    let mut records = Vec::new();
    for &kind in &cfg.kernels {
        for &size in &cfg.sizes {
            records.push(bench_one(cfg, kind, size)?);
        }
    }
    Ok(records)
}

/// Least-squares slope of `ln(time)` against `ln(pixels)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
