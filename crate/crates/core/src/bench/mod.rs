//! Verification suites, benchmark harness and image demo.

mod demo;
mod memory;
mod pgm;
mod plot;
mod record;
mod run;
mod verify;

pub use demo::{rescale_to_u8, run_demo, DemoOutput, DEMO_CHANNELS, DEMO_K, DEMO_SCALE};
pub use memory::{live_phases, track_bytes, Phase, Tensor};
pub use pgm::{read_pgm, write_pgm, GrayImage};
pub use plot::render_svg;
pub use record::{read_csv, write_csv, BenchRecord, CSV_HEADER};
pub use run::{bench_one, loglog_slope, run_bench, run_kernel, time_kernel, BenchConfig, Precision, PGA_PIXEL_CAP};
pub use verify::{
    gradcheck_suite, relative_error, sweep_case, verify_suite, CaseResult, VerifyOptions, VerifyReport,
    EQUIVALENCE_TOL, HOG_TOL, ROW_SUM_TOL,
};

use crate::{Error, Result};

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Argument(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(f))
}
