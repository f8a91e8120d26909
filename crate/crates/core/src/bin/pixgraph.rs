use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pixgraph::attention::AttentionKind;
use pixgraph::bench::{
    gradcheck_suite, read_csv, read_pgm, render_svg, run_bench, run_demo, verify_suite, with_threads, write_csv,
    write_pgm, BenchConfig, Precision, VerifyOptions,
};

#[derive(Parser)]
#[command(name = "pixgraph", version, about = "Pixel graph attention verification and benchmarks")]
struct Cli {
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Element type for benchmarks; verification always runs in f64.
    #[arg(long, global = true, default_value = "f32")]
    precision: Precision,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sliding-window vs adjacency-matrix equivalence, halo and HOG cross-checks.
    Verify {
        #[arg(long, default_value_t = 20)]
        cases: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb: f64,
    },
    /// Analytic PAM gradients against central finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Time and memory scaling of the attention kernels.
    Bench(BenchArgs),
    /// Render a benchmark CSV as SVG.
    Plot { input: PathBuf, output: PathBuf },
    /// Pixel shuffle and pixel attention on a P2 image.
    Demo { input: PathBuf, prefix: String },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    channels: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_value = "pam,pga,halo,global")]
    kernels: Vec<AttentionKind>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value = "bench.csv")]
    out: PathBuf,
    #[arg(long)]
    allow_large: bool,
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    let (seed, precision) = (cli.seed, cli.precision);
    match cli.command {
        Command::Verify { cases, report, perturb } => {
            let opts = VerifyOptions { seed, cases, perturb };
            let result = with_threads(cli.threads, || verify_suite(&opts))??;
            let text = result.to_text();
            print!("{text}");
            if let Some(path) = report {
                fs::write(path, &text)?;
            }
            Ok(result.passed())
        }
        Command::Gradcheck { eps, tol } => {
            let result = with_threads(cli.threads, || gradcheck_suite(seed, eps, tol))??;
            print!("{}", result.to_text());
            Ok(result.passed())
        }
        Command::Bench(args) => {
            let cfg = BenchConfig {
                sizes: args.sizes,
                batch: 1,
                channels: args.channels,
                k: args.k,
                kernels: args.kernels,
                reps: args.reps,
                seed,
                precision,
                allow_large: args.allow_large,
            };
            let records = with_threads(cli.threads, || run_bench(&cfg))??;
            for r in &records {
                println!(
                    "{:<6} {:>4}×{:<4} {:>12.3} ms {:>14} B {:>14} flops",
                    r.kernel,
                    r.h,
                    r.w,
                    r.wall_ns_median as f64 / 1e6,
                    r.peak_bytes,
                    r.flops_est
                );
            }
            write_csv(fs::File::create(&args.out)?, &records)?;
            Ok(true)
        }
        Command::Plot { input, output } => {
            let records = read_csv(fs::File::open(&input)?)
                .map_err(|e| format!("{}: {e}", input.display()))?;
            fs::write(output, render_svg(&records))?;
            Ok(true)
        }
        Command::Demo { input, prefix } => {
            let text = fs::read_to_string(&input)?;
            let img = read_pgm(&text).map_err(|e| format!("{}: {e}", input.display()))?;
            let out = run_demo(&img, seed)?;
            fs::write(format!("{prefix}_shuffle.pgm"), write_pgm(&out.shuffle))?;
            fs::write(format!("{prefix}_pam.pgm"), write_pgm(&out.pam))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
