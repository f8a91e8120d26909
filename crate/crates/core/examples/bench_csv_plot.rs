// A small scaling run written to CSV and rendered as SVG.

use std::fs;

use pixgraph::bench::{loglog_slope, read_csv, render_svg, run_bench, write_csv, BenchConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = BenchConfig {
        sizes: vec![8, 16, 32],
        channels: 4,
        reps: 3,
        ..BenchConfig::default()
    };
    let records = run_bench(&cfg)?;
    let dir = tempfile::tempdir()?;
    let csv_path = dir.path().join("bench.csv");
    write_csv(fs::File::create(&csv_path)?, &records)?;
    let back = read_csv(fs::File::open(&csv_path)?)?;
    assert_eq!(back, records);

    for kind in &cfg.kernels {
        let pts: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.kernel == *kind)
            .map(|r| ((r.h * r.w) as f64, r.wall_ns_median as f64))
            .collect();
        println!("{kind:>6}: time slope {:.2}", loglog_slope(&pts));
    }
    let svg = render_svg(&back);
    fs::write(dir.path().join("bench.svg"), &svg)?;
    println!("{} CSV rows, {} bytes of SVG", back.len(), svg.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
