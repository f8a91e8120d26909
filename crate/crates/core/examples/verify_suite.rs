// The equivalence suite, with and without a deliberately broken weight.

use pixgraph::bench::{verify_suite, with_threads, VerifyOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opts = VerifyOptions {
        cases: 6,
        ..VerifyOptions::default()
    };
    let report = verify_suite(&opts)?;
    print!("{}", report.to_text());

    let threaded = with_threads(4, || verify_suite(&opts))??;
    assert_eq!(threaded, report);
    println!("identical with 4 worker threads");

    let broken = verify_suite(&VerifyOptions { perturb: 1e-3, ..opts })?;
    println!("with a perturbed weight: {} failures", broken.failures());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
