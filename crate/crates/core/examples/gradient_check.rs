// Analytic backward pass of pixel attention against finite differences.

use pixgraph::bench::gradcheck_suite;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let report = gradcheck_suite(42, 1e-5, 1e-6)?;
    print!("{}", report.to_text());
    assert!(report.passed());

    // Below the finite-difference error floor nothing can pass.
    let strict = gradcheck_suite(42, 1e-5, 1e-14)?;
    println!("tol 1e-14: {} of {} cases fail", strict.failures(), strict.cases.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
