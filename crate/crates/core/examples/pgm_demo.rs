// Pixel shuffle versus pixel attention on a tiny grayscale image.

use pixgraph::bench::{read_pgm, run_demo, write_pgm};

const IMAGE: &str = "P2
# a diagonal ramp
6 6
255
0 20 40 60 80 100
20 40 60 80 100 120
40 60 80 100 120 140
60 80 100 120 140 160
80 100 120 140 160 180
100 120 140 160 180 200
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let img = read_pgm(IMAGE)?;
    let out = run_demo(&img, 42)?;
    println!("{}×{} -> {}×{}", img.width, img.height, out.pam.width, out.pam.height);
    print!("shuffle:\n{}", write_pgm(&out.shuffle));
    print!("pam:\n{}", write_pgm(&out.pam));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
