// Sub-pixel upsampling and its exact inverse.

use pixgraph::tensor::{pixel_shuffle, pixel_unshuffle};
use pixgraph::FeatureMap;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r = 2;
    let f = FeatureMap::from_fn([1, 4, 2, 2], |_, c, y, x| (c * 4 + y * 2 + x) as f64)?;
    let up = pixel_shuffle(&f, r)?;
    println!("{:?} -> {:?}", f.dims(), up.dims());
    for y in 0..up.height() {
        let row: Vec<f64> = (0..up.width()).map(|x| up.at(0, 0, y, x)).collect();
        println!("  {row:?}");
    }
    let back = pixel_unshuffle(&up, r)?;
    assert!(back.bit_eq(&f));
    println!("unshuffle restores the input bit for bit");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
