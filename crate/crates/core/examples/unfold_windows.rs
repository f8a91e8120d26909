// im2col lowering: every pixel's zero-padded k×k window becomes one column.

use pixgraph::tensor::unfold;
use pixgraph::{FeatureMap, WindowConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = FeatureMap::from_fn([1, 2, 3, 4], |_, c, y, x| (100 * c + 10 * y + x) as f64)?;
    let cfg = WindowConfig::new(3)?;
    let u = unfold(&f, cfg)?;
    println!("input {:?} -> {} rows × {} columns", f.dims(), u.rows, u.pixels);

    // Corner pixel: the top row and left column of its window fall outside.
    let corner = u.column(0, 0);
    println!("window of (0,0), channel 0: {:?}", &corner[..9]);
    assert_eq!(corner[..9], [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 10.0, 11.0]);

    // The centre row of the unfold is the input itself.
    let centre = u.batch_slice(0)[4 * 12..5 * 12].to_vec();
    assert_eq!(centre, f.data()[..12]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
