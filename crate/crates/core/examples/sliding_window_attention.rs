// Pixel attention over k×k neighbourhoods with the relation weights it produces.

use pixgraph::attention::{pam_forward, PamWeights};
use pixgraph::{FeatureMap, WindowConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = FeatureMap::<f64>::random([1, 8, 16, 16], 7)?;
    let wts = PamWeights::<f64>::random(8, 8, true);
    let cfg = WindowConfig::new(3)?;
    let (out, relation) = pam_forward(&f, &wts, cfg)?;

    println!("output {:?}, relation rows of {} slots", out.dims(), relation.window);
    let centre = relation.row(0, 8 * 16 + 8);
    println!("weights of pixel (8,8): {:.3?}", centre);
    println!("worst row-sum error {:.1e}", relation.max_row_sum_error());

    // f32 runs the same kernel; agreement is to single precision.
    let (out32, _) = pam_forward(&f.cast::<f32>(), &wts.cast::<f32>(), cfg)?;
    println!("f32 vs f64 max diff {:.1e}", out32.cast::<f64>().max_abs_diff(&out)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
