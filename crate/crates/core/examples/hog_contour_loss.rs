// Orientation histograms and the contour-aware reconstruction loss.

use pixgraph::contour::{hog, ir_loss, lca_loss, pix_loss, HogParams, PixReduction, DEFAULT_LCA_WEIGHT};
use pixgraph::FeatureMap;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = HogParams::default();
    // Dark left half, bright right half: one vertical edge.
    let edge = FeatureMap::from_fn([1, 1, 16, 16], |_, _, _, x| if x < 8 { 0.1 } else { 0.9 })?;
    let d = hog(&edge, &params)?;
    println!("{}×{} cells × {} bins", d.cells_y, d.cells_x, d.n_bins);
    println!("cell (0,0): {:.3?}", d.cell(0, 0));

    let hr = FeatureMap::<f64>::random([1, 3, 16, 16], 1)?.map(|v| 0.5 + 0.5 * v);
    let sr = hr.map(|v| (v + 0.05).min(1.0));
    println!("lca  {:.6}", lca_loss(&hr, &sr, &params)?);
    println!("pix  {:.6}", pix_loss(&hr, &sr, PixReduction::Norm)?);
    println!("ir   {:.6}", ir_loss(&hr, &sr, &params, DEFAULT_LCA_WEIGHT)?);
    assert_eq!(lca_loss(&hr, &hr, &params)?, 0.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
