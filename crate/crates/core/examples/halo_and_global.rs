// Blocked (halo) and global attention baselines and their cost model.

use pixgraph::attention::{flops_estimate, global_attention, halo_attention, halo_geometry, AttentionKind, PamWeights};
use pixgraph::{FeatureMap, WindowConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = FeatureMap::<f64>::random([1, 4, 16, 16], 11)?;
    let wts = PamWeights::<f64>::random(4, 12, false);
    let cfg = WindowConfig::new(3)?;

    let (block, halo) = halo_geometry(cfg);
    let blocked = halo_attention(&f, &wts, block, halo)?;
    println!("halo: {block}×{block} tiles with a {halo}-pixel border -> {:?}", blocked.dims());

    // A single tile spanning the image is global attention.
    let whole = halo_attention(&f, &wts, 16, 0)?;
    let global = global_attention(&f, &wts)?;
    println!("single tile vs global {:.1e}", whole.max_abs_diff(&global)?);

    for kind in AttentionKind::ALL {
        println!("{kind:>6}: {:>10} MACs", flops_estimate(kind, 1, 4, 16, 16, cfg));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
