// The same attention written as message passing on an explicit pixel graph.

use pixgraph::attention::{build_pixel_graph, pam_forward, pga_adjacency_list, pga_reference, PamWeights};
use pixgraph::{FeatureMap, WindowConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (h, w) = (6, 7);
    let cfg = WindowConfig::new(3)?;
    let graph = build_pixel_graph(h, w, cfg)?;
    println!(
        "{} nodes, {} slots each, corner has {} padded slots, dense mask of {} entries",
        graph.nodes(),
        graph.slots(),
        graph.pad_count(0),
        graph.nodes() * graph.nodes()
    );

    let f = FeatureMap::<f64>::random([2, 4, h, w], 3)?;
    let wts = PamWeights::<f64>::random(4, 4, true);
    let (sliding, _) = pam_forward(&f, &wts, cfg)?;
    let dense = pga_reference(&f, &wts, &graph)?;
    let list = pga_adjacency_list(&f, &wts, &graph)?;
    println!("sliding vs dense  {:.1e}", sliding.max_abs_diff(&dense)?);
    println!("sliding vs list   {:.1e}", sliding.max_abs_diff(&list)?);
    assert!(sliding.max_abs_diff(&dense)? < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
