// The axial-MLP sequential residual block and its weight file format.

use pixgraph::msrb::{msrb_stack, ClueMap, MsrbShape, MsrbWeights, DEFAULT_LAYERS};
use pixgraph::FeatureMap;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let shape = MsrbShape::new(8, 3, 8, 16);
    let layers: Vec<MsrbWeights> = (0..DEFAULT_LAYERS as u64).map(|i| MsrbWeights::random(shape, 100 + i)).collect();
    let x = FeatureMap::<f64>::random([2, 8, 8, 16], 1)?;
    let clue = ClueMap::new(FeatureMap::random([2, 3, 8, 16], 2)?);

    let y = msrb_stack(&x, &clue, &layers)?;
    println!("{DEFAULT_LAYERS} blocks: {:?} -> {:?}", x.dims(), y.dims());

    let (manifest, bytes) = layers[0].serialize();
    println!("{}", manifest.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("... {} bytes of weights", bytes.len());
    assert_eq!(MsrbWeights::deserialize(&manifest, &bytes)?, layers[0]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
