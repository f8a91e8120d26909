// A single LSTM direction stepped by hand, then the bidirectional sweep.

use pixgraph::msrb::{blstm_forward, LstmParams, MsrbShape, MsrbWeights};
use pixgraph::{FeatureMap, SeededRng};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = SeededRng::new(5);
    let cell = LstmParams::random(3, 2, &mut rng);
    let (mut h, mut c) = (vec![0.0; 2], vec![0.0; 2]);
    for t in 0..4 {
        let x = [t as f64 * 0.5, 1.0, -1.0];
        cell.step(&x, &mut h, &mut c);
        println!("t={t} h={h:.4?} c={c:.4?}");
    }

    let wts = MsrbWeights::random(MsrbShape::new(4, 0, 3, 6), 9);
    let f = FeatureMap::<f64>::random([1, 4, 3, 6], 10)?;
    let out = blstm_forward(&f, &wts)?;
    println!("bidirectional over width: {:?} -> {:?}", f.dims(), out.dims());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
