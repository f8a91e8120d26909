// Declared live sets of each kernel and the resulting peak bytes.

use pixgraph::attention::AttentionKind;
use pixgraph::bench::{live_phases, track_bytes};
use pixgraph::WindowConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = WindowConfig::new(3)?;
    for phase in live_phases(AttentionKind::Pam, 1, 16, 64, 64, cfg, 4) {
        let names: Vec<&str> = phase.tensors.iter().map(|t| t.name).collect();
        println!("pam/{:<9} {:>10} B  {}", phase.name, phase.bytes(), names.join(" "));
    }
    let pam = track_bytes(AttentionKind::Pam, 1, 16, 64, 64, cfg, 4);
    for kind in AttentionKind::ALL {
        let bytes = track_bytes(kind, 1, 16, 64, 64, cfg, 4);
        println!("{kind:>6} at 64×64: {bytes:>11} B ({:.1}× pam)", bytes as f64 / pam as f64);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
