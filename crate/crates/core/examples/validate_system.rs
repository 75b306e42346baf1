//! Builds a system from a config file and prints its derived structure.
//!
//! `cargo run --example validate_system -- examples/configs/eta4_nr4.json`

use std::path::PathBuf;

use smscma::decoders::build_tree_levels;
use smscma::model::spectral_efficiency;
use smscma::{System, SystemConfig};

fn main() -> smscma::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/eta3_nr4.json")
        });
    let cfg = SystemConfig::load(&path)?;
    let system = System::from_config(cfg)?;
    let graph = system.graph();
    println!(
        "{}: {} bits per user",
        path.display(),
        spectral_efficiency(system.config())
    );
    for (r, users) in graph.lambda.iter().enumerate() {
        let one_based: Vec<usize> = users.iter().map(|u| u + 1).collect();
        println!("  ORE {} carries users {:?}", r + 1, one_based);
    }
    for (u, ores) in graph.omega.iter().enumerate() {
        let one_based: Vec<usize> = ores.iter().map(|r| r + 1).collect();
        println!("  user {} occupies OREs {:?}", u + 1, one_based);
    }
    let identity: Vec<usize> = (0..system.ores()).collect();
    println!(
        "  new users per tree level: {:?}",
        build_tree_levels(graph, &identity)?.counts()
    );
    for u in 0..system.users() {
        println!(
            "  user {} mean codeword energy {:.12}",
            u + 1,
            system.codebooks().average_energy(u)
        );
    }
    Ok(())
}
