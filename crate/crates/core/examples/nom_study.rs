//! How often FCSD with different survivor vectors disagrees with MPA, and
//! which tree level matters most.
//!
//! `cargo run --release --example nom_study -- [trials]`

use smscma::harness::run_nom;
use smscma::model::Survivors;
use smscma::System;

fn main() -> smscma::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|t| t.parse().ok())
        .unwrap_or(2000);
    let system = System::reference(2, 2);
    let variants: Vec<Vec<Survivors>> = [[15, 50, 15], [50, 15, 15], [15, 15, 15]]
        .iter()
        .map(|r| r.iter().map(|&n| Survivors(n)).collect())
        .collect();
    let study = run_nom(&system, &variants, 4.0, trials, 11, 0)?;
    for row in &study.rows {
        println!(
            "{:<16} NoM {:.4} ± {:.4}",
            row.decoder, row.nom, row.nom_stderr
        );
    }
    for gap in &study.gaps {
        println!(
            "{} -> {}: +{:.4} ({:.1} standard errors)",
            gap.lower,
            gap.higher,
            gap.gap,
            gap.gap / gap.gap_stderr
        );
    }
    Ok(())
}
