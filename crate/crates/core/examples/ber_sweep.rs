//! BER against SNR for SUD, MSUD, FCSD and MPA on the 3-bit system with
//! four receive antennas.
//!
//! `cargo run --release --example ber_sweep -- [trials]`

use smscma::decoders::Decoder;
use smscma::harness::{run_sweep, SweepPlan};
use smscma::System;

fn main() -> smscma::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|t| t.parse().ok())
        .unwrap_or(500);
    let system = System::reference(2, 4);
    let plan = SweepPlan {
        decoders: vec![
            Decoder::Sud,
            Decoder::msud(4),
            Decoder::fcsd(&[35, 70, 50]),
            Decoder::mpa(5),
        ],
        snr_db: vec![0.0, 4.0, 8.0, 12.0],
        trials,
        seed: 2024,
        workers: 0,
    };
    let result = run_sweep(&system, &plan, None)?;
    println!(
        "{:>6}  {:<16} {:>12} {:>12} {:>10}",
        "SNR", "decoder", "BER", "stderr", "adds"
    );
    for row in &result.rows {
        println!(
            "{:>6}  {:<16} {:>12.4e} {:>12.1e} {:>10.0}",
            row.snr_db, row.decoder, row.ber, row.ber_stderr, row.adds_avg
        );
    }
    Ok(())
}
