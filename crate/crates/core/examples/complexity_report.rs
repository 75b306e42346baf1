//! Closed-form and measured operation counts for every decoder across
//! receive-antenna counts at both spectral efficiencies.

use smscma::cli::complexity_entries;
use smscma::System;

fn main() -> smscma::Result<()> {
    for codewords in [2, 4] {
        for rx in [2, 4, 6, 10] {
            let system = System::reference(codewords, rx);
            println!("bits per user {}, N_r {rx}", system.bits_per_user());
            for e in complexity_entries(&system, 1)? {
                let mark = if e.formula == e.measured {
                    "match"
                } else {
                    "MISMATCH"
                };
                println!(
                    "  {:<18} adds {:>10} muls {:>10}  ({mark})",
                    e.decoder, e.measured.real_adds, e.measured.real_muls
                );
            }
        }
    }
    Ok(())
}
