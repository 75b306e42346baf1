//! Sends one random frame through the channel and decodes it with every
//! detector, showing estimates, errors and operation counts side by side.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smscma::decoders::Decoder;
use smscma::harness::bit_errors;
use smscma::signal::{draw_channel, transmit_and_receive};
use smscma::{System, UserMessage};

fn main() -> smscma::Result<()> {
    let system = System::reference(2, 2);
    let cfg = system.config();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let sent: Vec<UserMessage> = (0..cfg.users)
        .map(|_| {
            UserMessage::new(
                rng.gen_range(0..cfg.tx_antennas),
                rng.gen_range(0..cfg.codewords),
            )
        })
        .collect();
    let h = draw_channel(&mut rng, cfg);
    let y = transmit_and_receive(&system, &sent, &h, 6.0, &mut rng)?;
    let show = |m: &[UserMessage]| {
        m.iter()
            .map(|x| format!("({},{})", x.antenna + 1, x.codeword + 1))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("{:<16} {}", "sent", show(&sent));
    for d in [
        Decoder::ml(),
        Decoder::mpa(5),
        Decoder::Sud,
        Decoder::msud(4),
        Decoder::fcsd(&[35, 70, 50]),
    ] {
        let out = d.decode(&system, &y, &h)?;
        println!(
            "{:<16} {}  bit errors {:>2}  adds {:>7} muls {:>7}",
            d.label(),
            show(&out.estimates),
            bit_errors(&sent, &out.estimates, &system),
            out.ops.real_adds,
            out.ops.real_muls
        );
    }
    Ok(())
}
