//! Detectors for uplink spatial-modulation sparse code multiple access
//! (SM-SCMA), with exact operation counting and a Monte Carlo harness.
//!
//! Users pick one of `N_t` transmit antennas and one of `M` sparse codewords
//! spread over `R` orthogonal resource elements (OREs). The receiver sees
//! the superposition over Rayleigh channels plus noise and recovers every
//! user's (antenna, codeword) pair with one of:
//!
//! * [`decoders::decode_ml`]: exact maximum likelihood,
//! * [`decoders::decode_mpa`]: message passing on the factor graph,
//! * [`decoders::decode_sud`] and [`decoders::decode_msud`]: successive
//!   user detection and its iterative refinement,
//! * [`decoders::decode_fcsd`]: fixed-complexity sphere decoding over the
//!   ORE tree.
//!
//! ```
//! use rand::SeedableRng;
//! use smscma::{decoders::Decoder, signal, System, UserMessage};
//!
//! let system = System::reference(2, 4);
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let sent = vec![UserMessage::new(1, 0); 6];
//! let h = signal::draw_channel(&mut rng, system.config());
//! let y = signal::transmit_and_receive(&system, &sent, &h, f64::INFINITY, &mut rng).unwrap();
//! let out = Decoder::fcsd(&[35, 70, 50]).decode(&system, &y, &h).unwrap();
//! assert_eq!(out.estimates, sent);
//! ```

pub mod cli;
pub mod complexity;
pub mod decoders;
pub mod error;
pub mod harness;
pub mod model;
mod one_based;
pub mod signal;

pub use complexity::{CostModel, Dimensions, OpCount};
pub use decoders::{DecodeResult, Decoder};
pub use error::{Error, Result};
pub use model::{CodebookSet, FactorGraph, IndicatorMatrix, Survivors, System, SystemConfig};
pub use signal::{ChannelRealization, ReceivedSignal, UserMessage};
