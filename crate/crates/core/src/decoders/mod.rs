//! SM-SCMA detectors.
//!
//! Every decoder is a pure function of `(system, y, H)` and returns all `U`
//! estimated messages together with the operation tally it accumulated.
//! Ties are always broken towards the lowest index, so identical inputs give
//! identical outputs.

pub mod ml;
pub mod mpa;
pub mod msud;
pub mod ordering;
pub mod sud;
pub mod tree;

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::complexity::OpCount;
use crate::error::{Error, Result};
use crate::model::{Survivors, System};
use crate::signal::{ChannelRealization, ReceivedSignal, UserMessage};

pub use ml::{decode_ml, DEFAULT_ML_GUARD};
pub use mpa::{decode_mpa, decode_mpa_traced, MessageTable};
pub use msud::{decode_msud, decode_msud_ordered, Schedule};
pub use ordering::{
    build_tree_levels, ore_energy_order, ore_energy_order_genie, LevelPlan, OreOrder,
};
pub use sud::{decode_sud, decode_sud_ordered};
pub use tree::{
    decode_fcsd, decode_fcsd_ordered, decode_fcsd_traced, path_metrics, TreeNode, TreeTrace,
};

/// Estimated messages of all users plus bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodeResult {
    pub estimates: Vec<UserMessage>,
    pub ops: OpCount,
    pub meta: DecodeMeta,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DecodeMeta {
    pub decoder: String,
    /// Iterations actually run (MPA, MSUD); zero for one-shot decoders.
    pub iterations: usize,
    /// ORE visiting order (SUD, MSUD, FCSD).
    #[serde(serialize_with = "crate::one_based::indices")]
    pub ore_order: Vec<usize>,
    /// Tree levels whose survivor count exceeded the available nodes and
    /// was clamped.
    #[serde(serialize_with = "crate::one_based::indices")]
    pub clamped_levels: Vec<usize>,
}

/// A detector together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Decoder {
    Ml {
        guard: u64,
    },
    Mpa {
        iterations: usize,
    },
    Sud,
    Msud {
        iterations: usize,
        schedule: Schedule,
    },
    Fcsd {
        rho: Vec<Survivors>,
    },
}

impl Decoder {
    pub fn ml() -> Self {
        Decoder::Ml {
            guard: DEFAULT_ML_GUARD,
        }
    }

    pub fn mpa(iterations: usize) -> Self {
        Decoder::Mpa { iterations }
    }

    pub fn msud(iterations: usize) -> Self {
        Decoder::Msud {
            iterations,
            schedule: Schedule::Jacobi,
        }
    }

    pub fn fcsd(rho: &[usize]) -> Self {
        Decoder::Fcsd {
            rho: rho.iter().map(|&n| Survivors(n)).collect(),
        }
    }

    /// FCSD that keeps every node on every level.
    pub fn fcsd_keep_all(ores: usize) -> Self {
        Decoder::Fcsd {
            rho: vec![Survivors::ALL; ores.saturating_sub(1)],
        }
    }

    /// Parses a decoder name (`ml`, `mpa`, `sud`, `msud`, `fcsd`) using the
    /// iteration counts and survivor counts of `system`'s config.
    pub fn from_name(name: &str, system: &System) -> Result<Self> {
        let cfg = system.config();
        Ok(match name.trim().to_ascii_lowercase().as_str() {
            "ml" => Decoder::ml(),
            "mpa" => Decoder::mpa(cfg.mpa_iterations),
            "sud" => Decoder::Sud,
            "msud" => Decoder::msud(cfg.msud_iterations),
            "fcsd" => Decoder::Fcsd {
                rho: cfg.rho.clone(),
            },
            other => {
                return Err(Error::config(
                    "decoders",
                    format!("unknown decoder {other:?} (expected ml, mpa, sud, msud, fcsd)"),
                ))
            }
        })
    }

    /// Stable, CSV-safe label such as `mpa_k5` or `fcsd_35_70_50`.
    pub fn label(&self) -> String {
        match self {
            Decoder::Ml { .. } => "ml".into(),
            Decoder::Mpa { iterations } => format!("mpa_k{iterations}"),
            Decoder::Sud => "sud".into(),
            Decoder::Msud {
                iterations,
                schedule,
            } => match schedule {
                Schedule::Jacobi => format!("msud_k{iterations}"),
                Schedule::GaussSeidel => format!("msud_gs_k{iterations}"),
            },
            Decoder::Fcsd { rho } => {
                let parts: Vec<String> = rho.iter().map(|s| s.to_string()).collect();
                format!("fcsd_{}", parts.join("_"))
            }
        }
    }

    pub fn is_fcsd(&self) -> bool {
        matches!(self, Decoder::Fcsd { .. })
    }

    pub fn is_mpa(&self) -> bool {
        matches!(self, Decoder::Mpa { .. })
    }

    pub fn decode(
        &self,
        system: &System,
        y: &ReceivedSignal,
        channel: &ChannelRealization,
    ) -> Result<DecodeResult> {
        let mut result = match self {
            Decoder::Ml { guard } => decode_ml(system, y, channel, *guard),
            Decoder::Mpa { iterations } => decode_mpa(system, y, channel, *iterations),
            Decoder::Sud => decode_sud(system, y, channel),
            Decoder::Msud {
                iterations,
                schedule,
            } => decode_msud(system, y, channel, *iterations, *schedule),
            Decoder::Fcsd { rho } => decode_fcsd(system, y, channel, rho),
        }?;
        result.meta.decoder = self.label();
        Ok(result)
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub(crate) fn check_inputs(
    system: &System,
    y: &ReceivedSignal,
    channel: &ChannelRealization,
) -> Result<()> {
    channel.check(system)?;
    if y.dims() != (system.ores(), system.rx_antennas()) {
        return Err(Error::config(
            "received signal",
            format!(
                "dimensions {:?} do not match (R, N_r) = ({}, {})",
                y.dims(),
                system.ores(),
                system.rx_antennas()
            ),
        ));
    }
    if y.samples()
        .iter()
        .any(|s| !s.re.is_finite() || !s.im.is_finite())
    {
        return Err(Error::NonFinite("received sample".into()));
    }
    Ok(())
}

/// Precomputed products `h^{r,u}_{n_r,n_t} c_m^{r,u}` for every ORE, slot in
/// `Λ_r`, message index and receive antenna.
pub(crate) struct Products {
    rx: usize,
    messages: usize,
    d_f: usize,
    data: Vec<Complex64>,
}

impl Products {
    pub(crate) fn new(system: &System, channel: &ChannelRealization) -> Self {
        let cfg = system.config();
        let (rx, messages, d_f) = (cfg.rx_antennas, cfg.messages_per_user(), system.d_f());
        let books = system.codebooks();
        let mut data = Vec::with_capacity(system.ores() * d_f * messages * rx);
        for (r, users) in system.graph().lambda.iter().enumerate() {
            for &u in users {
                for x in 0..messages {
                    let msg = UserMessage::from_index(x, cfg.codewords);
                    let c = books.entry(u, r, msg.codeword);
                    data.extend(channel.gains(u, r, msg.antenna).iter().map(|h| h * c));
                }
            }
        }
        Products {
            rx,
            messages,
            d_f,
            data,
        }
    }

    /// Products for one (ORE, slot, message) across all receive antennas.
    #[inline]
    pub(crate) fn get(&self, ore: usize, slot: usize, message: usize) -> &[Complex64] {
        let o = ((ore * self.d_f + slot) * self.messages + message) * self.rx;
        &self.data[o..o + self.rx]
    }
}

/// `Σ_n |residual[n] − Σ_parts part[n]|²`.
#[inline]
pub(crate) fn residual_metric(residual: &[Complex64], parts: &[&[Complex64]]) -> f64 {
    let mut acc = 0.0;
    for (n, &base) in residual.iter().enumerate() {
        let mut e = base;
        for p in parts {
            e -= p[n];
        }
        acc += e.norm_sqr();
    }
    acc
}

/// Decomposes `index` into `len` base-`base` digits, most significant first.
#[inline]
pub(crate) fn digits_into(mut index: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = index % base;
        index /= base;
    }
}

/// Index of the smallest value, lowest index on ties. `None` for empty input.
pub(crate) fn argmin(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if v >= b || v.is_nan() => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_breaks_ties_low() {
        assert_eq!(argmin([3.0, 1.0, 1.0, 2.0]), Some((1, 1.0)));
        assert_eq!(argmin(std::iter::empty()), None);
    }

    #[test]
    fn digits_are_msb_first() {
        let mut d = [0; 3];
        digits_into(13, 4, &mut d);
        assert_eq!(d, [0, 3, 1]);
    }

    #[test]
    fn labels() {
        assert_eq!(Decoder::fcsd(&[35, 70, 50]).label(), "fcsd_35_70_50");
        assert_eq!(Decoder::fcsd_keep_all(4).label(), "fcsd_all_all_all");
        assert_eq!(Decoder::mpa(5).label(), "mpa_k5");
        assert_eq!(Decoder::msud(4).label(), "msud_k4");
        let sys = System::reference(2, 2);
        assert_eq!(
            Decoder::from_name("FCSD", &sys).unwrap(),
            Decoder::fcsd(&[35, 70, 50])
        );
        assert!(Decoder::from_name("zf", &sys).is_err());
    }
}
