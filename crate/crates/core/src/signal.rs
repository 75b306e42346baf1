//! Bit mapping, Rayleigh channel draws and the superposed received signal.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{System, SystemConfig};

/// One user's (active antenna, codeword) pair, 0-based. Serialized 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserMessage {
    pub antenna: usize,
    pub codeword: usize,
}

impl UserMessage {
    pub fn new(antenna: usize, codeword: usize) -> Self {
        UserMessage { antenna, codeword }
    }

    /// Flat message index `antenna * M + codeword`; ascending index is the
    /// lexicographic (antenna, codeword) order used for tie-breaking.
    #[inline]
    pub fn index(self, codewords: usize) -> usize {
        self.antenna * codewords + self.codeword
    }

    #[inline]
    pub fn from_index(index: usize, codewords: usize) -> Self {
        UserMessage {
            antenna: index / codewords,
            codeword: index % codewords,
        }
    }

    pub fn check(self, cfg: &SystemConfig) -> Result<()> {
        if self.antenna >= cfg.tx_antennas || self.codeword >= cfg.codewords {
            return Err(Error::MessageRange(format!(
                "antenna {} of {}, codeword {} of {}",
                self.antenna + 1,
                cfg.tx_antennas,
                self.codeword + 1,
                cfg.codewords
            )));
        }
        Ok(())
    }
}

impl Serialize for UserMessage {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("UserMessage", 2)?;
        st.serialize_field("antenna", &(self.antenna + 1))?;
        st.serialize_field("codeword", &(self.codeword + 1))?;
        st.end()
    }
}

/// Maps `log2(N_t) + log2(M)` bits to a message: the leading bits (MSB
/// first) select the antenna, the rest the codeword.
pub fn map_bits(bits: &[u8], cfg: &SystemConfig) -> Result<UserMessage> {
    let (na, nc) = (cfg.antenna_bits(), cfg.codeword_bits());
    if bits.len() != na + nc {
        return Err(Error::BitLength {
            expected: na + nc,
            got: bits.len(),
        });
    }
    let value = |b: &[u8]| {
        b.iter()
            .fold(0usize, |acc, &bit| (acc << 1) | (bit & 1) as usize)
    };
    Ok(UserMessage {
        antenna: value(&bits[..na]),
        codeword: value(&bits[na..]),
    })
}

/// Inverse of [`map_bits`].
pub fn demap_bits(msg: UserMessage, cfg: &SystemConfig) -> Vec<u8> {
    let (na, nc) = (cfg.antenna_bits(), cfg.codeword_bits());
    let mut bits = Vec::with_capacity(na + nc);
    bits.extend((0..na).rev().map(|i| ((msg.antenna >> i) & 1) as u8));
    bits.extend((0..nc).rev().map(|i| ((msg.codeword >> i) & 1) as u8));
    bits
}

/// Complex gains `h^{r,u}_{n_r,n_t}` for every user, ORE, transmit and
/// receive antenna.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelRealization {
    users: usize,
    ores: usize,
    tx: usize,
    rx: usize,
    #[serde(serialize_with = "serialize_complex_vec")]
    gains: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn from_fn(
        users: usize,
        ores: usize,
        tx: usize,
        rx: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Self {
        let mut gains = Vec::with_capacity(users * ores * tx * rx);
        for u in 0..users {
            for r in 0..ores {
                for t in 0..tx {
                    for n in 0..rx {
                        gains.push(f(u, r, t, n));
                    }
                }
            }
        }
        ChannelRealization {
            users,
            ores,
            tx,
            rx,
            gains,
        }
    }

    /// Dimensions `(U, R, N_t, N_r)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.users, self.ores, self.tx, self.rx)
    }

    #[inline]
    fn offset(&self, user: usize, ore: usize, tx: usize) -> usize {
        ((user * self.ores + ore) * self.tx + tx) * self.rx
    }

    #[inline]
    pub fn gain(&self, user: usize, ore: usize, tx: usize, rx: usize) -> Complex64 {
        self.gains[self.offset(user, ore, tx) + rx]
    }

    /// Gains to all receive antennas for one (user, ORE, transmit antenna).
    #[inline]
    pub fn gains(&self, user: usize, ore: usize, tx: usize) -> &[Complex64] {
        let o = self.offset(user, ore, tx);
        &self.gains[o..o + self.rx]
    }

    pub fn gains_mut(&mut self, user: usize, ore: usize, tx: usize) -> &mut [Complex64] {
        let o = self.offset(user, ore, tx);
        &mut self.gains[o..o + self.rx]
    }

    pub fn check(&self, system: &System) -> Result<()> {
        let want = (
            system.users(),
            system.ores(),
            system.tx_antennas(),
            system.rx_antennas(),
        );
        if self.dims() != want {
            return Err(Error::config(
                "channel",
                format!(
                    "dimensions {:?} do not match system {:?}",
                    self.dims(),
                    want
                ),
            ));
        }
        if self
            .gains
            .iter()
            .any(|h| !h.re.is_finite() || !h.im.is_finite())
        {
            return Err(Error::NonFinite("channel gain".into()));
        }
        Ok(())
    }
}

/// Draws one circularly-symmetric complex Gaussian sample of total variance
/// `variance`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Independent unit-variance Rayleigh gains for every index tuple.
pub fn draw_channel<R: Rng + ?Sized>(rng: &mut R, cfg: &SystemConfig) -> ChannelRealization {
    ChannelRealization::from_fn(
        cfg.users,
        cfg.ores,
        cfg.tx_antennas,
        cfg.rx_antennas,
        |_, _, _, _| complex_gaussian(rng, 1.0),
    )
}

/// Noise variance per complex receive sample; zero for an infinite SNR.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

/// Received samples `y^r_{n_r}` for every ORE and receive antenna.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReceivedSignal {
    ores: usize,
    rx: usize,
    #[serde(serialize_with = "serialize_complex_vec")]
    samples: Vec<Complex64>,
    pub sigma2: f64,
}

impl ReceivedSignal {
    pub fn new(ores: usize, rx: usize, samples: Vec<Complex64>, sigma2: f64) -> Self {
        assert_eq!(samples.len(), ores * rx, "sample count must be R * N_r");
        ReceivedSignal {
            ores,
            rx,
            samples,
            sigma2,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ores, self.rx)
    }

    /// Samples on all receive antennas of one ORE.
    #[inline]
    pub fn ore(&self, ore: usize) -> &[Complex64] {
        &self.samples[ore * self.rx..(ore + 1) * self.rx]
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
}

/// Noise-free superposition `Σ_{u ∈ Λ_r} h^{r,u}_{n_r,n_t^u} c_m^{r,u}`.
pub fn superpose(
    system: &System,
    messages: &[UserMessage],
    channel: &ChannelRealization,
) -> Result<Vec<Complex64>> {
    let cfg = system.config();
    if messages.len() != cfg.users {
        return Err(Error::MessageRange(format!(
            "{} messages for {} users",
            messages.len(),
            cfg.users
        )));
    }
    for msg in messages {
        msg.check(cfg)?;
    }
    channel.check(system)?;
    let books = system.codebooks();
    let rx = cfg.rx_antennas;
    let mut samples = vec![Complex64::new(0.0, 0.0); cfg.ores * rx];
    for (r, users) in system.graph().lambda.iter().enumerate() {
        for &u in users {
            let msg = messages[u];
            let c = books.entry(u, r, msg.codeword);
            for (y, h) in
                samples[r * rx..(r + 1) * rx]
                    .iter_mut()
                    .zip(channel.gains(u, r, msg.antenna))
            {
                *y += h * c;
            }
        }
    }
    Ok(samples)
}

/// Noise-free contribution of a single user to every received sample.
pub fn user_contribution(
    system: &System,
    messages: &[UserMessage],
    channel: &ChannelRealization,
    user: usize,
) -> Result<Vec<Complex64>> {
    let msg = messages
        .get(user)
        .copied()
        .ok_or_else(|| Error::MessageRange(format!("no message for user {}", user + 1)))?;
    msg.check(system.config())?;
    let rx = system.rx_antennas();
    let mut samples = vec![Complex64::new(0.0, 0.0); system.ores() * rx];
    for &r in &system.graph().omega[user] {
        let c = system.codebooks().entry(user, r, msg.codeword);
        for (y, h) in
            samples[r * rx..(r + 1) * rx]
                .iter_mut()
                .zip(channel.gains(user, r, msg.antenna))
        {
            *y = h * c;
        }
    }
    Ok(samples)
}

/// Superposes all users and adds complex AWGN of variance
/// `10^(-snr_db/10)`; `snr_db = +inf` gives a noiseless signal.
pub fn transmit_and_receive<R: Rng + ?Sized>(
    system: &System,
    messages: &[UserMessage],
    channel: &ChannelRealization,
    snr_db: f64,
    rng: &mut R,
) -> Result<ReceivedSignal> {
    let mut samples = superpose(system, messages, channel)?;
    let sigma2 = noise_variance(snr_db);
    if sigma2 > 0.0 {
        for y in samples.iter_mut() {
            *y += complex_gaussian(rng, sigma2);
        }
    }
    Ok(ReceivedSignal::new(
        system.ores(),
        system.rx_antennas(),
        samples,
        sigma2,
    ))
}

fn serialize_complex_vec<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}
