//! Monte Carlo harness: reproducible trials, parallel sweeps over SNR and
//! the FCSD-vs-MPA disagreement study.
//!
//! Every trial owns a ChaCha8 stream seeded from `(seed, snr index, trial
//! index)`, and trial results are reduced in index order, so outputs do not
//! depend on the number of worker threads.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complexity::OpCount;
use crate::decoders::Decoder;
use crate::error::{Error, Result};
use crate::model::{Survivors, System};
use crate::signal::{demap_bits, draw_channel, map_bits, transmit_and_receive, UserMessage};

/// CSV columns of a sweep.
pub const CSV_HEADER: [&str; 9] = [
    "snr_db",
    "decoder",
    "trials",
    "bit_errors",
    "ber",
    "ber_stderr",
    "nom",
    "adds_avg",
    "muls_avg",
];

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial's random stream.
pub fn trial_seed(seed: u64, snr_index: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ snr_index as u64) ^ trial as u64)
}

/// One decoder's outcome on one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecoderOutcome {
    pub decoder: String,
    pub estimates: Vec<UserMessage>,
    pub bit_errors: usize,
    pub ops: OpCount,
    #[serde(serialize_with = "crate::one_based::indices")]
    pub clamped_levels: Vec<usize>,
}

/// Everything about one trial: the sent messages and each decoder's result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub trial: usize,
    pub seed: u64,
    /// Transmitted bits of each user.
    pub bits: Vec<Vec<u8>>,
    pub sent: Vec<UserMessage>,
    pub outcomes: Vec<DecoderOutcome>,
}

/// Draws random bits for every user, transmits them over a fresh channel at
/// `snr_db` and runs every decoder on the same received signal.
pub fn run_trial(
    system: &System,
    decoders: &[Decoder],
    snr_db: f64,
    seed: u64,
) -> Result<TrialRecord> {
    let cfg = system.config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits_per_user = system.bits_per_user();
    let bits: Vec<Vec<u8>> = (0..cfg.users)
        .map(|_| (0..bits_per_user).map(|_| rng.gen_range(0..=1u8)).collect())
        .collect();
    let sent = bits
        .iter()
        .map(|b| map_bits(b, cfg))
        .collect::<Result<Vec<_>>>()?;
    let channel = draw_channel(&mut rng, cfg);
    let y = transmit_and_receive(system, &sent, &channel, snr_db, &mut rng)?;
    let outcomes = decoders
        .iter()
        .map(|d| {
            let r = d.decode(system, &y, &channel)?;
            Ok(DecoderOutcome {
                decoder: r.meta.decoder,
                bit_errors: bit_errors(&sent, &r.estimates, system),
                estimates: r.estimates,
                ops: r.ops,
                clamped_levels: r.meta.clamped_levels,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialRecord {
        snr_db,
        trial: 0,
        seed,
        bits,
        sent,
        outcomes,
    })
}

/// Bit errors between sent and estimated messages of all users.
pub fn bit_errors(sent: &[UserMessage], estimated: &[UserMessage], system: &System) -> usize {
    let cfg = system.config();
    sent.iter()
        .zip(estimated)
        .map(|(&a, &b)| {
            demap_bits(a, cfg)
                .iter()
                .zip(demap_bits(b, cfg))
                .filter(|(x, y)| **x != *y)
                .count()
        })
        .sum()
}

/// Number of users whose estimates differ.
pub fn disagreements(a: &[UserMessage], b: &[UserMessage]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Mean and standard error of the mean (sample standard deviation over
/// `√n`). The error is zero for fewer than two samples.
pub fn mean_and_stderr(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for v in values {
        n += 1;
        let delta = v - mean;
        mean += delta / n as f64;
        m2 += delta * (v - mean);
    }
    if n < 2 {
        return (if n == 0 { 0.0 } else { mean }, 0.0);
    }
    let var = m2 / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Parameters of a BER sweep.
#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub decoders: Vec<Decoder>,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; zero uses one per available core.
    pub workers: usize,
}

/// Aggregated statistics of one decoder at one SNR.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub decoder: String,
    pub trials: usize,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_stderr: f64,
    /// Mean number of users on which this FCSD run disagrees with MPA, when
    /// both were simulated.
    pub nom: Option<f64>,
    pub adds_avg: f64,
    pub muls_avg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub seed: u64,
    pub trials: usize,
    pub decoders: Vec<String>,
    pub rows: Vec<SweepRow>,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))
}

/// Runs `trials` trials at each SNR in parallel and returns them in order.
pub fn run_trials(
    system: &System,
    decoders: &[Decoder],
    snr_db: f64,
    snr_index: usize,
    trials: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<TrialRecord>> {
    pool(workers)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rec = run_trial(system, decoders, snr_db, trial_seed(seed, snr_index, t))?;
                rec.trial = t;
                Ok(rec)
            })
            .collect()
    })
}

/// Reduces trial records of one SNR into one row per decoder.
pub fn summarize(system: &System, records: &[TrialRecord], decoders: &[Decoder]) -> Vec<SweepRow> {
    let bits = (system.users() * system.bits_per_user()) as f64;
    let mpa = decoders.iter().position(Decoder::is_mpa);
    let n = records.len();
    decoders
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let errors: u64 = records
                .iter()
                .map(|r| r.outcomes[i].bit_errors as u64)
                .sum();
            let ber = errors as f64 / (n.max(1) as f64 * bits);
            let (_, ber_stderr) = mean_and_stderr(
                records
                    .iter()
                    .map(|r| r.outcomes[i].bit_errors as f64 / bits),
            );
            let nom = match (d.is_fcsd(), mpa) {
                (true, Some(m)) => Some(
                    records
                        .iter()
                        .map(|r| {
                            disagreements(&r.outcomes[i].estimates, &r.outcomes[m].estimates) as f64
                        })
                        .sum::<f64>()
                        / n.max(1) as f64,
                ),
                _ => None,
            };
            let ops: OpCount = records.iter().map(|r| r.outcomes[i].ops).sum();
            SweepRow {
                snr_db: records.first().map_or(f64::NAN, |r| r.snr_db),
                decoder: d.label(),
                trials: n,
                bit_errors: errors,
                ber,
                ber_stderr,
                nom,
                adds_avg: ops.real_adds as f64 / n.max(1) as f64,
                muls_avg: ops.real_muls as f64 / n.max(1) as f64,
            }
        })
        .collect()
}

/// Full BER sweep. When `trace` is given, every trial record is appended to
/// it as one JSON line.
pub fn run_sweep(
    system: &System,
    plan: &SweepPlan,
    mut trace: Option<&mut dyn Write>,
) -> Result<SweepResult> {
    if plan.decoders.is_empty() {
        return Err(Error::config(
            "decoders",
            "at least one decoder is required",
        ));
    }
    if plan.trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let mut rows = Vec::new();
    for (k, &snr) in plan.snr_db.iter().enumerate() {
        if snr.is_nan() {
            return Err(Error::NonFinite("SNR".into()));
        }
        let records = run_trials(
            system,
            &plan.decoders,
            snr,
            k,
            plan.trials,
            plan.seed,
            plan.workers,
        )?;
        if let Some(w) = trace.as_deref_mut() {
            for r in &records {
                let line = serde_json::to_string(r).expect("trial records serialize");
                writeln!(w, "{line}").map_err(|e| Error::Io {
                    path: "trace".into(),
                    source: e,
                })?;
            }
        }
        log::info!("SNR {snr} dB: {} trials done", records.len());
        rows.extend(summarize(system, &records, &plan.decoders));
    }
    Ok(SweepResult {
        seed: plan.seed,
        trials: plan.trials,
        decoders: plan.decoders.iter().map(Decoder::label).collect(),
        rows,
    })
}

fn format_snr(snr: f64) -> String {
    if snr == f64::INFINITY {
        "inf".into()
    } else {
        format!("{snr}")
    }
}

impl SweepResult {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                format_snr(r.snr_db),
                r.decoder.clone(),
                r.trials.to_string(),
                r.bit_errors.to_string(),
                format!("{:e}", r.ber),
                format!("{:e}", r.ber_stderr),
                r.nom.map_or(String::new(), |v| format!("{v}")),
                format!("{}", r.adds_avg),
                format!("{}", r.muls_avg),
            ])?;
        }
        w.flush().map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        // serde_json has no infinity; the noiseless point is written as null
        serde_json::to_string_pretty(self).expect("sweep results serialize")
    }

    pub fn row(&self, snr_db: f64, decoder: &str) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.decoder == decoder && r.snr_db == snr_db)
    }
}

/// NoM below which FCSD is reported as practically matching MPA. This is an
/// operational threshold chosen here, not a derived quantity.
pub const NOM_NEAR_ZERO: f64 = 0.05;

/// Disagreement of one FCSD configuration with MPA.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NomRow {
    pub decoder: String,
    pub rho: Vec<Survivors>,
    pub nom: f64,
    pub nom_stderr: f64,
    /// `nom < NOM_NEAR_ZERO`.
    pub near_zero: bool,
}

/// Difference between two NoM values with the standard error of the paired
/// per-trial differences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NomGap {
    pub lower: String,
    pub higher: String,
    pub gap: f64,
    pub gap_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NomStudy {
    pub snr_db: f64,
    pub trials: usize,
    pub seed: u64,
    pub mpa_iterations: usize,
    /// Threshold behind [`NomRow::near_zero`].
    pub near_zero_threshold: f64,
    pub rows: Vec<NomRow>,
    /// Gaps between consecutive rows, in the order given.
    pub gaps: Vec<NomGap>,
}

/// Mean number of users per trial on which FCSD with each survivor vector
/// disagrees with MPA, all on the same realizations.
pub fn run_nom(
    system: &System,
    rhos: &[Vec<Survivors>],
    snr_db: f64,
    trials: usize,
    seed: u64,
    workers: usize,
) -> Result<NomStudy> {
    if rhos.is_empty() || trials == 0 {
        return Err(Error::config(
            "nom",
            "needs at least one survivor vector and one trial",
        ));
    }
    let k = system.config().mpa_iterations;
    let mut decoders = vec![Decoder::mpa(k)];
    decoders.extend(rhos.iter().map(|r| Decoder::Fcsd { rho: r.clone() }));
    let records = run_trials(system, &decoders, snr_db, 0, trials, seed, workers)?;
    let counts: Vec<Vec<f64>> = (1..decoders.len())
        .map(|i| {
            records
                .iter()
                .map(|r| disagreements(&r.outcomes[i].estimates, &r.outcomes[0].estimates) as f64)
                .collect()
        })
        .collect();
    let rows: Vec<NomRow> = counts
        .iter()
        .zip(rhos)
        .zip(&decoders[1..])
        .map(|((c, rho), d)| {
            let (nom, nom_stderr) = mean_and_stderr(c.iter().copied());
            NomRow {
                decoder: d.label(),
                rho: rho.clone(),
                nom,
                nom_stderr,
                near_zero: nom < NOM_NEAR_ZERO,
            }
        })
        .collect();
    let gaps = (1..rows.len())
        .map(|i| {
            let (gap, gap_stderr) =
                mean_and_stderr(counts[i].iter().zip(&counts[i - 1]).map(|(b, a)| b - a));
            NomGap {
                lower: rows[i - 1].decoder.clone(),
                higher: rows[i].decoder.clone(),
                gap,
                gap_stderr,
            }
        })
        .collect();
    Ok(NomStudy {
        snr_db,
        trials,
        seed,
        mpa_iterations: k,
        near_zero_threshold: NOM_NEAR_ZERO,
        rows,
        gaps,
    })
}
