//! Command-line front end: `simulate`, `complexity`, `nom` and `validate`.
//!
//! Every artifact is accompanied by a [`RunManifest`] that records the
//! resolved configuration and the codebook checksum. Passing a manifest back
//! to `simulate --manifest` reruns the same experiment and reproduces the
//! CSV and JSON outputs byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complexity::{
    fcsd_visited_nodes, formula_fcsd, formula_mpa, formula_msud, formula_sud, Dimensions, OpCount,
};
use crate::decoders::{build_tree_levels, ore_energy_order, Decoder, DEFAULT_ML_GUARD};
use crate::error::{Error, Result};
use crate::harness::{run_nom, run_sweep, SweepPlan, SweepResult};
use crate::model::{parse_rho, spectral_efficiency, CodebookSet, Survivors, System, SystemConfig};
use crate::signal::{draw_channel, transmit_and_receive, UserMessage};

/// Environment variable that sets the default worker count.
pub const WORKERS_ENV: &str = "SMSCMA_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Guard { .. } => EXIT_GUARD,
        Error::Io { .. } | Error::Csv(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "smscma",
    version,
    about = "SM-SCMA detector simulation and complexity accounting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo BER sweep over SNR for a set of decoders.
    Simulate(SimulateArgs),
    /// Closed-form and measured operation counts.
    Complexity(ComplexityArgs),
    /// Disagreement of FCSD survivor settings with MPA.
    Nom(NomArgs),
    /// Check a config and codebook and print the derived index sets.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// System config file (JSON). Not needed with --manifest.
    pub config: Option<PathBuf>,
    /// Replay the run described by a manifest written by an earlier run.
    #[arg(long, conflicts_with_all = ["config", "decoders", "snr", "trials", "seed", "noiseless"])]
    pub manifest: Option<PathBuf>,
    /// Comma-separated decoders: ml, mpa, sud, msud, fcsd.
    #[arg(long)]
    pub decoders: Option<String>,
    /// SNR points in dB as start:step:stop, a comma list, or one value.
    #[arg(long)]
    pub snr: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output stem; writes <out>.csv, <out>.json and <out>.manifest.json.
    #[arg(long, default_value = "sweep")]
    pub out: PathBuf,
    /// Worker threads (0 = one per core).
    #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
    pub workers: usize,
    /// Simulate without noise.
    #[arg(long)]
    pub noiseless: bool,
    /// Write every trial record as one JSON line to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Largest joint search space ML may enumerate.
    #[arg(long, conflicts_with = "manifest")]
    pub ml_guard: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    pub config: PathBuf,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed of the realization used for the measured counts.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct NomArgs {
    pub config: PathBuf,
    /// Survivor vector, e.g. 15,50,15; repeat for each variant.
    #[arg(long = "rho", required = true)]
    pub rho: Vec<String>,
    #[arg(long)]
    pub snr: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output stem; writes <out>.csv, <out>.json and <out>.manifest.json.
    #[arg(long, default_value = "nom")]
    pub out: PathBuf,
    #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub config: PathBuf,
    /// Codebook file overriding the one named in the config.
    #[arg(long)]
    pub codebook: Option<PathBuf>,
}

/// Everything that determines the outputs of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: SystemConfig,
    /// SHA-256 of the codebook file (or of the built-in default).
    pub codebook_sha256: String,
    pub decoders: Vec<String>,
    /// SNR points in dB; empty for a noiseless run.
    pub snr_db: Vec<f64>,
    pub noiseless: bool,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_ml_guard")]
    pub ml_guard: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho_variants: Vec<Vec<Survivors>>,
    /// Creation time; left out of reports so reruns are byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
}

fn default_ml_guard() -> u64 {
    DEFAULT_ML_GUARD
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        serde_json::from_str(&text).map_err(|source| Error::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    fn stamped(&self) -> Self {
        RunManifest {
            created: Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
            ..self.clone()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `<stem>.<ext>`, keeping any dots already in the stem.
fn with_suffix(stem: &Path, ext: &str) -> PathBuf {
    let stem = stem.to_string_lossy();
    let stem = stem.strip_suffix(".csv").unwrap_or(&stem);
    PathBuf::from(format!("{stem}.{ext}"))
}

fn codebook_checksum(cfg: &SystemConfig) -> Result<String> {
    let bytes = match &cfg.codebook {
        Some(path) => fs::read(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => CodebookSet::default_text(cfg.codewords)
            .ok_or_else(|| {
                Error::Codebook(format!("no default codebook for M = {}", cfg.codewords))
            })?
            .as_bytes()
            .to_vec(),
    };
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Parses `start:step:stop` (inclusive), `a,b,c` or a single value.
pub fn parse_snr(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::config("snr", format!("{text:?}: {why}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = text.split(':').collect();
    let list = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step.is_nan()
                || step <= 0.0
                || !start.is_finite()
                || !stop.is_finite()
                || stop < start
            {
                return Err(bad(
                    "expected start:step:stop with step > 0 and stop >= start",
                ));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start + i as f64 * step).collect()
        }
        [single] => single.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad("expected start:step:stop")),
    };
    if list.iter().any(|v| !v.is_finite()) {
        return Err(bad("SNR values must be finite; use --noiseless"));
    }
    Ok(list)
}

fn parse_decoders(text: &str) -> Result<Vec<String>> {
    let names: Vec<String> = text
        .split(',')
        .map(|s| s.trim().to_ascii_lowercase())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Error::config("decoders", "empty decoder list"));
    }
    Ok(names)
}

fn build_system(cfg: &SystemConfig) -> Result<System> {
    System::from_config(cfg.clone())
}

/// Runs a parsed command line, writing human-readable output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Complexity(a) => cmd_complexity(&a, stdout),
        Command::Nom(a) => cmd_nom(&a, stdout),
        Command::Validate(a) => cmd_validate(&a, stdout),
    }
}

fn out_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

/// Resolves the simulate flags (or a manifest) into a manifest.
pub fn resolve_simulation(args: &SimulateArgs) -> Result<RunManifest> {
    if let Some(path) = &args.manifest {
        let m = RunManifest::load(path)?;
        if m.command != "simulate" {
            return Err(Error::config(
                "manifest",
                format!("written by {:?}, not simulate", m.command),
            ));
        }
        m.config.validate()?;
        let sum = codebook_checksum(&m.config)?;
        if sum != m.codebook_sha256 {
            return Err(Error::Codebook(format!(
                "codebook checksum {sum} does not match manifest {}",
                m.codebook_sha256
            )));
        }
        return Ok(RunManifest { created: None, ..m });
    }
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| Error::config("config", "a config file or --manifest is required"))?;
    let cfg = SystemConfig::load(path)?;
    let decoders = parse_decoders(args.decoders.as_deref().unwrap_or("mpa,sud,msud,fcsd"))?;
    let snr_db = if args.noiseless {
        Vec::new()
    } else if let Some(s) = &args.snr {
        parse_snr(s)?
    } else if !cfg.snr_db_list.is_empty() {
        cfg.snr_db_list.clone()
    } else {
        return Err(Error::config(
            "snr",
            "no SNR points: pass --snr or set snr_db_list",
        ));
    };
    Ok(RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "simulate".into(),
        codebook_sha256: codebook_checksum(&cfg)?,
        decoders,
        snr_db,
        noiseless: args.noiseless,
        trials: args.trials.unwrap_or(1000),
        seed: args.seed.unwrap_or(cfg.seed),
        ml_guard: args.ml_guard.unwrap_or(DEFAULT_ML_GUARD),
        rho_variants: Vec::new(),
        config: cfg,
        created: None,
    })
}

#[derive(Serialize)]
struct SweepReport<'a> {
    manifest: &'a RunManifest,
    result: &'a SweepResult,
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let manifest = resolve_simulation(args)?;
    let system = build_system(&manifest.config)?;
    let decoders = manifest
        .decoders
        .iter()
        .map(|n| {
            Decoder::from_name(n, &system).map(|d| match d {
                Decoder::Ml { .. } => Decoder::Ml {
                    guard: manifest.ml_guard,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let plan = SweepPlan {
        decoders,
        snr_db: if manifest.noiseless {
            vec![f64::INFINITY]
        } else {
            manifest.snr_db.clone()
        },
        trials: manifest.trials,
        seed: manifest.seed,
        workers: args.workers,
    };
    let result = match &args.trace {
        Some(path) => {
            let file = fs::File::create(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            let mut w = std::io::BufWriter::new(file);
            let r = run_sweep(&system, &plan, Some(&mut w))?;
            w.flush().map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            r
        }
        None => run_sweep(&system, &plan, None)?,
    };

    let csv_path = with_suffix(&args.out, "csv");
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    result.write_csv(&csv_path)?;
    let report = serde_json::to_string_pretty(&SweepReport {
        manifest: &manifest,
        result: &result,
    })
    .expect("report serializes");
    write(&with_suffix(&args.out, "json"), &(report + "\n"))?;
    let stamped = serde_json::to_string_pretty(&manifest.stamped()).expect("manifest serializes");
    write(&with_suffix(&args.out, "manifest.json"), &(stamped + "\n"))?;

    for row in &result.rows {
        writeln!(
            stdout,
            "{:>6} dB  {:<16} BER {:.3e} ± {:.1e}{}",
            if row.snr_db.is_infinite() {
                "inf".to_string()
            } else {
                row.snr_db.to_string()
            },
            row.decoder,
            row.ber,
            row.ber_stderr,
            row.nom.map_or(String::new(), |n| format!("  NoM {n:.4}"))
        )
        .map_err(out_err)?;
    }
    writeln!(stdout, "wrote {}", csv_path.display()).map_err(out_err)?;
    Ok(())
}

/// Formula and measured counts of one decoder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityEntry {
    pub decoder: String,
    pub formula: OpCount,
    pub measured: OpCount,
    /// FCSD only: tree nodes evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_nodes: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityTable {
    pub spectral_efficiency: usize,
    pub tx_antennas: usize,
    pub codewords: usize,
    pub rho: Vec<Survivors>,
    pub rows: Vec<ComplexityRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub rx_antennas: usize,
    pub decoders: Vec<ComplexityEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub config: SystemConfig,
    pub codebook_sha256: String,
    pub seed: u64,
    pub decoders: Vec<ComplexityEntry>,
    pub tables: Vec<ComplexityTable>,
}

/// Formula and measured operation counts for MPA, SUD, MSUD and FCSD on one
/// seeded realization of `system`.
pub fn complexity_entries(system: &System, seed: u64) -> Result<Vec<ComplexityEntry>> {
    let cfg = system.config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sent = vec![UserMessage::new(0, 0); cfg.users];
    let channel = draw_channel(&mut rng, cfg);
    let y = transmit_and_receive(system, &sent, &channel, 10.0, &mut rng)?;
    let dims = Dimensions::of(system);
    let order = ore_energy_order(system, &channel);
    let plan = build_tree_levels(system.graph(), &order.order)?.counts();
    let (k_mpa, k_msud) = (cfg.mpa_iterations, cfg.msud_iterations);
    let formulas = [
        (Decoder::mpa(k_mpa), formula_mpa(&dims, k_mpa as u64), None),
        (Decoder::Sud, formula_sud(&dims, &plan), None),
        (
            Decoder::msud(k_msud),
            formula_msud(&dims, &plan, k_msud as u64),
            None,
        ),
        (
            Decoder::Fcsd {
                rho: cfg.rho.clone(),
            },
            formula_fcsd(&dims, &plan, &cfg.rho),
            Some(fcsd_visited_nodes(&dims, &plan, &cfg.rho)),
        ),
    ];
    formulas
        .into_iter()
        .map(|(d, formula, tree_nodes)| {
            Ok(ComplexityEntry {
                decoder: d.label(),
                formula,
                measured: d.decode(system, &y, &channel)?.ops,
                tree_nodes,
            })
        })
        .collect()
}

/// Tables for the two reference configurations (`N_t = 4`, `M ∈ {2, 4}`)
/// over `N_r ∈ {2, 4, 6, 10}`, with the iteration counts of `base`.
pub fn reference_tables(base: &SystemConfig, seed: u64) -> Result<Vec<ComplexityTable>> {
    [2, 4]
        .into_iter()
        .map(|m| {
            let mut cfg = SystemConfig::reference(m, 2);
            cfg.mpa_iterations = base.mpa_iterations;
            cfg.msud_iterations = base.msud_iterations;
            let rows = [2, 4, 6, 10]
                .into_iter()
                .map(|n_r| {
                    let mut c = cfg.clone();
                    c.rx_antennas = n_r;
                    let system = System::from_config(c)?;
                    Ok(ComplexityRow {
                        rx_antennas: n_r,
                        decoders: complexity_entries(&system, seed)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ComplexityTable {
                spectral_efficiency: spectral_efficiency(&cfg),
                tx_antennas: cfg.tx_antennas,
                codewords: m,
                rho: cfg.rho.clone(),
                rows,
            })
        })
        .collect()
}

pub fn cmd_complexity(args: &ComplexityArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = SystemConfig::load(&args.config)?;
    let system = build_system(&cfg)?;
    let report = ComplexityReport {
        codebook_sha256: codebook_checksum(&cfg)?,
        seed: args.seed,
        decoders: complexity_entries(&system, args.seed)?,
        tables: reference_tables(&cfg, args.seed)?,
        config: cfg,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &args.out {
        Some(path) => {
            write(path, &text)?;
            for e in &report.decoders {
                writeln!(
                    stdout,
                    "{:<16} adds {:>12} (formula {:>12})  muls {:>12} (formula {:>12})",
                    e.decoder,
                    e.measured.real_adds,
                    e.formula.real_adds,
                    e.measured.real_muls,
                    e.formula.real_muls
                )
                .map_err(out_err)?;
            }
            writeln!(stdout, "wrote {}", path.display()).map_err(out_err)?;
        }
        None => stdout.write_all(text.as_bytes()).map_err(out_err)?,
    }
    Ok(())
}

pub fn cmd_nom(args: &NomArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = SystemConfig::load(&args.config)?;
    let system = build_system(&cfg)?;
    let rhos = args
        .rho
        .iter()
        .map(|r| parse_rho(r))
        .collect::<Result<Vec<_>>>()?;
    for rho in &rhos {
        if rho.len() + 1 != cfg.ores {
            return Err(Error::config(
                "rho",
                format!("{} entries given, expected {}", rho.len(), cfg.ores - 1),
            ));
        }
    }
    let snrs = match &args.snr {
        Some(s) => parse_snr(s)?,
        None if !cfg.snr_db_list.is_empty() => cfg.snr_db_list.clone(),
        None => {
            return Err(Error::config(
                "snr",
                "no SNR points: pass --snr or set snr_db_list",
            ))
        }
    };
    let seed = args.seed.unwrap_or(cfg.seed);
    let studies = snrs
        .iter()
        .map(|&snr| run_nom(&system, &rhos, snr, args.trials, seed, args.workers))
        .collect::<Result<Vec<_>>>()?;

    let csv_path = with_suffix(&args.out, "csv");
    let mut text = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut text);
        w.write_record([
            "snr_db",
            "decoder",
            "rho",
            "trials",
            "nom",
            "nom_stderr",
            "near_zero",
        ])?;
        for s in &studies {
            for r in &s.rows {
                let rho: Vec<String> = r.rho.iter().map(ToString::to_string).collect();
                w.write_record([
                    format!("{}", s.snr_db),
                    r.decoder.clone(),
                    rho.join(";"),
                    s.trials.to_string(),
                    format!("{}", r.nom),
                    format!("{}", r.nom_stderr),
                    r.near_zero.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|source| Error::Io {
            path: csv_path.display().to_string(),
            source,
        })?;
    }
    write(&csv_path, &String::from_utf8(text).expect("csv is utf-8"))?;

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "nom".into(),
        codebook_sha256: codebook_checksum(&cfg)?,
        decoders: vec![Decoder::mpa(cfg.mpa_iterations).label()],
        snr_db: snrs,
        noiseless: false,
        trials: args.trials,
        seed,
        ml_guard: DEFAULT_ML_GUARD,
        rho_variants: rhos,
        config: cfg,
        created: None,
    };
    let report = serde_json::json!({ "manifest": &manifest, "studies": &studies });
    write(
        &with_suffix(&args.out, "json"),
        &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
    )?;
    write(
        &with_suffix(&args.out, "manifest.json"),
        &(serde_json::to_string_pretty(&manifest.stamped()).expect("manifest serializes") + "\n"),
    )?;
    for s in &studies {
        for r in &s.rows {
            writeln!(
                stdout,
                "{:>6} dB  {:<20} NoM {:.4} ± {:.4}{}",
                s.snr_db,
                r.decoder,
                r.nom,
                r.nom_stderr,
                if r.near_zero {
                    format!("  (below {})", s.near_zero_threshold)
                } else {
                    String::new()
                }
            )
            .map_err(out_err)?;
        }
        for g in &s.gaps {
            writeln!(
                stdout,
                "          {} - {}: {:+.4} ± {:.4}",
                g.higher, g.lower, g.gap, g.gap_stderr
            )
            .map_err(out_err)?;
        }
    }
    writeln!(stdout, "wrote {}", csv_path.display()).map_err(out_err)?;
    Ok(())
}

fn one_based(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn cmd_validate(args: &ValidateArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut cfg = SystemConfig::load(&args.config)?;
    if let Some(book) = &args.codebook {
        cfg.codebook = Some(book.clone());
    }
    let system = build_system(&cfg)?;
    let graph = system.graph();
    let f = system.codebooks().indicator();
    let rebuilt = graph.to_indicator()?;
    if rebuilt != *f {
        return Err(Error::Codebook("factor graph does not reproduce F".into()));
    }
    let edges_by_ore: usize = graph.lambda.iter().map(Vec::len).sum();
    let edges_by_user: usize = graph.omega.iter().map(Vec::len).sum();
    if edges_by_ore != edges_by_user {
        return Err(Error::Codebook("edge counts of Λ and Ω differ".into()));
    }

    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!(
        "U = {}, R = {}, N_t = {}, M = {}, N_r = {}, d_v = {}, d_f = {}",
        cfg.users,
        cfg.ores,
        cfg.tx_antennas,
        cfg.codewords,
        cfg.rx_antennas,
        system.d_v(),
        system.d_f()
    ));
    for (r, users) in graph.lambda.iter().enumerate() {
        line(format!("Λ_{} = {}", r + 1, one_based(users)));
    }
    for (u, ores) in graph.omega.iter().enumerate() {
        line(format!("Ω_{} = {}", u + 1, one_based(ores)));
    }
    let natural: Vec<usize> = (0..cfg.ores).collect();
    let plan = build_tree_levels(graph, &natural)?;
    let counts: Vec<String> = plan.counts().iter().map(ToString::to_string).collect();
    line(format!(
        "level plan (ORE order 1..{}): ({})",
        cfg.ores,
        counts.join(", ")
    ));
    let eta = spectral_efficiency(&cfg);
    line(format!(
        "spectral efficiency: {eta} bits per user, {:.3} bits per ORE",
        (cfg.users * eta) as f64 / cfg.ores as f64
    ));
    for u in 0..cfg.users {
        let e = system.codebooks().average_energy(u);
        if (e - 1.0).abs() > 1e-9 {
            return Err(Error::Codebook(format!(
                "user {} has average energy {e}",
                u + 1
            )));
        }
    }
    line(format!("codebook sha256: {}", codebook_checksum(&cfg)?));
    line("all checks passed".into());
    stdout.write_all(out.as_bytes()).map_err(out_err)
}
