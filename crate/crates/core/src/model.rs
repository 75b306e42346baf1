//! Static system description: dimensions, indicator matrix, factor-graph
//! index sets and user codebooks.
//!
//! Everything in here is validated at construction and immutable afterwards,
//! so a [`System`] can be shared freely between simulation workers.
//!
//! Indices are 0-based in the API. File formats and human-readable output
//! use 1-based indices.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on the unit average codeword energy of a user codebook.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

/// Number of surviving nodes kept at one tree level.
///
/// Serialized as a plain integer, or as the string `"all"` for a level that
/// keeps every node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Survivors(pub usize);

impl Survivors {
    pub const ALL: Survivors = Survivors(usize::MAX);

    pub fn is_all(self) -> bool {
        self.0 == usize::MAX
    }
}

impl fmt::Display for Survivors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_all() {
            f.write_str("all")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Survivors {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_all() {
            s.serialize_str("all")
        } else {
            s.serialize_u64(self.0 as u64)
        }
    }
}

impl<'de> Deserialize<'de> for Survivors {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(n) => Ok(Survivors(n as usize)),
            Repr::Str(s) if s.eq_ignore_ascii_case("all") || s == "inf" => Ok(Survivors::ALL),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a survivor count or \"all\", got {s:?}"
            ))),
        }
    }
}

/// Parses `35,70,50` or `all,all,all` into survivor counts.
pub fn parse_rho(text: &str) -> Result<Vec<Survivors>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            if t.eq_ignore_ascii_case("all") || t == "inf" {
                Ok(Survivors::ALL)
            } else {
                t.parse::<usize>()
                    .map(Survivors)
                    .map_err(|_| Error::config("rho", format!("bad survivor count {t:?}")))
            }
        })
        .collect()
}

fn default_mpa_iterations() -> usize {
    5
}

fn default_msud_iterations() -> usize {
    4
}

/// Simulation dimensions and decoder parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(rename = "U")]
    pub users: usize,
    #[serde(rename = "R")]
    pub ores: usize,
    #[serde(rename = "M")]
    pub codewords: usize,
    #[serde(rename = "N_t")]
    pub tx_antennas: usize,
    #[serde(rename = "N_r")]
    pub rx_antennas: usize,
    #[serde(rename = "K_mpa", default = "default_mpa_iterations")]
    pub mpa_iterations: usize,
    #[serde(rename = "K_msud", default = "default_msud_iterations")]
    pub msud_iterations: usize,
    /// Survivor counts for the first `R - 1` tree levels of FCSD.
    pub rho: Vec<Survivors>,
    #[serde(default)]
    pub snr_db_list: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Codebook file, relative to the config file. Built-in default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codebook: Option<PathBuf>,
}

impl SystemConfig {
    /// The six-user, four-ORE scenario with `N_t = 4`.
    pub fn reference(codewords: usize, rx_antennas: usize) -> Self {
        let rho = if codewords == 2 {
            vec![Survivors(35), Survivors(70), Survivors(50)]
        } else {
            vec![Survivors(110), Survivors(320), Survivors(300)]
        };
        SystemConfig {
            users: 6,
            ores: 4,
            codewords,
            tx_antennas: 4,
            rx_antennas,
            mpa_iterations: 5,
            msud_iterations: 4,
            rho,
            snr_db_list: vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0],
            seed: 1,
            codebook: None,
        }
    }

    /// Messages per user, `N_t * M`.
    pub fn messages_per_user(&self) -> usize {
        self.tx_antennas * self.codewords
    }

    pub fn antenna_bits(&self) -> usize {
        self.tx_antennas.trailing_zeros() as usize
    }

    pub fn codeword_bits(&self) -> usize {
        self.codewords.trailing_zeros() as usize
    }

    /// Checks every invariant except the overload condition `U > R`.
    pub fn validate_structure(&self) -> Result<()> {
        if self.users == 0 {
            return Err(Error::config("U", "must be at least 1"));
        }
        if self.ores == 0 {
            return Err(Error::config("R", "must be at least 1"));
        }
        if !self.tx_antennas.is_power_of_two() {
            return Err(Error::config("N_t", "must be a power of two"));
        }
        if !self.codewords.is_power_of_two() {
            return Err(Error::config("M", "must be a power of two"));
        }
        if self.rx_antennas == 0 {
            return Err(Error::config("N_r", "must be at least 1"));
        }
        if self.rho.len() != self.ores - 1 {
            return Err(Error::config(
                "rho",
                format!(
                    "expected {} entries (R - 1), got {}",
                    self.ores - 1,
                    self.rho.len()
                ),
            ));
        }
        if let Some(pos) = self.rho.iter().position(|s| s.0 == 0) {
            return Err(Error::config(
                "rho",
                format!("entry {} must be >= 1", pos + 1),
            ));
        }
        if let Some(snr) = self.snr_db_list.iter().find(|s| s.is_nan()) {
            return Err(Error::config("snr_db_list", format!("invalid SNR {snr}")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        if self.users <= self.ores {
            return Err(Error::config(
                "U",
                format!(
                    "system must be overloaded (U > R), got U={} R={}",
                    self.users, self.ores
                ),
            ));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let cfg: SystemConfig = serde_json::from_str(text).map_err(|source| Error::Parse {
            path: origin.to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads and validates a config file; a relative `codebook` path is
    /// resolved against the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::from_json_str(&text, &path.display().to_string())?;
        if let (Some(book), Some(dir)) = (cfg.codebook.as_ref(), path.parent()) {
            if book.is_relative() {
                cfg.codebook = Some(dir.join(book));
            }
        }
        Ok(cfg)
    }
}

/// Per-user spectral efficiency in bits per channel use.
pub fn spectral_efficiency(cfg: &SystemConfig) -> usize {
    cfg.antenna_bits() + cfg.codeword_bits()
}

/// Binary R x U matrix marking which user occupies which ORE.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorMatrix {
    rows: Vec<Vec<u8>>,
    d_v: usize,
    d_f: usize,
}

impl IndicatorMatrix {
    /// Validates entries and regularity (uniform row and column weights).
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 || rows[0].is_empty() {
            return Err(Error::config("F", "indicator matrix is empty"));
        }
        let u = rows[0].len();
        if rows.iter().any(|row| row.len() != u) {
            return Err(Error::config("F", "rows have different lengths"));
        }
        if rows.iter().flatten().any(|&x| x > 1) {
            return Err(Error::config("F", "entries must be 0 or 1"));
        }
        let d_f = rows[0].iter().filter(|&&x| x == 1).count();
        if let Some(i) = rows
            .iter()
            .position(|row| row.iter().filter(|&&x| x == 1).count() != d_f)
        {
            return Err(Error::config(
                "F",
                format!("row {} weight differs from d_f = {}", i + 1, d_f),
            ));
        }
        let col_weight = |c: usize| rows.iter().filter(|row| row[c] == 1).count();
        let d_v = col_weight(0);
        if let Some(c) = (0..u).find(|&c| col_weight(c) != d_v) {
            return Err(Error::config(
                "F",
                format!("column {} weight differs from d_v = {}", c + 1, d_v),
            ));
        }
        if d_v == 0 || d_f == 0 {
            return Err(Error::config("F", "every user needs at least one ORE"));
        }
        Ok(IndicatorMatrix { rows, d_v, d_f })
    }

    /// The 4 x 6 indicator matrix of the reference six-user system.
    pub fn reference() -> Self {
        IndicatorMatrix::new(vec![
            vec![0, 1, 1, 0, 1, 0],
            vec![1, 0, 1, 0, 0, 1],
            vec![0, 1, 0, 1, 0, 1],
            vec![1, 0, 0, 1, 1, 0],
        ])
        .expect("reference indicator matrix is regular")
    }

    pub fn ores(&self) -> usize {
        self.rows.len()
    }

    pub fn users(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, ore: usize, user: usize) -> bool {
        self.rows[ore][user] == 1
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Non-zero OREs per user.
    pub fn d_v(&self) -> usize {
        self.d_v
    }

    /// Users overlapping per ORE.
    pub fn d_f(&self) -> usize {
        self.d_f
    }
}

/// The `Λ_r` (users per ORE) and `Ω_u` (OREs per user) index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    pub lambda: Vec<Vec<usize>>,
    pub omega: Vec<Vec<usize>>,
}

impl FactorGraph {
    pub fn ores(&self) -> usize {
        self.lambda.len()
    }

    pub fn users(&self) -> usize {
        self.omega.len()
    }

    /// Rebuilds the indicator matrix from `Λ`.
    pub fn to_indicator(&self) -> Result<IndicatorMatrix> {
        let mut rows = vec![vec![0u8; self.users()]; self.ores()];
        for (r, users) in self.lambda.iter().enumerate() {
            for &u in users {
                rows[r][u] = 1;
            }
        }
        IndicatorMatrix::new(rows)
    }

    /// Position of `user` within `Λ_ore`, if it shares that ORE.
    pub fn slot(&self, ore: usize, user: usize) -> Option<usize> {
        self.lambda[ore].iter().position(|&u| u == user)
    }
}

/// Derives the ascending `Λ_r` and `Ω_u` sets from an indicator matrix.
pub fn derive_factor_graph(f: &IndicatorMatrix) -> FactorGraph {
    let lambda = (0..f.ores())
        .map(|r| (0..f.users()).filter(|&u| f.get(r, u)).collect())
        .collect();
    let omega = (0..f.users())
        .map(|u| (0..f.ores()).filter(|&r| f.get(r, u)).collect())
        .collect();
    FactorGraph { lambda, omega }
}

/// Per-user sparse codebooks, `books[u][r][m]` holding `c_m^{r,u}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CodebookSet {
    indicator: IndicatorMatrix,
    books: Vec<Vec<Vec<Complex64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodebookFile {
    #[serde(rename = "U")]
    users: usize,
    #[serde(rename = "R")]
    ores: usize,
    #[serde(rename = "M")]
    codewords: usize,
    #[serde(rename = "F")]
    indicator: Vec<Vec<u8>>,
    books: Vec<Vec<Vec<[f64; 2]>>>,
}

const DEFAULT_M2: &str = include_str!("../data/codebooks/default_m2.json");
const DEFAULT_M4: &str = include_str!("../data/codebooks/default_m4.json");

impl CodebookSet {
    /// Validates shape, finiteness and sparsity, then rescales each book to
    /// unit average codeword energy (with a warning when that changes it).
    pub fn new(indicator: IndicatorMatrix, mut books: Vec<Vec<Vec<Complex64>>>) -> Result<Self> {
        let (r_count, u_count) = (indicator.ores(), indicator.users());
        if books.len() != u_count {
            return Err(Error::Codebook(format!(
                "expected {u_count} books, got {}",
                books.len()
            )));
        }
        let m_count = books
            .first()
            .and_then(|b| b.first())
            .map(Vec::len)
            .unwrap_or(0);
        if m_count == 0 {
            return Err(Error::Codebook("codebooks have no codewords".into()));
        }
        for (u, book) in books.iter().enumerate() {
            if book.len() != r_count || book.iter().any(|row| row.len() != m_count) {
                return Err(Error::Codebook(format!(
                    "book of user {} is not {r_count} x {m_count}",
                    u + 1
                )));
            }
            for (r, row) in book.iter().enumerate() {
                for (m, c) in row.iter().enumerate() {
                    if !c.re.is_finite() || !c.im.is_finite() {
                        return Err(Error::Codebook(format!(
                            "non-finite entry at user {} ORE {} codeword {}",
                            u + 1,
                            r + 1,
                            m + 1
                        )));
                    }
                    let occupied = indicator.get(r, u);
                    if occupied && c.norm_sqr() == 0.0 {
                        return Err(Error::Codebook(format!(
                            "zero entry at user {} ORE {} codeword {} where F is 1",
                            u + 1,
                            r + 1,
                            m + 1
                        )));
                    }
                    if !occupied && c.norm_sqr() != 0.0 {
                        return Err(Error::Codebook(format!(
                            "non-zero entry at user {} ORE {} codeword {} where F is 0",
                            u + 1,
                            r + 1,
                            m + 1
                        )));
                    }
                }
            }
        }
        for (u, book) in books.iter_mut().enumerate() {
            let energy = average_energy(book);
            if (energy - 1.0).abs() > ENERGY_TOLERANCE {
                log::warn!(
                    "codebook of user {} has average energy {energy}, renormalizing to 1",
                    u + 1
                );
                let scale = energy.sqrt().recip();
                book.iter_mut().flatten().for_each(|c| *c *= scale);
            }
        }
        Ok(CodebookSet { indicator, books })
    }

    /// Text of the shipped default codebook file for `codewords`.
    pub fn default_text(codewords: usize) -> Option<&'static str> {
        match codewords {
            2 => Some(DEFAULT_M2),
            4 => Some(DEFAULT_M4),
            _ => None,
        }
    }

    /// Shipped default codebooks for the reference indicator matrix.
    pub fn default_for(codewords: usize) -> Result<Self> {
        match codewords {
            2 => Self::from_json_str(DEFAULT_M2, "default_m2.json"),
            4 => Self::from_json_str(DEFAULT_M4, "default_m4.json"),
            m => Err(Error::Codebook(format!(
                "no default codebook for M = {m} (available: 2, 4)"
            ))),
        }
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let file: CodebookFile = serde_json::from_str(text).map_err(|source| Error::Parse {
            path: origin.to_string(),
            source,
        })?;
        let indicator = IndicatorMatrix::new(file.indicator)?;
        if indicator.users() != file.users || indicator.ores() != file.ores {
            return Err(Error::Codebook(format!(
                "F is {} x {} but header says R = {}, U = {}",
                indicator.ores(),
                indicator.users(),
                file.ores,
                file.users
            )));
        }
        let books: Vec<Vec<Vec<Complex64>>> = file
            .books
            .into_iter()
            .map(|book| {
                book.into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|[re, im]| Complex64::new(re, im))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let set = CodebookSet::new(indicator, books)?;
        if set.codewords() != file.codewords {
            return Err(Error::Codebook(format!(
                "header says M = {} but books have {} codewords",
                file.codewords,
                set.codewords()
            )));
        }
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    pub fn to_json_string(&self) -> String {
        let file = CodebookFile {
            users: self.users(),
            ores: self.ores(),
            codewords: self.codewords(),
            indicator: self.indicator.rows().to_vec(),
            books: self
                .books
                .iter()
                .map(|book| {
                    book.iter()
                        .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("codebook serializes")
    }

    pub fn indicator(&self) -> &IndicatorMatrix {
        &self.indicator
    }

    pub fn users(&self) -> usize {
        self.books.len()
    }

    pub fn ores(&self) -> usize {
        self.indicator.ores()
    }

    pub fn codewords(&self) -> usize {
        self.books[0][0].len()
    }

    /// `c_m^{r,u}`.
    #[inline]
    pub fn entry(&self, user: usize, ore: usize, codeword: usize) -> Complex64 {
        self.books[user][ore][codeword]
    }

    /// Codeword `m` of user `u` as an R-vector.
    pub fn codeword(&self, user: usize, codeword: usize) -> Vec<Complex64> {
        self.books[user].iter().map(|row| row[codeword]).collect()
    }

    pub fn average_energy(&self, user: usize) -> f64 {
        average_energy(&self.books[user])
    }
}

fn average_energy(book: &[Vec<Complex64>]) -> f64 {
    let m = book[0].len() as f64;
    book.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>() / m
}

/// Builds the default codebooks: an `M`-PSK base constellation offset by
/// π/4 (QPSK for `M = 4`), rotated per ORE by a phase that depends on the
/// ORE and the user's slot in `Λ_r`, then scaled to unit energy.
pub fn generate_default_codebooks(indicator: &IndicatorMatrix, codewords: usize) -> CodebookSet {
    use std::f64::consts::PI;
    let graph = derive_factor_graph(indicator);
    let d_f = indicator.d_f() as f64;
    let scale = (indicator.d_v() as f64).sqrt().recip();
    let base: Vec<Complex64> = (0..codewords)
        .map(|m| Complex64::from_polar(1.0, PI / 4.0 + 2.0 * PI * m as f64 / codewords as f64))
        .collect();
    let books = (0..indicator.users())
        .map(|u| {
            (0..indicator.ores())
                .map(|r| match graph.slot(r, u) {
                    Some(slot) => {
                        let phase = PI / 2.0 * slot as f64 / d_f + PI / 7.0 * r as f64;
                        let rot = Complex64::from_polar(scale, phase);
                        base.iter().map(|b| b * rot).collect()
                    }
                    None => vec![Complex64::new(0.0, 0.0); codewords],
                })
                .collect()
        })
        .collect();
    CodebookSet::new(indicator.clone(), books).expect("generated codebooks are valid")
}

/// A validated, immutable bundle of configuration, codebooks and index sets.
#[derive(Clone, Debug)]
pub struct System {
    cfg: SystemConfig,
    codebooks: CodebookSet,
    graph: FactorGraph,
}

impl System {
    pub fn new(cfg: SystemConfig, codebooks: CodebookSet) -> Result<Self> {
        cfg.validate()?;
        Self::new_relaxed(cfg, codebooks)
    }

    /// Like [`System::new`] but admits non-overloaded (`U <= R`) systems,
    /// which are useful as degenerate test cases.
    pub fn new_relaxed(cfg: SystemConfig, codebooks: CodebookSet) -> Result<Self> {
        cfg.validate_structure()?;
        if codebooks.users() != cfg.users {
            return Err(Error::config(
                "U",
                format!(
                    "config has {} users, codebook has {}",
                    cfg.users,
                    codebooks.users()
                ),
            ));
        }
        if codebooks.ores() != cfg.ores {
            return Err(Error::config(
                "R",
                format!(
                    "config has {} OREs, codebook has {}",
                    cfg.ores,
                    codebooks.ores()
                ),
            ));
        }
        if codebooks.codewords() != cfg.codewords {
            return Err(Error::config(
                "M",
                format!(
                    "config has {} codewords, codebook has {}",
                    cfg.codewords,
                    codebooks.codewords()
                ),
            ));
        }
        let graph = derive_factor_graph(codebooks.indicator());
        Ok(System {
            cfg,
            codebooks,
            graph,
        })
    }

    /// Resolves the codebook named by the config, or the shipped default.
    pub fn from_config(cfg: SystemConfig) -> Result<Self> {
        let books = match &cfg.codebook {
            Some(path) => CodebookSet::load(path)?,
            None => CodebookSet::default_for(cfg.codewords)?,
        };
        Self::new(cfg, books)
    }

    /// Reference system with the shipped default codebooks.
    pub fn reference(codewords: usize, rx_antennas: usize) -> Self {
        Self::from_config(SystemConfig::reference(codewords, rx_antennas))
            .expect("reference system is valid")
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn codebooks(&self) -> &CodebookSet {
        &self.codebooks
    }

    pub fn graph(&self) -> &FactorGraph {
        &self.graph
    }

    pub fn users(&self) -> usize {
        self.cfg.users
    }

    pub fn ores(&self) -> usize {
        self.cfg.ores
    }

    pub fn rx_antennas(&self) -> usize {
        self.cfg.rx_antennas
    }

    pub fn tx_antennas(&self) -> usize {
        self.cfg.tx_antennas
    }

    pub fn messages_per_user(&self) -> usize {
        self.cfg.messages_per_user()
    }

    pub fn d_f(&self) -> usize {
        self.codebooks.indicator().d_f()
    }

    pub fn d_v(&self) -> usize {
        self.codebooks.indicator().d_v()
    }

    pub fn bits_per_user(&self) -> usize {
        spectral_efficiency(&self.cfg)
    }

    /// Returns a copy with a different config (codebooks unchanged).
    pub fn with_config(&self, cfg: SystemConfig) -> Result<Self> {
        if cfg.users > cfg.ores {
            Self::new(cfg, self.codebooks.clone())
        } else {
            Self::new_relaxed(cfg, self.codebooks.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_efficiency_examples() {
        let mut cfg = SystemConfig::reference(2, 2);
        assert_eq!(spectral_efficiency(&cfg), 3);
        cfg.codewords = 4;
        assert_eq!(spectral_efficiency(&cfg), 4);
        cfg.codewords = 1;
        cfg.tx_antennas = 1;
        assert_eq!(spectral_efficiency(&cfg), 0);
    }

    #[test]
    fn reference_sets() {
        let g = derive_factor_graph(&IndicatorMatrix::reference());
        // 1-based {2,3,5}, {1,3,6}, {2,4,6}, {1,4,5}
        assert_eq!(
            g.lambda,
            vec![vec![1, 2, 4], vec![0, 2, 5], vec![1, 3, 5], vec![0, 3, 4]]
        );
        assert_eq!(g.omega[0], vec![1, 3]);
        let total_lambda: usize = g.lambda.iter().map(Vec::len).sum();
        let total_omega: usize = g.omega.iter().map(Vec::len).sum();
        assert_eq!((total_lambda, total_omega), (12, 12));
        assert_eq!(g.to_indicator().unwrap(), IndicatorMatrix::reference());
    }

    #[test]
    fn identity_graph() {
        let f = IndicatorMatrix::new(vec![vec![1]]).unwrap();
        let g = derive_factor_graph(&f);
        assert_eq!(g.lambda, vec![vec![0]]);
        assert_eq!(g.omega, vec![vec![0]]);
    }

    #[test]
    fn irregular_indicator_rejected() {
        let err = IndicatorMatrix::new(vec![vec![1, 1, 0], vec![0, 1, 1]]).unwrap_err();
        assert!(err.to_string().contains("column"), "{err}");
        assert!(IndicatorMatrix::new(vec![vec![1, 0], vec![1, 1]]).is_err());
        assert!(IndicatorMatrix::new(vec![vec![2, 0], vec![0, 2]]).is_err());
    }

    #[test]
    fn shipped_codebooks_match_generator() {
        for m in [2, 4] {
            let shipped = CodebookSet::default_for(m).unwrap();
            let generated = generate_default_codebooks(&IndicatorMatrix::reference(), m);
            assert_eq!(shipped, generated, "M = {m}");
            assert_eq!(shipped.indicator(), &IndicatorMatrix::reference());
            for u in 0..6 {
                assert!((shipped.average_energy(u) - 1.0).abs() < ENERGY_TOLERANCE);
                for r in 0..4 {
                    for c in 0..m {
                        let nz = shipped.entry(u, r, c).norm_sqr() != 0.0;
                        assert_eq!(nz, IndicatorMatrix::reference().get(r, u));
                    }
                }
            }
        }
    }

    #[test]
    fn codebook_sparsity_violation_rejected() {
        let good = CodebookSet::default_for(4).unwrap();
        let mut books: Vec<Vec<Vec<Complex64>>> = (0..6)
            .map(|u| {
                (0..4)
                    .map(|r| (0..4).map(|m| good.entry(u, r, m)).collect())
                    .collect()
            })
            .collect();
        // user 1 is not on ORE 1
        books[0][0][2] = Complex64::new(0.1, 0.0);
        let err = CodebookSet::new(IndicatorMatrix::reference(), books).unwrap_err();
        assert!(err.to_string().contains("where F is 0"), "{err}");
    }

    #[test]
    fn zero_codeword_rejected() {
        let good = CodebookSet::default_for(2).unwrap();
        let mut books: Vec<Vec<Vec<Complex64>>> = (0..6)
            .map(|u| {
                (0..4)
                    .map(|r| (0..2).map(|m| good.entry(u, r, m)).collect())
                    .collect()
            })
            .collect();
        for row in books[3].iter_mut() {
            row[1] = Complex64::new(0.0, 0.0);
        }
        assert!(CodebookSet::new(IndicatorMatrix::reference(), books).is_err());
    }

    #[test]
    fn non_finite_and_shape_errors() {
        let good = CodebookSet::default_for(2).unwrap();
        let mut text = good.to_json_string();
        let mut books: Vec<Vec<Vec<Complex64>>> = (0..6)
            .map(|u| {
                (0..4)
                    .map(|r| (0..2).map(|m| good.entry(u, r, m)).collect())
                    .collect()
            })
            .collect();
        books[2][0][0] = Complex64::new(f64::NAN, 0.0);
        assert!(CodebookSet::new(IndicatorMatrix::reference(), books.clone()).is_err());
        books.pop();
        assert!(CodebookSet::new(IndicatorMatrix::reference(), books).is_err());
        text = text.replacen("\"M\": 2", "\"M\": 4", 1);
        assert!(CodebookSet::from_json_str(&text, "x").is_err());
    }

    #[test]
    fn renormalizes_scaled_codebook() {
        let good = CodebookSet::default_for(2).unwrap();
        let books: Vec<Vec<Vec<Complex64>>> = (0..6)
            .map(|u| {
                (0..4)
                    .map(|r| (0..2).map(|m| good.entry(u, r, m) * 3.0).collect())
                    .collect()
            })
            .collect();
        let set = CodebookSet::new(IndicatorMatrix::reference(), books).unwrap();
        for u in 0..6 {
            assert!((set.average_energy(u) - 1.0).abs() < ENERGY_TOLERANCE);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = SystemConfig::reference(2, 2);
        cfg.validate().unwrap();
        cfg.tx_antennas = 3;
        assert!(cfg.validate().is_err());
        let mut cfg = SystemConfig::reference(2, 2);
        cfg.rho.pop();
        assert!(matches!(cfg.validate(), Err(Error::Config { ref field, .. }) if field == "rho"));
        let mut cfg = SystemConfig::reference(2, 2);
        cfg.users = 4;
        assert!(cfg.validate().is_err());
        assert!(cfg.validate_structure().is_ok());
    }

    #[test]
    fn config_json_roundtrip_and_survivors() {
        let text = r#"{"U":6,"R":4,"M":2,"N_t":4,"N_r":2,"rho":[35,"all",50],"seed":9}"#;
        let cfg = SystemConfig::from_json_str(text, "inline").unwrap();
        assert_eq!(cfg.rho[1], Survivors::ALL);
        assert_eq!(cfg.mpa_iterations, 5);
        let back: SystemConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let bad = r#"{"U":6,"R":4,"M":2,"N_t":4,"N_r":2,"rho":[1,1,1],"bogus":1}"#;
        assert!(SystemConfig::from_json_str(bad, "inline").is_err());
        assert_eq!(
            parse_rho("15, 50,all").unwrap(),
            vec![Survivors(15), Survivors(50), Survivors::ALL]
        );
    }
}
