//! Experiment configuration: a flat `key = value` file, one entry per line,
//! lists comma-separated, `#` starts a comment.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use gfk_mimo::svm::SolverConfig;

use crate::error::{config_err, BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    GfkGsvm,
    Mmse,
    Zf,
    Ml,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::GfkGsvm, Method::Mmse, Method::Zf, Method::Ml];

    pub fn name(self) -> &'static str {
        match self {
            Method::GfkGsvm => "gfk_gsvm",
            Method::Mmse => "mmse",
            Method::Zf => "zf",
            Method::Ml => "ml",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| {
                config_err(format!(
                    "unknown method {s:?} (expected gfk_gsvm, mmse, zf or ml)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub classes: usize,
    pub symbol_len: usize,
    pub dim: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// SNR grid of the SNR sweep.
    pub snr_db: Vec<f64>,
    /// Doppler grid of the Doppler sweep.
    pub fd_ts: Vec<f64>,
    /// Doppler held fixed during the SNR sweep.
    pub snr_sweep_fd_ts: f64,
    /// SNR held fixed during the Doppler sweep.
    pub doppler_sweep_snr_db: f64,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub svm_c: f64,
    pub svm_tol: f64,
    pub svm_max_passes: usize,
    pub mog_seed: u64,
    pub oscillators: usize,
    /// Transduction window for the target subspace; 0 uses the whole test batch.
    pub window: usize,
    /// When false, time columns are written as 0 so output is byte-reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            tx_antennas: 2,
            rx_antennas: 4,
            classes: 12,
            symbol_len: 48,
            dim: 4,
            n_train: 1200,
            n_test: 1000,
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            fd_ts: vec![0.002, 0.004, 0.006, 0.008, 0.010, 0.012, 0.014],
            snr_sweep_fd_ts: 0.006,
            doppler_sweep_snr_db: 15.0,
            seeds: vec![1, 2, 3, 4, 5],
            methods: Method::ALL.to_vec(),
            svm_c: SolverConfig::DEFAULT_C,
            svm_tol: SolverConfig::DEFAULT_TOL,
            svm_max_passes: SolverConfig::DEFAULT_MAX_PASSES,
            mog_seed: 2024,
            oscillators: gfk_mimo::channel::DEFAULT_OSCILLATORS,
            window: 0,
            timing: true,
        }
    }
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| config_err(format!("{key}: cannot parse {v:?}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    items.iter().map(|s| parse_one(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(config_err(format!(
            "{key}: expected true or false, got {v:?}"
        ))),
    }
}

impl ExperimentConfig {
    /// Every accepted key; each has a CLI flag of the same name.
    pub const KEYS: [&'static str; 20] = [
        "tx_antennas",
        "rx_antennas",
        "classes",
        "symbol_len",
        "dim",
        "n_train",
        "n_test",
        "snr_db",
        "fd_ts",
        "snr_sweep_fd_ts",
        "doppler_sweep_snr_db",
        "seeds",
        "methods",
        "svm_c",
        "svm_tol",
        "svm_max_passes",
        "mog_seed",
        "oscillators",
        "window",
        "timing",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "tx_antennas" => self.tx_antennas = parse_one(key, value)?,
            "rx_antennas" => self.rx_antennas = parse_one(key, value)?,
            "classes" => self.classes = parse_one(key, value)?,
            "symbol_len" => self.symbol_len = parse_one(key, value)?,
            "dim" => self.dim = parse_one(key, value)?,
            "n_train" => self.n_train = parse_one(key, value)?,
            "n_test" => self.n_test = parse_one(key, value)?,
            "snr_db" => self.snr_db = parse_list(key, value)?,
            "fd_ts" => self.fd_ts = parse_list(key, value)?,
            "snr_sweep_fd_ts" => self.snr_sweep_fd_ts = parse_one(key, value)?,
            "doppler_sweep_snr_db" => self.doppler_sweep_snr_db = parse_one(key, value)?,
            "seeds" => self.seeds = parse_list(key, value)?,
            "methods" => self.methods = parse_list(key, value)?,
            "svm_c" => self.svm_c = parse_one(key, value)?,
            "svm_tol" => self.svm_tol = parse_one(key, value)?,
            "svm_max_passes" => self.svm_max_passes = parse_one(key, value)?,
            "mog_seed" => self.mog_seed = parse_one(key, value)?,
            "oscillators" => self.oscillators = parse_one(key, value)?,
            "window" => self.window = parse_one(key, value)?,
            "timing" => self.timing = parse_bool(key, value)?,
            _ => return Err(config_err(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(config_err(format!("line {}: duplicate key {key:?}", n + 1)));
            }
            seen.push(key);
            self.set(key, value)
                .map_err(|e| config_err(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the configuration in the file format; `parse` round-trips it.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("tx_antennas", self.tx_antennas.to_string());
        put("rx_antennas", self.rx_antennas.to_string());
        put("classes", self.classes.to_string());
        put("symbol_len", self.symbol_len.to_string());
        put("dim", self.dim.to_string());
        put("n_train", self.n_train.to_string());
        put("n_test", self.n_test.to_string());
        put(
            "snr_db",
            join(self.snr_db.iter().map(f64::to_string).collect()),
        );
        put(
            "fd_ts",
            join(self.fd_ts.iter().map(f64::to_string).collect()),
        );
        put("snr_sweep_fd_ts", self.snr_sweep_fd_ts.to_string());
        put(
            "doppler_sweep_snr_db",
            self.doppler_sweep_snr_db.to_string(),
        );
        put(
            "seeds",
            join(self.seeds.iter().map(u64::to_string).collect()),
        );
        put(
            "methods",
            join(self.methods.iter().map(|m| m.name().to_string()).collect()),
        );
        put("svm_c", self.svm_c.to_string());
        put("svm_tol", self.svm_tol.to_string());
        put("svm_max_passes", self.svm_max_passes.to_string());
        put("mog_seed", self.mog_seed.to_string());
        put("oscillators", self.oscillators.to_string());
        put("window", self.window.to_string());
        put("timing", self.timing.to_string());
        out
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        Ok(SolverConfig::new(
            self.svm_c,
            self.svm_tol,
            self.svm_max_passes,
        )?)
    }

    /// Received row length `N * ceil(L / M)`.
    pub fn row_len(&self) -> usize {
        self.rx_antennas * self.symbol_len.div_ceil(self.tx_antennas.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("tx_antennas", self.tx_antennas),
            ("rx_antennas", self.rx_antennas),
            ("classes", self.classes),
            ("symbol_len", self.symbol_len),
            ("dim", self.dim),
            ("n_train", self.n_train),
            ("n_test", self.n_test),
            ("oscillators", self.oscillators),
        ];
        if let Some((k, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(config_err(format!("{k} must be positive")));
        }
        if self.classes < 2 {
            return Err(config_err("classes must be at least 2"));
        }
        if self.dim > self.row_len() {
            return Err(config_err(format!(
                "dim {} exceeds the row length {}",
                self.dim,
                self.row_len()
            )));
        }
        if self.methods.is_empty() {
            return Err(config_err("methods must not be empty"));
        }
        if self.seeds.is_empty() {
            return Err(config_err("at least one seed is required"));
        }
        if self.snr_db.is_empty() || self.fd_ts.is_empty() {
            return Err(config_err("snr_db and fd_ts grids must not be empty"));
        }
        self.solver()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.row_len(), 96);
        assert_eq!(c.seeds.len(), 5);
        assert_eq!(c.fd_ts.len(), 7);
    }

    #[test]
    fn text_round_trip() {
        let c = ExperimentConfig {
            snr_db: vec![3.5],
            methods: vec![Method::Ml, Method::Mmse],
            timing: false,
            ..ExperimentConfig::default()
        };
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
        for k in ExperimentConfig::KEYS {
            assert!(c.to_text().contains(&format!("{k} = ")), "{k}");
        }
    }

    #[test]
    fn parse_errors() {
        assert!(ExperimentConfig::parse("methods =\n").is_err());
        assert!(ExperimentConfig::parse("bogus = 1\n").is_err());
        assert!(ExperimentConfig::parse("dim = 1\ndim = 2\n").is_err());
        assert!(ExperimentConfig::parse("dim\n").is_err());
        assert!(ExperimentConfig::parse("methods = svm\n").is_err());
        assert!(ExperimentConfig::parse("n_test = 0\n").is_err());
        let c = ExperimentConfig::parse("# comment\n\nseeds = 7, 8 # trailing\n").unwrap();
        assert_eq!(c.seeds, vec![7, 8]);
    }
}
