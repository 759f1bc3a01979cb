use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use gfk_bench::experiment::{
    doppler_cells, run_cell, run_cells, snr_cells, write_predictions, write_results, Cell, ModelIo,
    Outcome,
};
use gfk_bench::scaling::bench_scaling;
use gfk_bench::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(
    name = "gfk-bench",
    version,
    about = "Run GFK MIMO detection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// SER against SNR at the configured fixed Doppler.
    SweepSnr(SweepArgs),
    /// SER against normalized Doppler at the configured fixed SNR.
    SweepDoppler(SweepArgs),
    /// One (snr, fd_ts, seed) cell for the selected methods.
    RunCell(CellArgs),
    /// Timing of kernel construction and Gram-row evaluation.
    BenchScaling {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// Config overrides; each flag mirrors the config key of the same name.
#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, alias = "tx_antennas")]
    tx_antennas: Option<String>,
    #[arg(long, alias = "rx_antennas")]
    rx_antennas: Option<String>,
    #[arg(long)]
    classes: Option<String>,
    #[arg(long, alias = "symbol_len")]
    symbol_len: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long, alias = "n_train")]
    n_train: Option<String>,
    #[arg(long, alias = "n_test")]
    n_test: Option<String>,
    #[arg(long = "snr-db", alias = "snr_db", allow_hyphen_values = true)]
    snr_db_list: Option<String>,
    #[arg(long = "fd-ts", alias = "fd_ts")]
    fd_ts_list: Option<String>,
    #[arg(long, alias = "snr_sweep_fd_ts")]
    snr_sweep_fd_ts: Option<String>,
    #[arg(long, alias = "doppler_sweep_snr_db", allow_hyphen_values = true)]
    doppler_sweep_snr_db: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long, alias = "svm_c")]
    svm_c: Option<String>,
    #[arg(long, alias = "svm_tol")]
    svm_tol: Option<String>,
    #[arg(long, alias = "svm_max_passes")]
    svm_max_passes: Option<String>,
    #[arg(long, alias = "mog_seed")]
    mog_seed: Option<String>,
    #[arg(long)]
    oscillators: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    timing: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("tx_antennas", &self.tx_antennas),
            ("rx_antennas", &self.rx_antennas),
            ("classes", &self.classes),
            ("symbol_len", &self.symbol_len),
            ("dim", &self.dim),
            ("n_train", &self.n_train),
            ("n_test", &self.n_test),
            ("snr_db", &self.snr_db_list),
            ("fd_ts", &self.fd_ts_list),
            ("snr_sweep_fd_ts", &self.snr_sweep_fd_ts),
            ("doppler_sweep_snr_db", &self.doppler_sweep_snr_db),
            ("seeds", &self.seeds),
            ("methods", &self.methods),
            ("svm_c", &self.svm_c),
            ("svm_tol", &self.svm_tol),
            ("svm_max_passes", &self.svm_max_passes),
            ("mog_seed", &self.mog_seed),
            ("oscillators", &self.oscillators),
            ("window", &self.window),
            ("timing", &self.timing),
        ]
    }
}

#[derive(Args, Debug)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Results CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-sample predictions next to the results.
    #[arg(long)]
    dump_predictions: bool,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CellArgs {
    #[command(flatten)]
    common: Common,
    #[arg(
        long = "cell-snr-db",
        default_value_t = 15.0,
        allow_hyphen_values = true
    )]
    cell_snr_db: f64,
    #[arg(long = "cell-fd-ts", default_value_t = 0.01)]
    cell_fd_ts: f64,
    #[arg(long = "cell-seed", default_value_t = 1)]
    cell_seed: u64,
    /// Write the fitted detector to this directory.
    #[arg(long)]
    save_model: Option<PathBuf>,
    /// Classify with a previously saved detector instead of fitting.
    #[arg(long)]
    load_model: Option<PathBuf>,
}

fn load_config(common: &Common) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &common.config {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_text(&text)
            .with_context(|| format!("in {}", path.display()))?;
    }
    for (key, value) in common.overrides.pairs() {
        if let Some(v) = value {
            cfg.set(key, v)
                .with_context(|| format!("--{}", key.replace('_', "-")))?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn predictions_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".predictions.csv");
    PathBuf::from(s)
}

fn emit(common: &Common, outcomes: &[Outcome]) -> anyhow::Result<()> {
    if outcomes.is_empty() {
        bail!("no results to write");
    }
    let rows: Vec<_> = outcomes.iter().map(|o| o.row.clone()).collect();
    match &common.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_results(BufWriter::new(f), &rows)?;
            if common.dump_predictions {
                let p = predictions_path(path);
                let f = File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                write_predictions(BufWriter::new(f), outcomes)?;
            }
        }
        None => {
            write_results(io::stdout().lock(), &rows)?;
            if common.dump_predictions {
                bail!("--dump-predictions needs --out");
            }
        }
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::SweepSnr(a) => {
            let cfg = load_config(&a.common)?;
            let out = run_cells(&cfg, &snr_cells(&cfg), a.common.threads)?;
            emit(&a.common, &out)
        }
        Command::SweepDoppler(a) => {
            let cfg = load_config(&a.common)?;
            let out = run_cells(&cfg, &doppler_cells(&cfg), a.common.threads)?;
            emit(&a.common, &out)
        }
        Command::RunCell(a) => {
            let cfg = load_config(&a.common)?;
            let cell = Cell {
                snr_db: a.cell_snr_db,
                fd_ts: a.cell_fd_ts,
                seed: a.cell_seed,
            };
            let io = ModelIo {
                save: a.save_model,
                load: a.load_model,
            };
            let out = run_cell(&cfg, cell, &io)?;
            emit(&a.common, &out)
        }
        Command::BenchScaling { seed } => {
            let r = bench_scaling(seed)?;
            let mut w = io::stdout().lock();
            writeln!(w, "series,size,seconds")?;
            for p in &r.kernel {
                writeln!(w, "build_kernel,{},{:.6e}", p.size, p.seconds)?;
            }
            for p in &r.gram_row {
                writeln!(w, "gram_row,{},{:.6e}", p.size, p.seconds)?;
            }
            eprintln!("build_kernel exponent in L': {:.3}", r.kernel_exponent);
            eprintln!("gram_row exponent in N: {:.3}", r.gram_row_exponent);
            Ok(())
        }
    }
}
