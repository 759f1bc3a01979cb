use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use gfk_mimo::dataset::{
    build_domain_dataset, frame_seed, sample_symbols, DomainConfig, DomainData, MogModel,
};
use gfk_mimo::detector::{
    detect_baseline, gfk_gsvm_classify, gfk_gsvm_fit, gfk_gsvm_windowed, ser, Baseline, CsiPolicy,
    DetectorModel,
};
use gfk_mimo::signal::SymbolAlphabet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Method};
use crate::error::{config_err, BenchError, Result};

const SEGMENT_TRAIN: u64 = 0;
const SEGMENT_TEST: u64 = 1;
const STREAM_SYMBOLS: u64 = 2;

pub const RESULTS_HEADER: [&str; 8] = [
    "method",
    "snr_db",
    "fd_ts",
    "seed",
    "ser",
    "n_test",
    "fit_seconds",
    "classify_seconds",
];

/// One point of a sweep, shared by every method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub snr_db: f64,
    pub fd_ts: f64,
    pub seed: u64,
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "snr={} fd_ts={} seed={}",
            self.snr_db, self.fd_ts, self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub snr_db: f64,
    pub fd_ts: f64,
    pub seed: u64,
    pub ser: f64,
    pub n_test: usize,
    pub fit_seconds: f64,
    pub classify_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub row: ResultRow,
    pub predictions: Vec<usize>,
    pub truth: Vec<usize>,
}

/// Where `run-cell` persists or restores the fitted detector.
#[derive(Debug, Clone, Default)]
pub struct ModelIo {
    pub save: Option<PathBuf>,
    pub load: Option<PathBuf>,
}

/// Received data for one cell. The training domain is only built when a
/// learned method needs it.
#[derive(Debug)]
pub struct CellData {
    pub cell: Cell,
    pub train: Option<DomainData>,
    pub test: DomainData,
    pub alphabet: SymbolAlphabet,
}

impl CellData {
    pub fn build(cfg: &ExperimentConfig, cell: Cell, with_train: bool) -> Result<Self> {
        let wrap = |source| BenchError::Cell {
            cell: cell.to_string(),
            source,
        };
        let mog = MogModel::generate(cfg.classes, cfg.symbol_len, cfg.mog_seed).map_err(wrap)?;
        let domain = |segment: u64, n: usize| -> gfk_mimo::Result<DomainData> {
            let mut rng =
                ChaCha8Rng::seed_from_u64(frame_seed(cell.seed, segment, u64::MAX, STREAM_SYMBOLS));
            let symbols = sample_symbols(&mog, n, &mut rng)?;
            let mut dc = DomainConfig::new(cell.snr_db, cell.fd_ts, segment, cell.seed);
            dc.oscillators = cfg.oscillators;
            build_domain_dataset(&symbols, &dc, cfg.tx_antennas, cfg.rx_antennas)
        };
        let train = if with_train {
            Some(domain(SEGMENT_TRAIN, cfg.n_train).map_err(wrap)?)
        } else {
            None
        };
        let test = domain(SEGMENT_TEST, cfg.n_test).map_err(wrap)?;
        Ok(Self {
            cell,
            train,
            test,
            alphabet: mog.alphabet(),
        })
    }
}

fn baseline_of(method: Method) -> Option<Baseline> {
    match method {
        Method::GfkGsvm => None,
        Method::Mmse => Some(Baseline::Mmse(CsiPolicy::Stale)),
        Method::Zf => Some(Baseline::Zf(CsiPolicy::Stale)),
        Method::Ml => Some(Baseline::Ml),
    }
}

pub fn run_method(
    cfg: &ExperimentConfig,
    method: Method,
    data: &CellData,
    io: &ModelIo,
) -> Result<Outcome> {
    let cell = data.cell;
    let wrap = |source| BenchError::Cell {
        cell: cell.to_string(),
        source,
    };
    let test = &data.test.set;
    let (predictions, fit, classify) = match baseline_of(method) {
        Some(b) => {
            let t = Instant::now();
            let p = detect_baseline(b, &data.test, &data.alphabet).map_err(wrap)?;
            (p, 0.0, t.elapsed().as_secs_f64())
        }
        None => {
            let solver = cfg.solver()?;
            if cfg.window > 0 && io.save.is_none() && io.load.is_none() {
                let train = data
                    .train
                    .as_ref()
                    .ok_or_else(|| config_err("training domain was not built"))?;
                let t = Instant::now();
                let p = gfk_gsvm_windowed(
                    &train.set,
                    test.rows(),
                    cfg.window,
                    cfg.dim,
                    cfg.classes,
                    &solver,
                )
                .map_err(wrap)?;
                (p, 0.0, t.elapsed().as_secs_f64())
            } else {
                let t = Instant::now();
                let model = match &io.load {
                    Some(dir) => DetectorModel::load(dir).map_err(wrap)?,
                    None => {
                        let train = data
                            .train
                            .as_ref()
                            .ok_or_else(|| config_err("training domain was not built"))?;
                        gfk_gsvm_fit(&train.set, test.rows(), cfg.dim, cfg.classes, &solver)
                            .map_err(wrap)?
                    }
                };
                let fit = t.elapsed().as_secs_f64();
                if !model.svm().converged() {
                    log::warn!("{cell}: SVM hit the iteration cap before reaching tolerance");
                }
                if let Some(dir) = &io.save {
                    model.save(dir).map_err(wrap)?;
                }
                let t = Instant::now();
                let p = gfk_gsvm_classify(&model, test.rows()).map_err(wrap)?;
                (p, fit, t.elapsed().as_secs_f64())
            }
        }
    };
    let truth = test.labels().to_vec();
    let s = ser(&predictions, &truth).map_err(wrap)?;
    let (fit_seconds, classify_seconds) = if cfg.timing {
        (fit, classify)
    } else {
        (0.0, 0.0)
    };
    log::info!("{method} {cell}: ser={s:.4}");
    Ok(Outcome {
        row: ResultRow {
            method,
            snr_db: cell.snr_db,
            fd_ts: cell.fd_ts,
            seed: cell.seed,
            ser: s,
            n_test: truth.len(),
            fit_seconds,
            classify_seconds,
        },
        predictions,
        truth,
    })
}

/// Every configured method on one cell, sharing the generated data.
pub fn run_cell(cfg: &ExperimentConfig, cell: Cell, io: &ModelIo) -> Result<Vec<Outcome>> {
    let data = CellData::build(
        cfg,
        cell,
        cfg.methods.contains(&Method::GfkGsvm) && io.load.is_none(),
    )?;
    cfg.methods
        .iter()
        .map(|&m| run_method(cfg, m, &data, io))
        .collect()
}

pub fn snr_cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    cfg.snr_db
        .iter()
        .flat_map(|&snr_db| cfg.seeds.iter().map(move |&seed| (snr_db, seed)))
        .map(|(snr_db, seed)| Cell {
            snr_db,
            fd_ts: cfg.snr_sweep_fd_ts,
            seed,
        })
        .collect()
}

pub fn doppler_cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    cfg.fd_ts
        .iter()
        .flat_map(|&fd_ts| cfg.seeds.iter().map(move |&seed| (fd_ts, seed)))
        .map(|(fd_ts, seed)| Cell {
            snr_db: cfg.doppler_sweep_snr_db,
            fd_ts,
            seed,
        })
        .collect()
}

/// Runs cells in parallel; `threads == 0` lets rayon choose. Output order is
/// independent of scheduling.
pub fn run_cells(cfg: &ExperimentConfig, cells: &[Cell], threads: usize) -> Result<Vec<Outcome>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| config_err(format!("thread pool: {e}")))?;
    let nested: Vec<Vec<Outcome>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&c| run_cell(cfg, c, &ModelIo::default()))
            .collect::<Result<_>>()
    })?;
    let mut out: Vec<Outcome> = nested.into_iter().flatten().collect();
    out.sort_by(|a, b| {
        let (a, b) = (&a.row, &b.row);
        a.method
            .cmp(&b.method)
            .then(a.snr_db.total_cmp(&b.snr_db))
            .then(a.fd_ts.total_cmp(&b.fd_ts))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(out)
}

pub fn write_results<W: Write>(w: W, rows: &[ResultRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(RESULTS_HEADER)?;
    for r in rows {
        wr.write_record([
            r.method.name().to_string(),
            r.snr_db.to_string(),
            r.fd_ts.to_string(),
            r.seed.to_string(),
            r.ser.to_string(),
            r.n_test.to_string(),
            r.fit_seconds.to_string(),
            r.classify_seconds.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_results<R: std::io::Read>(r: R) -> Result<Vec<ResultRow>> {
    let mut rd = csv::Reader::from_reader(r);
    if rd.headers()?.iter().ne(RESULTS_HEADER) {
        return Err(config_err("results file has an unexpected header"));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| config_err(format!("bad number {s:?}")))
    };
    let int = |s: &str| -> Result<u64> {
        s.parse()
            .map_err(|_| config_err(format!("bad integer {s:?}")))
    };
    rd.records()
        .map(|rec| {
            let rec = rec?;
            Ok(ResultRow {
                method: rec[0].parse()?,
                snr_db: num(&rec[1])?,
                fd_ts: num(&rec[2])?,
                seed: int(&rec[3])?,
                ser: num(&rec[4])?,
                n_test: int(&rec[5])? as usize,
                fit_seconds: num(&rec[6])?,
                classify_seconds: num(&rec[7])?,
            })
        })
        .collect()
}

pub fn write_predictions<W: Write>(w: W, outcomes: &[Outcome]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "method",
        "snr_db",
        "fd_ts",
        "seed",
        "index",
        "label",
        "prediction",
    ])?;
    for o in outcomes {
        let r = &o.row;
        for (i, (t, p)) in o.truth.iter().zip(&o.predictions).enumerate() {
            wr.write_record([
                r.method.name().to_string(),
                r.snr_db.to_string(),
                r.fd_ts.to_string(),
                r.seed.to_string(),
                i.to_string(),
                t.to_string(),
                p.to_string(),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Median SER over seeds per sweep coordinate for one method.
pub fn median_ser(rows: &[ResultRow], method: Method, by_snr: bool) -> Vec<(f64, f64)> {
    let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
    for r in rows.iter().filter(|r| r.method == method) {
        let x = if by_snr { r.snr_db } else { r.fd_ts };
        match groups.iter_mut().find(|g| g.0 == x) {
            Some(g) => g.1.push(r.ser),
            None => groups.push((x, vec![r.ser])),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    groups.into_iter().map(|(x, v)| (x, median(v))).collect()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Number of adjacent pairs that break the requested monotone direction.
pub fn inversions(series: &[f64], increasing: bool) -> usize {
    series
        .windows(2)
        .filter(|w| if increasing { w[1] < w[0] } else { w[1] > w[0] })
        .count()
}
