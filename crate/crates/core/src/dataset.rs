//! Mixture-of-Gaussians symbol source and channel-distorted domain datasets.

use std::io::{Read, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{generate_trace, ChannelTrace, FadingConfig, DEFAULT_OSCILLATORS};
use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::{complex_gaussian, random_complex, ComplexMatrix, C64};
use crate::signal::{flatten_received, reshape_symbol, transmit, SymbolAlphabet};

#[derive(Debug, Clone, PartialEq)]
pub struct MogModel {
    means: ComplexMatrix,
    component_std: f64,
    weights: Vec<f64>,
}

impl MogModel {
    pub fn new(means: ComplexMatrix, component_std: f64, weights: Vec<f64>) -> Result<Self> {
        // validates distinctness and finiteness of the means
        SymbolAlphabet::new(means.clone())?;
        if !component_std.is_finite() || component_std < 0.0 {
            return Err(invalid(format!(
                "component std must be finite and nonnegative, got {component_std}"
            )));
        }
        if weights.len() != means.nrows() {
            return Err(mismatch(format!(
                "{} weights for {} components",
                weights.len(),
                means.nrows()
            )));
        }
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(invalid("mixture weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self {
            means,
            component_std,
            weights,
        })
    }

    /// Default mixture: unit complex Gaussian means drawn from `seed`, uniform
    /// weights, and a component spread of one tenth of the mean pairwise
    /// distance between means.
    pub fn generate(classes: usize, symbol_len: usize, seed: u64) -> Result<Self> {
        if classes < 2 || symbol_len == 0 {
            return Err(invalid(
                "mixture needs at least 2 classes and a positive symbol length",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means = random_complex(&mut rng, classes, symbol_len);
        let std = 0.1 * mean_pairwise_distance(&means);
        Self::new(means, std, vec![1.0 / classes as f64; classes])
    }

    pub fn with_component_std(mut self, std: f64) -> Result<Self> {
        if !std.is_finite() || std < 0.0 {
            return Err(invalid(format!(
                "component std must be finite and nonnegative, got {std}"
            )));
        }
        self.component_std = std;
        Ok(self)
    }

    pub fn classes(&self) -> usize {
        self.means.nrows()
    }

    pub fn symbol_len(&self) -> usize {
        self.means.ncols()
    }

    pub fn means(&self) -> &ComplexMatrix {
        &self.means
    }

    pub fn component_std(&self) -> f64 {
        self.component_std
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The means as a detection alphabet.
    pub fn alphabet(&self) -> SymbolAlphabet {
        SymbolAlphabet::new(self.means.clone()).expect("means validated at construction")
    }
}

fn mean_pairwise_distance(means: &ComplexMatrix) -> f64 {
    let z = means.nrows();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..z {
        for b in (a + 1)..z {
            total += (means.row(a) - means.row(b)).norm();
            pairs += 1;
        }
    }
    total / pairs as f64
}

/// Rows of equal length with one class label each.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    rows: ComplexMatrix,
    labels: Vec<usize>,
}

impl LabeledSet {
    pub fn new(rows: ComplexMatrix, labels: Vec<usize>) -> Result<Self> {
        if rows.nrows() != labels.len() {
            return Err(mismatch(format!(
                "{} rows but {} labels",
                rows.nrows(),
                labels.len()
            )));
        }
        Ok(Self { rows, labels })
    }

    pub fn rows(&self) -> &ComplexMatrix {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row_len(&self) -> usize {
        self.rows.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        self.rows.row(i).iter().copied().collect()
    }

    pub fn into_parts(self) -> (ComplexMatrix, Vec<usize>) {
        (self.rows, self.labels)
    }

    /// Largest label plus one, or zero for an empty set.
    pub fn class_bound(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// CSV without header: label, then interleaved real and imaginary parts.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        let mut record = Vec::with_capacity(1 + 2 * self.row_len());
        for (i, label) in self.labels.iter().enumerate() {
            record.clear();
            record.push(label.to_string());
            for z in self.rows.row(i).iter() {
                record.push(z.re.to_string());
                record.push(z.im.to_string());
            }
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
        let mut labels = Vec::new();
        let mut data: Vec<C64> = Vec::new();
        let mut width = None;
        for (line, rec) in reader.records().enumerate() {
            let rec = rec?;
            if rec.len() < 3 || rec.len() % 2 == 0 {
                return Err(Error::Parse(format!(
                    "record {line}: expected label plus re/im pairs"
                )));
            }
            let w = (rec.len() - 1) / 2;
            if *width.get_or_insert(w) != w {
                return Err(Error::Parse(format!("record {line}: row length changes")));
            }
            let label = rec[0]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("record {line}: bad label {:?}", &rec[0])))?;
            labels.push(label);
            for k in 0..w {
                let part = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("record {line}: bad number {s:?}")))
                };
                data.push(C64::new(part(&rec[1 + 2 * k])?, part(&rec[2 + 2 * k])?));
            }
        }
        let w = width.unwrap_or(0);
        let rows = ComplexMatrix::from_row_iterator(labels.len(), w, data);
        Self::new(rows, labels)
    }
}

/// Draws `n` labeled symbols. Each is its component mean plus circular
/// complex Gaussian noise with standard deviation `component_std` per entry.
pub fn sample_symbols<R: Rng + ?Sized>(
    mog: &MogModel,
    n: usize,
    rng: &mut R,
) -> Result<LabeledSet> {
    if n == 0 {
        return Err(invalid("need at least one symbol"));
    }
    let pick =
        WeightedIndex::new(&mog.weights).map_err(|e| invalid(format!("mixture weights: {e}")))?;
    let l = mog.symbol_len();
    let var = mog.component_std * mog.component_std;
    let mut rows = ComplexMatrix::zeros(n, l);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let z = pick.sample(rng);
        for j in 0..l {
            let w = if var > 0.0 {
                complex_gaussian(rng, var)
            } else {
                C64::new(0.0, 0.0)
            };
            rows[(i, j)] = mog.means[(z, j)] + w;
        }
        labels.push(z);
    }
    LabeledSet::new(rows, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Time-varying Rayleigh fading.
    Clarke,
    /// Static `I_{N x M}`, for clean-limit checks.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainConfig {
    pub snr_db: f64,
    pub fd_ts: f64,
    pub segment: u64,
    pub seed: u64,
    pub channel: ChannelKind,
    pub oscillators: usize,
}

impl DomainConfig {
    pub fn new(snr_db: f64, fd_ts: f64, segment: u64, seed: u64) -> Self {
        Self {
            snr_db,
            fd_ts,
            segment,
            seed,
            channel: ChannelKind::Clarke,
            oscillators: DEFAULT_OSCILLATORS,
        }
    }

    /// `(P, noise_var)`: unit noise with `P = 10^(snr/10)`, or `(1, 0)` for an
    /// infinite SNR.
    pub fn power_and_noise(&self) -> Result<(f64, f64)> {
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(invalid(format!(
                "SNR must be finite or +inf, got {}",
                self.snr_db
            )));
        }
        if self.snr_db == f64::INFINITY {
            return Ok((1.0, 0.0));
        }
        let p = 10f64.powf(self.snr_db / 10.0);
        if !p.is_finite() || p <= 0.0 {
            return Err(invalid(format!("SNR {} dB is out of range", self.snr_db)));
        }
        Ok((p, 1.0))
    }
}

const STREAM_CHANNEL: u64 = 0;
const STREAM_NOISE: u64 = 1;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one frame's channel or noise draws.
pub fn frame_seed(seed: u64, segment: u64, index: u64, stream: u64) -> u64 {
    let mut h = splitmix(seed);
    h = splitmix(h ^ segment);
    h = splitmix(h ^ index);
    splitmix(h ^ stream)
}

/// A domain dataset plus the per-frame channels that produced it.
#[derive(Debug, Clone)]
pub struct DomainData {
    pub set: LabeledSet,
    pub traces: Vec<ChannelTrace>,
    pub power: f64,
    pub noise_var: f64,
    pub rx_antennas: usize,
}

/// Passes every symbol through its own channel realization and flattens the
/// received frame into a row of length `N * ceil(L / M)`.
pub fn build_domain_dataset(
    symbols: &LabeledSet,
    domain: &DomainConfig,
    tx_antennas: usize,
    rx_antennas: usize,
) -> Result<DomainData> {
    if symbols.is_empty() {
        return Err(invalid("need at least one symbol"));
    }
    if tx_antennas == 0 || rx_antennas == 0 {
        return Err(invalid("antenna counts must be positive"));
    }
    let (power, noise_var) = domain.power_and_noise()?;
    let slots = symbols.row_len().div_ceil(tx_antennas);
    let width = rx_antennas * slots;
    let mut rows = ComplexMatrix::zeros(symbols.len(), width);
    let mut traces = Vec::with_capacity(symbols.len());
    for i in 0..symbols.len() {
        let frame = reshape_symbol(&symbols.row(i), tx_antennas)?;
        let trace = match domain.channel {
            ChannelKind::Identity => ChannelTrace::identity(rx_antennas, tx_antennas, slots),
            ChannelKind::Clarke => {
                let seed = frame_seed(domain.seed, domain.segment, i as u64, STREAM_CHANNEL);
                let cfg = FadingConfig::new(domain.fd_ts, domain.oscillators, seed)?;
                generate_trace(rx_antennas, tx_antennas, &cfg, slots)?
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(
            domain.seed,
            domain.segment,
            i as u64,
            STREAM_NOISE,
        ));
        let y = transmit(&frame, &trace, power, noise_var, &mut rng)?;
        for (j, v) in flatten_received(&y.y).into_iter().enumerate() {
            rows[(i, j)] = v;
        }
        traces.push(trace);
    }
    Ok(DomainData {
        set: LabeledSet::new(rows, symbols.labels().to_vec())?,
        traces,
        power,
        noise_var,
        rx_antennas,
    })
}
