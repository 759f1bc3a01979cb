//! End-to-end GFK kernel-SVM detector and the classical per-frame baselines.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::channel::ChannelTrace;
use crate::dataset::{DomainData, LabeledSet};
use crate::error::{invalid, mismatch, Error, Result};
use crate::gfk::{build_kernel, gram_matrix, gram_matrix_symmetric, GfkMatrix};
use crate::grassmann::{geodesic, pca_subspace, PrincipalAngles};
use crate::linalg::{ComplexMatrix, C64};
use crate::signal::{
    reshape_symbol, unflatten_received, ReceivedFrame, SymbolAlphabet, TransmitFrame,
};
use crate::svm::{predict, train_multiclass, MulticlassModel, SolverConfig};

/// Trained detector. Classification never modifies it.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    f: GfkMatrix,
    train: LabeledSet,
    svm: MulticlassModel,
    dim: usize,
    angles: Option<PrincipalAngles>,
}

impl DetectorModel {
    pub fn kernel(&self) -> &GfkMatrix {
        &self.f
    }

    pub fn train(&self) -> &LabeledSet {
        &self.train
    }

    pub fn svm(&self) -> &MulticlassModel {
        &self.svm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Principal angles between the two domain subspaces at fit time; not
    /// kept across save/load.
    pub fn angles(&self) -> Option<&PrincipalAngles> {
        self.angles.as_ref()
    }

    /// Writes `kernel.csv`, `train.csv` and `svm.txt` into `dir`.
    ///
    /// `kernel.csv` holds one matrix row per line as interleaved real and
    /// imaginary parts; the first line is `<L'>,<d>`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(File::create(dir.join("kernel.csv"))?);
        let f = self.f.matrix();
        writeln!(w, "{},{}", f.nrows(), self.dim)?;
        for i in 0..f.nrows() {
            let fields: Vec<String> = f
                .row(i)
                .iter()
                .flat_map(|z| [z.re.to_string(), z.im.to_string()])
                .collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        w.flush()?;
        self.train
            .write_csv(BufWriter::new(File::create(dir.join("train.csv"))?))?;
        self.svm
            .save(BufWriter::new(File::create(dir.join("svm.txt"))?))?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join("kernel.csv"))?;
        let mut lines = text.lines();
        let bad = |m: &str| Error::Parse(format!("kernel.csv: {m}"));
        let head: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("empty file"))?
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad("bad header")))
            .collect::<Result<_>>()?;
        let [l, dim] = head[..] else {
            return Err(bad("header needs two fields"));
        };
        let mut data = Vec::with_capacity(l * l);
        for _ in 0..l {
            let nums: Vec<f64> = lines
                .next()
                .ok_or_else(|| bad("too few rows"))?
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| bad("bad number")))
                .collect::<Result<_>>()?;
            if nums.len() != 2 * l {
                return Err(bad("row length"));
            }
            data.extend(nums.chunks(2).map(|p| C64::new(p[0], p[1])));
        }
        let f = GfkMatrix::from_matrix(DMatrix::from_row_iterator(l, l, data))?;
        let train = LabeledSet::read_csv(BufReader::new(File::open(dir.join("train.csv"))?))?;
        let svm = MulticlassModel::load(BufReader::new(File::open(dir.join("svm.txt"))?))?;
        if train.row_len() != l || svm.n_train() != train.len() {
            return Err(mismatch("saved kernel, training set and SVM disagree"));
        }
        Ok(Self {
            f,
            train,
            svm,
            dim,
            angles: None,
        })
    }
}

/// Fits the detector transductively: the target subspace comes from the
/// unlabeled `test_rows`.
pub fn gfk_gsvm_fit(
    train: &LabeledSet,
    test_rows: &ComplexMatrix,
    dim: usize,
    classes: usize,
    config: &SolverConfig,
) -> Result<DetectorModel> {
    if train.is_empty() || test_rows.nrows() == 0 {
        return Err(invalid("training and test sets must be nonempty"));
    }
    if train.row_len() != test_rows.ncols() {
        return Err(mismatch(format!(
            "training rows have length {}, test rows {}",
            train.row_len(),
            test_rows.ncols()
        )));
    }
    let sr = pca_subspace(train.rows(), dim)?;
    let ss = pca_subspace(test_rows, dim)?;
    let path = geodesic(&sr, &ss)?;
    let f = build_kernel(&path);
    let k = gram_matrix_symmetric(&f, train.rows())?;
    let svm = train_multiclass(&k, train.labels(), classes, config)?;
    Ok(DetectorModel {
        f,
        train: train.clone(),
        svm,
        dim,
        angles: Some(path.angles),
    })
}

/// Predicted class for every row of `test`.
pub fn gfk_gsvm_classify(model: &DetectorModel, test: &ComplexMatrix) -> Result<Vec<usize>> {
    if test.ncols() != model.f.ambient() {
        return Err(invalid(format!(
            "test rows have length {}, model expects {}",
            test.ncols(),
            model.f.ambient()
        )));
    }
    if test.nrows() == 0 {
        return Ok(Vec::new());
    }
    let k = gram_matrix(&model.f, test, model.train.rows())?;
    let mut out = Vec::with_capacity(test.nrows());
    let mut row = vec![0.0; k.ncols()];
    for i in 0..k.nrows() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = k[(i, j)];
        }
        out.push(predict(&model.svm, &row)?.0);
    }
    Ok(out)
}

/// Streaming transduction: each block of `window` test rows is classified
/// with a target subspace estimated from that block alone. A short final
/// block borrows the preceding rows so every estimate sees `window` rows.
pub fn gfk_gsvm_windowed(
    train: &LabeledSet,
    test: &ComplexMatrix,
    window: usize,
    dim: usize,
    classes: usize,
    config: &SolverConfig,
) -> Result<Vec<usize>> {
    if window == 0 {
        return Err(invalid("window must be positive"));
    }
    let n = test.nrows();
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let len = window.min(n - start);
        let from = start.min(n.saturating_sub(window));
        let span = window.min(n);
        let model = gfk_gsvm_fit(
            train,
            &test.rows(from, span).into_owned(),
            dim,
            classes,
            config,
        )?;
        out.extend(gfk_gsvm_classify(
            &model,
            &test.rows(start, len).into_owned(),
        )?);
        start += len;
    }
    Ok(out)
}

fn check_frame(y: &ReceivedFrame, est: &ChannelTrace) -> Result<()> {
    if est.rx_antennas() != y.antennas() {
        return Err(mismatch(format!(
            "channel has {} receive antennas, frame has {}",
            est.rx_antennas(),
            y.antennas()
        )));
    }
    if est.len() < y.slots() {
        return Err(mismatch(format!(
            "channel covers {} slots, frame has {}",
            est.len(),
            y.slots()
        )));
    }
    Ok(())
}

/// Pseudo-inverse with singular values below `1e-12 * s_max` truncated.
pub fn pseudo_inverse(h: &ComplexMatrix) -> ComplexMatrix {
    let svd = h.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.pseudo_inverse(1e-12 * smax.max(f64::MIN_POSITIVE))
        .expect("both factors computed")
}

fn regularized_inverse(h: &ComplexMatrix, power: f64, noise_var: f64) -> ComplexMatrix {
    if noise_var == 0.0 {
        return pseudo_inverse(h) / C64::new(power.sqrt(), 0.0);
    }
    let m = h.ncols();
    let gram = h.adjoint() * h + ComplexMatrix::identity(m, m) * C64::new(noise_var / power, 0.0);
    let inv = gram
        .cholesky()
        .expect("regularized Gram is positive definite")
        .inverse();
    inv * h.adjoint() / C64::new(power.sqrt(), 0.0)
}

/// Linear equalization with a per-slot channel estimate, then nearest mean.
fn linear_detect(
    y: &ReceivedFrame,
    est: &ChannelTrace,
    power: f64,
    noise_var: f64,
    alphabet: &SymbolAlphabet,
) -> Result<usize> {
    check_frame(y, est)?;
    if power.is_nan() || power <= 0.0 || noise_var.is_nan() || noise_var < 0.0 {
        return Err(invalid(
            "power must be positive and noise variance nonnegative",
        ));
    }
    let m = est.tx_antennas();
    let t = y.slots();
    if m * t < alphabet.symbol_len() {
        return Err(mismatch("frame is too short for the alphabet"));
    }
    let mut x = ComplexMatrix::zeros(m, t);
    let mut cached: Option<(usize, ComplexMatrix)> = None;
    for s in 0..t {
        let h = est.slot(s);
        // held estimates repeat the same matrix; reuse its equalizer
        let reuse = matches!(&cached, Some((k, _)) if est.slot(*k) == h);
        if !reuse {
            cached = Some((s, regularized_inverse(h, power, noise_var)));
        }
        let w = &cached.as_ref().unwrap().1;
        x.set_column(s, &(w * y.y.column(s)));
    }
    let mut s_hat = TransmitFrame { x, pad: 0 }.padded_symbol();
    s_hat.truncate(alphabet.symbol_len());
    Ok(alphabet.nearest(&s_hat))
}

/// MMSE detection with one channel estimate held over the whole frame.
/// A zero noise variance reduces to zero forcing.
pub fn mmse_detect(
    y: &ReceivedFrame,
    h_est: &ComplexMatrix,
    power: f64,
    noise_var: f64,
    alphabet: &SymbolAlphabet,
) -> Result<usize> {
    linear_detect(
        y,
        &ChannelTrace::held(h_est.clone(), y.slots()),
        power,
        noise_var,
        alphabet,
    )
}

/// MMSE detection with a separate channel estimate for every slot.
pub fn mmse_detect_trace(
    y: &ReceivedFrame,
    est: &ChannelTrace,
    power: f64,
    noise_var: f64,
    alphabet: &SymbolAlphabet,
) -> Result<usize> {
    linear_detect(y, est, power, noise_var, alphabet)
}

pub fn zf_detect(
    y: &ReceivedFrame,
    h_est: &ComplexMatrix,
    power: f64,
    alphabet: &SymbolAlphabet,
) -> Result<usize> {
    mmse_detect(y, h_est, power, 0.0, alphabet)
}

pub fn zf_detect_trace(
    y: &ReceivedFrame,
    est: &ChannelTrace,
    power: f64,
    alphabet: &SymbolAlphabet,
) -> Result<usize> {
    linear_detect(y, est, power, 0.0, alphabet)
}

/// Maximum-likelihood class under perfect per-slot channel knowledge:
/// `argmin_z sum_t |y_t - sqrt(P) H_t x_t(z)|^2`.
pub fn ml_detect(
    y: &ReceivedFrame,
    trace: &ChannelTrace,
    power: f64,
    alphabet: &SymbolAlphabet,
) -> Result<usize> {
    Ok(ml_residuals(y, trace, power, alphabet)?
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (z, &r)| if r < best.1 { (z, r) } else { best },
        )
        .0)
}

/// One residual per class.
pub fn ml_residuals(
    y: &ReceivedFrame,
    trace: &ChannelTrace,
    power: f64,
    alphabet: &SymbolAlphabet,
) -> Result<Vec<f64>> {
    check_frame(y, trace)?;
    let amp = C64::new(power.sqrt(), 0.0);
    (0..alphabet.classes())
        .map(|z| {
            let frame = reshape_symbol(&alphabet.prototype(z), trace.tx_antennas())?;
            if frame.slots() != y.slots() {
                return Err(mismatch("alphabet symbol length does not match the frame"));
            }
            let mut r = 0.0;
            for t in 0..y.slots() {
                let e = y.y.column(t) - trace.slot(t) * frame.x.column(t) * amp;
                r += e.norm_squared();
            }
            Ok(r)
        })
        .collect()
}

/// Channel knowledge handed to a baseline detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsiPolicy {
    /// The first slot's channel, reused for the whole frame.
    Stale,
    /// The true channel at every slot.
    Perfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Mmse(CsiPolicy),
    Zf(CsiPolicy),
    Ml,
}

/// Runs a baseline over every frame of a domain dataset.
pub fn detect_baseline(
    method: Baseline,
    data: &DomainData,
    alphabet: &SymbolAlphabet,
) -> Result<Vec<usize>> {
    let est = |trace: &ChannelTrace, policy: CsiPolicy| match policy {
        CsiPolicy::Perfect => trace.clone(),
        CsiPolicy::Stale => ChannelTrace::held(trace.slot(0).clone(), trace.len()),
    };
    (0..data.set.len())
        .map(|i| {
            let y = ReceivedFrame {
                y: unflatten_received(&data.set.row(i), data.rx_antennas)?,
            };
            let trace = &data.traces[i];
            match method {
                Baseline::Mmse(p) => {
                    linear_detect(&y, &est(trace, p), data.power, data.noise_var, alphabet)
                }
                Baseline::Zf(p) => linear_detect(&y, &est(trace, p), data.power, 0.0, alphabet),
                Baseline::Ml => ml_detect(&y, trace, data.power, alphabet),
            }
        })
        .collect()
}

/// Fraction of mismatched predictions.
pub fn ser(predictions: &[usize], truth: &[usize]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(invalid("symbol error rate of an empty set is undefined"));
    }
    if predictions.len() != truth.len() {
        return Err(mismatch(format!(
            "{} predictions for {} labels",
            predictions.len(),
            truth.len()
        )));
    }
    let wrong = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p != t)
        .count();
    Ok(wrong as f64 / predictions.len() as f64)
}

/// Share of airtime spent on online training: `P / (P + F)`.
pub fn training_overhead(p_time: f64, frame_time: f64) -> Result<f64> {
    if frame_time.is_nan() || frame_time <= 0.0 {
        return Err(invalid(format!(
            "frame time must be positive, got {frame_time}"
        )));
    }
    if p_time.is_nan() || p_time < 0.0 {
        return Err(invalid(format!(
            "training time must be nonnegative, got {p_time}"
        )));
    }
    Ok(p_time / (p_time + frame_time))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub predictions: Vec<usize>,
    pub ser: f64,
    pub n_test: usize,
    pub wallclock: f64,
}

impl DetectionReport {
    pub fn new(predictions: Vec<usize>, truth: &[usize], wallclock: f64) -> Result<Self> {
        let ser = ser(&predictions, truth)?;
        Ok(Self {
            n_test: predictions.len(),
            predictions,
            ser,
            wallclock,
        })
    }
}
