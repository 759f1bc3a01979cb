//! Temporally correlated Rayleigh fading after Clarke's isotropic-scattering
//! model, synthesised as a sum of sinusoids.
//!
//! Every entry of `H_t` is an independent process
//!
//! ```text
//! h(t) = K^{-1/2} * sum_k exp(j * (2 pi fd_ts t cos(alpha_k) + phi_k))
//! ```
//!
//! with arrival angles `alpha_k` and phases `phi_k` drawn uniformly on
//! `[0, 2 pi)`. Averaged over the random angles the autocorrelation is exactly
//! `J0(2 pi fd_ts lag)` and `E|h|^2 = 1`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, mismatch, Result};
use crate::linalg::{ComplexMatrix, C64};

pub const DEFAULT_OSCILLATORS: usize = 32;
/// Minimum oscillator count for an acceptable Rayleigh approximation.
pub const MIN_OSCILLATORS: usize = 8;

const MPH_AT_REFERENCE: f64 = 66.0;
const FDTS_AT_REFERENCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingConfig {
    fd_ts: f64,
    oscillators: usize,
    seed: u64,
}

impl FadingConfig {
    pub fn new(fd_ts: f64, oscillators: usize, seed: u64) -> Result<Self> {
        if !(0.0..0.5).contains(&fd_ts) {
            return Err(invalid(format!(
                "normalized Doppler must lie in [0, 0.5) to avoid aliasing, got {fd_ts}"
            )));
        }
        if oscillators < MIN_OSCILLATORS {
            return Err(invalid(format!(
                "need at least {MIN_OSCILLATORS} oscillators, got {oscillators}"
            )));
        }
        Ok(Self {
            fd_ts,
            oscillators,
            seed,
        })
    }

    pub fn with_seed(fd_ts: f64, seed: u64) -> Result<Self> {
        Self::new(fd_ts, DEFAULT_OSCILLATORS, seed)
    }

    pub fn fd_ts(&self) -> f64 {
        self.fd_ts
    }

    pub fn oscillators(&self) -> usize {
        self.oscillators
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Sequence of `N x M` channel matrices, one per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    rx: usize,
    tx: usize,
    slots: Vec<ComplexMatrix>,
}

impl ChannelTrace {
    pub fn from_slots(slots: Vec<ComplexMatrix>) -> Result<Self> {
        let first = slots
            .first()
            .ok_or_else(|| invalid("trace needs at least one slot"))?;
        let (rx, tx) = first.shape();
        if rx == 0 || tx == 0 {
            return Err(invalid("antenna counts must be positive"));
        }
        if slots.iter().any(|h| h.shape() != (rx, tx)) {
            return Err(mismatch("all slots must share one shape"));
        }
        Ok(Self { rx, tx, slots })
    }

    /// Static channel `I_{N x M}` (ones on the leading diagonal).
    pub fn identity(rx: usize, tx: usize, slots: usize) -> Self {
        Self {
            rx,
            tx,
            slots: vec![ComplexMatrix::identity(rx, tx); slots],
        }
    }

    pub fn rx_antennas(&self) -> usize {
        self.rx
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, t: usize) -> &ComplexMatrix {
        &self.slots[t]
    }

    pub fn slots(&self) -> &[ComplexMatrix] {
        &self.slots
    }

    /// Same channel matrix at every slot; the CSI a receiver holds when it
    /// reuses one estimate across a frame.
    pub fn held(h: ComplexMatrix, slots: usize) -> Self {
        let (rx, tx) = h.shape();
        Self {
            rx,
            tx,
            slots: vec![h; slots],
        }
    }
}

/// One sum-of-sinusoids fading process.
#[derive(Debug, Clone)]
struct SosProcess {
    // 2 pi fd_ts cos(alpha_k)
    omegas: Vec<f64>,
    phases: Vec<f64>,
    norm: f64,
}

impl SosProcess {
    fn draw<R: Rng + ?Sized>(rng: &mut R, fd_ts: f64, oscillators: usize) -> Self {
        let mut omegas = Vec::with_capacity(oscillators);
        let mut phases = Vec::with_capacity(oscillators);
        for _ in 0..oscillators {
            let alpha: f64 = rng.random::<f64>() * TAU;
            let phi: f64 = rng.random::<f64>() * TAU;
            omegas.push(TAU * fd_ts * alpha.cos());
            phases.push(phi);
        }
        Self {
            omegas,
            phases,
            norm: 1.0 / (oscillators as f64).sqrt(),
        }
    }

    fn at(&self, t: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (w, p) in self.omegas.iter().zip(&self.phases) {
            acc += C64::from_polar(1.0, w * t + p);
        }
        acc * self.norm
    }
}

/// Generates an `N x M` fading trace of `slots` slots.
///
/// Entry processes are drawn in row-major entry order from a ChaCha stream
/// seeded by `config.seed()`, so a trace is a pure function of its inputs.
pub fn generate_trace(
    rx: usize,
    tx: usize,
    config: &FadingConfig,
    slots: usize,
) -> Result<ChannelTrace> {
    if slots == 0 {
        return Err(invalid("trace needs at least one slot"));
    }
    if rx == 0 || tx == 0 {
        return Err(invalid("antenna counts must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let procs: Vec<SosProcess> = (0..rx * tx)
        .map(|_| SosProcess::draw(&mut rng, config.fd_ts, config.oscillators))
        .collect();
    let slots = (0..slots)
        .map(|t| ComplexMatrix::from_fn(rx, tx, |i, j| procs[i * tx + j].at(t as f64)))
        .collect();
    Ok(ChannelTrace { rx, tx, slots })
}

/// Normalized Doppler for a node speed in mph, calibrated so that
/// 66 mph maps to `f_D T_s = 0.01`.
pub fn velocity_to_fdts(mph: f64) -> Result<f64> {
    if !mph.is_finite() || mph < 0.0 {
        return Err(invalid(format!(
            "speed must be finite and nonnegative, got {mph}"
        )));
    }
    Ok(mph * (FDTS_AT_REFERENCE / MPH_AT_REFERENCE))
}
