//! Symbol alphabets, transmit/receive frames and the per-slot receive equation
//! `y_t = sqrt(P) H_t x_t + w_t`.

use rand::Rng;

use crate::channel::ChannelTrace;
use crate::error::{invalid, mismatch, Result};
use crate::linalg::{complex_gaussian, ComplexMatrix, C64, ZERO};

/// `Z` distinct length-`L` prototype symbols, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolAlphabet {
    prototypes: ComplexMatrix,
}

impl SymbolAlphabet {
    pub fn new(prototypes: ComplexMatrix) -> Result<Self> {
        let (z, l) = prototypes.shape();
        if z < 2 {
            return Err(invalid(format!(
                "alphabet needs at least 2 classes, got {z}"
            )));
        }
        if l == 0 {
            return Err(invalid("symbol length must be positive"));
        }
        if prototypes
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(invalid("alphabet entries must be finite"));
        }
        for a in 0..z {
            for b in (a + 1)..z {
                if prototypes.row(a) == prototypes.row(b) {
                    return Err(invalid(format!("prototypes {a} and {b} coincide")));
                }
            }
        }
        Ok(Self { prototypes })
    }

    pub fn classes(&self) -> usize {
        self.prototypes.nrows()
    }

    pub fn symbol_len(&self) -> usize {
        self.prototypes.ncols()
    }

    pub fn prototypes(&self) -> &ComplexMatrix {
        &self.prototypes
    }

    pub fn prototype(&self, class: usize) -> Vec<C64> {
        self.prototypes.row(class).iter().copied().collect()
    }

    /// Index of the prototype closest to `s` in Euclidean distance; ties go
    /// to the lowest index.
    pub fn nearest(&self, s: &[C64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for z in 0..self.classes() {
            let d: f64 = self
                .prototypes
                .row(z)
                .iter()
                .zip(s)
                .map(|(p, x)| (p - x).norm_sqr())
                .sum();
            if d < best.1 {
                best = (z, d);
            }
        }
        best.0
    }
}

/// Symbol laid out over `M` antennas and `T` slots (`X` is `M x T`).
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitFrame {
    pub x: ComplexMatrix,
    /// Zeros appended to the symbol tail so that `M * T >= L`.
    pub pad: usize,
}

impl TransmitFrame {
    pub fn antennas(&self) -> usize {
        self.x.nrows()
    }

    pub fn slots(&self) -> usize {
        self.x.ncols()
    }

    /// Concatenation of the rows of `X`: the zero-padded symbol.
    pub fn padded_symbol(&self) -> Vec<C64> {
        flatten_received(&self.x)
    }
}

/// Received block `Y` (`N x T`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    pub y: ComplexMatrix,
}

impl ReceivedFrame {
    pub fn antennas(&self) -> usize {
        self.y.nrows()
    }

    pub fn slots(&self) -> usize {
        self.y.ncols()
    }

    /// Row vector of length `L' = N T`.
    pub fn flat(&self) -> Vec<C64> {
        flatten_received(&self.y)
    }
}

/// Splits `s` into `M` contiguous sub-vectors of length `T = ceil(L / M)`,
/// zero-padding the tail.
pub fn reshape_symbol(s: &[C64], m: usize) -> Result<TransmitFrame> {
    if m == 0 {
        return Err(invalid("transmit antenna count must be positive"));
    }
    if s.is_empty() {
        return Err(invalid("symbol must be nonempty"));
    }
    let t = s.len().div_ceil(m);
    let pad = m * t - s.len();
    let x = ComplexMatrix::from_fn(m, t, |i, j| s.get(i * t + j).copied().unwrap_or(ZERO));
    Ok(TransmitFrame { x, pad })
}

/// Row-major concatenation: `out[i * T + t] = Y[i, t]`.
pub fn flatten_received(y: &ComplexMatrix) -> Vec<C64> {
    let (n, t) = y.shape();
    let mut out = Vec::with_capacity(n * t);
    for i in 0..n {
        out.extend(y.row(i).iter().copied());
    }
    out
}

/// Inverse of [`flatten_received`] for a known antenna count.
pub fn unflatten_received(flat: &[C64], n: usize) -> Result<ComplexMatrix> {
    if n == 0 || !flat.len().is_multiple_of(n) {
        return Err(mismatch(format!(
            "length {} is not a multiple of {n}",
            flat.len()
        )));
    }
    let t = flat.len() / n;
    Ok(ComplexMatrix::from_fn(n, t, |i, j| flat[i * t + j]))
}

/// Sends `frame` through `trace`: column `t` of the result is
/// `sqrt(power) * H_t * x_t + w_t` with `w_t ~ CN(0, noise_var I)`.
pub fn transmit<R: Rng + ?Sized>(
    frame: &TransmitFrame,
    trace: &ChannelTrace,
    power: f64,
    noise_var: f64,
    rng: &mut R,
) -> Result<ReceivedFrame> {
    if !power.is_finite() || power <= 0.0 {
        return Err(invalid(format!(
            "transmit power must be positive and finite, got {power}"
        )));
    }
    if noise_var.is_nan() || noise_var < 0.0 {
        return Err(invalid(format!(
            "noise variance must be nonnegative, got {noise_var}"
        )));
    }
    if trace.tx_antennas() != frame.antennas() {
        return Err(mismatch(format!(
            "trace has {} transmit antennas, frame has {}",
            trace.tx_antennas(),
            frame.antennas()
        )));
    }
    if trace.len() < frame.slots() {
        return Err(mismatch(format!(
            "trace has {} slots, frame needs {}",
            trace.len(),
            frame.slots()
        )));
    }
    let amp = power.sqrt();
    let n = trace.rx_antennas();
    let mut y = ComplexMatrix::zeros(n, frame.slots());
    for t in 0..frame.slots() {
        let col = trace.slot(t) * frame.x.column(t);
        for i in 0..n {
            let w = if noise_var > 0.0 {
                complex_gaussian(rng, noise_var)
            } else {
                ZERO
            };
            y[(i, t)] = col[i] * amp + w;
        }
    }
    Ok(ReceivedFrame { y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelTrace;
    use crate::linalg::random_complex;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ramp(l: usize) -> Vec<C64> {
        (0..l)
            .map(|k| C64::new(k as f64 + 1.0, -(k as f64)))
            .collect()
    }

    #[test]
    fn reference_dimensions() {
        let f = reshape_symbol(&ramp(48), 2).unwrap();
        assert_eq!((f.antennas(), f.slots(), f.pad), (2, 24, 0));
    }

    #[test]
    fn odd_length_is_padded_at_tail() {
        let s = ramp(5);
        let f = reshape_symbol(&s, 2).unwrap();
        assert_eq!((f.slots(), f.pad), (3, 1));
        assert_eq!(f.x[(1, 2)], ZERO);
        assert_eq!(f.x[(0, 0)], s[0]);
        assert_eq!(f.x[(1, 0)], s[3]);
    }

    #[test]
    fn single_antenna_is_identity() {
        let s = ramp(7);
        let f = reshape_symbol(&s, 1).unwrap();
        assert_eq!(f.slots(), 7);
        assert_eq!(f.padded_symbol(), s);
    }

    #[test]
    fn zero_antennas_rejected() {
        assert!(reshape_symbol(&ramp(4), 0).is_err());
    }

    #[test]
    fn flatten_shapes() {
        let y = ComplexMatrix::from_element(4, 24, C64::new(1.0, 0.0));
        assert_eq!(flatten_received(&y).len(), 96);
        let one = ComplexMatrix::from_element(1, 1, C64::new(2.0, 3.0));
        assert_eq!(flatten_received(&one), vec![C64::new(2.0, 3.0)]);
    }

    #[test]
    fn noiseless_identity_channel_scales_symbol() {
        let f = reshape_symbol(&ramp(8), 2).unwrap();
        let trace = ChannelTrace::identity(2, 2, f.slots());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rx = transmit(&f, &trace, 4.0, 0.0, &mut rng).unwrap();
        assert_eq!(rx.y, &f.x * C64::new(2.0, 0.0));
    }

    #[test]
    fn reference_receive_shape() {
        let f = reshape_symbol(&ramp(48), 2).unwrap();
        let trace = ChannelTrace::identity(4, 2, 24);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rx = transmit(&f, &trace, 1.0, 1.0, &mut rng).unwrap();
        assert_eq!(rx.y.shape(), (4, 24));
        assert_eq!(rx.flat().len(), 96);
    }

    #[test]
    fn noise_variance_matches() {
        let f = TransmitFrame {
            x: ComplexMatrix::zeros(2, 100),
            pad: 0,
        };
        let trace = ChannelTrace::identity(2, 2, 100);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sigma2 = 0.7;
        let mut acc = 0.0;
        let mut count = 0usize;
        for _ in 0..50 {
            let rx = transmit(&f, &trace, 1.0, sigma2, &mut rng).unwrap();
            acc += rx.y.iter().map(|z| z.norm_sqr()).sum::<f64>();
            count += rx.y.len();
        }
        // 10^4 draws.
        let var = acc / count as f64;
        assert!((var - sigma2).abs() / sigma2 < 0.03, "var = {var}");
    }

    #[test]
    fn mismatched_trace_rejected() {
        let f = reshape_symbol(&ramp(8), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(transmit(&f, &ChannelTrace::identity(4, 3, 4), 1.0, 0.0, &mut rng).is_err());
        assert!(transmit(&f, &ChannelTrace::identity(4, 2, 3), 1.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn nearest_prototype() {
        let protos = ComplexMatrix::from_row_slice(2, 1, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let a = SymbolAlphabet::new(protos).unwrap();
        assert_eq!(a.nearest(&[C64::new(0.9, 0.0)]), 1);
        assert_eq!(a.nearest(&[C64::new(0.5, 0.0)]), 0);
        let dup = ComplexMatrix::from_element(2, 1, C64::new(1.0, 0.0));
        assert!(SymbolAlphabet::new(dup).is_err());
    }

    proptest! {
        #[test]
        fn reshape_roundtrip(l in 1usize..60, m in 1usize..7, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<C64> = random_complex(&mut rng, 1, l).iter().copied().collect();
            let f = reshape_symbol(&s, m).unwrap();
            prop_assert_eq!(f.pad, m * f.slots() - l);
            let padded = f.padded_symbol();
            prop_assert_eq!(&padded[..l], &s[..]);
            prop_assert!(padded[l..].iter().all(|z| *z == ZERO));
        }

        #[test]
        fn flatten_bijection(n in 1usize..6, t in 1usize..10, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = random_complex(&mut rng, n, t);
            let flat = flatten_received(&y);
            prop_assert_eq!(flat[n * t - 1], y[(n - 1, t - 1)]);
            prop_assert_eq!(unflatten_received(&flat, n).unwrap(), y);
        }

        #[test]
        fn noiseless_transmit_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let trace = ChannelTrace::from_slots((0..5).map(|_| random_complex(&mut rng, 3, 2)).collect()).unwrap();
            let x1 = TransmitFrame { x: random_complex(&mut rng, 2, 5), pad: 0 };
            let x2 = TransmitFrame { x: random_complex(&mut rng, 2, 5), pad: 0 };
            let mix = TransmitFrame { x: &x1.x * C64::new(a, 0.0) + &x2.x * C64::new(b, 0.0), pad: 0 };
            let y1 = transmit(&x1, &trace, 2.5, 0.0, &mut rng).unwrap().y;
            let y2 = transmit(&x2, &trace, 2.5, 0.0, &mut rng).unwrap().y;
            let ym = transmit(&mix, &trace, 2.5, 0.0, &mut rng).unwrap().y;
            let diff = ym - (y1 * C64::new(a, 0.0) + y2 * C64::new(b, 0.0));
            prop_assert!(crate::linalg::max_abs(&diff) < 1e-12);
        }
    }
}
