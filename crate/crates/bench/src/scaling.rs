//! Wallclock scaling of kernel construction and Gram-row evaluation.

use std::hint::black_box;
use std::time::Instant;

use gfk_mimo::gfk::{build_kernel, gram_matrix};
use gfk_mimo::grassmann::{geodesic, SubspaceBasis};
use gfk_mimo::linalg::{random_complex, random_orthonormal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub size: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub kernel: Vec<ScalingPoint>,
    pub kernel_exponent: f64,
    pub gram_row: Vec<ScalingPoint>,
    pub gram_row_exponent: f64,
}

/// Least-squares slope of `log t` against `log size`.
pub fn power_law_exponent(points: &[ScalingPoint]) -> f64 {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p.size as f64).ln(), p.seconds.max(1e-12).ln()))
        .collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Best of `reps` timings, each averaging `inner` calls.
fn time_best(reps: usize, inner: usize, mut f: impl FnMut()) -> f64 {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..inner {
                f();
            }
            t.elapsed().as_secs_f64() / inner as f64
        })
        .fold(f64::INFINITY, f64::min)
}

/// Time to build F from a precomputed path at each ambient size.
pub fn time_build_kernel(sizes: &[usize], dim: usize, seed: u64) -> Result<Vec<ScalingPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&l| {
            let sr = SubspaceBasis::new(random_orthonormal(&mut rng, l, dim))?;
            let ss = SubspaceBasis::new(random_orthonormal(&mut rng, l, dim))?;
            let path = geodesic(&sr, &ss)?;
            let inner = (4 * 192 * 192 / (l * l)).max(1);
            let seconds = time_best(5, inner, || {
                black_box(build_kernel(black_box(&path)));
            });
            Ok(ScalingPoint { size: l, seconds })
        })
        .collect()
}

/// Time for one test row's kernel values against `n` training rows, as the
/// receive antenna count `N` grows with `slots` slots per frame.
pub fn time_gram_row(
    antennas: &[usize],
    slots: usize,
    n: usize,
    dim: usize,
    seed: u64,
) -> Result<Vec<ScalingPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    antennas
        .iter()
        .map(|&na| {
            let l = na * slots;
            let sr = SubspaceBasis::new(random_orthonormal(&mut rng, l, dim))?;
            let ss = SubspaceBasis::new(random_orthonormal(&mut rng, l, dim))?;
            let f = build_kernel(&geodesic(&sr, &ss)?);
            let train = random_complex(&mut rng, n, l);
            let x = random_complex(&mut rng, 1, l);
            let inner = (8 * 16 / na).max(1);
            let seconds = time_best(5, inner, || {
                black_box(gram_matrix(&f, black_box(&x), &train).map(|_| ()).ok());
            });
            Ok(ScalingPoint { size: na, seconds })
        })
        .collect()
}

pub fn bench_scaling(seed: u64) -> Result<ScalingReport> {
    let kernel = time_build_kernel(&[48, 96, 192], 4, seed)?;
    let gram_row = time_gram_row(&[2, 4, 8, 16], 24, 1200, 4, seed.wrapping_add(1))?;
    Ok(ScalingReport {
        kernel_exponent: power_law_exponent(&kernel),
        gram_row_exponent: power_law_exponent(&gram_row),
        kernel,
        gram_row,
    })
}
