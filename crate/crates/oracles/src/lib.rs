//! Reference computations for tests.
//!
//! Everything in here is written from scratch and shares no code path with
//! `gfk-mimo`, so tests can compare the library against an independent route.

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights mapped onto `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Integrates `f` over `[0, 1]` with an `n`-node Gauss-Legendre rule.
pub fn integrate_unit(n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    gauss_legendre_unit(n)
        .into_iter()
        .map(|(x, w)| w * f(x))
        .sum()
}

/// Bessel function of the first kind, order zero, by its power series.
///
/// Accurate to ~1e-14 for |x| <= 10, which covers every lag used in tests.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let hi = (i as f64 + 1.0) / n - f;
            let lo = f - i as f64 / n;
            hi.max(lo)
        })
        .fold(0.0, f64::max)
}

/// Eigenvalues of a real symmetric matrix (row-major, `n*n`) by cyclic Jacobi,
/// sorted descending.
pub fn jacobi_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        let scale: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum::<f64>() + off;
        if off <= 1e-32 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Eigenvalues of a complex Hermitian matrix (row-major) through its real
/// `2n x 2n` embedding. Each eigenvalue of the embedding appears twice; one
/// copy of each is returned, sorted descending.
pub fn hermitian_eigenvalues(n: usize, h: &[Complex64]) -> Vec<f64> {
    assert_eq!(h.len(), n * n);
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[i * n + j];
            a[i * m + j] = z.re;
            a[i * m + n + j] = -z.im;
            a[(n + i) * m + j] = z.im;
            a[(n + i) * m + n + j] = z.re;
        }
    }
    let ev = jacobi_eigenvalues(m, &a);
    ev.into_iter().step_by(2).collect()
}

/// Singular values of a complex `rows x cols` matrix (row-major), descending,
/// via Jacobi eigenvalues of `A^H A`.
pub fn singular_values(rows: usize, cols: usize, a: &[Complex64]) -> Vec<f64> {
    let mut g = vec![Complex64::new(0.0, 0.0); cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..rows {
                acc += a[k * cols + i].conj() * a[k * cols + j];
            }
            g[i * cols + j] = acc;
        }
    }
    hermitian_eigenvalues(cols, &g)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect()
}

/// Solves the SVM dual
/// `max sum(g) - 1/2 g^T Q g`, `Q_ij = y_i y_j K_ij`, `y^T g = 0`, `0 <= g <= c`
/// by enumerating every assignment of each variable to {lower, upper, free}
/// and solving the equality-constrained stationarity system on the free set.
///
/// Exponential in `n`; intended for `n <= 8`. Returns `(objective, gammas)`.
pub fn brute_force_svm_dual(k: &[Vec<f64>], y: &[f64], c: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
    let objective = |g: &[f64]| {
        let mut lin = 0.0;
        let mut quad = 0.0;
        for i in 0..n {
            lin += g[i];
            for j in 0..n {
                quad += g[i] * g[j] * q(i, j);
            }
        }
        lin - 0.5 * quad
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut rem = code;
        for s in state.iter_mut() {
            *s = (rem % 3) as u8;
            rem /= 3;
        }
        let mut g = vec![0.0; n];
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        for i in 0..n {
            if state[i] == 1 {
                g[i] = c;
            }
        }
        if free.is_empty() {
            let eq: f64 = (0..n).map(|i| y[i] * g[i]).sum();
            if eq.abs() > 1e-9 {
                continue;
            }
        } else {
            // Unknowns: g_F (|F|) and the multiplier nu.
            let f = free.len();
            let dim = f + 1;
            let mut a = vec![vec![0.0; dim + 1]; dim];
            for (r, &i) in free.iter().enumerate() {
                for (cc, &j) in free.iter().enumerate() {
                    a[r][cc] = q(i, j);
                }
                a[r][f] = y[i];
                let fixed: f64 = (0..n)
                    .filter(|&j| state[j] != 2)
                    .map(|j| q(i, j) * g[j])
                    .sum();
                a[r][dim] = 1.0 - fixed;
            }
            for (cc, &j) in free.iter().enumerate() {
                a[f][cc] = y[j];
            }
            let fixed_eq: f64 = (0..n).filter(|&j| state[j] != 2).map(|j| y[j] * g[j]).sum();
            a[f][dim] = -fixed_eq;
            let Some(sol) = gauss_solve(a) else { continue };
            let mut ok = true;
            for (r, &i) in free.iter().enumerate() {
                if sol[r] < -1e-10 || sol[r] > c + 1e-10 {
                    ok = false;
                    break;
                }
                g[i] = sol[r].clamp(0.0, c);
            }
            if !ok {
                continue;
            }
        }
        let obj = objective(&g);
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, g));
        }
    }
    best.expect("gamma = 0 is always feasible")
}

fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r][col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                    *x -= f * p;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}
