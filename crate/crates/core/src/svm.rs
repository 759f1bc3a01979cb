//! Kernel SVM on a precomputed Gram matrix.
//!
//! The dual
//!
//! ```text
//! max  sum_l g_l - 1/2 sum_{l,m} g_l g_m y_l y_m K_lm
//! s.t. sum_l g_l y_l = 0,  0 <= g_l <= C
//! ```
//!
//! is solved by two-variable coordinate ascent with maximal-violating-pair
//! selection. Multiclass problems use one machine per class against the rest.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::linalg::RealMatrix;

// Curvature floor for non-positive pair curvature.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    c: f64,
    tol: f64,
    max_passes: usize,
}

impl SolverConfig {
    pub const DEFAULT_C: f64 = 10.0;
    pub const DEFAULT_TOL: f64 = 1e-3;
    pub const DEFAULT_MAX_PASSES: usize = 100;

    pub fn new(c: f64, tol: f64, max_passes: usize) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(invalid(format!("C must be positive and finite, got {c}")));
        }
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(invalid(format!("tol must lie in (0, 1e-2], got {tol}")));
        }
        if max_passes == 0 {
            return Err(invalid("max_passes must be positive"));
        }
        Ok(Self { c, tol, max_passes })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_passes(&self) -> usize {
        self.max_passes
    }

    pub fn with_c(self, c: f64) -> Result<Self> {
        Self::new(c, self.tol, self.max_passes)
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            c: Self::DEFAULT_C,
            tol: Self::DEFAULT_TOL,
            max_passes: Self::DEFAULT_MAX_PASSES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedBinarySvm {
    pub support_indices: Vec<usize>,
    pub multipliers: Vec<f64>,
    pub signs: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
}

impl TrainedBinarySvm {
    /// `sum_l g_l y_l k_row[l] + b` over the supports.
    pub fn decision(&self, k_row: &[f64]) -> f64 {
        let mut acc = self.bias;
        for ((&i, &g), &s) in self
            .support_indices
            .iter()
            .zip(&self.multipliers)
            .zip(&self.signs)
        {
            acc += g * s * k_row[i];
        }
        acc
    }

    pub fn support_count(&self) -> usize {
        self.support_indices.len()
    }
}

fn check_gram(k: &RealMatrix) -> Result<()> {
    if !k.is_square() {
        return Err(invalid(format!(
            "Gram matrix {:?} is not square",
            k.shape()
        )));
    }
    let scale = k.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let n = k.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (k[(i, j)] - k[(j, i)]).abs() > 1e-8 * scale {
                return Err(invalid(format!(
                    "Gram matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    if k.iter().any(|v| !v.is_finite()) {
        return Err(invalid("Gram matrix has non-finite entries"));
    }
    Ok(())
}

/// Coordinate-ascent state for one binary dual problem.
#[derive(Debug, Clone)]
pub struct SmoSolver<'a> {
    k: &'a RealMatrix,
    y: Vec<f64>,
    c: f64,
    tol: f64,
    alpha: Vec<f64>,
    // Gradient of the minimization form: Q alpha - 1.
    grad: Vec<f64>,
    iterations: usize,
}

impl<'a> SmoSolver<'a> {
    pub fn new(k: &'a RealMatrix, y: &[f64], config: &SolverConfig) -> Result<Self> {
        check_gram(k)?;
        if y.len() != k.nrows() {
            return Err(invalid(format!(
                "{} labels for a {}-point Gram matrix",
                y.len(),
                k.nrows()
            )));
        }
        if y.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(invalid("binary labels must be +1 or -1"));
        }
        if !y.iter().any(|&v| v > 0.0) || !y.iter().any(|&v| v < 0.0) {
            return Err(invalid(
                "binary problem needs at least one example of each sign",
            ));
        }
        let n = y.len();
        Ok(Self {
            k,
            y: y.to_vec(),
            c: config.c,
            tol: config.tol,
            alpha: vec![0.0; n],
            grad: vec![-1.0; n],
            iterations: 0,
        })
    }

    fn q(&self, i: usize, j: usize) -> f64 {
        self.y[i] * self.y[j] * self.k[(i, j)]
    }

    /// Maximal violating pair and its KKT gap.
    fn select(&self) -> Option<(usize, usize, f64)> {
        let (mut i, mut up) = (usize::MAX, f64::NEG_INFINITY);
        let (mut j, mut low) = (usize::MAX, f64::INFINITY);
        let c = self.c;
        for (t, ((&y, &g), &a)) in self.y.iter().zip(&self.grad).zip(&self.alpha).enumerate() {
            let v = -y * g;
            let (can_up, can_low) = if y > 0.0 {
                (a < c, a > 0.0)
            } else {
                (a > 0.0, a < c)
            };
            if can_up && (i == usize::MAX || v > up) {
                i = t;
                up = v;
            }
            if can_low && (j == usize::MAX || v < low) {
                j = t;
                low = v;
            }
        }
        if i == usize::MAX || j == usize::MAX {
            return None;
        }
        Some((i, j, up - low))
    }

    /// Current KKT gap; the solver stops once it is at most `tol`.
    pub fn violation(&self) -> f64 {
        self.select().map_or(0.0, |(_, _, gap)| gap.max(0.0))
    }

    /// Dual objective `sum g - 1/2 g^T Q g`.
    pub fn objective(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.grad)
            .map(|(a, g)| 0.5 * a * (1.0 - g))
            .sum()
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.alpha
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Performs one pair update. Returns `false` when already optimal to `tol`.
    pub fn step(&mut self) -> bool {
        let Some((i, j, gap)) = self.select() else {
            return false;
        };
        if gap <= self.tol {
            return false;
        }
        let c = self.c;
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let qij = self.q(i, j);
        let (qii, qjj) = (self.k[(i, i)], self.k[(j, j)]);
        let (ai, aj) = if self.y[i] != self.y[j] {
            let quad = (qii + qjj + 2.0 * qij).max(TAU);
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = old_i - old_j;
            let (mut ai, mut aj) = (old_i + delta, old_j + delta);
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
            (ai, aj)
        } else {
            let quad = (qii + qjj - 2.0 * qij).max(TAU);
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = old_i + old_j;
            let (mut ai, mut aj) = (old_i - delta, old_j + delta);
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
            (ai, aj)
        };
        self.alpha[i] = ai;
        self.alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        // K is symmetric, so its columns are the rows needed here.
        let n = self.y.len();
        let data = self.k.as_slice();
        let (ki, kj) = (&data[i * n..(i + 1) * n], &data[j * n..(j + 1) * n]);
        let (wi, wj) = (self.y[i] * di, self.y[j] * dj);
        for (t, g) in self.grad.iter_mut().enumerate() {
            *g += self.y[t] * (wi * ki[t] + wj * kj[t]);
        }
        self.iterations += 1;
        true
    }

    fn bias(&self) -> f64 {
        let mut sum = 0.0;
        let mut free = 0usize;
        let mut ub = f64::INFINITY;
        let mut lb = f64::NEG_INFINITY;
        for t in 0..self.y.len() {
            let yg = self.y[t] * self.grad[t];
            let a = self.alpha[t];
            if a > 0.0 && a < self.c {
                sum += yg;
                free += 1;
            } else if (a == 0.0) == (self.y[t] > 0.0) {
                // yg is an upper bound on rho here
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        }
        let rho = if free > 0 {
            sum / free as f64
        } else if ub.is_finite() && lb.is_finite() {
            0.5 * (ub + lb)
        } else if ub.is_finite() {
            ub
        } else {
            lb
        };
        -rho
    }

    pub fn finish(self) -> TrainedBinarySvm {
        let converged = self.violation() <= self.tol;
        let bias = self.bias();
        let mut out = TrainedBinarySvm {
            support_indices: Vec::new(),
            multipliers: Vec::new(),
            signs: Vec::new(),
            bias,
            converged,
        };
        for (t, &a) in self.alpha.iter().enumerate() {
            if a > 0.0 {
                out.support_indices.push(t);
                out.multipliers.push(a);
                out.signs.push(self.y[t]);
            }
        }
        out
    }
}

/// Trains one binary machine. The solver performs at most `max_passes * n`
/// pair updates; hitting that cap yields a best-effort model with
/// `converged == false`.
pub fn solve_dual(k: &RealMatrix, y: &[f64], config: &SolverConfig) -> Result<TrainedBinarySvm> {
    let mut solver = SmoSolver::new(k, y, config)?;
    let cap = config.max_passes.saturating_mul(y.len());
    while solver.iterations < cap && solver.step() {}
    let model = solver.finish();
    if !model.converged {
        log::warn!("dual solver stopped after {cap} updates before reaching tol");
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassModel {
    machines: Vec<TrainedBinarySvm>,
    n_train: usize,
}

impl MulticlassModel {
    pub fn classes(&self) -> usize {
        self.machines.len()
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn machines(&self) -> &[TrainedBinarySvm] {
        &self.machines
    }

    pub fn converged(&self) -> bool {
        self.machines.iter().all(|m| m.converged)
    }

    /// Writes the text model format:
    ///
    /// ```text
    /// svm-model 1
    /// classes <Z> n_train <n>
    /// machine <bias> <converged 0|1> <support count>
    /// <index> <multiplier> <sign>      (one line per support)
    /// ```
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::new();
        writeln!(s, "svm-model 1").unwrap();
        writeln!(s, "classes {} n_train {}", self.classes(), self.n_train).unwrap();
        for m in &self.machines {
            writeln!(
                s,
                "machine {:e} {} {}",
                m.bias,
                u8::from(m.converged),
                m.support_count()
            )
            .unwrap();
            for ((i, g), y) in m.support_indices.iter().zip(&m.multipliers).zip(&m.signs) {
                writeln!(s, "{i} {g:e} {y}").unwrap();
            }
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn load<R: BufRead>(r: R) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("svm model: {msg}"));
        let mut lines = r.lines();
        let mut next = || -> Result<Vec<String>> {
            let line = lines
                .next()
                .ok_or_else(|| bad("unexpected end of input"))??;
            Ok(line.split_whitespace().map(str::to_owned).collect())
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| bad(&format!("bad number {s:?}")))
        };
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| bad(&format!("bad count {s:?}")))
        };
        if next()? != ["svm-model", "1"] {
            return Err(bad("missing header"));
        }
        let head = next()?;
        if head.len() != 4 || head[0] != "classes" || head[2] != "n_train" {
            return Err(bad("missing class line"));
        }
        let (z, n_train) = (idx(&head[1])?, idx(&head[3])?);
        let mut machines = Vec::with_capacity(z);
        for _ in 0..z {
            let h = next()?;
            if h.len() != 4 || h[0] != "machine" {
                return Err(bad("missing machine line"));
            }
            let mut m = TrainedBinarySvm {
                support_indices: Vec::new(),
                multipliers: Vec::new(),
                signs: Vec::new(),
                bias: num(&h[1])?,
                converged: h[2] == "1",
            };
            for _ in 0..idx(&h[3])? {
                let row = next()?;
                if row.len() != 3 {
                    return Err(bad("support line needs 3 fields"));
                }
                let i = idx(&row[0])?;
                if i >= n_train {
                    return Err(bad("support index out of range"));
                }
                m.support_indices.push(i);
                m.multipliers.push(num(&row[1])?);
                m.signs.push(num(&row[2])?);
            }
            machines.push(m);
        }
        if machines.len() < 2 {
            return Err(bad("need at least two classes"));
        }
        Ok(Self { machines, n_train })
    }
}

/// One-vs-rest training on a shared Gram matrix. `labels` are class indices
/// in `0..classes`.
pub fn train_multiclass(
    k: &RealMatrix,
    labels: &[usize],
    classes: usize,
    config: &SolverConfig,
) -> Result<MulticlassModel> {
    if classes < 2 {
        return Err(invalid("need at least two classes"));
    }
    if labels.len() != k.nrows() {
        return Err(invalid(format!(
            "{} labels for a {}-point Gram matrix",
            labels.len(),
            k.nrows()
        )));
    }
    let mut seen = vec![false; classes];
    for &l in labels {
        if l >= classes {
            return Err(invalid(format!(
                "label {l} out of range for {classes} classes"
            )));
        }
        seen[l] = true;
    }
    if let Some(z) = seen.iter().position(|s| !s) {
        return Err(invalid(format!("class {z} has no training examples")));
    }
    let machines = (0..classes)
        .map(|z| {
            let y: Vec<f64> = labels
                .iter()
                .map(|&l| if l == z { 1.0 } else { -1.0 })
                .collect();
            solve_dual(k, &y, config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MulticlassModel {
        machines,
        n_train: labels.len(),
    })
}

/// Class with the largest decision value (lowest index on ties) and all
/// decision values.
pub fn predict(model: &MulticlassModel, k_row: &[f64]) -> Result<(usize, Vec<f64>)> {
    if k_row.len() != model.n_train {
        return Err(invalid(format!(
            "kernel row has {} entries, model was trained on {}",
            k_row.len(),
            model.n_train
        )));
    }
    let values: Vec<f64> = model.machines.iter().map(|m| m.decision(k_row)).collect();
    let mut best = 0;
    for (z, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = z;
        }
    }
    Ok((best, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gfk_oracles::brute_force_svm_dual;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_gram(x: &[Vec<f64>]) -> RealMatrix {
        RealMatrix::from_fn(x.len(), x.len(), |i, j| {
            x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum()
        })
    }

    fn tight(c: f64) -> SolverConfig {
        SolverConfig::new(c, 1e-10, 100_000).unwrap()
    }

    fn random_problem(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> (RealMatrix, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mut y: Vec<f64> = (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        y[0] = 1.0;
        y[1] = -1.0;
        (linear_gram(&x), y)
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 1e-3, 10).is_err());
        assert!(SolverConfig::new(1.0, 0.0, 10).is_err());
        assert!(SolverConfig::new(1.0, 0.02, 10).is_err());
        assert!(SolverConfig::new(1.0, 1e-2, 10).is_ok());
        assert_eq!(SolverConfig::default().c(), 10.0);
    }

    #[test]
    fn two_point_analytic() {
        let k = linear_gram(&[vec![1.0], vec![-1.0]]);
        for c in [1.0, 10.0] {
            let m =
                solve_dual(&k, &[1.0, -1.0], &SolverConfig::new(c, 1e-3, 100).unwrap()).unwrap();
            assert_eq!(m.support_indices, vec![0, 1]);
            assert!((m.multipliers[0] - 0.5).abs() <= 1e-9);
            assert!((m.multipliers[1] - 0.5).abs() <= 1e-9);
            assert!(m.bias.abs() <= 1e-9);
            assert!(m.converged);
        }
    }

    #[test]
    fn single_class_rejected() {
        let k = linear_gram(&[vec![1.0], vec![2.0]]);
        assert!(solve_dual(&k, &[1.0, 1.0], &SolverConfig::default()).is_err());
        assert!(solve_dual(&k, &[1.0, 0.0], &SolverConfig::default()).is_err());
        let asym = RealMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(solve_dual(&asym, &[1.0, -1.0], &SolverConfig::default()).is_err());
    }

    #[test]
    fn matches_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let (k, y) = random_problem(&mut rng, 6, 2);
            let c = rng.random_range(0.2..5.0);
            let mut solver = SmoSolver::new(&k, &y, &tight(c)).unwrap();
            while solver.step() {}
            let got = solver.objective();
            let rows: Vec<Vec<f64>> = (0..6).map(|i| k.row(i).iter().copied().collect()).collect();
            let (best, _) = brute_force_svm_dual(&rows, &y, c);
            assert!((got - best).abs() <= 1e-6, "{got} vs {best}");
        }
    }

    #[test]
    fn objective_is_monotone_and_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (k, y) = random_problem(&mut rng, 60, 3);
        let mut solver = SmoSolver::new(&k, &y, &tight(2.0)).unwrap();
        let mut last = solver.objective();
        while solver.step() {
            let now = solver.objective();
            assert!(now >= last - 1e-12, "{now} < {last}");
            last = now;
        }
        let a = solver.multipliers();
        assert!(a.iter().all(|&g| (0.0..=2.0).contains(&g)));
        let s: f64 = a.iter().zip(&y).map(|(g, y)| g * y).sum();
        assert!(s.abs() <= 1e-10 * 60.0);
        let m = solver.finish();
        assert!(m.multipliers.iter().all(|&g| g > 0.0 && g <= 2.0));
    }

    #[test]
    fn iteration_cap_flags_nonconvergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (k, y) = random_problem(&mut rng, 40, 3);
        let m = solve_dual(&k, &y, &SolverConfig::new(5.0, 1e-10, 1).unwrap()).unwrap();
        assert!(!m.converged);
    }

    fn clusters(
        rng: &mut ChaCha8Rng,
        per: usize,
        centers: &[[f64; 2]],
        spread: f64,
    ) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut x = Vec::new();
        let mut l = Vec::new();
        for (z, c) in centers.iter().enumerate() {
            for _ in 0..per {
                // constant feature acts as a learned offset
                x.push(vec![
                    c[0] + rng.random_range(-spread..spread),
                    c[1] + rng.random_range(-spread..spread),
                    1.0,
                ]);
                l.push(z);
            }
        }
        (x, l)
    }

    #[test]
    fn separable_three_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (x, labels) = clusters(&mut rng, 20, &[[3.0, 0.0], [-1.5, 2.6], [-1.5, -2.6]], 0.5);
        let k = linear_gram(&x);
        let model = train_multiclass(&k, &labels, 3, &SolverConfig::default()).unwrap();
        assert_eq!(model.classes(), 3);
        for (i, &l) in labels.iter().enumerate() {
            let row: Vec<f64> = k.row(i).iter().copied().collect();
            let (z, v) = predict(&model, &row).unwrap();
            assert_eq!(v.len(), 3);
            assert_eq!(z, l);
        }
        assert!(predict(&model, &[0.0; 3]).is_err());
        assert!(train_multiclass(&k, &labels, 4, &SolverConfig::default()).is_err());
    }

    #[test]
    fn two_classes_are_mirrors() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (x, labels) = clusters(&mut rng, 15, &[[1.0, 0.0], [-1.0, 0.0]], 1.2);
        let k = linear_gram(&x);
        let model = train_multiclass(&k, &labels, 2, &tight(1.0)).unwrap();
        for i in 0..x.len() {
            let row: Vec<f64> = k.row(i).iter().copied().collect();
            let (_, v) = predict(&model, &row).unwrap();
            assert!((v[0] + v[1]).abs() <= 1e-6, "{v:?}");
        }
    }

    #[test]
    fn rescaling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let (x, labels) = clusters(&mut rng, 25, &[[1.0, 0.0], [-0.5, 0.9], [-0.5, -0.9]], 0.9);
        let k = linear_gram(&x);
        let lambda = 2.0;
        let cfg = tight(4.0);
        let a = train_multiclass(&k, &labels, 3, &cfg).unwrap();
        let b = train_multiclass(
            &(&k * lambda),
            &labels,
            3,
            &cfg.with_c(4.0 / lambda).unwrap(),
        )
        .unwrap();
        for i in 0..x.len() {
            let row: Vec<f64> = k.row(i).iter().copied().collect();
            let scaled: Vec<f64> = row.iter().map(|v| v * lambda).collect();
            let (za, va) = predict(&a, &row).unwrap();
            let (zb, vb) = predict(&b, &scaled).unwrap();
            assert_eq!(za, zb);
            for (p, q) in va.iter().zip(&vb) {
                assert!((p - q).abs() <= 1e-6 * (1.0 + p.abs()));
            }
        }
    }

    #[test]
    fn save_load_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let (x, labels) = clusters(&mut rng, 10, &[[1.0, 0.0], [-0.5, 0.9], [-0.5, -0.9]], 0.9);
        let k = linear_gram(&x);
        let model = train_multiclass(&k, &labels, 3, &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        model.save(&mut buf).unwrap();
        let back = MulticlassModel::load(buf.as_slice()).unwrap();
        assert_eq!(back, model);
        assert!(MulticlassModel::load(&b"svm-model 2\n"[..]).is_err());
        assert!(MulticlassModel::load(
            &b"svm-model 1\nclasses 2 n_train 3\nmachine 0 1 1\n7 1 1\n"[..]
        )
        .is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn training_is_deterministic_and_feasible(seed in any::<u64>(), n in 4usize..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (k, y) = random_problem(&mut rng, n, 3);
            let cfg = SolverConfig::new(1.5, 1e-3, 100_000).unwrap();
            let a = solve_dual(&k, &y, &cfg).unwrap();
            let b = solve_dual(&k, &y, &cfg).unwrap();
            prop_assert_eq!(&a, &b);
            let s: f64 = a.multipliers.iter().zip(&a.signs).map(|(g, y)| g * y).sum();
            prop_assert!(s.abs() <= cfg.tol() * n as f64);
            prop_assert!(a.multipliers.iter().all(|&g| g > 0.0 && g <= 1.5));
        }
    }
}
