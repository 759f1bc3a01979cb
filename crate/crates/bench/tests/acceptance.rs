//! Acceptance suite. Prints one PASS/FAIL line per criterion and a summary.
//! With `ACCEPTANCE_STRICT=1` any failed criterion makes the process exit
//! nonzero; otherwise failures are reported without aborting the rest of
//! `cargo test`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

use gfk_bench::experiment::{
    doppler_cells, inversions, median, median_ser, run_cells, snr_cells, Cell, CellData,
};
use gfk_bench::scaling::bench_scaling;
use gfk_bench::{ExperimentConfig, Method};
use gfk_mimo::channel::{generate_trace, FadingConfig};
use gfk_mimo::dataset::{
    build_domain_dataset, sample_symbols, ChannelKind, DomainConfig, MogModel,
};
use gfk_mimo::detector::{
    detect_baseline, gfk_gsvm_classify, gfk_gsvm_fit, ser, training_overhead, Baseline, CsiPolicy,
};
use gfk_mimo::gfk::{build_kernel, gram_matrix, gram_matrix_symmetric};
use gfk_mimo::grassmann::{
    factorization_residuals, flow_point, geodesic, pca_subspace, principal_angles, SubspaceBasis,
};
use gfk_mimo::linalg::{
    frobenius, hermitian_eigen_desc, max_abs, orthonormalize, random_complex, random_orthonormal,
    ComplexMatrix, RealMatrix, C64,
};
use gfk_mimo::svm::{predict, solve_dual, train_multiclass, SmoSolver, SolverConfig};
use gfk_oracles::{
    bessel_j0, brute_force_svm_dual, gauss_legendre_unit, ks_statistic, singular_values,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id.to_string());
        }
    }

    fn info(&self, id: &str, detail: String) {
        println!("[INFO] {id}: {detail}");
    }
}

fn basis(rng: &mut ChaCha8Rng, l: usize, d: usize) -> SubspaceBasis {
    SubspaceBasis::new(random_orthonormal(rng, l, d)).unwrap()
}

/// Half the pairs are unrelated, half are perturbations of the source.
fn pair(rng: &mut ChaCha8Rng, l: usize, d: usize, i: usize) -> (SubspaceBasis, SubspaceBasis) {
    let sr = basis(rng, l, d);
    let ss = if i.is_multiple_of(2) {
        basis(rng, l, d)
    } else {
        let eps = rng.random_range(0.01..1.0);
        let p = sr.matrix() + random_complex(rng, l, d) * C64::new(eps, 0.0);
        SubspaceBasis::new(orthonormalize(&p)).unwrap()
    };
    (sr, ss)
}

fn row_major(m: &ComplexMatrix) -> Vec<C64> {
    (0..m.nrows())
        .flat_map(|i| m.row(i).iter().copied().collect::<Vec<_>>())
        .collect()
}

fn kernel_quadrature(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let (sr, ss) = pair(&mut rng, 96, 4, i);
        let path = geodesic(&sr, &ss).unwrap();
        let f = build_kernel(&path);
        let mut acc = ComplexMatrix::zeros(96, 96);
        for (q, w) in gauss_legendre_unit(64) {
            let phi = flow_point(&path, q).unwrap();
            acc += (&phi * phi.adjoint()) * C64::new(2.0 * w, 0.0);
        }
        worst = worst.max(frobenius(&(f.matrix() - &acc)) / frobenius(&acc));
    }
    let secs = t.elapsed().as_secs_f64();
    r.check(
        "1 kernel quadrature oracle",
        worst <= 1e-8 && secs < 10.0,
        format!("max relative error {worst:.2e} (<= 1e-8), {secs:.2} s (< 10 s), 100 pairs at L'=96, d=4"),
    );
}

fn identity_limit(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let l = rng.random_range(8..100);
        let d = rng.random_range(1..=4.min(l / 2));
        let s = basis(&mut rng, l, d);
        let f = build_kernel(&geodesic(&s, &s).unwrap());
        worst = worst.max(max_abs(&(f.matrix() - s.projector() * C64::new(2.0, 0.0))));
    }
    r.check(
        "2 identity-domain limit",
        worst <= 1e-10,
        format!("max |F - 2 SrSr^H| = {worst:.2e} (<= 1e-10), 20 bases"),
    );
}

fn psd_and_rank(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let (mut worst_neg, mut worst_tail): (f64, f64) = (f64::NEG_INFINITY, 0.0);
    let d = 4;
    for i in 0..100 {
        let (sr, ss) = pair(&mut rng, 48, d, i);
        let f = build_kernel(&geodesic(&sr, &ss).unwrap());
        let (ev, _) = hermitian_eigen_desc(f.matrix());
        worst_neg = worst_neg.max(-ev.last().unwrap() / ev[0]);
        worst_tail = worst_tail.max(ev[2 * d..].iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    r.check(
        "3 PSD and rank",
        worst_neg <= 1e-10 && worst_tail <= 1e-10,
        format!("max -lambda_min/lambda_max = {worst_neg:.2e} (<= 1e-10), max |lambda_k|, k >= 2d: {worst_tail:.2e} (<= 1e-10)"),
    );
}

fn geodesic_identities(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut ortho, mut end, mut fact): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..20 {
        let (sr, ss) = pair(&mut rng, 40, 4, i);
        let path = geodesic(&sr, &ss).unwrap();
        for k in 0..=10 {
            let phi = flow_point(&path, k as f64 / 10.0).unwrap();
            ortho = ortho.max(max_abs(
                &(phi.adjoint() * &phi - ComplexMatrix::identity(4, 4)),
            ));
        }
        let p1 = flow_point(&path, 1.0).unwrap();
        end = end.max(max_abs(&(&p1 * p1.adjoint() - ss.projector())));
        let (a, b) = factorization_residuals(&path, &ss);
        fact = fact.max(a).max(b);
    }
    r.check(
        "4 geodesic correctness",
        ortho <= 1e-10 && end <= 1e-8 && fact <= 1e-8,
        format!("|Phi^H Phi - I| {ortho:.2e} (<= 1e-10), |Phi(1)Phi(1)^H - SsSs^H| {end:.2e} (<= 1e-8), shared-V factorisation {fact:.2e} (<= 1e-8)"),
    );
}

fn angles_oracle(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let (sr, ss) = pair(&mut rng, 96, 4, i);
        let got = principal_angles(&sr, &ss).unwrap();
        let sv = singular_values(4, 4, &row_major(&(sr.matrix().adjoint() * ss.matrix())));
        for (g, s) in got.angles.as_slice().iter().zip(&sv) {
            worst = worst.max((g - s.clamp(0.0, 1.0).acos()).abs());
        }
    }
    let s = basis(&mut rng, 20, 4);
    let same = principal_angles(&s, &s).unwrap().angles.max();
    let q = random_orthonormal(&mut rng, 20, 8);
    let s1 = SubspaceBasis::new(q.columns(0, 4).into_owned()).unwrap();
    let s2 = SubspaceBasis::new(q.columns(4, 4).into_owned()).unwrap();
    let orth = principal_angles(&s1, &s2).unwrap();
    let orth_err = orth
        .angles
        .as_slice()
        .iter()
        .fold(0.0_f64, |m, a| m.max((a - FRAC_PI_2).abs()));
    r.check(
        "5 principal angles",
        worst <= 1e-10 && same <= 1e-10 && orth_err <= 1e-10,
        format!("oracle error {worst:.2e} (<= 1e-10), identical max angle {same:.1e}, orthogonal |phi - pi/2| {orth_err:.1e}"),
    );
}

fn dual_solver(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let dim = rng.random_range(1..4);
        let x: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let k = RealMatrix::from_fn(6, 6, |i, j| {
            x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum()
        });
        let mut y: Vec<f64> = (0..6)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        y[0] = 1.0;
        y[1] = -1.0;
        let c = rng.random_range(0.1..10.0);
        let mut solver =
            SmoSolver::new(&k, &y, &SolverConfig::new(c, 1e-10, 100_000).unwrap()).unwrap();
        while solver.step() {}
        let rows: Vec<Vec<f64>> = (0..6).map(|i| k.row(i).iter().copied().collect()).collect();
        let (best, _) = brute_force_svm_dual(&rows, &y, c);
        worst = worst.max((solver.objective() - best).abs());
    }
    let k = RealMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
    let m = solve_dual(&k, &[1.0, -1.0], &SolverConfig::default()).unwrap();
    let two = m.support_indices == [0, 1]
        && m.multipliers.iter().all(|g| (g - 0.5).abs() <= 1e-9)
        && m.bias.abs() <= 1e-9;
    r.check(
        "6 dual solver",
        worst <= 1e-6 && two,
        format!(
            "max objective gap {worst:.2e} (<= 1e-6) over 50 problems, two-point gamma = {:?}, b = {:.1e}",
            m.multipliers, m.bias
        ),
    );
}

fn fading_fidelity(r: &mut Report) {
    let lags = 50;
    let traces = 10_000u64;
    let mut acc = vec![C64::new(0.0, 0.0); lags + 1];
    for s in 0..traces {
        let tr =
            generate_trace(1, 1, &FadingConfig::with_seed(0.01, s).unwrap(), lags + 1).unwrap();
        let h0 = tr.slot(0)[(0, 0)].conj();
        for (n, a) in acc.iter_mut().enumerate() {
            *a += tr.slot(n)[(0, 0)] * h0;
        }
    }
    let worst = acc
        .iter()
        .enumerate()
        .map(|(n, a)| (a.re / traces as f64 - bessel_j0(TAU * 0.01 * n as f64)).abs())
        .fold(0.0, f64::max);

    let mut env = Vec::with_capacity(100_000);
    for s in 0..100_000u64 {
        let tr = generate_trace(
            1,
            1,
            &FadingConfig::with_seed(0.01, 5_000_000 + s).unwrap(),
            1,
        )
        .unwrap();
        env.push(tr.slot(0)[(0, 0)].norm());
    }
    let ks = ks_statistic(&env, |x| 1.0 - (-x * x).exp());
    r.check(
        "7 fading fidelity",
        worst <= 0.05 && ks < 0.02,
        format!("max |R(n) - J0(2 pi 0.01 n)| over n <= 50: {worst:.4} (<= 0.05), Rayleigh KS {ks:.4} (< 0.02)"),
    );
}

fn full_config() -> ExperimentConfig {
    ExperimentConfig {
        timing: true,
        ..ExperimentConfig::default()
    }
}

fn full_scale(r: &mut Report) {
    let cfg = full_config();
    let solver = cfg.solver().unwrap();
    let (mut gfk, mut mmse, mut ml, mut train_ser, mut secs) =
        (vec![], vec![], vec![], vec![], vec![]);
    let mut worst_angle_same: f64 = 0.0;
    for &seed in &cfg.seeds {
        let t = Instant::now();
        let cell = Cell {
            snr_db: 15.0,
            fd_ts: 0.01,
            seed,
        };
        let data = CellData::build(&cfg, cell, true).unwrap();
        let train = data.train.as_ref().unwrap();
        let truth = data.test.set.labels();
        let model = gfk_gsvm_fit(
            &train.set,
            data.test.set.rows(),
            cfg.dim,
            cfg.classes,
            &solver,
        )
        .unwrap();
        gfk.push(
            ser(
                &gfk_gsvm_classify(&model, data.test.set.rows()).unwrap(),
                truth,
            )
            .unwrap(),
        );
        let stale = Baseline::Mmse(CsiPolicy::Stale);
        mmse.push(
            ser(
                &detect_baseline(stale, &data.test, &data.alphabet).unwrap(),
                truth,
            )
            .unwrap(),
        );
        ml.push(
            ser(
                &detect_baseline(Baseline::Ml, &data.test, &data.alphabet).unwrap(),
                truth,
            )
            .unwrap(),
        );
        secs.push(t.elapsed().as_secs_f64());

        train_ser.push(
            ser(
                &gfk_gsvm_classify(&model, train.set.rows()).unwrap(),
                train.set.labels(),
            )
            .unwrap(),
        );
        let half = train.set.len() / 2;
        let a = pca_subspace(&train.set.rows().rows(0, half).into_owned(), cfg.dim).unwrap();
        let b = pca_subspace(
            &train
                .set
                .rows()
                .rows(half, train.set.len() - half)
                .into_owned(),
            cfg.dim,
        )
        .unwrap();
        worst_angle_same = worst_angle_same.max(principal_angles(&a, &b).unwrap().angles.max());
    }
    let (g, m, l) = (
        median(gfk.clone()),
        median(mmse.clone()),
        median(ml.clone()),
    );
    let slowest = secs.iter().copied().fold(0.0, f64::max);
    r.check(
        "8a full scale: GFK G-SVM below stale-CSI MMSE",
        g < m,
        format!("median SER gfk_gsvm {g:.4} vs mmse {m:.4} (per seed gfk {gfk:?}, mmse {mmse:?})"),
    );
    r.check(
        "8b full scale: ML at or below both",
        l <= g && l <= m,
        format!("median SER ml {l:.4} (per seed {ml:?})"),
    );
    r.check(
        "8c full scale: wallclock per seed",
        slowest <= 300.0,
        format!("slowest seed {slowest:.1} s (<= 300 s)"),
    );
    r.info(
        "full scale chance level",
        format!("1 - 1/Z = {:.4}", 1.0 - 1.0 / cfg.classes as f64),
    );
    r.info("full scale GFK training SER", format!("{train_ser:?}"));
    r.info(
        "same-domain principal angles",
        format!("max angle between PCA subspaces of two halves of one domain: {worst_angle_same:.3} rad (target <= 0.3)"),
    );
}

fn trends(r: &mut Report) {
    let cfg = full_config();
    let rows: Vec<_> = run_cells(&cfg, &snr_cells(&cfg), 1)
        .unwrap()
        .into_iter()
        .map(|o| o.row)
        .collect();
    for m in Method::ALL {
        let series = median_ser(&rows, m, true);
        let v: Vec<f64> = series.iter().map(|p| p.1).collect();
        let inv = inversions(&v, false);
        r.check(
            &format!("9a SNR trend {m}"),
            inv <= 1,
            format!("median SER over 0..20 dB {v:.4?}, {inv} inversions (<= 1)"),
        );
    }
    let dcfg = ExperimentConfig {
        methods: vec![Method::Mmse],
        ..full_config()
    };
    let rows: Vec<_> = run_cells(&dcfg, &doppler_cells(&dcfg), 1)
        .unwrap()
        .into_iter()
        .map(|o| o.row)
        .collect();
    let v: Vec<f64> = median_ser(&rows, Method::Mmse, false)
        .iter()
        .map(|p| p.1)
        .collect();
    let inv = inversions(&v, true);
    r.check(
        "9b Doppler trend mmse",
        inv <= 1,
        format!("median SER over fd_ts 0.002..0.014 {v:.4?}, {inv} inversions (<= 1)"),
    );
}

fn scale_invariance(r: &mut Report) {
    let mog = MogModel::generate(4, 8, 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mk = |segment, n, rng: &mut ChaCha8Rng| {
        let sym = sample_symbols(&mog, n, rng).unwrap();
        let dc = DomainConfig {
            channel: ChannelKind::Identity,
            ..DomainConfig::new(10.0, 0.0, segment, 3)
        };
        build_domain_dataset(&sym, &dc, 2, 2).unwrap().set
    };
    let train = mk(0, 100, &mut rng);
    let test = mk(1, 100, &mut rng);
    let sr = pca_subspace(train.rows(), 3).unwrap();
    let ss = pca_subspace(test.rows(), 3).unwrap();
    let f = build_kernel(&geodesic(&sr, &ss).unwrap());
    let f2 = f.scaled(2.0);
    let run = |f: &gfk_mimo::gfk::GfkMatrix, c: f64| -> Vec<usize> {
        let k = gram_matrix_symmetric(f, train.rows()).unwrap();
        let model = train_multiclass(
            &k,
            train.labels(),
            4,
            &SolverConfig::new(c, 1e-3, 100).unwrap(),
        )
        .unwrap();
        let kt = gram_matrix(f, test.rows(), train.rows()).unwrap();
        (0..kt.nrows())
            .map(|i| {
                predict(&model, &kt.row(i).iter().copied().collect::<Vec<_>>())
                    .unwrap()
                    .0
            })
            .collect()
    };
    let a = run(&f, 10.0);
    let b = run(&f2, 5.0);
    let diff = a.iter().zip(&b).filter(|(x, y)| x != y).count();
    let acc = ser(&a, test.labels()).unwrap();
    r.check(
        "10 scale invariance",
        diff == 0,
        format!(
            "{diff} of {} predictions differ with F -> 2F, C -> C/2 (toy SER {acc:.3})",
            a.len()
        ),
    );
}

fn scaling(r: &mut Report) {
    let rep = bench_scaling(7).unwrap();
    let k: Vec<String> = rep
        .kernel
        .iter()
        .map(|p| format!("{}:{:.2e}s", p.size, p.seconds))
        .collect();
    let g: Vec<String> = rep
        .gram_row
        .iter()
        .map(|p| format!("{}:{:.2e}s", p.size, p.seconds))
        .collect();
    r.check(
        "11a build_kernel power law in L'",
        (1.6..=3.2).contains(&rep.kernel_exponent),
        format!(
            "exponent {:.3} in [1.6, 3.2] ({})",
            rep.kernel_exponent,
            k.join(", ")
        ),
    );
    r.check(
        "11b gram-row power law in N",
        rep.gram_row_exponent <= 2.5,
        format!(
            "exponent {:.3} (<= 2.5) ({})",
            rep.gram_row_exponent,
            g.join(", ")
        ),
    );
}

fn overhead(r: &mut Report) {
    let a = training_overhead(1.0, 7.0).unwrap();
    let zeros = [1e-9, 0.5, 7.0, 1e6]
        .iter()
        .all(|&f| training_overhead(0.0, f).unwrap() == 0.0);
    r.check(
        "12 overhead formula",
        a == 0.125 && zeros,
        format!("overhead(1, 7) = {a}, overhead(0, f) = 0: {zeros}"),
    );
}

fn main() {
    // libtest-style flags passed by `cargo test` are ignored.
    let mut r = Report { failed: Vec::new() };
    let t = Instant::now();
    kernel_quadrature(&mut r);
    identity_limit(&mut r);
    psd_and_rank(&mut r);
    geodesic_identities(&mut r);
    angles_oracle(&mut r);
    dual_solver(&mut r);
    fading_fidelity(&mut r);
    scale_invariance(&mut r);
    scaling(&mut r);
    overhead(&mut r);
    full_scale(&mut r);
    trends(&mut r);
    println!("acceptance finished in {:.1} s", t.elapsed().as_secs_f64());
    if r.failed.is_empty() {
        println!("all criteria passed");
    } else {
        println!("failed ({}): {}", r.failed.len(), r.failed.join("; "));
        if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
