//! Acceptance suite: one test per exit criterion, each printing a
//! `[PASS] ...` line (visible with `--nocapture`). Criterion 14
//! (command-line reproducibility) lives in the CLI crate's own tests.

use lattice_harmonics::fractional::{self, EvalPath};
use lattice_harmonics::lattice::{lp_norm, Window};
use lattice_harmonics::spectral::{apply_multiplier_to_window, TorusGrid, TorusSymbol};
use lattice_harmonics::{bessel, fit, heat, poisson, riesz, squarefn, verify, RealSeq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;
use std::time::Instant;

fn random_mean_zero(dim: usize, radius: i64, rng: &mut ChaCha8Rng) -> RealSeq {
    RealSeq::from_fn(Window::new(dim, radius).unwrap(), |_| rng.gen::<f64>() * 2.0 - 1.0)
        .mean_zeroed()
}

fn fixtures() -> verify::Fixtures {
    verify::builtin_fixtures().expect("builtin fixtures parse")
}

/// 60-term power-series oracle for `e^{-x} I_a(x)`, independent of the
/// implementation paths.
fn series_oracle(a: f64, x: f64) -> f64 {
    let mut sum = 0.0f64;
    for k in 0..60 {
        let kf = k as f64;
        let ln_term =
            (2.0 * kf + a) * (0.5 * x).ln() - ln_gamma(kf + 1.0) - ln_gamma(a + kf + 1.0);
        sum += ln_term.exp();
    }
    sum * (-x).exp()
}

#[test]
fn criterion_01_bessel_oracle_agreement() {
    let start = Instant::now();
    let mut orders: Vec<f64> = (0..=20).map(|k| k as f64).collect();
    orders.extend((0..=10).map(|k| k as f64 + 0.5));
    let points_per_order = 10_000usize.div_ceil(orders.len());
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for &a in &orders {
        for j in 0..points_per_order {
            let x = 50.0 * (j as f64 + 1.0) / points_per_order as f64;
            let got = bessel::scaled_bessel_i(a, x).unwrap();
            let want = series_oracle(a, x);
            let rel = (got - want).abs() / want;
            worst = worst.max(rel);
            assert!(rel <= 1e-12, "a={a} x={x}: rel {rel}");
            checked += 1;
        }
    }
    assert!(checked >= 10_000);
    println!(
        "[PASS] criterion 1: scaled Bessel matches the 60-term series oracle on {checked} points \
         (worst rel {worst:.2e}) in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_02_bessel_inequality_suite() {
    let start = Instant::now();
    let report = verify::run_suite(&verify::bessel_suite_ids(), 1500, 2024, &fixtures()).unwrap();
    let total: usize = report.entries.iter().map(|e| e.cases).sum();
    for e in &report.entries {
        assert!(e.pass, "{} violated {} times, worst {} at {}", e.id, e.violations, e.worst_margin, e.worst_case);
    }
    assert!(total >= 10_000, "suite ran only {total} cases");
    println!(
        "[PASS] criterion 2: scaled-Bessel inequality suite, {total} fresh-seed cases, zero violations in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_03_kernel_normalization() {
    let start = Instant::now();
    for dim in 1..=3usize {
        for &t in &[0.1, 1.0, 10.0] {
            let kernel = heat::HeatKernel::auto(t, dim, 1e-9).unwrap();
            let defect = (kernel.seq().sum() - 1.0).abs();
            assert!(defect <= 1e-8, "dim={dim} t={t}: defect {defect}");
        }
    }
    println!(
        "[PASS] criterion 3: heat-kernel mass within 1e-8 of 1 for N in 1..3, t in {{0.1,1,10}} in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_04_semigroup_and_neumann() {
    let start = Instant::now();
    for &(t1, t2) in &[(0.5, 0.5), (1.0, 2.0), (5.0, 5.0)] {
        let d = RealSeq::delta(1, 0).unwrap();
        let two = heat::evolve(&heat::evolve(&d, t1).unwrap(), t2).unwrap();
        let one = heat::evolve(&d, t1 + t2).unwrap();
        let dev = two.sup_distance(&one);
        assert!(dev <= 1e-8, "t1={t1} t2={t2}: {dev}");

        // Neumann identity on the scaled families
        let x1 = 2.0 * t1;
        let x2 = 2.0 * t2;
        let reach = 80usize;
        let f1 = bessel::scaled_bessel_family(x1, reach).unwrap();
        let f2 = bessel::scaled_bessel_family(x2, 2 * reach).unwrap();
        let f12 = bessel::scaled_bessel_family(x1 + x2, 4).unwrap();
        for n in 0..=3i64 {
            let mut acc = 0.0;
            for k in -(reach as i64)..=(reach as i64) {
                acc += f1[k.unsigned_abs() as usize] * f2[(n - k).unsigned_abs() as usize];
            }
            assert!(
                (acc - f12[n as usize]).abs() <= 1e-10,
                "Neumann residual at n={n}: {}",
                (acc - f12[n as usize]).abs()
            );
        }
    }
    println!(
        "[PASS] criterion 4: semigroup law within 1e-8 and Neumann residual within 1e-10 in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_05_decay_slopes() {
    let start = Instant::now();
    let grid = fit::geometric_grid(16.0, 4096.0, 2.0).unwrap();
    let s = heat::decay_slope(1, 2.0, &grid).unwrap();
    assert!((s + 0.25).abs() <= 0.02, "N=1 r=2 slope {s}");
    let s = heat::decay_slope(1, f64::INFINITY, &grid).unwrap();
    assert!((s + 0.50).abs() <= 0.02, "N=1 r=inf slope {s}");
    let s = heat::decay_slope(2, 2.0, &grid).unwrap();
    assert!((s + 0.50).abs() <= 0.03, "N=2 r=2 slope {s}");
    println!(
        "[PASS] criterion 5: kernel-norm decay slopes -1/4, -1/2, -1/2 within tolerance in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_06_mass_distribution() {
    let start = Instant::now();
    let mut f = RealSeq::zeros(Window::new(1, 3).unwrap());
    f.set(&[0], 1.0).unwrap();
    f.set(&[1], -1.0).unwrap();
    f.set(&[2], 2.0).unwrap();
    let grid = fit::geometric_grid(64.0, 8192.0, 2.0).unwrap();
    let s_inf = heat::mass_slope(&f, f64::INFINITY, 1.0, &grid).unwrap();
    assert!((s_inf + 1.0).abs() <= 0.05, "q=1 p=inf slope {s_inf}");
    let s_pp = heat::mass_slope(&f, 1.0, 1.0, &grid).unwrap();
    assert!((s_pp + 0.5).abs() <= 0.05, "p=q=1 slope {s_pp}");
    println!(
        "[PASS] criterion 6: mass-drift slopes {s_inf:.3} (target -1) and {s_pp:.3} (target -1/2) in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_07_gk_l2_identities() {
    let start = Instant::now();
    let grid = squarefn::TimeGridQuadrature::default_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for dim in 1..=2usize {
        for trial in 0..20 {
            let f = random_mean_zero(dim, 3, &mut rng);
            for k in 1..=2usize {
                let want = squarefn::gk_identity_constant(k);
                let heat_ratio = squarefn::gk_l2_ratio(&f, k, &grid).unwrap();
                assert!(
                    (heat_ratio - want).abs() <= 1e-3,
                    "heat dim={dim} k={k} trial={trial}: {heat_ratio} vs {want}"
                );
                let poisson_ratio = squarefn::gk_poisson_l2_ratio(&f, k, &grid).unwrap();
                assert!(
                    (poisson_ratio - want).abs() <= 1e-3,
                    "poisson dim={dim} k={k} trial={trial}: {poisson_ratio} vs {want}"
                );
            }
        }
    }
    println!(
        "[PASS] criterion 7: square-function L2 ratios match Gamma(2k)/4^k within 1e-3 \
         (20 data sets, N in 1..2, k in 1..2, heat and Poisson) in {:.2?}",
        start.elapsed()
    );
}

fn rel_sup_distance(a: &RealSeq, b: &RealSeq, window: Window) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    window.for_each_point(|_, p| {
        diff = diff.max((a.get(p) - b.get(p)).abs());
        scale = scale.max(a.get(p).abs());
    });
    diff / scale.max(1e-300)
}

#[test]
fn criterion_08_dual_path_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        // heat, N = 1 and 2
        for dim in 1..=2usize {
            let f = random_mean_zero(dim, 3, &mut rng);
            let k = heat::evolve(&f, 0.5).unwrap();
            let grid = TorusGrid::for_window(f.window(), 10).unwrap();
            let sym = TorusSymbol::heat(grid, 0.5).unwrap();
            let s = apply_multiplier_to_window(&f, &sym, f.window(), 1e-8).unwrap();
            let r = rel_sup_distance(&k, &s, f.window());
            assert!(r <= 1e-6, "heat dim={dim} trial={trial}: rel {r}");
            worst = worst.max(r);
        }
        // Poisson, N = 1
        {
            let f = random_mean_zero(1, 3, &mut rng);
            let k = poisson::poisson_evolve(&f, 0.5, 2048).unwrap();
            let grid = TorusGrid::new(1, 2048).unwrap();
            let sym = TorusSymbol::poisson(grid, 0.5).unwrap();
            let s = apply_multiplier_to_window(&f, &sym, f.window(), 1e-8).unwrap();
            let r = rel_sup_distance(&k, &s, f.window());
            assert!(r <= 1e-6, "poisson trial={trial}: rel {r}");
            worst = worst.max(r);
        }
        // Riesz, N = 2
        {
            let f = random_mean_zero(2, 3, &mut rng);
            let k = riesz::apply_riesz(&f, 0, 3, EvalPath::Kernel).unwrap();
            let s = riesz::apply_riesz(&f, 0, 3, EvalPath::Spectral { grid_factor: 52 }).unwrap();
            let r = rel_sup_distance(&k, &s, f.window());
            assert!(r <= 1e-6, "riesz trial={trial}: rel {r}");
            worst = worst.max(r);
        }
        // negative power, N = 1 and 2
        for (dim, factor) in [(1usize, 160usize), (2, 52)] {
            let f = random_mean_zero(dim, 3, &mut rng);
            let k = fractional::apply_frac_integral(&f, 0.25, 3, EvalPath::Kernel).unwrap();
            let s = fractional::apply_frac_integral(
                &f,
                0.25,
                3,
                EvalPath::Spectral { grid_factor: factor },
            )
            .unwrap();
            let r = rel_sup_distance(&k, &s, f.window());
            assert!(r <= 1e-6, "frac-neg dim={dim} trial={trial}: rel {r}");
            worst = worst.max(r);
        }
        // positive power, N = 1 and 2
        for (dim, factor) in [(1usize, 160usize), (2, 52)] {
            let f = random_mean_zero(dim, 3, &mut rng);
            let k = fractional::apply_frac_power(&f, 0.5, 3, EvalPath::Kernel).unwrap();
            let s = fractional::apply_frac_power(
                &f,
                0.5,
                3,
                EvalPath::Spectral { grid_factor: factor },
            )
            .unwrap();
            let r = rel_sup_distance(&k, &s, f.window());
            assert!(r <= 1e-6, "frac-pos dim={dim} trial={trial}: rel {r}");
            worst = worst.max(r);
        }
    }
    println!(
        "[PASS] criterion 8: kernel and spectral paths agree to rel sup {worst:.2e} (<= 1e-6) \
         for heat, Poisson, Riesz, and both fractional powers in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_09_riesz_properties() {
    let start = Instant::now();
    // antisymmetry
    let kernel = riesz::riesz_kernel(0, 2, 13).unwrap();
    let w = Window::new(2, 12).unwrap();
    let mut worst_anti = 0.0f64;
    w.for_each_point(|_, p| {
        let neg: Vec<i64> = p.iter().map(|c| -c).collect();
        let shifted = [p[0] - 1, p[1]];
        worst_anti = worst_anti.max((kernel.value(&neg) + kernel.value(&shifted)).abs());
    });
    assert!(worst_anti <= 1e-8, "antisymmetry residue {worst_anti}");

    // partial-sum cancellation slope
    let big = riesz::riesz_kernel(0, 2, 40).unwrap();
    let ms: Vec<f64> = (6..=36).step_by(5).map(|m| m as f64).collect();
    let sums: Vec<f64> = (6..=36).step_by(5).map(|m| big.partial_sum(m).abs()).collect();
    let slope = fit::loglog_slope(&ms, &sums).unwrap();
    assert!((slope + 1.0).abs() <= 0.15, "partial-sum slope {slope}");

    // size decay along the axis
    let xs: Vec<f64> = (6..=24).map(|n| n as f64).collect();
    let ys: Vec<f64> = (6..=24).map(|n| big.value(&[n, 0]).abs()).collect();
    let size_slope = fit::loglog_slope(&xs, &ys).unwrap();
    assert!((size_slope + 2.0).abs() <= 0.1, "size slope {size_slope}");

    // l2 contraction on mean-zero data
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..20 {
        let f = random_mean_zero(2, 3, &mut rng);
        let out = riesz::apply_riesz(&f, 1, 12, EvalPath::Kernel).unwrap();
        let ratio = lp_norm(&out, 2.0, None).unwrap() / lp_norm(&f, 2.0, None).unwrap();
        assert!(ratio <= 1.0 + 1e-10, "trial {trial}: ratio {ratio}");
    }
    println!(
        "[PASS] criterion 9: Riesz antisymmetry ({worst_anti:.1e}), cancellation slope {slope:.2}, \
         size slope {size_slope:.2}, l2 contraction on 20 data sets in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_10_fractional_limits() {
    let start = Instant::now();
    let d = RealSeq::delta(1, 0).unwrap();
    let rows = fractional::frac_limits_check(&d, &[0.001, 0.999]).unwrap();
    assert!(rows[0].dev_identity <= 0.05, "s=0.001 identity dev {}", rows[0].dev_identity);
    assert!(rows[1].dev_laplacian <= 0.05, "s=0.999 laplacian dev {}", rows[1].dev_laplacian);
    let down = fractional::frac_limits_check(&d, &[0.1, 0.01, 0.001]).unwrap();
    assert!(down[0].dev_identity > down[1].dev_identity && down[1].dev_identity > down[2].dev_identity);
    let up = fractional::frac_limits_check(&d, &[0.9, 0.99, 0.999]).unwrap();
    assert!(up[0].dev_laplacian > up[1].dev_laplacian && up[1].dev_laplacian > up[2].dev_laplacian);
    println!(
        "[PASS] criterion 10: fractional powers approach the identity (dev {:.3}) and the \
         Laplacian (dev {:.3}) monotonically in {:.2?}",
        rows[0].dev_identity,
        rows[1].dev_laplacian,
        start.elapsed()
    );
}

#[test]
fn criterion_11_maximum_and_comparison_principles() {
    let start = Instant::now();
    let ids = vec!["max-principle".to_string(), "comparison-principle".to_string()];
    // heavy ids run a tenth of the requested grid: 10_000 -> 1000 cases each
    let report = verify::run_suite(&ids, 10_000, 11, &fixtures()).unwrap();
    for e in &report.entries {
        assert_eq!(e.cases, 1000, "{} ran {} cases", e.id, e.cases);
        assert_eq!(e.violations, 0, "{}: worst {} at {}", e.id, e.worst_margin, e.worst_case);
    }
    println!(
        "[PASS] criterion 11: maximum and comparison principles, 1000 seeded cases each, \
         zero violations at 1e-12 in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_12_fractional_kernel_decay() {
    let start = Instant::now();
    for &sigma in &[0.25, 0.5, 0.75] {
        let k = fractional::frac_integral_kernel(sigma, 2, 26).unwrap();
        let xs: Vec<f64> = (6..=26).map(|n| n as f64).collect();
        let ys: Vec<f64> = (6..=26).map(|n| k.value(&[n, 0])).collect();
        let slope = fit::loglog_slope(&xs, &ys).unwrap();
        let target = -(2.0 - 2.0 * sigma);
        assert!(
            (slope - target).abs() <= 0.05,
            "negative power sigma={sigma}: slope {slope} vs {target}"
        );
    }
    for &s in &[0.25, 0.5, 0.75] {
        let k = fractional::frac_power_kernel(s, 1, 30).unwrap();
        assert_eq!(k.value(&[0]), 0.0);
        let xs: Vec<f64> = (8..=30).map(|n| n as f64).collect();
        let ys: Vec<f64> = (8..=30).map(|n| k.value(&[n])).collect();
        let slope = fit::loglog_slope(&xs, &ys).unwrap();
        let target = -(1.0 + 2.0 * s);
        assert!(
            (slope - target).abs() <= 0.05,
            "positive power s={s}: slope {slope} vs {target}"
        );
    }
    println!(
        "[PASS] criterion 12: fractional kernel decay exponents within 0.05 and a vanishing \
         origin entry in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_13_poisson() {
    let start = Instant::now();
    // Laplace-equation residual
    let d = RealSeq::delta(1, 0).unwrap();
    let residual = poisson::laplace_equation_residual(&d, 2.0, 1e-3, 80).unwrap();
    assert!(residual <= 1e-4, "residual {residual}");

    // normalization at a mass-capture radius
    let t = 0.05;
    let radius = poisson::poisson_mass_radius(t, 1, 4e-7).unwrap();
    let q = poisson::poisson_kernel(t, 1, radius).unwrap();
    let defect = (q.sum() - 1.0).abs();
    assert!(defect <= 1e-6, "normalization defect {defect} at radius {radius}");

    // symbol cross-check at seeded nodes
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: f64 = rng.gen_range(-0.5..0.5);
        let mut hat = q.get(&[0]);
        for n in 1..=radius {
            hat += 2.0 * q.get(&[n]) * (2.0 * std::f64::consts::PI * n as f64 * x).cos();
        }
        let lam = 4.0 * (std::f64::consts::PI * x).sin().powi(2);
        let want = (-t * lam.sqrt()).exp();
        worst = worst.max((hat - want).abs());
    }
    assert!(worst <= 1e-6, "symbol cross-check worst {worst}");
    println!(
        "[PASS] criterion 13: Poisson residual {residual:.2e} (<= 1e-4), mass defect {defect:.2e} \
         (<= 1e-6), symbol agreement {worst:.2e} (<= 1e-6) in {:.2?}",
        start.elapsed()
    );
}
