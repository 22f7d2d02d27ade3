//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Arguments that do not start with '-' filter criteria by name.

use std::process::ExitCode;
use std::time::Instant;

use rlfm::simulator::{
    default_matrix_count, empirical_spectrum, estimate, kernel_spectrum, EmpiricalSpectrum, Sampling, SimOptions,
};
use rlfm::spectrum::{bin_average_density, spectral_density, support_edges, zero_fraction, GridSpec};
use rlfm::theory::{chi_finite_lambda, classify, closed_form, finite_lambda, nu_coefficients, BOUNDARY_TOL};
use rlfm::{ModelConfig, TeacherActivation, Value};

const M_SIM: usize = 512;
const TRIALS: usize = 1000;
const SNR: f64 = 10.0;
const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

/// Scaled closed-form (train, test, bias², variance) at the configured λ.
fn scaled_theory(cfg: &ModelConfig) -> [f64; 4] {
    closed_form(cfg).scaled_errors_leading(cfg).map(Value::to_f64)
}

/// Simulated vs closed-form comparison at each α_p; returns the worst |z|.
fn compare_sweep(
    cfg_at: impl Fn(f64) -> ModelConfig,
    alphas: &[f64],
    details: &mut Vec<String>,
) -> (bool, f64, Vec<f64>) {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut tests = Vec::new();
    for (i, &ap) in alphas.iter().enumerate() {
        let cfg = cfg_at(ap);
        let start = Instant::now();
        let sim = estimate(&cfg, TRIALS, SEED + i as u64).expect("simulation").scaled();
        eprintln!("  alpha_f={} alpha_p={ap}: {:.1} s", cfg.alpha_f, start.elapsed().as_secs_f64());
        tests.push(sim.test.mean);
        let theory = scaled_theory(&cfg);
        for ((name, q), th) in sim.quantities().iter().zip(theory) {
            let z = q.z_score(th);
            worst = worst.max(z.abs());
            let good = z.abs() <= 3.0;
            ok &= good;
            details.push(format!(
                "{} alpha_p={ap:<6} {name:<8} sim={:.6e} se={:.2e} theory={:.6e} z={z:+.2}",
                if good { "ok " } else { "BAD" },
                q.mean,
                q.stderr,
                th
            ));
        }
    }
    (ok, worst, tests)
}

fn double_descent_small_alpha_f() -> Outcome {
    let alphas = [0.125, 0.25, 0.375, 0.75, 1.5, 3.0, 6.0];
    let cfg = |ap| ModelConfig::with_snr(0.5, ap, SNR, TeacherActivation::linear()).with_m(M_SIM);
    let mut details = Vec::new();
    let (pass, worst, _) = compare_sweep(cfg, &alphas, &mut details);
    Outcome { pass, summary: format!("7 points x 4 quantities, max |z| = {worst:.2}"), details }
}

fn double_descent_large_alpha_f() -> Outcome {
    let alphas = [0.25, 0.5, 0.75, 1.5, 2.0, 4.0, 8.0];
    let cfg = |ap| ModelConfig::with_snr(4.0, ap, SNR, TeacherActivation::linear()).with_m(M_SIM);
    let mut details = Vec::new();
    let (ok, worst, tests) = compare_sweep(cfg, &alphas, &mut details);
    let near = estimate(&cfg(1.05), TRIALS, SEED + 100).expect("simulation").scaled().test.mean;
    let far = tests[6];
    let th_near = scaled_theory(&cfg(1.05))[1];
    let th_far = scaled_theory(&cfg(8.0))[1];
    let ratio = near / far;
    let ratio_ok = ratio >= 5.0 && th_near / th_far >= 5.0;
    details.push(format!(
        "test(1.05)/test(8): simulated {ratio:.2}, closed form {:.2} (sim {near:.4} / {far:.4})",
        th_near / th_far
    ));
    Outcome {
        pass: ok && ratio_ok,
        summary: format!("max |z| = {worst:.2}, test(1.05)/test(8) = {ratio:.1} (need >= 5)"),
        details,
    }
}

fn decomposition() -> Outcome {
    let start = Instant::now();
    let grid = log_grid(50, 0.1, 10.0);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for &af in &grid {
        for &ap in &grid {
            if classify(af, ap, BOUNDARY_TOL).is_boundary() {
                continue;
            }
            let mut cfg = ModelConfig::with_snr(af, ap, SNR, TeacherActivation::linear());
            cfg.sigma_eps2 = 1.0;
            let t = closed_form(&cfg);
            let test = t.test_error.unwrap();
            let resid = test - t.bias2.unwrap() - t.variance.unwrap() - cfg.sigma_eps2;
            worst = worst.max(resid.abs() / test.abs());
            checked += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst <= 1e-10 && elapsed < 1.0,
        summary: format!("{checked} non-boundary points, max relative residual {worst:.2e}, {elapsed:.3} s"),
        details: vec![],
    }
}

fn cubic_degeneration() -> Outcome {
    let grid = log_grid(50, 0.1, 10.0);
    let mut worst = 0.0f64;
    let mut worst_boundary = 0.0f64;
    let mut checked = 0;
    for &af in &grid {
        for &ap in &grid {
            let cfg = ModelConfig::new(af, ap).with_lambda(1e-12);
            let chi = chi_finite_lambda(&cfg).expect("root");
            let err = (chi - 0.0f64.max(1.0 - af).max(1.0 - ap)).abs();
            if classify(af, ap, BOUNDARY_TOL).is_boundary() {
                worst_boundary = worst_boundary.max(err);
            } else {
                worst = worst.max(err);
                checked += 1;
            }
        }
    }
    Outcome {
        pass: worst <= 1e-8,
        summary: format!("{checked} non-boundary points, max |chi - chi0| = {worst:.2e}"),
        details: vec![format!(
            "on the alpha_f = alpha_p diagonal the root is double and moves as sqrt(lambda_bar): max deviation {worst_boundary:.2e}"
        )],
    }
}

fn convergence_order() -> Outcome {
    let lbs = [1e-2, 1e-3, 1e-4];
    let base = ModelConfig::with_snr(4.0, 2.0, SNR, TeacherActivation::linear());
    let pts: Vec<(f64, f64)> = lbs
        .iter()
        .map(|&lb| {
            let cfg = base.clone().with_lambda(lb * base.sigma_w2 * base.sigma_x2);
            (lb.ln(), finite_lambda(&cfg).expect("finite lambda").squared.dy2.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    Outcome {
        pass: (slope - 2.0).abs() <= 0.1,
        summary: format!("log-log slope of <dy^2> = {slope:.4}"),
        details: vec![],
    }
}

fn normalization_points() -> Vec<(String, Vec<(f64, f64)>)> {
    let off = 0.02;
    let mut out = Vec::new();
    for af in [0.25, 1.0, 4.0] {
        for ap in [0.125, 1.0, 8.0] {
            let pts = if (af, ap) == (1.0, 1.0) {
                // the fourth corner (0.98, 0.98) sits on the α_f = α_p line
                vec![(1.0 - off, 1.0 + off), (1.0 + off, 1.0 - off), (1.0 + off, 1.0 + off)]
            } else if classify(af, ap, BOUNDARY_TOL).is_boundary() {
                if af == 1.0 {
                    vec![(af - off, ap), (af + off, ap)]
                } else {
                    vec![(af, ap - off), (af, ap + off)]
                }
            } else {
                vec![(af, ap)]
            };
            out.push((format!("({af}, {ap})"), pts));
        }
    }
    out
}

fn spectrum_normalization() -> Outcome {
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for (label, pts) in normalization_points() {
        for (af, ap) in pts {
            let s = spectral_density(&ModelConfig::new(af, ap), &GridSpec { points: 20_000, ..Default::default() })
                .expect("spectrum");
            let err = (s.bulk_mass() + s.f_zero - 1.0).abs();
            worst = worst.max(err);
            details.push(format!(
                "{} {label} at ({af}, {ap}): bulk {:.6} + f_zero {:.6} - 1 = {:+.2e}",
                if err <= 1e-3 { "ok " } else { "BAD" },
                s.bulk_mass(),
                s.f_zero,
                s.bulk_mass() + s.f_zero - 1.0
            ));
        }
    }
    Outcome { pass: worst <= 1e-3, summary: format!("nine points, max |mass - 1| = {worst:.2e}"), details }
}

/// Sup distance between the histogram and the bin-averaged density, relative
/// to the peak density.
fn histogram_distance(cfg: &ModelConfig, emp: &EmpiricalSpectrum, n_bins: usize) -> (f64, f64) {
    let (lo, hi) = support_edges(cfg).expect("edges");
    let hist = emp.histogram(lo, hi, n_bins);
    let mut sup = 0.0f64;
    let mut peak = 0.0f64;
    for (w, d) in hist.edges.windows(2).zip(&hist.density) {
        let rho = bin_average_density(cfg, w[0], w[1], 32);
        peak = peak.max(rho);
        sup = sup.max((d - rho).abs());
    }
    (sup / peak, peak)
}

fn empirical_spectra() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (af, ap) in [(4.0, 2.0), (0.5, 2.0), (2.0, 0.5)] {
        let cfg = ModelConfig::new(af, ap).with_m(4096);
        let dims = cfg.dims().unwrap();
        let count = default_matrix_count(&dims);
        let emp = empirical_spectrum(&cfg, count, SEED, 60).expect("spectrum");
        let (dist, _) = histogram_distance(&cfg, &emp, 60);
        let zf_err = (emp.zero_fraction() - zero_fraction(af, ap)).abs();
        let good = dist < 0.05 && zf_err <= 2.0 / dims.n_p as f64;
        ok &= good;
        details.push(format!(
            "{} ({af}, {ap}) {count} matrices: sup |hist - rho| / peak = {:.2}%, zero fraction {:.6} vs {:.6}",
            if good { "ok " } else { "BAD" },
            100.0 * dist,
            emp.zero_fraction(),
            zero_fraction(af, ap)
        ));
    }
    Outcome { pass: ok, summary: "M = 4096 at (4,2), (0.5,2), (2,0.5)".into(), details }
}

fn edge_closure() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let matrices = 2;
    for side in [-1.0, 1.0] {
        let mut prev = f64::INFINITY;
        for d in [0.2, 0.1, 0.05] {
            let ap = 1.0 + side * d;
            let cfg = ModelConfig::new(4.0, ap).with_m(4096);
            let (lo, hi) = support_edges(&cfg).expect("edges");
            let monotone = lo < prev && lo > 0.0;
            prev = lo;
            let mut min_eig = f64::INFINITY;
            let mut max_eig = 0.0f64;
            for i in 0..matrices {
                let k = kernel_spectrum(&cfg, SEED + 1000 * i + (100.0 * ap) as u64, &SimOptions::default())
                    .expect("kernel");
                min_eig = min_eig.min(k.nonzero[0]);
                max_eig = max_eig.max(*k.nonzero.last().unwrap());
            }
            let brackets = min_eig >= lo;
            ok &= monotone && brackets;
            details.push(format!(
                "{} alpha_p={ap}: edge_min {lo:.6e} (monotone: {monotone}), smallest sampled nonzero {min_eig:.6e}; \
                 edge_max {hi:.5} vs largest {max_eig:.5}",
                if monotone && brackets { "ok " } else { "BAD" }
            ));
        }
    }
    Outcome {
        pass: ok,
        summary: format!("alpha_f = 4, alpha_p in 1 +- {{0.2, 0.1, 0.05}}, {matrices} matrices per point"),
        details,
    }
}

fn effective_noise() -> Outcome {
    let cfg = ModelConfig::with_snr(0.5, 2.0, SNR, TeacherActivation::tanh()).with_m(M_SIM);
    let sim = estimate(&cfg, TRIALS, SEED + 7).expect("simulation").scaled();
    let lin = scaled_theory(&cfg.linearized());
    let s = cfg.label_variance();
    let targets = [lin[0], lin[1], cfg.sigma_dy2() / s, lin[3]];
    let mut details = Vec::new();
    let mut ok = true;
    let mut worst = 0.0f64;
    for ((name, q), th) in sim.quantities().iter().zip(targets) {
        let z = q.z_score(th);
        worst = worst.max(z.abs());
        ok &= z.abs() <= 3.0;
        details.push(format!("{name:<8} sim={:.6e} se={:.2e} target={th:.6e} z={z:+.2}", q.mean, q.stderr));
    }
    Outcome {
        pass: ok,
        summary: format!("tanh teacher, sigma_dy^2 = {:.4}, max |z| = {worst:.2}", cfg.sigma_dy2()),
        details,
    }
}

fn rank_link() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let dense = SimOptions { sampling: Sampling::Dense, ..Default::default() };
    for (af, ap) in [(0.5, 2.0), (2.0, 0.5), (4.0, 4.0)] {
        let cfg = ModelConfig::new(af, ap).with_m(2048);
        let (nu_m1, _) = nu_coefficients(&cfg);
        let n_p = cfg.dims().unwrap().n_p as f64;
        for seed in 0..5 {
            let k = kernel_spectrum(&cfg, SEED + seed, &dense).expect("kernel");
            let good = (k.rank_deficit() - nu_m1).abs() <= 2.0 / n_p;
            ok &= good;
            details.push(format!(
                "{} ({af}, {ap}) seed {seed}: 1 - rank/N_p = {:.6}, nu_-1 = {nu_m1:.6}",
                if good { "ok " } else { "BAD" },
                k.rank_deficit()
            ));
        }
    }
    Outcome { pass: ok, summary: "M = 2048, dense W, 5 seeds at (0.5,2), (2,0.5), (4,4)".into(), details }
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("double_descent_alpha_f_0_5", double_descent_small_alpha_f),
        ("double_descent_alpha_f_4", double_descent_large_alpha_f),
        ("decomposition_identity", decomposition),
        ("cubic_degeneration", cubic_degeneration),
        ("finite_lambda_convergence_order", convergence_order),
        ("spectrum_normalization", spectrum_normalization),
        ("empirical_spectra", empirical_spectra),
        ("edge_closure", edge_closure),
        ("effective_noise", effective_noise),
        ("rank_susceptibility_link", rank_link),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {name}: {} [{:.1} s]", out.summary, start.elapsed().as_secs_f64());
        for d in &out.details {
            println!("    {d}");
        }
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
