use faer::Mat;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rlfm::simulator::{
    evaluate_instance, kernel_spectrum, run_trial_with, sample_bidiagonal, sample_instance_with, Dataset, Instance,
    Projection, Sampling, SimOptions,
};
use rlfm::theory::susceptibilities_finite_lambda;
use rlfm::ModelConfig;

fn to_na(m: &Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Rotates a dense instance into the bidiagonal basis of its W using an
/// independent Householder bidiagonalization.
fn rotate(inst: &Instance) -> Instance {
    let Projection::Dense(w) = &inst.projection else { panic!("dense instance expected") };
    let bd = nalgebra::linalg::Bidiagonal::new(to_na(w));
    let upper = bd.is_upper_diagonal();
    let (u, b, _vt) = bd.unpack();
    let r = b.nrows();
    let diag = (0..r).map(|i| b[(i, i)]).collect();
    let off = (0..r - 1).map(|i| if upper { b[(i, i + 1)] } else { b[(i + 1, i)] }).collect();
    let beta = u.transpose() * nalgebra::DVector::from_column_slice(&inst.beta);
    let rot = |d: &Dataset| Dataset { x: to_faer(&(to_na(&d.x) * &u)), ..d.clone() };
    Instance {
        dims: inst.dims,
        projection: Projection::Bidiagonal { diag, off, upper },
        beta_rest_norm2: inst.beta.iter().map(|v| v * v).sum::<f64>() - beta.norm_squared(),
        beta: beta.iter().copied().collect(),
        train1: rot(&inst.train1),
        train2: rot(&inst.train2),
        test: rot(&inst.test),
    }
}

#[test]
fn reduced_engine_reproduces_dense_instances() {
    let dense = SimOptions { sampling: Sampling::Dense, ..Default::default() };
    for (af, ap) in [(0.5, 2.0), (2.0, 0.5), (1.5, 3.0), (3.0, 1.5), (0.75, 0.25)] {
        let mut cfg = ModelConfig::new(af, ap).with_m(48);
        cfg.teacher = rlfm::TeacherActivation::tanh();
        for seed in 0..3 {
            let inst = sample_instance_with(&cfg, seed, &dense).unwrap();
            let a = evaluate_instance(&inst, 1e-3).unwrap();
            let b = evaluate_instance(&rotate(&inst), 1e-3).unwrap();
            for (x, y) in [(a.train_error, b.train_error), (a.test_error, b.test_error), (a.bias_cross, b.bias_cross)] {
                assert!(rel(x, y) < 1e-10, "({af},{ap}) seed {seed}: {a:?} vs {b:?}");
            }
        }
    }
}

/// Singular values of a dense Gaussian W and of the sampled bidiagonal block
/// follow the same law: compare tr(WᵀW)² and the largest singular value.
#[test]
fn bidiagonal_law_matches_dense_gaussian() {
    let n = 400;
    for (n_f, n_p) in [(12, 5), (5, 12), (8, 8)] {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (mut dense_stats, mut bidi_stats) = (Vec::new(), Vec::new());
        for _ in 0..n {
            let w = DMatrix::from_fn(n_f, n_p, |_, _| {
                rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng) / (n_p as f64).sqrt()
            });
            let b = to_na(&sample_bidiagonal(&mut rng, n_f, n_p, 1.0).to_dense());
            for (m, out) in [(w, &mut dense_stats), (b, &mut bidi_stats)] {
                let g = m.transpose() * &m;
                let sv = m.singular_values();
                out.push([(&g * &g).trace(), sv.max()]);
            }
        }
        for k in 0..2 {
            let stats = |v: &Vec<[f64; 2]>| {
                let mean = v.iter().map(|s| s[k]).sum::<f64>() / n as f64;
                let var = v.iter().map(|s| (s[k] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (mean, var / n as f64)
            };
            let (m1, v1) = stats(&dense_stats);
            let (m2, v2) = stats(&bidi_stats);
            let z = (m1 - m2) / (v1 + v2).sqrt();
            assert!(z.abs() < 4.0, "({n_f},{n_p}) statistic {k}: {m1} vs {m2}, z = {z}");
        }
    }
}

#[test]
fn reduced_and_dense_sampling_agree_in_distribution() {
    let cfg = ModelConfig::with_snr(0.75, 1.5, 10.0, rlfm::TeacherActivation::linear()).with_m(40);
    let n = 600;
    for q in 0..3 {
        let mut means = Vec::new();
        for sampling in [Sampling::Dense, Sampling::Bidiagonal] {
            let opts = SimOptions { sampling, ..Default::default() };
            let v: Vec<f64> = (0..n)
                .map(|s| {
                    let r = run_trial_with(&cfg, 1000 + s, &opts).unwrap();
                    [r.train_error, r.test_error, r.bias_cross][q]
                })
                .collect();
            let mean = v.iter().sum::<f64>() / n as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            means.push((mean, var / n as f64));
        }
        let z = (means[0].0 - means[1].0) / (means[0].1 + means[1].1).sqrt();
        assert!(z.abs() < 4.0, "quantity {q}: {means:?}");
    }
}

/// ν = N_p⁻¹ Tr(λ + ZᵀZ)⁻¹ from sampled kernels against the root of the χ
/// cubic.
#[test]
fn susceptibility_matches_empirical_resolvent_trace() {
    for (af, ap) in [(0.5, 2.0), (2.0, 0.5), (4.0, 2.0), (1.5, 1.5)] {
        let lambda = 0.3;
        let cfg = ModelConfig { sigma_x2: 1.3, sigma_w2: 0.7, ..ModelConfig::new(af, ap) }.with_m(512).with_lambda(lambda);
        let theory = susceptibilities_finite_lambda(&cfg).unwrap().nu;
        let unit = cfg.sigma_w2 * cfg.sigma_x2;
        let seeds = 4;
        let mut sum = 0.0;
        for seed in 0..seeds {
            let k = kernel_spectrum(&cfg, seed, &SimOptions::default()).unwrap();
            sum += k.all_eigenvalues().iter().map(|e| 1.0 / (lambda + e * unit)).sum::<f64>() / k.n_p as f64;
        }
        let empirical = sum / seeds as f64;
        assert!(rel(empirical, theory) < 5e-3, "({af},{ap}): {empirical} vs {theory}");
    }
}
