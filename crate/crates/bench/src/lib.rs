//! Fixtures shared by the benchmarks.

use faer::Mat;
use rlfm::simulator::sample_instance;
use rlfm::ModelConfig;

/// Feature matrix Z and training labels of one sampled instance.
pub fn design(alpha_f: f64, alpha_p: f64, m: usize, seed: u64) -> (Mat<f64>, Vec<f64>) {
    let cfg = ModelConfig::new(alpha_f, alpha_p).with_m(m);
    let inst = sample_instance(&cfg, seed).expect("instance within the memory budget");
    (inst.projection.features(inst.train1.x.as_ref()), inst.train1.y)
}
