//! Random linear features regression: closed-form theory, Hessian spectra
//! and a Monte Carlo simulator.
//!
//! ```
//! use rlfm::{theory::closed_form, ModelConfig};
//!
//! let cfg = ModelConfig::new(0.5, 2.0);
//! let t = closed_form(&cfg);
//! assert!((t.test_error.unwrap() - 2.0).abs() < 1e-12);
//! ```

pub mod config;
pub mod error;
pub mod simulator;
pub mod spectrum;
pub mod teacher;
pub mod theory;
pub mod value;

pub use config::{Dims, ModelConfig, DEFAULT_LAMBDA};
pub use error::{Error, Result};
pub use simulator::{SimEstimate, TrialResult};
pub use spectrum::{GridSpec, SpectrumResult};
pub use teacher::{TeacherActivation, TeacherKind};
pub use theory::{Regime, TheoryResult};
pub use value::Value;
