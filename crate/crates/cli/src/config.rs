//! Flat `key = value` sweep configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Recognized keys:
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `mode` | from the subcommand | `theory`, `simulate`, `spectrum` or `validate` |
//! | `alpha_f` | required* | one value or a comma-separated list of line cuts |
//! | `alpha_f_min`, `alpha_f_max`, `alpha_f_steps`, `alpha_f_scale` | | α_f axis, instead of `alpha_f` |
//! | `alpha_p_min`, `alpha_p_max` | 0.1, 10 | α_p range |
//! | `alpha_p_steps` | 100 | number of α_p points |
//! | `alpha_p_scale` | `log` | `log` or `linear` |
//! | `m` | 512 | samples per data set |
//! | `snr` | 10 | (σ_β²σ_X² + σ_δy*²)/σ_ε² with σ_X² = σ_W² = σ_ε² = 1 |
//! | `lambda` | 1e-6 | ridge penalty |
//! | `teacher` | `linear` | `linear`, `relu` or `tanh` |
//! | `trials` | 1000 | Monte Carlo trials per point |
//! | `seed` | 0 | base seed |
//! | `out_dir` | `out` | output directory |
//! | `plot` | `true` | write SVG figures |
//!
//! *either `alpha_f` or the four `alpha_f_*` keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rlfm::{ModelConfig, TeacherActivation};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Theory,
    Simulate,
    Spectrum,
    Validate,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "theory" => Ok(Mode::Theory),
            "simulate" => Ok(Mode::Simulate),
            "spectrum" => Ok(Mode::Spectrum),
            "validate" => Ok(Mode::Validate),
            _ => Err(format!("unknown mode '{s}' (expected theory, simulate, spectrum or validate)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Theory => "theory",
            Mode::Simulate => "simulate",
            Mode::Spectrum => "spectrum",
            Mode::Validate => "validate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            _ => Err(format!("unknown scale '{s}' (expected linear or log)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                let t = k as f64 / n;
                if k + 1 == self.steps {
                    self.max
                } else {
                    match self.scale {
                        Scale::Linear => self.min + t * (self.max - self.min),
                        Scale::Log => self.min * (self.max / self.min).powf(t),
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlphaF {
    Cuts(Vec<f64>),
    Axis(Axis),
}

impl AlphaF {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AlphaF::Cuts(v) => v.clone(),
            AlphaF::Axis(a) => a.values(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Option<Mode>,
    pub alpha_f: AlphaF,
    pub alpha_p: Axis,
    pub m: usize,
    pub snr: f64,
    pub lambda: f64,
    pub teacher: String,
    pub trials: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub plot: bool,
}

pub const KEYS: [&str; 18] = [
    "mode",
    "alpha_f",
    "alpha_f_min",
    "alpha_f_max",
    "alpha_f_steps",
    "alpha_f_scale",
    "alpha_p_min",
    "alpha_p_max",
    "alpha_p_steps",
    "alpha_p_scale",
    "m",
    "snr",
    "lambda",
    "teacher",
    "trials",
    "seed",
    "out_dir",
    "plot",
];

pub fn teacher_from_name(name: &str) -> Option<TeacherActivation> {
    match name {
        "linear" => Some(TeacherActivation::linear()),
        "relu" => Some(TeacherActivation::relu()),
        "tanh" => Some(TeacherActivation::tanh()),
        _ => None,
    }
}

impl SweepSpec {
    /// Model at one grid point.
    pub fn model_config(&self, alpha_f: f64, alpha_p: f64) -> ModelConfig {
        let teacher = teacher_from_name(&self.teacher).expect("teacher validated at load time");
        ModelConfig::with_snr(alpha_f, alpha_p, self.snr, teacher).with_m(self.m).with_lambda(self.lambda)
    }

    /// Grid points in output order: α_f outer, α_p inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ap = self.alpha_p.values();
        self.alpha_f.values().into_iter().flat_map(|af| ap.iter().map(move |&p| (af, p))).collect()
    }
}

struct Entry {
    line: usize,
    value: String,
}

pub fn load_config(path: &Path) -> Result<SweepSpec, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config(&text, &path.display().to_string())
}

/// Parses config text; `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<SweepSpec, ConfigError> {
    let parse_err = |line: usize, message: String| ConfigError::Parse { path: origin.to_string(), line, message };
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(parse_err(line, format!("expected 'key = value', got '{content}'")));
        };
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(parse_err(line, format!("unknown key '{key}'")));
        };
        if let Some(prev) = entries.get(known) {
            return Err(parse_err(line, format!("duplicate key '{key}' (first set on line {})", prev.line)));
        }
        entries.insert(known, Entry { line, value: value.trim().to_string() });
    }

    fn get<T: FromStr>(
        entries: &BTreeMap<&str, Entry>,
        key: &str,
        default: T,
        err: &dyn Fn(usize, String) -> ConfigError,
    ) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match entries.get(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|x| err(e.line, format!("bad value for '{key}': {x}"))),
        }
    }

    let err: &dyn Fn(usize, String) -> ConfigError = &parse_err;
    let mode = match entries.get("mode") {
        None => None,
        Some(e) => Some(e.value.parse::<Mode>().map_err(|x| err(e.line, x))?),
    };
    let cuts = match entries.get("alpha_f") {
        None => None,
        Some(e) => Some(
            e.value
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|x| err(e.line, format!("bad value for 'alpha_f': {x}"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let af_keys = ["alpha_f_min", "alpha_f_max", "alpha_f_steps", "alpha_f_scale"];
    let af_axis_given = af_keys.iter().filter(|k| entries.contains_key(*k)).count();
    let af_axis = Axis {
        min: get(&entries, "alpha_f_min", f64::NAN, err)?,
        max: get(&entries, "alpha_f_max", f64::NAN, err)?,
        steps: get(&entries, "alpha_f_steps", 0, err)?,
        scale: get(&entries, "alpha_f_scale", Scale::Log, err)?,
    };
    let alpha_p = Axis {
        min: get(&entries, "alpha_p_min", 0.1, err)?,
        max: get(&entries, "alpha_p_max", 10.0, err)?,
        steps: get(&entries, "alpha_p_steps", 100, err)?,
        scale: get(&entries, "alpha_p_scale", Scale::Log, err)?,
    };
    let spec_without_af = |alpha_f| -> Result<SweepSpec, ConfigError> {
        Ok(SweepSpec {
            mode,
            alpha_f,
            alpha_p: alpha_p.clone(),
            m: get(&entries, "m", 512, err)?,
            snr: get(&entries, "snr", 10.0, err)?,
            lambda: get(&entries, "lambda", rlfm::DEFAULT_LAMBDA, err)?,
            teacher: get(&entries, "teacher", "linear".to_string(), err)?,
            trials: get(&entries, "trials", 1000, err)?,
            seed: get(&entries, "seed", 0, err)?,
            out_dir: get(&entries, "out_dir", PathBuf::from("out"), err)?,
            plot: get(&entries, "plot", true, err)?,
        })
    };

    let mut problems = Vec::new();
    let alpha_f = match (cuts, af_axis_given) {
        (Some(c), 0) => AlphaF::Cuts(c),
        (Some(c), _) => {
            problems.push("give either alpha_f or the alpha_f_min/max/steps axis, not both".into());
            AlphaF::Cuts(c)
        }
        (None, 0) => {
            problems.push("alpha_f is required (or alpha_f_min, alpha_f_max, alpha_f_steps)".into());
            AlphaF::Cuts(vec![])
        }
        (None, _) => {
            for k in &af_keys[..3] {
                if !entries.contains_key(k) {
                    problems.push(format!("{k} is required when an alpha_f axis is given"));
                }
            }
            AlphaF::Axis(af_axis)
        }
    };
    let spec = spec_without_af(alpha_f)?;
    problems.extend(spec.problems());
    if problems.is_empty() {
        Ok(spec)
    } else {
        Err(ConfigError::Validation(problems))
    }
}

impl SweepSpec {
    /// Every violated invariant, in a fixed order.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        let mut check_axis = |name: &str, a: &Axis| {
            if !(a.min > 0.0 && a.min.is_finite()) {
                p.push(format!("{name}_min must be finite and > 0, got {}", a.min));
            }
            if !(a.max.is_finite() && a.max >= a.min) {
                p.push(format!("{name}_max must be finite and >= {name}_min, got {}", a.max));
            }
            if a.steps == 0 {
                p.push(format!("{name}_steps must be >= 1"));
            }
        };
        check_axis("alpha_p", &self.alpha_p);
        match &self.alpha_f {
            AlphaF::Axis(a) => check_axis("alpha_f", a),
            AlphaF::Cuts(c) => {
                for v in c {
                    if !(*v > 0.0 && v.is_finite()) {
                        p.push(format!("alpha_f must be finite and > 0, got {v}"));
                    }
                }
            }
        }
        if self.m == 0 {
            p.push("m must be >= 1".into());
        }
        if !(self.snr >= 0.0 && self.snr.is_finite()) {
            p.push(format!("snr must be finite and >= 0, got {}", self.snr));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            p.push(format!("lambda must be finite and >= 0, got {}", self.lambda));
        }
        if teacher_from_name(&self.teacher).is_none() {
            p.push(format!("teacher must be linear, relu or tanh, got '{}'", self.teacher));
        }
        if self.trials < 2 && matches!(self.mode, None | Some(Mode::Simulate | Mode::Validate)) {
            p.push("trials must be >= 2 to estimate standard errors".into());
        }
        p
    }
}
