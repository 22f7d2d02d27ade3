//! Sweep execution and output layout.
//!
//! Theory, simulate and validate sweeps write `train.csv`, `test.csv`,
//! `bias2.csv` and `variance.csv` (errors divided by σ_y²), plus SVG figures
//! when plotting is on. Spectrum sweeps write one `spectrum_NNN.csv` per grid
//! point.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use rlfm::simulator::estimate;
use rlfm::spectrum::{spectral_density, GridSpec};
use rlfm::theory::closed_form;
use rlfm::{SimEstimate, Value};

use crate::config::{AlphaF, Mode, SweepSpec};
use crate::output::{write_spectrum_csv, write_sweep_csv, CsvRow};
use crate::plot::{density_plot, heatmap, line_plot, Series};

pub const QUANTITIES: [&str; 4] = ["train", "test", "bias2", "variance"];

/// |z| above which validate reports a mismatch.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct PointResult {
    pub alpha_f: f64,
    pub alpha_p: f64,
    /// Closed form at the configured λ, divided by σ_y².
    pub theory: [Value; 4],
    pub sim: Option<SimEstimate>,
    pub m: usize,
    pub n_f: usize,
    pub n_p: usize,
}

impl PointResult {
    /// z-scores of the simulation against the theory; `None` where the theory
    /// diverges or nothing was simulated.
    pub fn z_scores(&self) -> [Option<f64>; 4] {
        let Some(sim) = &self.sim else { return [None; 4] };
        let q = sim.quantities();
        std::array::from_fn(|k| self.theory[k].finite().map(|t| q[k].1.z_score(t)))
    }

    pub fn rows(&self) -> Vec<CsvRow> {
        let q = self.sim.as_ref().map(|s| s.quantities());
        (0..4)
            .map(|k| CsvRow {
                alpha_f: self.alpha_f,
                alpha_p: self.alpha_p,
                quantity: QUANTITIES[k].to_string(),
                theory: self.theory[k],
                sim_mean: q.map(|q| q[k].1.mean),
                sim_stderr: q.map(|q| q[k].1.stderr),
                trials: q.map_or(0, |q| q[k].1.n as usize),
                m: self.m,
                n_f: self.n_f,
                n_p: self.n_p,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<PointResult>,
    pub files: Vec<PathBuf>,
}

impl SweepOutcome {
    /// Rows of the validation table with |z| > [`Z_LIMIT`].
    pub fn failures(&self) -> usize {
        self.points.iter().flat_map(|p| p.z_scores()).flatten().filter(|z| z.abs() > Z_LIMIT).count()
    }
}

/// Seed for grid point `index`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn evaluate(spec: &SweepSpec, simulate: bool) -> Result<Vec<PointResult>> {
    spec.points()
        .into_par_iter()
        .enumerate()
        .map(|(i, (af, ap))| {
            let cfg = spec.model_config(af, ap);
            let dims = cfg.dims()?;
            let theory = closed_form(&cfg).scaled_errors_leading(&cfg);
            let sim = if simulate {
                Some(
                    estimate(&cfg, spec.trials, point_seed(spec.seed, i))
                        .with_context(|| format!("simulating alpha_f={af}, alpha_p={ap}"))?
                        .scaled(),
                )
            } else {
                None
            };
            Ok(PointResult { alpha_f: af, alpha_p: ap, theory, sim, m: dims.m, n_f: dims.n_f, n_p: dims.n_p })
        })
        .collect()
}

fn write_file(path: PathBuf, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    files.push(path);
    Ok(())
}

fn write_figures(spec: &SweepSpec, points: &[PointResult], dir: &Path, files: &mut Vec<PathBuf>) -> Result<()> {
    let afs = spec.alpha_f.values();
    let aps = spec.alpha_p.values();
    let per_cut = aps.len();
    for (k, q) in QUANTITIES.iter().enumerate() {
        if aps.len() > 1 && afs.len() <= PALETTE_CUTS {
            let series: Vec<Series> = afs
                .iter()
                .enumerate()
                .map(|(i, af)| {
                    let pts = &points[i * per_cut..(i + 1) * per_cut];
                    Series {
                        label: format!("alpha_f = {af}"),
                        line: pts.iter().map(|p| (p.alpha_p, p.theory[k].to_f64())).collect(),
                        points: pts
                            .iter()
                            .filter_map(|p| p.sim.as_ref().map(|s| s.quantities()[k].1).map(|e| (p.alpha_p, e.mean, e.stderr)))
                            .collect(),
                    }
                })
                .collect();
            let svg = line_plot(&format!("{q} error / sigma_y^2"), q, spec.alpha_p.scale, &afs, &series);
            write_file(dir.join(format!("{q}.svg")), &svg, files)?;
        }
        if afs.len() > 1 && aps.len() > 1 {
            let values: Vec<Vec<f64>> = (0..afs.len())
                .map(|i| points[i * per_cut..(i + 1) * per_cut].iter().map(|p| p.theory[k].to_f64()).collect())
                .collect();
            let fscale = match &spec.alpha_f {
                AlphaF::Axis(a) => a.scale,
                AlphaF::Cuts(_) => spec.alpha_p.scale,
            };
            let svg = heatmap(&format!("log10 {q} / sigma_y^2"), &aps, &afs, spec.alpha_p.scale, fscale, &values);
            write_file(dir.join(format!("{q}_heatmap.svg")), &svg, files)?;
        }
    }
    Ok(())
}

/// Line plots are drawn only for a handful of α_f cuts.
const PALETTE_CUTS: usize = 6;

/// Runs the sweep and writes its files into `spec.out_dir`.
pub fn run_sweep(spec: &SweepSpec, mode: Mode) -> Result<SweepOutcome> {
    let dir = &spec.out_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    if mode == Mode::Spectrum {
        let grid = GridSpec::default();
        let results: Vec<_> = spec
            .points()
            .into_par_iter()
            .map(|(af, ap)| spectral_density(&spec.model_config(af, ap), &grid).map(|s| (af, ap, s)))
            .collect::<std::result::Result<_, _>>()?;
        for (i, (af, ap, s)) in results.iter().enumerate() {
            let path = dir.join(format!("spectrum_{i:03}.csv"));
            write_spectrum_csv(&path, *af, *ap, s)?;
            files.push(path);
            if spec.plot {
                let svg = density_plot(
                    &format!("spectral density, alpha_f = {af}, alpha_p = {ap}, f_zero = {:.4}", s.f_zero),
                    &s.xs,
                    &s.rho,
                    (s.edge_min, s.edge_max),
                );
                write_file(dir.join(format!("spectrum_{i:03}.svg")), &svg, &mut files)?;
            }
        }
        return Ok(SweepOutcome { points: vec![], files });
    }

    let points = evaluate(spec, mode != Mode::Theory)?;
    for (k, q) in QUANTITIES.iter().enumerate() {
        let rows: Vec<CsvRow> = points.iter().map(|p| p.rows().swap_remove(k)).collect();
        let path = dir.join(format!("{q}.csv"));
        write_sweep_csv(&path, &rows)?;
        files.push(path);
    }
    if spec.plot {
        write_figures(spec, &points, dir, &mut files)?;
    }
    Ok(SweepOutcome { points, files })
}

/// Fixed-width table of simulation z-scores.
pub fn validation_table(points: &[PointResult]) -> String {
    let mut out = format!(
        "{:>10} {:>10} {:>9} {:>14} {:>14} {:>11} {:>8}\n",
        "alpha_f", "alpha_p", "quantity", "theory", "sim_mean", "sim_stderr", "z"
    );
    for p in points {
        let Some(sim) = &p.sim else { continue };
        for ((k, (name, e)), z) in sim.quantities().iter().enumerate().zip(p.z_scores()) {
            let z = z.map_or("n/a".to_string(), |z| format!("{z:+.2}"));
            let flag = if z != "n/a" && p.z_scores()[k].is_some_and(|z| z.abs() > Z_LIMIT) { " *" } else { "" };
            out.push_str(&format!(
                "{:>10} {:>10} {:>9} {:>14} {:>14.6e} {:>11.3e} {:>8}{flag}\n",
                p.alpha_f,
                p.alpha_p,
                name,
                match p.theory[k] {
                    Value::Finite(t) => format!("{t:.6e}"),
                    Value::Divergent => "inf".into(),
                },
                e.mean,
                e.stderr,
                z
            ));
        }
    }
    out
}
