//! CSV formats.
//!
//! Sweep files start with the tag line `#format=rlfm-sweep/1` followed by the
//! column header. Floats use the shortest representation that parses back to
//! the same bits; a divergent theory value is written as `inf`, and simulation
//! columns are empty for theory-only sweeps.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rlfm::{SpectrumResult, Value};

pub const SWEEP_TAG: &str = "#format=rlfm-sweep/1";
pub const SPECTRUM_TAG: &str = "#format=rlfm-spectrum/1";
pub const SWEEP_COLUMNS: [&str; 10] =
    ["alpha_f", "alpha_p", "quantity", "theory", "sim_mean", "sim_stderr", "trials", "m", "n_f", "n_p"];

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub alpha_f: f64,
    pub alpha_p: f64,
    pub quantity: String,
    pub theory: Value,
    pub sim_mean: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub trials: usize,
    pub m: usize,
    pub n_f: usize,
    pub n_p: usize,
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse().with_context(|| format!("bad {what} '{s}'"))
}

fn parse_opt(s: &str, what: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, what).map(Some)
    }
}

impl CsvRow {
    fn record(&self) -> [String; 10] {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        [
            fmt_f64(self.alpha_f),
            fmt_f64(self.alpha_p),
            self.quantity.clone(),
            self.theory.to_string(),
            opt(self.sim_mean),
            opt(self.sim_stderr),
            self.trials.to_string(),
            self.m.to_string(),
            self.n_f.to_string(),
            self.n_p.to_string(),
        ]
    }

    fn from_record(r: &csv::StringRecord) -> Result<CsvRow> {
        if r.len() != SWEEP_COLUMNS.len() {
            bail!("expected {} fields, got {}", SWEEP_COLUMNS.len(), r.len());
        }
        let theory = match &r[3] {
            "inf" => Value::Divergent,
            s => Value::Finite(parse_f64(s, "theory")?),
        };
        Ok(CsvRow {
            alpha_f: parse_f64(&r[0], "alpha_f")?,
            alpha_p: parse_f64(&r[1], "alpha_p")?,
            quantity: r[2].to_string(),
            theory,
            sim_mean: parse_opt(&r[4], "sim_mean")?,
            sim_stderr: parse_opt(&r[5], "sim_stderr")?,
            trials: r[6].parse()?,
            m: r[7].parse()?,
            n_f: r[8].parse()?,
            n_p: r[9].parse()?,
        })
    }
}

pub fn write_sweep_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(out, "{SWEEP_TAG}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

fn check_tag(path: &Path, tag: &str) -> Result<()> {
    let mut first = String::new();
    BufReader::new(File::open(path)?).read_line(&mut first)?;
    if first.trim_end() != tag {
        bail!("{}: expected '{tag}' on the first line", path.display());
    }
    Ok(())
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<CsvRow>> {
    check_tag(path, SWEEP_TAG)?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    if r.headers()?.iter().ne(SWEEP_COLUMNS) {
        bail!("{}: unexpected column header", path.display());
    }
    r.records()
        .map(|rec| CsvRow::from_record(&rec?).with_context(|| format!("reading {}", path.display())))
        .collect()
}

/// `(x, ρ)` table preceded by `#key=value` lines for the point and its edges.
pub fn write_spectrum_csv(path: &Path, alpha_f: f64, alpha_p: f64, s: &SpectrumResult) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(out, "{SPECTRUM_TAG}")?;
    for (k, v) in [
        ("alpha_f", alpha_f),
        ("alpha_p", alpha_p),
        ("edge_min", s.edge_min),
        ("edge_max", s.edge_max),
        ("f_zero", s.f_zero),
    ] {
        writeln!(out, "#{k}={}", fmt_f64(v))?;
    }
    writeln!(out, "x,rho")?;
    for (x, r) in s.xs.iter().zip(&s.rho) {
        writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*r))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a spectrum file back into `(alpha_f, alpha_p, result)`.
pub fn read_spectrum_csv(path: &Path) -> Result<(f64, f64, SpectrumResult)> {
    check_tag(path, SPECTRUM_TAG)?;
    let text = std::fs::read_to_string(path)?;
    let mut meta = std::collections::HashMap::new();
    let (mut xs, mut rho) = (Vec::new(), Vec::new());
    for line in text.lines().skip(1) {
        if let Some(kv) = line.strip_prefix('#') {
            let (k, v) = kv.split_once('=').context("malformed metadata line")?;
            meta.insert(k.to_string(), parse_f64(v, k)?);
        } else if line != "x,rho" {
            let (x, r) = line.split_once(',').context("malformed data line")?;
            xs.push(parse_f64(x, "x")?);
            rho.push(parse_f64(r, "rho")?);
        }
    }
    let get = |k: &str| meta.get(k).copied().with_context(|| format!("missing #{k}"));
    Ok((
        get("alpha_f")?,
        get("alpha_p")?,
        SpectrumResult { xs, rho, edge_min: get("edge_min")?, edge_max: get("edge_max")?, f_zero: get("f_zero")? },
    ))
}
