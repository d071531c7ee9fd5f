//! CSV and JSON formats.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fracwave_core::observe::GENERATOR;
use fracwave_core::param_select::ParamTrace;
use fracwave_core::{GridFunction, Observations, PointSet};
use serde::{Deserialize, Serialize};

/// Sidecar metadata stored next to an observation CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationMeta {
    pub alpha: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub sigma: f64,
    pub seed: u64,
    pub n: usize,
    pub generator: String,
}

impl ObservationMeta {
    pub fn new(alpha: f64, t_final: f64, obs: &Observations) -> Self {
        Self {
            alpha,
            t_final,
            sigma: obs.sigma,
            seed: obs.seed,
            n: obs.n(),
            generator: GENERATOR.to_string(),
        }
    }
}

/// `<stem>.meta.json` next to `path`.
pub fn meta_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.meta.json"))
}

fn full(v: f64) -> String {
    // 17 significant digits round-trip every f64
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

pub fn write_grid_csv(path: &Path, gf: &GridFunction) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["x", "y", "value"])?;
    for (x, y, v) in gf.iter() {
        w.write_record([full(x), full(y), full(v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_csv(path: &Path) -> Result<GridFunction> {
    let rows = read_triples(path, ["x", "y", "value"])?;
    let g = (rows.len() as f64).sqrt().round() as usize;
    if g * g != rows.len() {
        bail!("{}: {} rows is not a square grid", path.display(), rows.len());
    }
    Ok(GridFunction::from_values(g, rows.into_iter().map(|r| r.2).collect())?)
}

pub fn write_observations(path: &Path, obs: &Observations, meta: &ObservationMeta) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["x", "y", "m"])?;
    for (&(x, y), &m) in obs.points.points().iter().zip(&obs.m) {
        w.write_record([full(x), full(y), full(m)])?;
    }
    w.flush()?;
    write_json(&meta_path(path), meta)
}

pub fn read_observations(path: &Path) -> Result<(Observations, ObservationMeta)> {
    let rows = read_triples(path, ["x", "y", "m"])?;
    let meta: ObservationMeta = serde_json::from_reader(
        File::open(meta_path(path)).with_context(|| format!("opening metadata for {}", path.display()))?,
    )?;
    if meta.n != rows.len() {
        bail!("{}: metadata says n = {}, file has {} rows", path.display(), meta.n, rows.len());
    }
    let points = PointSet::new(rows.iter().map(|r| (r.0, r.1)).collect())?;
    let m = rows.into_iter().map(|r| r.2).collect();
    Ok((Observations::new(points, m, meta.sigma, meta.seed)?, meta))
}

fn read_triples(path: &Path, header: [&str; 3]) -> Result<Vec<(f64, f64, f64)>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        bail!("{}: expected header {:?}, found {:?}", path.display(), header, found);
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> {
            Ok(rec.get(i).context("short row")?.trim().parse::<f64>()?)
        };
        out.push((f(0)?, f(1)?, f(2)?));
    }
    Ok(out)
}

pub fn write_trace_csv(path: &Path, trace: &ParamTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["k", "rho", "residual_n", "norm_X"])?;
    for e in &trace.iterations {
        w.write_record([e.k.to_string(), full(e.rho), full(e.residual_n), full(e.norm_x)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
