//! End-to-end runs: truth projection, synthetic observations, assembly,
//! parameter choice, solve and error evaluation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use fracwave_core::builtin::{Example, G_OBS, J_MAX, J_REF};
use fracwave_core::observe::{sample_observations, uniform_grid_points};
use fracwave_core::param_select::{iterate, oracle_rho, ParamConfig, ParamTrace};
use fracwave_core::spectral::{norm_gamma, synthesize_grid};
use fracwave_core::tikhonov::{assemble_from_rows, design_rows, errors, solve, DesignSystem, SolveResult};
use fracwave_core::{ForwardConfig, Observations, PointSet, SpectralField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ConfigFile;
use crate::io;

/// Penalty space: `L2` is `γ = 0`, `H1` is `γ = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reg {
    L2,
    H1,
}

impl Reg {
    pub fn gamma(self) -> f64 {
        match self {
            Reg::L2 => 0.0,
            Reg::H1 => 0.5,
        }
    }
}

impl FromStr for Reg {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Reg::L2),
            "h1" => Ok(Reg::H1),
            _ => bail!("unknown regularization `{s}` (expected l2 or h1)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoMode {
    Auto,
    Oracle,
    Fixed(f64),
}

impl FromStr for RhoMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(RhoMode::Auto),
            "oracle" => Ok(RhoMode::Oracle),
            _ => {
                let v: f64 = s.parse().with_context(|| format!("rho `{s}` is not auto, oracle or a number"))?;
                if !(v > 0.0) {
                    bail!("rho must be positive");
                }
                Ok(RhoMode::Fixed(v))
            }
        }
    }
}

impl fmt::Display for RhoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoMode::Auto => f.write_str("auto"),
            RhoMode::Oracle => f.write_str("oracle"),
            RhoMode::Fixed(v) => write!(f, "{v:e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub example: Example,
    pub alpha: f64,
    pub t_final: f64,
    pub sigma: f64,
    pub seeds: Vec<u64>,
    pub g: usize,
    pub reg: Reg,
    pub j_max: usize,
    pub j_ref: usize,
    pub rho_mode: RhoMode,
    /// Overrides the default stopping tolerance of the ρ iteration.
    pub tol_rho: Option<f64>,
    pub diffusivity: f64,
}

impl ExperimentSpec {
    pub fn builtin(example: Example) -> Self {
        Self {
            name: example.id().to_string(),
            example,
            alpha: 1.2,
            t_final: example.t_final(),
            sigma: example.sigma(),
            seeds: vec![0],
            g: G_OBS,
            reg: Reg::L2,
            j_max: J_MAX,
            j_ref: J_REF,
            rho_mode: RhoMode::Auto,
            tol_rho: None,
            diffusivity: 1.0,
        }
    }

    /// Applies the values present in a config file on top of `self`.
    pub fn apply_config(&mut self, c: &ConfigFile) -> Result<()> {
        if let Some(e) = c.get("example") {
            let ex = Example::from_id(e).with_context(|| format!("unknown example `{e}`"))?;
            *self = Self {
                seeds: self.seeds.clone(),
                ..Self::builtin(ex)
            };
        }
        if let Some(v) = c.parsed("alpha")? {
            self.alpha = v;
        }
        if let Some(v) = c.parsed("T")? {
            self.t_final = v;
        }
        if let Some(v) = c.parsed("sigma")? {
            self.sigma = v;
        }
        let seed: Option<u64> = c.parsed("seed")?;
        let count: Option<u64> = c.parsed("seeds")?;
        if seed.is_some() || count.is_some() {
            self.seeds = seed_list(seed.unwrap_or(0), count.unwrap_or(1));
        }
        if let Some(v) = c.parsed("g")? {
            self.g = v;
        }
        if let Some(v) = c.parsed("Jmax")? {
            self.j_max = v;
        }
        if let Some(v) = c.parsed("reg")? {
            self.reg = v;
        }
        if let Some(v) = c.parsed("rho")? {
            self.rho_mode = v;
        }
        if let Some(v) = c.parsed("tol-rho")? {
            self.tol_rho = Some(v);
        }
        if let Some(v) = c.parsed("diffusivity")? {
            self.diffusivity = v;
        }
        Ok(())
    }

    pub fn forward_config(&self) -> Result<ForwardConfig> {
        Ok(ForwardConfig::with_diffusivity(self.alpha, self.t_final, self.j_max, self.diffusivity)?)
    }

    pub fn param_config(&self, n: usize) -> Result<ParamConfig> {
        let beta = self.reg.gamma();
        Ok(match self.tol_rho {
            Some(t) => ParamConfig::with_tolerance(beta, n, t)?,
            None => ParamConfig::new(beta, n)?,
        })
    }
}

/// `count` consecutive seeds starting at `first`.
pub fn seed_list(first: u64, count: u64) -> Vec<u64> {
    (0..count.max(1)).map(|i| first + i).collect()
}

/// Builds the design system with rows computed in parallel.
pub fn assemble_parallel(ps: &PointSet, cfg: &ForwardConfig, gamma: f64) -> Result<DesignSystem> {
    let props = cfg.propagators()?;
    let chunk = 64;
    let rows: Vec<f64> = ps
        .points()
        .par_chunks(chunk)
        .flat_map_iter(|pts| design_rows(pts, cfg, &props))
        .collect();
    Ok(assemble_from_rows(ps, cfg, gamma, props, rows)?)
}

/// Everything that does not depend on the noise seed.
pub struct Prepared {
    pub spec: ExperimentSpec,
    pub cfg: ForwardConfig,
    /// Truth at `j_ref` modes per dimension.
    pub truth: SpectralField,
    pub points: PointSet,
    pub system: DesignSystem,
}

pub fn prepare(spec: &ExperimentSpec) -> Result<Prepared> {
    let cfg = spec.forward_config()?;
    if spec.j_ref < spec.j_max {
        bail!("J_ref ({}) must be at least J_max ({})", spec.j_ref, spec.j_max);
    }
    let truth = spec.example.coefficients(spec.j_ref);
    let points = uniform_grid_points(spec.g)?;
    let system = assemble_parallel(&points, &cfg, spec.reg.gamma())?;
    Ok(Prepared {
        spec: spec.clone(),
        cfg,
        truth,
        points,
        system,
    })
}

impl Prepared {
    /// Noisy data from the reference-resolution truth.
    pub fn observations(&self, seed: u64) -> Result<Observations> {
        let cfg_ref = ForwardConfig::with_diffusivity(self.cfg.alpha, self.cfg.t_final, self.spec.j_ref, self.cfg.diffusivity)?;
        Ok(sample_observations(&self.truth, &cfg_ref, &self.points, self.spec.sigma, seed)?)
    }

    pub fn oracle_rho(&self) -> Result<f64> {
        let pc = self.spec.param_config(self.points.len())?;
        Ok(oracle_rho(self.spec.sigma, norm_gamma(&self.truth, self.spec.reg.gamma()), &pc)?)
    }

    pub fn reconstruct(&self, obs: &Observations) -> Result<(SolveResult, Option<ParamTrace>)> {
        match self.spec.rho_mode {
            RhoMode::Fixed(rho) => Ok((solve(&self.system, obs, rho)?, None)),
            RhoMode::Oracle => Ok((solve(&self.system, obs, self.oracle_rho()?)?, None)),
            RhoMode::Auto => {
                let pc = self.spec.param_config(obs.n())?;
                let trace = iterate(&self.system, obs, &pc)?;
                Ok((trace.final_result.clone(), Some(trace)))
            }
        }
    }

    pub fn run_seed(&self, seed: u64) -> Result<SeedRun> {
        let obs = self.observations(seed)?;
        let (result, trace) = self.reconstruct(&obs)?;
        let (err_l2, err_hm1) = errors(&result.a_rec, &self.truth)?;
        let summary = Summary {
            example: self.spec.name.clone(),
            alpha: self.cfg.alpha,
            t_final: self.cfg.t_final,
            sigma: self.spec.sigma,
            gamma: self.spec.reg.gamma(),
            n: obs.n(),
            j_max: self.cfg.j_max,
            rho_mode: self.spec.rho_mode.to_string(),
            rho_final: result.rho,
            residual_n: result.residual_n,
            err_l2,
            err_hm1,
            iterations: trace.as_ref().map_or(0, |t| t.iterations.len()),
            seed,
        };
        Ok(SeedRun {
            summary,
            converged: trace.as_ref().is_none_or(|t| t.converged),
            obs,
            result,
            trace,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub example: String,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub n: usize,
    #[serde(rename = "J_max")]
    pub j_max: usize,
    pub rho_mode: String,
    pub rho_final: f64,
    pub residual_n: f64,
    #[serde(rename = "err_L2")]
    pub err_l2: f64,
    #[serde(rename = "err_Hm1")]
    pub err_hm1: f64,
    pub iterations: usize,
    pub seed: u64,
}

pub struct SeedRun {
    pub summary: Summary,
    /// False when the ρ iteration stopped without meeting its tolerance.
    pub converged: bool,
    pub obs: Observations,
    pub result: SolveResult,
    pub trace: Option<ParamTrace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample standard deviation (zero for a single value).
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub example: String,
    pub seeds: Vec<u64>,
    #[serde(rename = "err_L2")]
    pub err_l2: MeanStd,
    #[serde(rename = "err_Hm1")]
    pub err_hm1: MeanStd,
    pub rho_final: MeanStd,
}

impl Aggregate {
    pub fn from_summaries(example: &str, s: &[Summary]) -> Self {
        let col = |f: fn(&Summary) -> f64| s.iter().map(f).collect::<Vec<_>>();
        Self {
            example: example.to_string(),
            seeds: s.iter().map(|x| x.seed).collect(),
            err_l2: MeanStd::of(&col(|x| x.err_l2)),
            err_hm1: MeanStd::of(&col(|x| x.err_hm1)),
            rho_final: MeanStd::of(&col(|x| x.rho_final)),
        }
    }
}

/// Runs every seed in parallel. Results come back in seed order.
pub fn run_seeds(prep: &Prepared) -> Result<Vec<SeedRun>> {
    prep.spec.seeds.par_iter().map(|&s| prep.run_seed(s)).collect()
}

/// Grid size of the reconstruction plots.
pub const PLOT_GRID: usize = 160;

/// Full run with all outputs under `out_dir`:
/// `<name>_seed<s>.json`, `<name>_seed<s>_obs.csv` (+ `.meta.json`),
/// `<name>_seed<s>_rec.csv`, `<name>_seed<s>_trace.csv` when iterating, and
/// `<name>_aggregate.json`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<(Vec<Summary>, Aggregate)> {
    let prep = prepare(spec)?;
    let runs = run_seeds(&prep)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for run in &runs {
        let stem = format!("{}_seed{}", spec.name, run.summary.seed);
        io::write_json(&out_dir.join(format!("{stem}.json")), &run.summary)?;
        let meta = io::ObservationMeta::new(spec.alpha, spec.t_final, &run.obs);
        io::write_observations(&out_dir.join(format!("{stem}_obs.csv")), &run.obs, &meta)?;
        io::write_grid_csv(
            &out_dir.join(format!("{stem}_rec.csv")),
            &synthesize_grid(&run.result.a_rec, PLOT_GRID),
        )?;
        if let Some(trace) = &run.trace {
            io::write_trace_csv(&out_dir.join(format!("{stem}_trace.csv")), trace)?;
        }
    }
    let summaries: Vec<Summary> = runs.into_iter().map(|r| r.summary).collect();
    let agg = Aggregate::from_summaries(&spec.name, &summaries);
    io::write_json(&out_dir.join(format!("{}_aggregate.json", spec.name)), &agg)?;
    Ok((summaries, agg))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: i32,
    pub rho: f64,
    #[serde(rename = "err_L2")]
    pub err_l2: f64,
    #[serde(rename = "err_Hm1")]
    pub err_hm1: f64,
}

/// Fixed-ρ solves at `ρ = 10^{−k}` for each `k` on the first seed's data.
pub fn rho_sweep(prep: &Prepared, ks: &[i32]) -> Result<Vec<SweepRow>> {
    let seed = *prep.spec.seeds.first().context("no seed")?;
    let obs = prep.observations(seed)?;
    ks.par_iter()
        .map(|&k| {
            let rho = 10f64.powi(-k);
            let r = solve(&prep.system, &obs, rho)?;
            let (err_l2, err_hm1) = errors(&r.a_rec, &prep.truth)?;
            Ok(SweepRow { k, rho, err_l2, err_hm1 })
        })
        .collect()
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["k", "rho", "err_L2", "err_Hm1"])?;
    for r in rows {
        w.write_record([r.k.to_string(), format!("{:e}", r.rho), format!("{:.16e}", r.err_l2), format!("{:.16e}", r.err_hm1)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_modes() {
        assert_eq!("auto".parse::<RhoMode>().unwrap(), RhoMode::Auto);
        assert_eq!("3e-5".parse::<RhoMode>().unwrap(), RhoMode::Fixed(3e-5));
        assert!("-1".parse::<RhoMode>().is_err());
        assert_eq!("H1".parse::<Reg>().unwrap(), Reg::H1);
    }

    #[test]
    fn mean_std() {
        let m = MeanStd::of(&[1.0, 2.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.std, 1.0);
        assert_eq!(MeanStd::of(&[5.0]).std, 0.0);
    }

    #[test]
    fn config_overrides_builtin() {
        let mut s = ExperimentSpec::builtin(Example::Ex1);
        let c = ConfigFile::parse("example = ex3\nalpha = 1.8\nseeds = 3\nrho = oracle").unwrap();
        s.apply_config(&c).unwrap();
        assert_eq!(s.example, Example::Ex3);
        assert_eq!(s.t_final, 0.1);
        assert_eq!(s.alpha, 1.8);
        assert_eq!(s.seeds, vec![0, 1, 2]);
        assert_eq!(s.rho_mode, RhoMode::Oracle);
    }
}
