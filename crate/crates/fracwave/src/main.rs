use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fracwave_core::builtin::Example;
use fracwave_core::forward::forward_grid;
use fracwave_core::mittag_leffler::{find_real_roots, ml, propagator_conditioning, MLParams};
use fracwave_core::observe::{quasi_uniformity, default_probe, uniform_grid_points};
use fracwave_core::param_select::iterate;
use fracwave_core::spectral::synthesize_grid;
use fracwave_core::tikhonov::{eigen_growth_diagnostic, errors, log_log_slope, solve};
use fracwave_core::ForwardConfig;
use fracwave::config::ConfigFile;
use fracwave::experiment::{self, prepare, run_experiment, ExperimentSpec, Reg, RhoMode, PLOT_GRID};
use fracwave::io;

#[derive(Parser)]
#[command(name = "fracwave", version, about = "Initial-velocity recovery for the time-fractional wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline for one example over one or more seeds.
    Run(RunArgs),
    /// Reconstruction error for ρ = 10^-k over a range of k.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 2)]
        kmin: i32,
        #[arg(long, default_value_t = 8)]
        kmax: i32,
    },
    /// Writes S a₁ on a uniform grid as CSV.
    Forward {
        #[command(flatten)]
        run: RunArgs,
        /// Grid size per dimension.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Writes noisy observations of an example.
    Observe {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Tikhonov solve at a fixed ρ from an observation file.
    Reconstruct(ReconstructArgs),
    /// Fixed-point ρ iteration from an observation file.
    Autoparam(ReconstructArgs),
    /// Evaluates E_{α,β}(z), or lists the real roots of E_{α,2}(−t).
    MlEval {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true, num_args = 1..)]
        z: Vec<f64>,
        /// Search bound for the real roots of E_{α,2}(−t).
        #[arg(long)]
        roots: Option<f64>,
    },
    /// Roots, propagator conditioning and eigenvalue growth on a small instance.
    Diagnose {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
        #[arg(long = "Jmax", default_value_t = 8)]
        j_max: usize,
        #[arg(long, default_value_t = 12)]
        g: usize,
        #[arg(long, default_value = "h1")]
        reg: Reg,
        #[arg(long, default_value_t = 1e4)]
        root_bound: f64,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Builtin example: ex1, ex2 or ex3.
    #[arg(long, short = 'e')]
    example: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long = "Jmax")]
    j_max: Option<usize>,
    #[arg(long)]
    reg: Option<Reg>,
    /// auto, oracle or a positive number.
    #[arg(long)]
    rho: Option<RhoMode>,
    #[arg(long = "tol-rho")]
    tol_rho: Option<f64>,
    /// Factor multiplying the Laplacian.
    #[arg(long)]
    diffusivity: Option<f64>,
    #[arg(long = "out-dir", env = "FRACWAVE_OUT")]
    out_dir: Option<PathBuf>,
    /// Example id as a positional alternative to --example.
    #[arg(value_name = "EXAMPLE")]
    positional: Option<String>,
}

impl RunArgs {
    /// Builtin defaults, then the config file, then flags.
    fn spec(&self) -> Result<(ExperimentSpec, PathBuf)> {
        let config = match &self.config {
            Some(p) => Some(ConfigFile::load(p)?),
            None => None,
        };
        let id = self
            .example
            .clone()
            .or_else(|| self.positional.clone())
            .or_else(|| config.as_ref().and_then(|c| c.get("example").map(str::to_string)))
            .unwrap_or_else(|| "ex1".to_string());
        let ex = Example::from_id(&id).with_context(|| format!("unknown example `{id}`"))?;
        let mut spec = ExperimentSpec::builtin(ex);
        let mut out_dir = None;
        if let Some(c) = &config {
            spec.apply_config(c)?;
            spec.example = ex;
            spec.name = ex.id().to_string();
            out_dir = c.get("out-dir").map(PathBuf::from);
        }
        if let Some(v) = self.alpha {
            spec.alpha = v;
        }
        if let Some(v) = self.t_final {
            spec.t_final = v;
        }
        if let Some(v) = self.sigma {
            spec.sigma = v;
        }
        if self.seed.is_some() || self.seeds.is_some() {
            let first = self.seed.or_else(|| spec.seeds.first().copied()).unwrap_or(0);
            spec.seeds = experiment::seed_list(first, self.seeds.unwrap_or(1));
        }
        if let Some(v) = self.g {
            spec.g = v;
        }
        if let Some(v) = self.j_max {
            spec.j_max = v;
        }
        if let Some(v) = self.reg {
            spec.reg = v;
        }
        if let Some(v) = self.rho {
            spec.rho_mode = v;
        }
        if let Some(v) = self.tol_rho {
            spec.tol_rho = Some(v);
        }
        if let Some(v) = self.diffusivity {
            spec.diffusivity = v;
        }
        let out = self.out_dir.clone().or(out_dir).unwrap_or_else(|| PathBuf::from("out"));
        Ok((spec, out))
    }
}

#[derive(Args)]
struct ReconstructArgs {
    /// Observation CSV with its `.meta.json` sidecar.
    #[arg(long)]
    obs: PathBuf,
    #[arg(long = "Jmax", default_value_t = 32)]
    j_max: usize,
    #[arg(long, default_value = "l2")]
    reg: Reg,
    /// Required by `reconstruct`.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long = "tol-rho")]
    tol_rho: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    diffusivity: f64,
    /// Builtin truth for error reporting.
    #[arg(long)]
    example: Option<String>,
    #[arg(long = "out-dir", env = "FRACWAVE_OUT", default_value = "out")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": format!("{e:#}") });
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run(args) => {
            let (spec, out) = args.spec()?;
            let (summaries, agg) = run_experiment(&spec, &out)?;
            if summaries.len() == 1 {
                println!("{}", serde_json::to_string_pretty(&summaries[0])?);
            } else {
                println!("{}", serde_json::to_string_pretty(&agg)?);
            }
        }
        Command::Sweep { run, kmin, kmax } => {
            if kmin > kmax {
                bail!("--kmin must not exceed --kmax");
            }
            let (mut spec, out) = run.spec()?;
            spec.seeds.truncate(1);
            let prep = prepare(&spec)?;
            let ks: Vec<i32> = (kmin..=kmax).collect();
            let rows = experiment::rho_sweep(&prep, &ks)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join(format!("{}_sweep.csv", spec.name));
            experiment::write_sweep_csv(&path, &rows)?;
            for r in &rows {
                println!("{} {:e} {:.6} {:.6}", r.k, r.rho, r.err_l2, r.err_hm1);
            }
        }
        Command::Forward { run, grid, output } => {
            let (spec, _) = run.spec()?;
            let cfg = spec.forward_config()?;
            let a1 = spec.example.coefficients(spec.j_max);
            let gf = forward_grid(&a1, &cfg, grid)?;
            io::write_grid_csv(&output, &gf)?;
            println!("max|S a1| {:.6}", gf.max_abs());
        }
        Command::Observe { run, output } => {
            let (spec, _) = run.spec()?;
            let cfg_ref = ForwardConfig::with_diffusivity(spec.alpha, spec.t_final, spec.j_ref, spec.diffusivity)?;
            let truth = spec.example.coefficients(spec.j_ref);
            let ps = uniform_grid_points(spec.g)?;
            let seed = spec.seeds[0];
            let obs = fracwave_core::observe::sample_observations(&truth, &cfg_ref, &ps, spec.sigma, seed)?;
            let meta = io::ObservationMeta::new(spec.alpha, spec.t_final, &obs);
            io::write_observations(&output, &obs, &meta)?;
            println!("wrote {} observations to {}", obs.n(), output.display());
        }
        Command::Reconstruct(args) => reconstruct(args, false)?,
        Command::Autoparam(args) => reconstruct(args, true)?,
        Command::MlEval { alpha, beta, z, roots } => {
            let p = MLParams::new(alpha, beta)?;
            for &zi in &z {
                println!("{zi} {:.17e}", ml(p, zi)?);
            }
            if let Some(bound) = roots {
                let rs = find_real_roots(alpha, bound)?;
                for r in &rs.roots {
                    println!("root {r:.15e}");
                }
            }
            if z.is_empty() && roots.is_none() {
                bail!("nothing to evaluate: pass --z and/or --roots");
            }
        }
        Command::Diagnose {
            alpha,
            t_final,
            j_max,
            g,
            reg,
            root_bound,
        } => diagnose(alpha, t_final, j_max, g, reg, root_bound)?,
    }
    Ok(())
}

fn reconstruct(args: ReconstructArgs, auto: bool) -> Result<()> {
    let (obs, meta) = io::read_observations(&args.obs)?;
    let cfg = ForwardConfig::with_diffusivity(meta.alpha, meta.t_final, args.j_max, args.diffusivity)?;
    let ds = experiment::assemble_parallel(&obs.points, &cfg, args.reg.gamma())?;
    let pc = {
        let beta = args.reg.gamma();
        match args.tol_rho {
            Some(t) => fracwave_core::ParamConfig::with_tolerance(beta, obs.n(), t)?,
            None => fracwave_core::ParamConfig::new(beta, obs.n())?,
        }
    };
    let (result, trace) = if auto {
        let t = iterate(&ds, &obs, &pc)?;
        (t.final_result.clone(), Some(t))
    } else {
        let rho = args.rho.context("reconstruct needs --rho")?;
        (solve(&ds, &obs, rho)?, None)
    };
    let stem = args.obs.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let out = &args.out_dir;
    std::fs::create_dir_all(out)?;
    let mut report = serde_json::json!({
        "rho": result.rho,
        "residual_n": result.residual_n,
        "norm_X": result.norm_x,
        "alpha": meta.alpha,
        "gamma": args.reg.gamma(),
        "seed": meta.seed,
    });
    if let Some(id) = &args.example {
        let ex = Example::from_id(id).with_context(|| format!("unknown example `{id}`"))?;
        let (l2, hm1) = errors(&result.a_rec, &ex.coefficients(fracwave_core::builtin::J_REF))?;
        report["err_L2"] = l2.into();
        report["err_Hm1"] = hm1.into();
    }
    if let Some(t) = &trace {
        report["iterations"] = t.iterations.len().into();
        report["converged"] = t.converged.into();
        io::write_trace_csv(&out.join(format!("{stem}_trace.csv")), t)?;
    }
    io::write_json(&out.join(format!("{stem}_solve.json")), &report)?;
    io::write_grid_csv(&out.join(format!("{stem}_rec.csv")), &synthesize_grid(&result.a_rec, PLOT_GRID))?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn diagnose(alpha: f64, t_final: f64, j_max: usize, g: usize, reg: Reg, root_bound: f64) -> Result<()> {
    let cfg = ForwardConfig::new(alpha, t_final, j_max)?;
    if alpha > 1.0 && alpha < 2.0 {
        match find_real_roots(alpha, root_bound) {
            Ok(rs) if rs.is_empty() => println!("roots of E_{{{alpha},2}}(-t) on (0, {root_bound}]: none"),
            Ok(rs) => {
                println!("roots of E_{{{alpha},2}}(-t) on (0, {root_bound}]:");
                for r in &rs.roots {
                    println!("  {r:.12e}");
                }
            }
            Err(e) => println!("root scan: {e}"),
        }
    }
    println!("propagator conditioning (mode, lambda, T*E, |E|(1+lambda T^alpha), floored):");
    let floor = cfg.default_floor();
    let mut worst = f64::INFINITY;
    for (idx, lam) in fracwave_core::SpectralField::eigenvalues(j_max).into_iter().enumerate() {
        let c = propagator_conditioning(alpha, lam, t_final, floor)?;
        let m = fracwave_core::ModeIndex::from_flat(idx, j_max);
        worst = worst.min(c.normalized.abs());
        if c.floored || idx < 4 {
            println!("  ({},{}) {lam:.6e} {:.6e} {:.6e} {}", m.j, m.k, c.value, c.normalized, c.floored);
        }
    }
    println!("  min |E|(1+lambda T^alpha) = {worst:.6e}");
    let ps = uniform_grid_points(g)?;
    let q = quasi_uniformity(&ps, default_probe(ps.len()))?;
    println!("points n={} d_max={:.6e} d_min={:.6e} B={:.6}", ps.len(), q.d_max, q.d_min, q.b);
    let ds = experiment::assemble_parallel(&ps, &cfg, reg.gamma())?;
    let mu = eigen_growth_diagnostic(&ds, ds.modes())?;
    println!("mu_k slope {:.4} (gamma = {})", log_log_slope(&mu), reg.gamma());
    Ok(())
}
