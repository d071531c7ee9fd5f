//! Scattered-point Tikhonov regularization in coefficient space:
//! minimize `‖G c − m‖_n² + ρ Σ λ_m^{2γ} c_m²`, where
//! `G[i, m] = T E_{α,2}(−λ_m T^α) φ_m(x_i)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::forward::ForwardConfig;
use crate::linalg::{dot, generalized_symmetric_eigenvalues, Cholesky, Matrix};
use crate::observe::{discrete_norm, Observations, PointSet};
use crate::spectral::{norm_gamma, SpectralField};

/// Relative tolerance of the post-solve variational identity check.
pub const VARIATIONAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct DesignSystem {
    /// `n × N`, row `i` holds `(S φ_m)(x_i)` for all modes.
    pub design: Matrix,
    /// `GᵀG / n`
    pub gram: Matrix,
    pub reg_weights: Vec<f64>,
    pub gamma: f64,
    pub cfg: ForwardConfig,
    pub points: PointSet,
    pub propagators: Vec<f64>,
    /// Modes whose propagator lies below `cfg.default_floor()`.
    pub floored: usize,
}

impl DesignSystem {
    pub fn n(&self) -> usize {
        self.design.rows()
    }

    pub fn modes(&self) -> usize {
        self.design.cols()
    }

    /// `G c` at the observation points.
    pub fn predict(&self, c: &[f64]) -> Vec<f64> {
        self.design.mul_vec(c)
    }

    /// `Gᵀ m / n`
    pub fn data_rhs(&self, m: &[f64]) -> Result<Vec<f64>> {
        if m.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: m.len(),
            });
        }
        let inv_n = 1.0 / self.n() as f64;
        Ok(self.design.tr_mul_vec(m).into_iter().map(|v| v * inv_n).collect())
    }
}

/// Design rows for a slice of points, `N = J²` entries each.
pub fn design_rows(points: &[(f64, f64)], cfg: &ForwardConfig, propagators: &[f64]) -> Vec<f64> {
    let jm = cfg.j_max;
    let nm = jm * jm;
    let mut out = alloc::vec![0.0; points.len() * nm];
    let mut sx = alloc::vec![0.0; jm];
    let mut sy = alloc::vec![0.0; jm];
    for (i, &(x, y)) in points.iter().enumerate() {
        for j in 0..jm {
            let f = (j + 1) as f64 * PI;
            sx[j] = libm::sin(f * x);
            sy[j] = libm::sin(f * y);
        }
        let row = &mut out[i * nm..(i + 1) * nm];
        for k in 0..jm {
            for j in 0..jm {
                let idx = k * jm + j;
                row[idx] = 2.0 * propagators[idx] * sx[j] * sy[k];
            }
        }
    }
    out
}

/// Assembles from precomputed design rows (row-major, `n × J²`).
pub fn assemble_from_rows(ps: &PointSet, cfg: &ForwardConfig, gamma: f64, propagators: Vec<f64>, rows: Vec<f64>) -> Result<DesignSystem> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "must be non-negative",
        });
    }
    let nm = cfg.j_max * cfg.j_max;
    if propagators.len() != nm {
        return Err(Error::DimensionMismatch {
            expected: nm,
            found: propagators.len(),
        });
    }
    let design = Matrix::from_row_major(ps.len(), nm, rows)?;
    let gram = design.gram(1.0 / ps.len() as f64);
    let reg_weights = SpectralField::eigenvalues(cfg.j_max)
        .into_iter()
        .map(|lam| libm::pow(lam, 2.0 * gamma))
        .collect();
    let floor = cfg.default_floor();
    let floored = propagators.iter().filter(|p| libm::fabs(**p) < floor).count();
    Ok(DesignSystem {
        design,
        gram,
        reg_weights,
        gamma,
        cfg: *cfg,
        points: ps.clone(),
        propagators,
        floored,
    })
}

pub fn assemble(ps: &PointSet, cfg: &ForwardConfig, gamma: f64) -> Result<DesignSystem> {
    let props = cfg.propagators()?;
    let rows = design_rows(ps.points(), cfg, &props);
    assemble_from_rows(ps, cfg, gamma, props, rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub a_rec: SpectralField,
    pub rho: f64,
    /// `‖S a_rec − m‖_n`
    pub residual_n: f64,
    /// `‖a_rec‖_γ`
    pub norm_x: f64,
    /// Largest relative residual of the variational identity over the test vectors.
    pub variational_residual: f64,
}

/// Solves `(GᵀG/n + ρ W) c = Gᵀm/n` by Cholesky, then checks
/// `ρ(c, v)_X + (Gc, Gv)_n = (m, Gv)_n` on five random `v`.
pub fn solve(ds: &DesignSystem, obs: &Observations, rho: f64) -> Result<SolveResult> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: "must be positive and finite",
        });
    }
    let rhs = ds.data_rhs(&obs.m)?;
    let mut a = ds.gram.clone();
    for (i, w) in ds.reg_weights.iter().enumerate() {
        a.set(i, i, a.get(i, i) + rho * w);
    }
    let c = Cholesky::factor(&a)?.solve(&rhs);
    let pred = ds.predict(&c);
    let resid: Vec<f64> = pred.iter().zip(&obs.m).map(|(p, m)| p - m).collect();
    let residual_n = discrete_norm(&resid);
    let a_rec = SpectralField::from_coeffs(ds.cfg.j_max, c)?;
    let norm_x = norm_gamma(&a_rec, ds.gamma);

    let variational_residual = variational_check(ds, obs, &a_rec, &pred, rho, 5)?;
    if !(variational_residual <= VARIATIONAL_TOL) {
        return Err(Error::VariationalMismatch {
            residual: variational_residual,
        });
    }
    Ok(SolveResult {
        a_rec,
        rho,
        residual_n,
        norm_x,
        variational_residual,
    })
}

/// Largest relative defect of the variational equation over `count`
/// seeded random test vectors.
pub fn variational_check(
    ds: &DesignSystem,
    obs: &Observations,
    a_rec: &SpectralField,
    pred: &[f64],
    rho: f64,
    count: usize,
) -> Result<f64> {
    let n = ds.n() as f64;
    let c = a_rec.coeffs();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let v: Vec<f64> = (0..c.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let gv = ds.predict(&v);
        let cv_x: f64 = c.iter().zip(&v).zip(&ds.reg_weights).map(|((a, b), w)| w * a * b).sum();
        let lhs = rho * cv_x + dot(pred, &gv) / n;
        let rhs = dot(&obs.m, &gv) / n;
        let vx = libm::sqrt(v.iter().zip(&ds.reg_weights).map(|(a, w)| w * a * a).sum::<f64>());
        let scale = discrete_norm(&obs.m).max(discrete_norm(pred)) * discrete_norm(&gv)
            + rho * norm_gamma(a_rec, ds.gamma) * vx;
        if scale > 0.0 {
            worst = worst.max(libm::fabs(lhs - rhs) / scale);
        }
    }
    Ok(worst)
}

/// The objective `‖G c − m‖_n² + ρ‖c‖_X²`.
pub fn objective(ds: &DesignSystem, obs: &Observations, c: &[f64], rho: f64) -> f64 {
    let pred = ds.predict(c);
    let resid: Vec<f64> = pred.iter().zip(&obs.m).map(|(p, m)| p - m).collect();
    let r = discrete_norm(&resid);
    let pen: f64 = c.iter().zip(&ds.reg_weights).map(|(a, w)| w * a * a).sum();
    r * r + rho * pen
}

/// Relative `(L², H⁻¹)` errors against a reference field, zero-padding
/// the reconstruction to the reference size.
pub fn errors(a_rec: &SpectralField, a_true_ref: &SpectralField) -> Result<(f64, f64)> {
    if a_true_ref.j_max() < a_rec.j_max() {
        return Err(Error::DimensionMismatch {
            expected: a_rec.j_max(),
            found: a_true_ref.j_max(),
        });
    }
    let diff = a_rec.resized(a_true_ref.j_max()).sub(a_true_ref)?;
    let l2 = norm_gamma(a_true_ref, 0.0);
    let hm1 = norm_gamma(a_true_ref, -0.5);
    if l2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((norm_gamma(&diff, 0.0) / l2, norm_gamma(&diff, -0.5) / hm1))
}

/// The `k_max` smallest eigenvalues `μ` of `W c = μ (GᵀG/n) c`, ascending.
pub fn eigen_growth_diagnostic(ds: &DesignSystem, k_max: usize) -> Result<Vec<(usize, f64)>> {
    let nm = ds.modes();
    if k_max == 0 || k_max > nm {
        return Err(Error::InvalidParameter {
            name: "k_max",
            reason: "must lie in 1..=N",
        });
    }
    let mut w = Matrix::zeros(nm, nm);
    for (i, &v) in ds.reg_weights.iter().enumerate() {
        w.set(i, i, v);
    }
    let mu = generalized_symmetric_eigenvalues(&w, &ds.gram)?;
    Ok(mu.into_iter().take(k_max).enumerate().map(|(i, m)| (i + 1, m)).collect())
}

/// Least-squares slope of `ln μ_k` against `ln k`.
pub fn log_log_slope(pairs: &[(usize, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(k, mu) in pairs {
        let x = libm::log(k as f64);
        let y = libm::log(mu);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
