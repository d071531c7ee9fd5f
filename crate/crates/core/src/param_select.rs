//! Fixed-point selection of the regularization parameter.
//!
//! With smoothness index `β` (the penalty exponent γ) and dimension `d`,
//! the update is `ρ ← (n^{−1/2}·‖S a − m‖_n / ‖a‖_X)^{e}` with
//! `e = 8(1+β)/(4(1+β)+d) = 1/(1/2 + (d/8)/(1+β))`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::observe::Observations;
use crate::tikhonov::{solve, DesignSystem, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamConfig {
    pub beta: f64,
    pub d: f64,
    pub n: usize,
    pub tol_rho: f64,
    pub max_iters: usize,
    pub rho_min: f64,
}

impl ParamConfig {
    /// Stopping tolerance 1e−6 for `β = 0` and 1e−8 otherwise.
    pub fn new(beta: f64, n: usize) -> Result<Self> {
        let tol = if beta == 0.0 { 1e-6 } else { 1e-8 };
        Self::with_tolerance(beta, n, tol)
    }

    pub fn with_tolerance(beta: f64, n: usize, tol_rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: "must lie in [0, 1]",
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "must be positive",
            });
        }
        if !(tol_rho > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol_rho",
                reason: "must be positive",
            });
        }
        Ok(Self {
            beta,
            d: 2.0,
            n,
            tol_rho,
            max_iters: 50,
            rho_min: 1e-14,
        })
    }

    /// `8(1+β)/(4(1+β)+d)`
    pub fn exponent(&self) -> f64 {
        8.0 * (1.0 + self.beta) / (4.0 * (1.0 + self.beta) + self.d)
    }
}

/// `ρ₁ = n^{−4(1+β)/(4(1+β)+d)}`
pub fn initial_rho(pc: &ParamConfig) -> f64 {
    libm::pow(pc.n as f64, -0.5 * pc.exponent())
}

pub fn update_rho(residual_n: f64, norm_x: f64, pc: &ParamConfig) -> Result<f64> {
    if !(norm_x > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let base = residual_n / (libm::sqrt(pc.n as f64) * norm_x);
    Ok(libm::pow(base, pc.exponent()).max(pc.rho_min))
}

/// `(σ n^{−1/2} / ‖a*‖_X)^{1/(1/2 + (d/8)/(1+β))}` with implied constant 1.
pub fn oracle_rho(sigma: f64, norm_x: f64, pc: &ParamConfig) -> Result<f64> {
    if !(norm_x > 0.0) {
        return Err(Error::ZeroNorm);
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: "must be non-negative",
        });
    }
    let e = 1.0 / (0.5 + pc.d / 8.0 / (1.0 + pc.beta));
    Ok(libm::pow(sigma / (libm::sqrt(pc.n as f64) * norm_x), e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub k: usize,
    pub rho: f64,
    pub residual_n: f64,
    pub norm_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamTrace {
    pub iterations: Vec<TraceEntry>,
    pub converged: bool,
    /// Solve at the last proposed ρ (the converged value when `converged`).
    pub final_result: SolveResult,
}

impl ParamTrace {
    pub fn rho_final(&self) -> f64 {
        self.final_result.rho
    }
}

/// Iterates solve/update from `ρ₁` until `|ρ_{k+1} − ρ_k| ≤ tol_rho` or
/// `max_iters` solves, then solves once more at the last proposed ρ.
pub fn iterate(ds: &DesignSystem, obs: &Observations, pc: &ParamConfig) -> Result<ParamTrace> {
    let mut rho = initial_rho(pc);
    let mut iterations = Vec::new();
    let mut last: Option<SolveResult> = None;
    for k in 1..=pc.max_iters {
        let r = solve(ds, obs, rho)?;
        iterations.push(TraceEntry {
            k,
            rho,
            residual_n: r.residual_n,
            norm_x: r.norm_x,
        });
        let next = update_rho(r.residual_n, r.norm_x, pc)?;
        if !next.is_finite() || next > 1e12 {
            // runaway: the data carry too little signal for the rule
            return Ok(ParamTrace {
                iterations,
                converged: false,
                final_result: r,
            });
        }
        if libm::fabs(next - rho) <= pc.tol_rho {
            let final_result = solve(ds, obs, next)?;
            return Ok(ParamTrace {
                iterations,
                converged: true,
                final_result,
            });
        }
        rho = next;
        last = Some(r);
    }
    let final_result = match last {
        Some(r) => r,
        None => solve(ds, obs, rho)?,
    };
    Ok(ParamTrace {
        iterations,
        converged: false,
        final_result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(beta: f64, n: usize) -> ParamConfig {
        ParamConfig::new(beta, n).unwrap()
    }

    #[test]
    fn initial_examples() {
        assert!((initial_rho(&pc(0.0, 6241)) - libm::pow(6241.0, -2.0 / 3.0)).abs() < 1e-18);
        assert!((initial_rho(&pc(0.0, 6241)) - 2.95e-3).abs() < 0.01e-3);
        assert!((initial_rho(&pc(0.5, 6241)) - 1.43e-3).abs() < 0.01e-3);
        assert_eq!(initial_rho(&pc(0.5, 1)), 1.0);
    }

    #[test]
    fn update_examples() {
        let r = update_rho(0.4, 1.1156, &pc(0.0, 6241)).unwrap();
        assert!((r - 7.5e-4).abs() < 0.05e-4, "{r}");
        let r = update_rho(0.2, 4.567, &pc(0.5, 6241)).unwrap();
        assert!((r - 1.31e-5).abs() < 0.01e-5, "{r}");
        assert_eq!(update_rho(0.0, 1.0, &pc(0.0, 10)).unwrap(), 1e-14);
        assert_eq!(update_rho(0.1, 0.0, &pc(0.0, 10)), Err(Error::ZeroNorm));
    }

    #[test]
    fn exponent_identity() {
        for &b in &[0.0, 0.25, 0.5, 1.0] {
            let p = pc(b, 100);
            let closed = 1.0 / (0.5 + (p.d / 8.0) / (1.0 + b));
            assert!((p.exponent() - closed).abs() < 1e-15);
        }
    }

    #[test]
    fn oracle_examples() {
        let r = oracle_rho(0.01, 0.5, &pc(0.0, 6241)).unwrap();
        assert!((r - 1.6e-5).abs() < 0.05e-5, "{r}");
        assert_eq!(oracle_rho(0.0, 0.5, &pc(0.0, 6241)).unwrap(), 0.0);
    }
}
