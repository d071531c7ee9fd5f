//! The forward map `S: a₁ ↦ u(·,T)` for `∂_t^α u − κΔu = 0`, `u(·,0) = 0`,
//! `∂_t u(·,0) = a₁`, and an L1 time-stepping oracle for a single mode.
//!
//! In the sine basis `S` is diagonal with entries `T·E_{α,2}(−κλ_jk T^α)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mittag_leffler::propagator;
use crate::spectral::{synthesize_grid, GridFunction, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardConfig {
    pub alpha: f64,
    pub t_final: f64,
    pub j_max: usize,
    /// Factor κ multiplying `Δ`; 1 for the equation as stated.
    pub diffusivity: f64,
}

impl ForwardConfig {
    pub fn new(alpha: f64, t_final: f64, j_max: usize) -> Result<Self> {
        Self::with_diffusivity(alpha, t_final, j_max, 1.0)
    }

    pub fn with_diffusivity(alpha: f64, t_final: f64, j_max: usize, diffusivity: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must lie in (1, 2)",
            });
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "T",
                reason: "must be positive",
            });
        }
        if j_max == 0 {
            return Err(Error::InvalidParameter {
                name: "J_max",
                reason: "must be positive",
            });
        }
        if !(diffusivity > 0.0 && diffusivity.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "diffusivity",
                reason: "must be positive",
            });
        }
        Ok(Self {
            alpha,
            t_final,
            j_max,
            diffusivity,
        })
    }

    /// Default floor below which a propagator value counts as a root hit.
    pub fn default_floor(&self) -> f64 {
        1e-12 * self.t_final
    }

    /// Propagators `T·E_{α,2}(−κλ_m T^α)` in flattened mode order.
    pub fn propagators(&self) -> Result<Vec<f64>> {
        SpectralField::eigenvalues(self.j_max)
            .into_iter()
            .map(|lam| propagator(self.alpha, self.diffusivity * lam, self.t_final))
            .collect()
    }
}

pub fn apply_s(a1: &SpectralField, cfg: &ForwardConfig) -> Result<SpectralField> {
    check_size(a1, cfg)?;
    let props = cfg.propagators()?;
    let coeffs = a1.coeffs().iter().zip(&props).map(|(c, p)| c * p).collect();
    SpectralField::from_coeffs(cfg.j_max, coeffs)
}

/// Modal division by the propagators. Modes whose propagator is below
/// `floor` in magnitude are set to zero; their count is returned.
pub fn invert_s_exact(u_t: &SpectralField, cfg: &ForwardConfig, floor: f64) -> Result<(SpectralField, usize)> {
    check_size(u_t, cfg)?;
    let props = cfg.propagators()?;
    let mut floored = 0;
    let coeffs = u_t
        .coeffs()
        .iter()
        .zip(&props)
        .map(|(&u, &p)| {
            if libm::fabs(p) < floor {
                floored += 1;
                0.0
            } else {
                u / p
            }
        })
        .collect();
    Ok((SpectralField::from_coeffs(cfg.j_max, coeffs)?, floored))
}

/// Like [`invert_s_exact`], but any floored mode is an error.
pub fn invert_s_strict(u_t: &SpectralField, cfg: &ForwardConfig, floor: f64) -> Result<SpectralField> {
    let (field, floored) = invert_s_exact(u_t, cfg, floor)?;
    if floored > 0 {
        return Err(Error::DegenerateModes { count: floored });
    }
    Ok(field)
}

pub fn forward_grid(a1: &SpectralField, cfg: &ForwardConfig, g: usize) -> Result<GridFunction> {
    Ok(synthesize_grid(&apply_s(a1, cfg)?, g))
}

fn check_size(f: &SpectralField, cfg: &ForwardConfig) -> Result<()> {
    if f.j_max() != cfg.j_max {
        return Err(Error::DimensionMismatch {
            expected: cfg.j_max,
            found: f.j_max(),
        });
    }
    Ok(())
}

/// Time grid and values of one modal trajectory `c(t_m)`, `t_m = mτ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub tau: f64,
    pub values: Vec<f64>,
}

/// Integrates `∂_t^α c + λc = 0`, `c(0) = 0`, `c′(0) = a1_coef` on `[0, T]`.
///
/// Order reduction: `v = c′` satisfies `∂_t^{α−1} v = −λc`. The Caputo
/// derivative of order `α−1` uses the L1 formula with weights
/// `b_j = (j+1)^{2−α} − j^{2−α}`, and `c` follows `v` by the trapezoidal
/// rule. Each step is implicit in `v^m` and solved in closed form.
pub fn l1_mode_trajectory(alpha: f64, lambda: f64, a1_coef: f64, t_final: f64, tau: f64) -> Result<ModeTrajectory> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "must lie in (1, 2)",
        });
    }
    if !(lambda >= 0.0) || !(tau > 0.0) || !(t_final > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda/tau/T",
            reason: "need λ ≥ 0, τ > 0, T > 0",
        });
    }
    let steps_f = t_final / tau;
    let steps = libm::round(steps_f) as usize;
    if steps == 0 || libm::fabs(steps_f - steps as f64) > 1e-9 * steps_f {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: "must divide T",
        });
    }
    let two_minus = 2.0 - alpha;
    let a0 = 1.0 / (crate::special::gamma(3.0 - alpha) * libm::pow(tau, alpha - 1.0));
    let b: Vec<f64> = (0..steps)
        .map(|j| libm::pow(j as f64 + 1.0, two_minus) - libm::pow(j as f64, two_minus))
        .collect();
    let limit = 1e3 * libm::fabs(a1_coef) * t_final;
    let half = 0.5 * lambda * tau;

    let mut v = Vec::with_capacity(steps + 1);
    let mut c = Vec::with_capacity(steps + 1);
    v.push(a1_coef);
    c.push(0.0);
    // dv[i] = v^{i+1} − v^i
    let mut dv: Vec<f64> = Vec::with_capacity(steps);
    for m in 1..=steps {
        // history Σ_{j=1}^{m−1} b_j (v^{m−j} − v^{m−j−1})
        let mut hist = 0.0;
        for j in 1..m {
            hist += b[j] * dv[m - j - 1];
        }
        let v_prev = v[m - 1];
        let c_prev = c[m - 1];
        let vm = (a0 * v_prev - a0 * hist - lambda * c_prev - half * v_prev) / (a0 + half);
        let cm = c_prev + 0.5 * tau * (vm + v_prev);
        if libm::fabs(cm) > limit || !cm.is_finite() {
            return Err(Error::Divergence { step: m, value: cm });
        }
        dv.push(vm - v_prev);
        v.push(vm);
        c.push(cm);
    }
    Ok(ModeTrajectory { tau, values: c })
}

/// `c(T)` from [`l1_mode_trajectory`].
pub fn l1_mode_solve(alpha: f64, lambda: f64, a1_coef: f64, t_final: f64, tau: f64) -> Result<f64> {
    let traj = l1_mode_trajectory(alpha, lambda, a1_coef, t_final, tau)?;
    Ok(*traj.values.last().expect("at least one step"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mittag_leffler::find_real_roots;
    use crate::spectral::{basis_eval, eigenvalue, synthesize, ModeIndex};
    use core::f64::consts::PI;

    #[test]
    fn single_mode_forward() {
        let cfg = ForwardConfig::new(1.2, 1.0, 4).unwrap();
        let m = ModeIndex::new(1, 1);
        let a = SpectralField::single_mode(4, m, 1.0);
        let u = apply_s(&a, &cfg).unwrap();
        let want = propagator(1.2, 2.0 * PI * PI, 1.0).unwrap();
        assert_eq!(u.get(m), want);
        assert_eq!(crate::spectral::norm_gamma(&u, 0.0), want.abs());
        let grid = forward_grid(&a, &cfg, 5).unwrap();
        let (x, y) = grid.node(2, 1);
        assert!((grid.get(2, 1) - want * basis_eval(m, x, y)).abs() < 1e-15);
    }

    #[test]
    fn round_trip_without_roots() {
        let cfg = ForwardConfig::new(1.2, 1.0, 6).unwrap();
        let mut a = SpectralField::zeros(6);
        for (i, c) in a.coeffs_mut().iter_mut().enumerate() {
            *c = 1.0 / (1.0 + i as f64);
        }
        let u = apply_s(&a, &cfg).unwrap();
        let (back, floored) = invert_s_exact(&u, &cfg, cfg.default_floor()).unwrap();
        assert_eq!(floored, 0);
        for (x, y) in back.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).abs() <= 1e-10 * y.abs());
        }
        let (zero, _) = invert_s_exact(&SpectralField::zeros(6), &cfg, 1e-12).unwrap();
        assert!(zero.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn root_collision_is_floored() {
        let t1 = find_real_roots(1.9, 1e4).unwrap().first().unwrap();
        // λ_11 T^α = t_1
        let t = libm::pow(t1 / eigenvalue(ModeIndex::new(1, 1)), 1.0 / 1.9);
        let cfg = ForwardConfig::new(1.9, t, 3).unwrap();
        let u = SpectralField::single_mode(3, ModeIndex::new(1, 1), 1.0);
        let (_, floored) = invert_s_exact(&u, &cfg, 1e-9).unwrap();
        assert_eq!(floored, 1);
        assert!(matches!(
            invert_s_strict(&u, &cfg, 1e-9),
            Err(Error::DegenerateModes { count: 1 })
        ));
    }

    #[test]
    fn zero_field_maps_to_zero_grid() {
        let cfg = ForwardConfig::new(1.5, 1.0, 3).unwrap();
        let g = forward_grid(&SpectralField::zeros(3), &cfg, 7).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn l1_matches_propagator() {
        let lam = 2.0 * PI * PI;
        let c = l1_mode_solve(1.2, lam, 1.0, 1.0, 1e-3).unwrap();
        let want = propagator(1.2, lam, 1.0).unwrap();
        assert!((c - want).abs() <= 1e-3 * want.abs(), "{c} vs {want}");
    }

    #[test]
    fn l1_free_motion() {
        for &alpha in &[1.1, 1.5, 1.9] {
            let c = l1_mode_solve(alpha, 0.0, 0.7, 2.0, 0.01).unwrap();
            assert!((c - 1.4).abs() < 1e-12);
        }
    }

    #[test]
    fn l1_rejects_non_dividing_step() {
        assert!(l1_mode_solve(1.5, 1.0, 1.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn synthesize_matches_grid() {
        let cfg = ForwardConfig::new(1.8, 1.0, 5).unwrap();
        let a = SpectralField::single_mode(5, ModeIndex::new(2, 3), 2.0);
        let grid = forward_grid(&a, &cfg, 9).unwrap();
        let pts: Vec<(f64, f64)> = grid.iter().map(|(x, y, _)| (x, y)).collect();
        let direct = synthesize(&apply_s(&a, &cfg).unwrap(), &pts);
        for (a, b) in grid.values().iter().zip(&direct) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
