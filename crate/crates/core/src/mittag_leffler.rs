//! The two-parameter Mittag-Leffler function on the real axis.
//!
//! `E_{α,β}(z) = Σ_k z^k / Γ(αk + β)` is evaluated in three regimes:
//!
//! 1. **Series** for `|z|` below a switch radius that grows with α, where the
//!    alternating partial sums lose at most a few digits to cancellation.
//! 2. **Contour representation** for `z < 0` beyond the switch radius. The
//!    Hankel contour of `E_{α,β}(z) = (2πi)⁻¹ ∫ e^s s^{α−β} / (s^α − z) ds`
//!    collapses onto the negative real axis plus the residues at the poles
//!    `s* = |z|^{1/α} e^{±iπ/α}` (present only when `α > 1`). Splitting off
//!    the first `K` asymptotic terms leaves the exact remainder
//!
//!    ```text
//!    E = −Σ_{k=1}^{K} z^{−k}/Γ(β−αk) + (2/α)·Re(s*^{1−β} e^{s*})
//!        − (z^{−K}/π) ∫_0^∞ e^{−r} r^{p} [r^α sin(θ−πα) − z sin θ] / D(r) dr
//!    ```
//!
//!    with `p = α(K+1) − β > −1`, `θ = πp`, `D = r^{2α} − 2r^α z cos πα + z²`.
//! 3. **Asymptotic** for large `|z|`: the same identity once the remainder
//!    integral is below double precision, leaving the algebraic expansion
//!    plus the (exponentially decaying) pole terms.
//!
//! Within an overlap band around the switch radius both the series and the
//! contour value are computed and required to agree.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, QuadTolerance};
use crate::special::{gamma, is_gamma_pole, ln_gamma, rgamma, sin_pi, CompensatedSum, GAMMA_MAX_ARG};

/// Parameters `(α, β)` of `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must lie in (0, 2]",
            });
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: "must be positive and finite",
            });
        }
        Ok(Self { alpha, beta })
    }
}

/// Tuning of the regime dispatcher in [`ml`].
#[derive(Debug, Clone, Copy)]
pub struct MlConfig {
    /// Upper cap on the series switch radius.
    pub switch_radius_cap: f64,
    /// The switch radius is `min(cap, base^α)`, keeping `|z|^{1/α}` (and with it
    /// the cancellation loss of the series) bounded.
    pub switch_radius_base: f64,
    /// Overlap band `[lo·R, hi·R]` where both regimes are cross-checked.
    pub band: (f64, f64),
    pub cross_tol: f64,
    /// Algebraic terms kept in the asymptotic regime.
    pub asymp_terms: usize,
    pub series_tol: f64,
}

impl Default for MlConfig {
    fn default() -> Self {
        Self {
            switch_radius_cap: 30.0,
            switch_radius_base: 5.5,
            band: (2.0 / 3.0, 5.0 / 3.0),
            cross_tol: 1e-6,
            asymp_terms: 5,
            series_tol: 1e-17,
        }
    }
}

impl MlConfig {
    pub fn switch_radius(&self, alpha: f64) -> f64 {
        libm::pow(self.switch_radius_base, alpha).min(self.switch_radius_cap)
    }
}

const MAX_SERIES_TERMS: usize = 10_000;

/// Partial sums of the defining series, stopped once the next term falls
/// below `tol·max(1, |sum|)` past the largest term.
pub fn ml_series(p: MLParams, z: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "must be positive",
        });
    }
    let (alpha, beta) = (p.alpha, p.beta);
    let az = libm::fabs(z);
    let ln_az = if az > 0.0 { libm::log(az) } else { f64::NEG_INFINITY };
    // index of the largest term, roughly where |z| ≈ (αk)^α
    let k_peak = if az > 0.0 { libm::pow(az, 1.0 / alpha) / alpha } else { 0.0 };
    let mut sum = CompensatedSum::new();
    let mut zpow = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 0..MAX_SERIES_TERMS {
        let arg = alpha * k as f64 + beta;
        let term = if k == 0 {
            rgamma(arg)
        } else if arg <= GAMMA_MAX_ARG && libm::fabs(zpow) < 1e300 {
            zpow * rgamma(arg)
        } else if az == 0.0 {
            0.0
        } else {
            let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            sign * libm::exp(k as f64 * ln_az - ln_gamma(arg))
        };
        if !term.is_finite() {
            return Err(Error::SeriesNonConvergence { z, terms: k });
        }
        sum.add(term);
        let t_abs = libm::fabs(term);
        let s_abs = libm::fabs(sum.value());
        if (k as f64) > k_peak + 1.0 && t_abs <= prev_abs && t_abs < tol * s_abs.max(1.0) {
            return Ok(sum.value());
        }
        prev_abs = t_abs;
        zpow *= z;
    }
    Err(Error::SeriesNonConvergence {
        z,
        terms: MAX_SERIES_TERMS,
    })
}

/// `−Σ_{k=1}^{k_max} z^{−k} / Γ(β − αk)`, every k included.
fn algebraic_sum(alpha: f64, beta: f64, z: f64, k_max: usize) -> f64 {
    let mut s = CompensatedSum::new();
    let mut zinv_pow = 1.0;
    for k in 1..=k_max {
        zinv_pow /= z;
        s.add(-zinv_pow * rgamma(beta - alpha * k as f64));
    }
    s.value()
}

/// The algebraic asymptotic expansion for `z < 0`, `|z| → ∞`:
/// `−Σ z^{−k}/Γ(β−αk)` over the first `terms` indices k ≥ 1 whose
/// coefficient is non-zero (indices with `β − αk` a non-positive integer
/// are skipped rather than counted).
pub fn ml_asymptotic(p: MLParams, z: f64, terms: usize) -> Result<f64> {
    if !(z < 0.0) {
        return Err(Error::InvalidParameter {
            name: "z",
            reason: "asymptotic expansion is used on the negative axis",
        });
    }
    if terms == 0 {
        return Err(Error::InvalidParameter {
            name: "terms",
            reason: "at least one term",
        });
    }
    let mut s = CompensatedSum::new();
    let mut used = 0;
    let mut k = 0usize;
    while used < terms && k < terms + 64 {
        k += 1;
        let arg = p.beta - p.alpha * k as f64;
        if is_gamma_pole(arg) {
            continue;
        }
        s.add(-libm::pow(z, -(k as f64)) * rgamma(arg));
        used += 1;
    }
    Ok(s.value())
}

/// Residue contribution `(2/α)·Re(s*^{1−β} e^{s*})` of the two poles
/// `s* = x^{1/α} e^{±iπ/α}` for `z = −x`; zero when `α ≤ 1`.
pub fn pole_terms(p: MLParams, z: f64) -> f64 {
    if p.alpha <= 1.0 || z >= 0.0 {
        return 0.0;
    }
    let x = -z;
    let rho = libm::pow(x, 1.0 / p.alpha);
    let phi = PI / p.alpha;
    let modulus = libm::pow(rho, 1.0 - p.beta) * libm::exp(rho * libm::cos(phi));
    if modulus == 0.0 {
        return 0.0;
    }
    let arg = phi * (1.0 - p.beta) + rho * libm::sin(phi);
    (2.0 / p.alpha) * modulus * libm::cos(arg)
}

/// Smallest `K ≥ 0` with `α(K+1) − β > −1/2`, so the cut integrand is
/// integrable at the origin with room to spare (`β = α + 1` lands on −1
/// up to rounding otherwise).
fn remainder_order(alpha: f64, beta: f64) -> usize {
    let mut k = 0;
    while alpha * (k as f64 + 1.0) - beta <= -0.5 {
        k += 1;
    }
    k
}

/// The branch-cut remainder after `k_split` algebraic terms, for `z < 0`.
fn cut_remainder(alpha: f64, beta: f64, z: f64, k_split: usize) -> Result<f64> {
    let x = -z;
    let p = alpha * (k_split as f64 + 1.0) - beta;
    debug_assert!(p > -0.5);
    let s1 = sin_pi(p - alpha);
    let s2 = sin_pi(p);
    if s1 == 0.0 && s2 == 0.0 {
        return Ok(0.0);
    }
    let c = libm::cos(PI * alpha);
    let xs = x * libm::sin(PI * alpha);
    let kernel = |r: f64| -> f64 {
        let ra = libm::pow(r, alpha);
        // |r^α e^{iπα} + x|², written without cancellation near α = 1
        let d = (ra + x * c) * (ra + x * c) + xs * xs;
        libm::exp(-r) * (ra * s1 + x * s2) / d
    };
    let r_max = 60.0 + 4.0 * p.max(0.0);
    // the denominator is smallest where r^α = −x cos πα
    let mut cuts: Vec<f64> = alloc::vec![0.0];
    if c < 0.0 {
        let r_pk = libm::pow(-x * c, 1.0 / alpha);
        let w = libm::fabs(sin_pi(alpha)).clamp(1e-3, 0.5);
        for r in [r_pk * (1.0 - w), r_pk, r_pk * (1.0 + w)] {
            if r > 0.0 && r < r_max {
                cuts.push(r);
            }
        }
    }
    cuts.push(r_max);
    let zk = libm::pow(z, -(k_split as f64));
    // near α = 1 the peak is tall and narrow and rounding caps the relative
    // accuracy; an absolute floor keeps the error in E below 1e-14/(1+x)
    let tol = QuadTolerance {
        abs: 1e-14 * PI / ((1.0 + x) * libm::fabs(zk)),
        rel: 1e-13,
        max_segments: 600,
    };
    let integral = if p < 0.0 {
        // r = u^q removes the r^p endpoint singularity: r^p dr = q du
        let q = 1.0 / (p + 1.0);
        let ucuts: Vec<f64> = cuts.iter().map(|&r| libm::pow(r, p + 1.0)).collect();
        quad::integrate(
            |u| {
                if u <= 0.0 {
                    return q * kernel(0.0);
                }
                q * kernel(libm::pow(u, q))
            },
            &ucuts,
            tol,
        )?
        .0
    } else {
        quad::integrate(|r| libm::pow(r, p) * kernel(r), &cuts, tol)?.0
    };
    Ok(-zk / PI * integral)
}

/// Contour (pole + cut) representation, valid for `z < 0`, `α ≠ 1`.
pub fn ml_contour(p: MLParams, z: f64) -> Result<f64> {
    if !(z < 0.0) {
        return Err(Error::InvalidParameter {
            name: "z",
            reason: "contour representation is used on the negative axis",
        });
    }
    if p.alpha == 1.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "α = 1 puts the pole on the branch cut",
        });
    }
    let k = remainder_order(p.alpha, p.beta);
    let alg = algebraic_sum(p.alpha, p.beta, z, k);
    let poles = pole_terms(p, z);
    let rem = cut_remainder(p.alpha, p.beta, z, k)?;
    Ok(alg + poles + rem)
}

/// Upper bound on the magnitude of the algebraic term of index k,
/// `Γ(αk−β+1)/(π|z|^k)` (the reflection formula without its sine factor).
fn term_bound(alpha: f64, beta: f64, x: f64, k: usize) -> f64 {
    let a = alpha * k as f64 - beta + 1.0;
    let ln_g = if a > 0.0 { ln_gamma(a) } else { libm::log(libm::fabs(gamma(a)).max(1e-300)) };
    libm::exp(ln_g - k as f64 * libm::log(x)) / PI
}

/// `E_{1,β}(z)`. For `z < 0` Kummer's transformation gives a series with
/// terms of one sign: `E_{1,β}(z) = e^z/Γ(β) · Σ_k (β−1)/(β−1+k) · |z|^k/k!`.
fn ml_alpha_one(beta: f64, z: f64, cfg: &MlConfig) -> Result<f64> {
    let p = MLParams { alpha: 1.0, beta };
    if z >= 0.0 || beta < 1.0 {
        return ml_series(p, z, cfg.series_tol);
    }
    if beta == 1.0 {
        return Ok(libm::exp(z));
    }
    let x = -z;
    if x > 700.0 {
        // e^z is below double precision; only the algebraic part survives
        let k = 30;
        return Ok(algebraic_sum(1.0, beta, z, k));
    }
    let ln_x = libm::log(x);
    let mut s = CompensatedSum::new();
    let k_max = (x + 40.0 * libm::sqrt(x) + 60.0) as usize;
    for k in 0..=k_max {
        let kf = k as f64;
        let w = (beta - 1.0) / (beta - 1.0 + kf);
        let lt = if k == 0 { -x } else { kf * ln_x - ln_gamma(kf + 1.0) - x };
        s.add(w * libm::exp(lt));
    }
    Ok(s.value() * rgamma(beta))
}

/// `E_{α,β}(z)` with the default dispatcher configuration.
pub fn ml(p: MLParams, z: f64) -> Result<f64> {
    ml_with(p, z, &MlConfig::default())
}

pub fn ml_with(p: MLParams, z: f64, cfg: &MlConfig) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::InvalidParameter {
            name: "z",
            reason: "must be finite",
        });
    }
    if p.alpha == 1.0 {
        return ml_alpha_one(p.beta, z, cfg);
    }
    if z >= 0.0 {
        return ml_series(p, z, cfg.series_tol);
    }
    let x = -z;
    let radius = cfg.switch_radius(p.alpha);
    let (lo, hi) = (cfg.band.0 * radius, cfg.band.1 * radius);
    if x <= lo {
        return ml_series(p, z, cfg.series_tol);
    }
    if x < hi {
        let s = ml_series(p, z, cfg.series_tol)?;
        let c = ml_contour(p, z)?;
        let scale = libm::fabs(s).max(libm::fabs(c)).max(1.0 / (1.0 + x));
        if libm::fabs(s - c) > cfg.cross_tol * scale {
            return Err(Error::RegimeDisagreement {
                z,
                series: s,
                integral: c,
            });
        }
        return Ok(s);
    }
    // Asymptotic regime once the next algebraic term is negligible.
    let k = cfg.asymp_terms.max(remainder_order(p.alpha, p.beta));
    let alg = algebraic_sum(p.alpha, p.beta, z, k);
    let poles = pole_terms(p, z);
    let magnitude = libm::fabs(alg).max(libm::fabs(poles));
    if 10.0 * term_bound(p.alpha, p.beta, x, k + 1) <= 1e-16 * magnitude {
        return Ok(alg + poles);
    }
    ml_contour(p, z)
}

/// `|E_{α,β}(z) − 1/Γ(β) − z·E_{α,α+β}(z)|`; zero up to rounding.
pub fn ml_recurrence_check(p: MLParams, z: f64) -> Result<f64> {
    let lhs = ml(p, z)?;
    let shifted = ml(MLParams::new(p.alpha, p.alpha + p.beta)?, z)?;
    Ok(libm::fabs(lhs - rgamma(p.beta) - z * shifted))
}

/// Real zeros `t_k` of `t ↦ E_{α,2}(−t)` on `(0, search_bound]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub alpha: f64,
    pub roots: Vec<f64>,
    pub search_bound: f64,
}

impl RootSet {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn first(&self) -> Option<f64> {
        self.roots.first().copied()
    }
}

/// Root-search settings.
#[derive(Debug, Clone, Copy)]
pub struct RootScan {
    pub scan_nodes: usize,
    pub scan_start: f64,
    pub root_tol: f64,
}

impl Default for RootScan {
    fn default() -> Self {
        Self {
            scan_nodes: 10_000,
            scan_start: 1e-3,
            root_tol: 1e-12,
        }
    }
}

/// Ratio of the two-term to the one-term asymptotic value of `E_{α,2}(−t)`.
pub fn asymptotic_dominance_ratio(alpha: f64, t: f64) -> Result<f64> {
    let p = MLParams::new(alpha, 2.0)?;
    Ok(ml_asymptotic(p, -t, 2)? / ml_asymptotic(p, -t, 1)?)
}

pub fn find_real_roots(alpha: f64, search_bound: f64) -> Result<RootSet> {
    find_real_roots_with(alpha, search_bound, RootScan::default())
}

/// Sign-change scan of `E_{α,2}(−t)` on a union of a geometric and a linear
/// grid, followed by bisection of every bracket.
pub fn find_real_roots_with(alpha: f64, search_bound: f64, scan: RootScan) -> Result<RootSet> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "root search needs α in (1, 2)",
        });
    }
    if !(search_bound > scan.scan_start) {
        return Err(Error::InvalidParameter {
            name: "search_bound",
            reason: "must exceed the scan start",
        });
    }
    let ratio = asymptotic_dominance_ratio(alpha, search_bound)?;
    if !(libm::fabs(ratio - 1.0) <= 0.1) {
        return Err(Error::UncertifiedBound {
            bound: search_bound,
            ratio,
        });
    }
    let p = MLParams::new(alpha, 2.0)?;
    let f = |t: f64| ml(p, -t);

    let n = scan.scan_nodes.max(2);
    let mut grid: Vec<f64> = Vec::with_capacity(2 * n);
    let ln_a = libm::log(scan.scan_start);
    let ln_b = libm::log(search_bound);
    for i in 0..n {
        grid.push(libm::exp(ln_a + (ln_b - ln_a) * i as f64 / (n - 1) as f64));
    }
    for i in 1..=n {
        grid.push(search_bound * i as f64 / n as f64);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut roots = Vec::new();
    let mut t_prev = grid[0];
    let mut f_prev = f(t_prev)?;
    if f_prev == 0.0 {
        roots.push(t_prev);
    }
    for &t in &grid[1..] {
        let ft = f(t)?;
        if ft == 0.0 {
            roots.push(t);
        } else if f_prev != 0.0 && (f_prev < 0.0) != (ft < 0.0) {
            roots.push(bisect(&f, t_prev, t, f_prev, scan.root_tol)?);
        }
        t_prev = t;
        f_prev = ft;
    }
    Ok(RootSet {
        alpha,
        roots,
        search_bound,
    })
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * lo.max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The modal propagator `T·E_{α,2}(−λT^α)` mapping `(a₁, φ)` to `(u(·,T), φ)`.
pub fn propagator(alpha: f64, lambda: f64, t_final: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: "must be non-negative and finite",
        });
    }
    if !(t_final > 0.0) {
        return Err(Error::InvalidParameter {
            name: "T",
            reason: "must be positive",
        });
    }
    let p = MLParams::new(alpha, 2.0)?;
    Ok(t_final * ml(p, -lambda * libm::pow(t_final, alpha))?)
}

/// How a propagator value sits relative to the two-sided window
/// `c₁/(1+λT^α) ≤ E_{α,2}(−λT^α) ≤ c₂/(1+λT^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioning {
    /// `T·E_{α,2}(−λT^α)`
    pub value: f64,
    /// `E_{α,2}(−λT^α)·(1 + λT^α)`; bounded away from zero unless near a root.
    pub normalized: f64,
    /// `|value| < floor`
    pub floored: bool,
}

pub fn propagator_conditioning(alpha: f64, lambda: f64, t_final: f64, floor: f64) -> Result<Conditioning> {
    let value = propagator(alpha, lambda, t_final)?;
    let arg = lambda * libm::pow(t_final, alpha);
    Ok(Conditioning {
        value,
        normalized: value / t_final * (1.0 + arg),
        floored: libm::fabs(value) < floor,
    })
}

/// Observed range of `E_{α,2}(−t)·(1+t)` over the supplied points.
pub fn normalized_range(alpha: f64, ts: &[f64]) -> Result<(f64, f64)> {
    let p = MLParams::new(alpha, 2.0)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &t in ts {
        let v = ml(p, -t)? * (1.0 + t);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mlp(a: f64, b: f64) -> MLParams {
        MLParams::new(a, b).unwrap()
    }

    // 150-digit evaluations of the defining series (mpmath).
    const REFERENCE: &[(f64, f64, f64, f64)] = &[
        (1.2, 2.0, -0.5, 0.816_479_906_913_576_04),
        (1.2, 2.0, -5.0, 0.197_046_625_576_846_56),
        (1.2, 2.0, -19.739_208_802_178_716, 0.044_260_472_302_056_441),
        (1.8, 2.0, -50.0, 0.026_486_761_460_130_658),
        (1.8, 2.0, -1e4, 2.177_816_357_537_376_5e-5),
        (1.5, 1.0, -20.0, 0.019_595_747_930_187_506),
        (1.9, 2.0, -30.0, -0.038_115_192_843_148_376),
        (1.05, 2.0, -25.0, 0.038_941_288_601_698_896),
        (1.05, 2.0, -300.0, 0.003_232_731_639_819_516_4),
        (1.2, 2.0, -1e3, 8.592_060_548_831_113e-4),
        (1.2, 3.2, -30.0, 0.032_368_441_437_539_431),
        (1.8, 3.8, -40.0, 0.024_007_718_506_444_264),
        (1.5, 1.5, -100.0, -4.018_793_817_834_769e-5),
        (1.3, 2.0, -12.0, 0.065_373_828_235_414_252),
        (1.999, 2.0, -9.8, 0.003_299_178_045_649_098_9),
        (1.2, 1.0, -3.0, -0.035_645_871_490_878_105),
        (0.7, 1.0, -10.0, 0.036_173_265_542_309_158),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(a, b, z, want) in REFERENCE {
            let got = ml(mlp(a, b), z).unwrap();
            let err = (got - want).abs() / want.abs();
            assert!(err < 1e-10, "E_{a},{b}({z}) = {got}, want {want} (rel {err:e})");
        }
    }

    #[test]
    fn contour_matches_reference_inside_series_range() {
        for &(a, b, z, want) in REFERENCE.iter().filter(|r| r.0 != 1.0) {
            let got = ml_contour(mlp(a, b), z).unwrap();
            assert!((got - want).abs() <= 1e-11 * want.abs().max(1e-3), "{a} {b} {z}: {got} vs {want}");
        }
    }

    #[test]
    fn series_examples() {
        let e = ml_series(mlp(1.0, 1.0), 1.0, 1e-17).unwrap();
        assert!((e - core::f64::consts::E).abs() < 1e-15);
        let s = ml_series(mlp(2.0, 2.0), -PI * PI, 1e-17).unwrap();
        assert!(s.abs() <= 1e-12);
        assert_eq!(ml_series(mlp(1.5, 2.0), 0.0, 1e-17).unwrap(), 1.0);
    }

    #[test]
    fn series_reports_overflow() {
        assert!(matches!(
            ml_series(mlp(1.05, 2.0), -5_000.0, 1e-17),
            Err(Error::SeriesNonConvergence { .. })
        ));
    }

    #[test]
    fn asymptotic_examples() {
        let one = ml_asymptotic(mlp(1.2, 2.0), -1e6, 1).unwrap();
        assert!((one - 1.0 / (gamma(0.8) * 1e6)).abs() < 1e-20);
        // 1/Γ(0.8) = 0.858923..., so the value is 8.589e-7
        assert!((one - 8.5892e-7).abs() / 8.5892e-7 < 1e-4);

        let two = ml_asymptotic(mlp(1.8, 2.0), -1e4, 2).unwrap();
        let want = 2.177_816_357_537_376_5e-5;
        assert!((two - want).abs() / want < 1e-6);

        // k = 1 has β − α = 0, a pole of Γ: the single counted term is k = 2
        let skipped = ml_asymptotic(mlp(1.5, 1.5), -1e8, 1).unwrap();
        let k2 = -1e-16 * rgamma(-1.5);
        assert!((skipped - k2).abs() < 1e-30);
        assert!(ml_asymptotic(mlp(1.5, 2.0), 1.0, 1).is_err());
    }

    #[test]
    fn dispatcher_examples() {
        let v = ml(mlp(1.2, 2.0), -0.5).unwrap();
        assert!(v > 0.0 && v < 1.0);
        let e = ml(mlp(1.0, 1.0), -30.0).unwrap();
        assert!((e - libm::exp(-30.0)).abs() < 1e-25);
        let v = ml(mlp(1.8, 2.0), -50.0).unwrap();
        assert!((v - 0.026_486_761_460_130_658).abs() < 1e-13);
    }

    #[test]
    fn alpha_one_closed_forms() {
        for &z in &[-0.5, -3.0, -12.0, -40.0, -800.0] {
            let e12 = ml(mlp(1.0, 2.0), z).unwrap();
            let want = (libm::exp(z) - 1.0) / z;
            assert!((e12 - want).abs() < 1e-14 * want.abs().max(1e-300), "{z}");
        }
    }

    #[test]
    fn recurrence_examples() {
        assert!(ml_recurrence_check(mlp(1.2, 1.0), -3.0).unwrap() <= 1e-9);
        assert!(ml_recurrence_check(mlp(1.8, 2.0), -20.0).unwrap() <= 1e-8);
        assert_eq!(ml_recurrence_check(mlp(1.5, 2.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn no_roots_at_or_below_four_thirds() {
        let rs = find_real_roots(1.3, 1e4).unwrap();
        assert!(rs.is_empty());
    }

    #[test]
    fn roots_for_alpha_1_9() {
        let rs = find_real_roots(1.9, 1e4).unwrap();
        assert!(!rs.is_empty());
        assert!(rs.roots.windows(2).all(|w| w[0] < w[1]));
        let p = mlp(1.9, 2.0);
        for &r in &rs.roots {
            assert!(ml(p, -r).unwrap().abs() <= 1e-10, "root {r}");
        }
        // a fine independent scan brackets every reported root
        for &r in &rs.roots {
            let lo = ml(p, -(r - 0.01)).unwrap();
            let hi = ml(p, -(r + 0.01)).unwrap();
            assert!(lo * hi < 0.0);
        }
    }

    #[test]
    fn near_wave_limit_first_root() {
        let rs = find_real_roots(1.999, 100.0).unwrap();
        let t1 = rs.first().unwrap();
        assert!((t1 - PI * PI).abs() / (PI * PI) < 0.05, "first root {t1}");
    }

    #[test]
    fn uncertified_bound_is_rejected() {
        assert!(matches!(find_real_roots(1.9, 2.0), Err(Error::UncertifiedBound { .. })));
    }

    #[test]
    fn propagator_examples() {
        let v = propagator(1.2, 2.0 * PI * PI, 1.0).unwrap();
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(propagator(1.5, 0.0, 1.0).unwrap(), 1.0);
        let rs = find_real_roots(1.8, 1e4).unwrap();
        let t1 = rs.first().expect("α = 1.8 has a real root");
        let v = propagator(1.8, t1, 1.0).unwrap();
        assert!(v.abs() <= 1e-9);
        let c = propagator_conditioning(1.8, t1, 1.0, 1e-12).unwrap();
        assert!(c.floored);
    }
}
