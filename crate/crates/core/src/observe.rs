//! Observation points, seeded noisy terminal measurements and the discrete
//! norm `‖u‖_n = (Σ u(x_i)²/n)^{1/2}`.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::forward::{apply_s, ForwardConfig};
use crate::spectral::{synthesize, SpectralField};

/// Name of the noise generator, recorded next to every observation file.
pub const GENERATOR: &str = "rand_chacha::ChaCha8Rng(seed_from_u64)+rand_distr::StandardNormal";

/// Distinct points in the open unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<(f64, f64)>,
}

impl PointSet {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "need at least one point",
            });
        }
        if points.iter().any(|&(x, y)| !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "must lie in the open unit square",
            });
        }
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "must be pairwise distinct",
            });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Interior grid `{(i/(g+1), l/(g+1)) : 1 ≤ i, l ≤ g}`, x index slowest.
pub fn uniform_grid_points(g: usize) -> Result<PointSet> {
    if g < 2 {
        return Err(Error::InvalidParameter {
            name: "g",
            reason: "need g ≥ 2",
        });
    }
    let h = 1.0 / (g as f64 + 1.0);
    let mut pts = Vec::with_capacity(g * g);
    for i in 1..=g {
        for l in 1..=g {
            pts.push((i as f64 * h, l as f64 * h));
        }
    }
    PointSet::new(pts)
}

/// Fill distance, separation distance and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiUniformity {
    pub d_max: f64,
    pub d_min: f64,
    pub b: f64,
}

/// Uniform bucket grid over `[0,1]²` for nearest-neighbour queries.
struct CellList<'a> {
    pts: &'a [(f64, f64)],
    m: usize,
    heads: Vec<Vec<usize>>,
}

impl<'a> CellList<'a> {
    fn new(pts: &'a [(f64, f64)]) -> Self {
        let m = (libm::sqrt(pts.len() as f64) as usize).max(1);
        let mut heads = alloc::vec![Vec::new(); m * m];
        for (idx, &(x, y)) in pts.iter().enumerate() {
            let (cx, cy) = Self::cell(m, x, y);
            heads[cx * m + cy].push(idx);
        }
        Self { pts, m, heads }
    }

    fn cell(m: usize, x: f64, y: f64) -> (usize, usize) {
        let c = |v: f64| ((v * m as f64) as usize).min(m - 1);
        (c(x), c(y))
    }

    /// Distance from `q` to the nearest point other than `skip`.
    fn nearest(&self, q: (f64, f64), skip: Option<usize>) -> f64 {
        let m = self.m as isize;
        let (cx, cy) = Self::cell(self.m, q.0, q.1);
        let (cx, cy) = (cx as isize, cy as isize);
        let h = 1.0 / self.m as f64;
        let mut best = f64::INFINITY;
        for ring in 0..=m {
            // every point outside the rings seen so far is at least this far
            if best.is_finite() && (ring as f64 - 1.0) * h > best {
                break;
            }
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    let (x, y) = (cx + dx, cy + dy);
                    if x < 0 || y < 0 || x >= m || y >= m {
                        continue;
                    }
                    for &idx in &self.heads[(x * m + y) as usize] {
                        if Some(idx) == skip {
                            continue;
                        }
                        let p = self.pts[idx];
                        let d = libm::hypot(p.0 - q.0, p.1 - q.1);
                        best = best.min(d);
                    }
                }
            }
        }
        best
    }
}

/// `d_min` exactly over pairs; `d_max = sup_{x∈Ω̄} min_i |x − x_i|`
/// approximated on a `probe × probe` grid covering the closed square.
pub fn quasi_uniformity(ps: &PointSet, probe: usize) -> Result<QuasiUniformity> {
    if ps.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "need n ≥ 2",
        });
    }
    if probe < 2 {
        return Err(Error::InvalidParameter {
            name: "probe",
            reason: "need probe ≥ 2",
        });
    }
    let cells = CellList::new(&ps.points);
    let d_min = ps
        .points
        .iter()
        .enumerate()
        .map(|(i, &p)| cells.nearest(p, Some(i)))
        .fold(f64::INFINITY, f64::min);
    let mut d_max: f64 = 0.0;
    let step = 1.0 / (probe - 1) as f64;
    for a in 0..probe {
        for b in 0..probe {
            d_max = d_max.max(cells.nearest((a as f64 * step, b as f64 * step), None));
        }
    }
    Ok(QuasiUniformity {
        d_max,
        d_min,
        b: d_max / d_min,
    })
}

/// Probe resolution of four nodes per expected point spacing.
pub fn default_probe(n: usize) -> usize {
    4 * (libm::ceil(libm::sqrt(n as f64)) as usize + 1) + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub points: PointSet,
    pub m: Vec<f64>,
    pub sigma: f64,
    pub seed: u64,
}

impl Observations {
    pub fn new(points: PointSet, m: Vec<f64>, sigma: f64, seed: u64) -> Result<Self> {
        if m.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: m.len(),
            });
        }
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: "must be non-negative",
            });
        }
        Ok(Self { points, m, sigma, seed })
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }
}

/// `n` i.i.d. standard normal draws from the seeded generator.
pub fn standard_normal_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `m_i = (S a*)(x_i) + σ ε_i` with `ε_i ~ N(0, 1)` drawn from a generator
/// seeded by `seed`.
pub fn sample_observations(
    a_star: &SpectralField,
    cfg: &ForwardConfig,
    ps: &PointSet,
    sigma: f64,
    seed: u64,
) -> Result<Observations> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: "must be non-negative",
        });
    }
    let exact = synthesize(&apply_s(a_star, cfg)?, ps.points());
    let m = if sigma == 0.0 {
        exact
    } else {
        exact
            .iter()
            .zip(standard_normal_noise(ps.len(), seed))
            .map(|(u, e)| u + sigma * e)
            .collect()
    };
    Observations::new(ps.clone(), m, sigma, seed)
}

pub fn discrete_norm(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let s: f64 = values.iter().map(|v| v * v).sum();
    libm::sqrt(s / values.len() as f64)
}
