//! Dirichlet eigensystem of `−Δ` on `(0,1)²`: `φ_jk = 2 sin(jπx) sin(kπy)`,
//! `λ_jk = π²(j² + k²)`.
//!
//! Coefficient arrays are flattened with `j` fastest: mode `(j, k)` sits at
//! `(k−1)·J + (j−1)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub j: usize,
    pub k: usize,
}

impl ModeIndex {
    pub fn new(j: usize, k: usize) -> Self {
        Self { j, k }
    }

    pub fn flat(self, j_max: usize) -> usize {
        (self.k - 1) * j_max + (self.j - 1)
    }

    pub fn from_flat(idx: usize, j_max: usize) -> Self {
        Self {
            j: idx % j_max + 1,
            k: idx / j_max + 1,
        }
    }
}

pub fn eigenvalue(m: ModeIndex) -> f64 {
    PI * PI * ((m.j * m.j + m.k * m.k) as f64)
}

pub fn basis_eval(m: ModeIndex, x: f64, y: f64) -> f64 {
    2.0 * libm::sin(m.j as f64 * PI * x) * libm::sin(m.k as f64 * PI * y)
}

/// `sin(jπx)` for `j = 1..=j_max`.
fn sine_row(x: f64, j_max: usize) -> Vec<f64> {
    (1..=j_max).map(|j| libm::sin(j as f64 * PI * x)).collect()
}

/// Coefficients `(f, φ_jk)` for `1 ≤ j, k ≤ J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    j_max: usize,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(j_max: usize) -> Self {
        Self {
            j_max,
            coeffs: alloc::vec![0.0; j_max * j_max],
        }
    }

    pub fn from_coeffs(j_max: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != j_max * j_max {
            return Err(Error::DimensionMismatch {
                expected: j_max * j_max,
                found: coeffs.len(),
            });
        }
        Ok(Self { j_max, coeffs })
    }

    pub fn single_mode(j_max: usize, m: ModeIndex, c: f64) -> Self {
        let mut f = Self::zeros(j_max);
        f.set(m, c);
        f
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, m: ModeIndex) -> f64 {
        self.coeffs[m.flat(self.j_max)]
    }

    pub fn set(&mut self, m: ModeIndex, c: f64) {
        let idx = m.flat(self.j_max);
        self.coeffs[idx] = c;
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        (0..self.coeffs.len()).map(move |i| ModeIndex::from_flat(i, self.j_max))
    }

    /// Eigenvalues in the flattened order.
    pub fn eigenvalues(j_max: usize) -> Vec<f64> {
        (0..j_max * j_max)
            .map(|i| eigenvalue(ModeIndex::from_flat(i, j_max)))
            .collect()
    }

    /// Zero-padded or truncated copy with `j_max` modes per dimension.
    pub fn resized(&self, j_max: usize) -> Self {
        let mut out = Self::zeros(j_max);
        let common = j_max.min(self.j_max);
        for k in 1..=common {
            for j in 1..=common {
                let m = ModeIndex::new(j, k);
                out.set(m, self.get(m));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self {
            j_max: self.j_max,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self {
            j_max: self.j_max,
            coeffs,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            j_max: self.j_max,
            coeffs: self.coeffs.iter().map(|c| s * c).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.j_max != other.j_max {
            return Err(Error::DimensionMismatch {
                expected: self.j_max,
                found: other.j_max,
            });
        }
        Ok(())
    }
}

/// `(Σ λ_jk^{2γ} c_jk²)^{1/2}`.
pub fn norm_gamma(field: &SpectralField, gamma: f64) -> f64 {
    let mut s = 0.0;
    for (i, &c) in field.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let lam = eigenvalue(ModeIndex::from_flat(i, field.j_max));
        s += libm::pow(lam, 2.0 * gamma) * c * c;
    }
    libm::sqrt(s)
}

/// Coefficients of `f` by tensor Gauss–Legendre quadrature with
/// `quad_order` nodes per dimension, evaluated as a separable transform.
pub fn project<F: Fn(f64, f64) -> f64>(f: F, j_max: usize, quad_order: usize) -> SpectralField {
    let rule = GaussLegendre::on_interval(quad_order, 0.0, 1.0);
    let q = rule.len();
    // s[j][a] = w_a sin(jπ x_a)
    let mut s = alloc::vec![0.0; j_max * q];
    for (a, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        for (j, v) in sine_row(x, j_max).into_iter().enumerate() {
            s[j * q + a] = w * v;
        }
    }
    // t[j][b] = Σ_a s[j][a] f(x_a, y_b)
    let mut fvals = alloc::vec![0.0; q * q];
    for (a, &x) in rule.nodes.iter().enumerate() {
        for (b, &y) in rule.nodes.iter().enumerate() {
            fvals[a * q + b] = f(x, y);
        }
    }
    let mut t = alloc::vec![0.0; j_max * q];
    for j in 0..j_max {
        let srow = &s[j * q..(j + 1) * q];
        let trow = &mut t[j * q..(j + 1) * q];
        for (a, &sa) in srow.iter().enumerate() {
            if sa == 0.0 {
                continue;
            }
            for (tb, &fv) in trow.iter_mut().zip(&fvals[a * q..(a + 1) * q]) {
                *tb += sa * fv;
            }
        }
    }
    let mut out = SpectralField::zeros(j_max);
    for k in 0..j_max {
        let sk = &s[k * q..(k + 1) * q];
        for j in 0..j_max {
            let tj = &t[j * q..(j + 1) * q];
            let v: f64 = sk.iter().zip(tj).map(|(a, b)| a * b).sum();
            out.coeffs[k * j_max + j] = 2.0 * v;
        }
    }
    out
}

/// Values on the interior nodes `((i+1)/(g+1), (l+1)/(g+1))`, stored with
/// `i` (the x index) slowest: `values[i·g + l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    g: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(g: usize) -> Self {
        Self {
            g,
            values: alloc::vec![0.0; g * g],
        }
    }

    pub fn from_values(g: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != g * g {
            return Err(Error::DimensionMismatch {
                expected: g * g,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "grid values must be finite",
            });
        }
        Ok(Self { g, values })
    }

    pub fn sample<F: Fn(f64, f64) -> f64>(g: usize, f: F) -> Self {
        let mut out = Self::zeros(g);
        for i in 0..g {
            for l in 0..g {
                let (x, y) = out.node(i, l);
                out.values[i * g + l] = f(x, y);
            }
        }
        out
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, i: usize, l: usize) -> (f64, f64) {
        let h = 1.0 / (self.g as f64 + 1.0);
        ((i + 1) as f64 * h, (l + 1) as f64 * h)
    }

    pub fn get(&self, i: usize, l: usize) -> f64 {
        self.values[i * self.g + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    /// `(x, y, value)` triples in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.values.len()).map(move |idx| {
            let (x, y) = self.node(idx / self.g, idx % self.g);
            (x, y, self.values[idx])
        })
    }
}

/// Coefficients from grid values by the discrete sine rule
/// `c_jk = Σ f φ_jk / (g+1)²`, exact for sine sums with `j, k ≤ g`.
pub fn project_grid(gf: &GridFunction, j_max: usize) -> SpectralField {
    let g = gf.g;
    let h = 1.0 / (g as f64 + 1.0);
    let s: Vec<Vec<f64>> = (0..g).map(|i| sine_row((i + 1) as f64 * h, j_max)).collect();
    // t[j][l] = Σ_i sin(jπx_i) f[i][l]
    let mut t = alloc::vec![0.0; j_max * g];
    for (i, si) in s.iter().enumerate() {
        let row = &gf.values[i * g..(i + 1) * g];
        for (j, &sij) in si.iter().enumerate() {
            for (tv, &fv) in t[j * g..(j + 1) * g].iter_mut().zip(row) {
                *tv += sij * fv;
            }
        }
    }
    let scale = 2.0 * h * h;
    let mut out = SpectralField::zeros(j_max);
    for k in 0..j_max {
        for j in 0..j_max {
            let v: f64 = (0..g).map(|l| s[l][k] * t[j * g + l]).sum();
            out.coeffs[k * j_max + j] = scale * v;
        }
    }
    out
}

/// Pointwise values `Σ c_jk φ_jk(x)`; zero on the boundary.
pub fn synthesize(field: &SpectralField, points: &[(f64, f64)]) -> Vec<f64> {
    let jm = field.j_max;
    points
        .iter()
        .map(|&(x, y)| {
            if x <= 0.0 || x >= 1.0 || y <= 0.0 || y >= 1.0 {
                return 0.0;
            }
            let sx = sine_row(x, jm);
            let sy = sine_row(y, jm);
            let mut total = 0.0;
            for (k, &syk) in sy.iter().enumerate() {
                let row = &field.coeffs[k * jm..(k + 1) * jm];
                let inner: f64 = row.iter().zip(&sx).map(|(c, s)| c * s).sum();
                total += syk * inner;
            }
            2.0 * total
        })
        .collect()
}

/// Synthesis on the `g × g` interior grid by two separable passes.
pub fn synthesize_grid(field: &SpectralField, g: usize) -> GridFunction {
    let jm = field.j_max;
    let h = 1.0 / (g as f64 + 1.0);
    let s: Vec<Vec<f64>> = (0..g).map(|i| sine_row((i + 1) as f64 * h, jm)).collect();
    // t[i][k] = Σ_j c_jk sin(jπx_i)
    let mut t = alloc::vec![0.0; g * jm];
    for (i, si) in s.iter().enumerate() {
        for k in 0..jm {
            let row = &field.coeffs[k * jm..(k + 1) * jm];
            t[i * jm + k] = row.iter().zip(si).map(|(c, s)| c * s).sum();
        }
    }
    let mut out = GridFunction::zeros(g);
    for i in 0..g {
        let ti = &t[i * jm..(i + 1) * jm];
        for (l, sl) in s.iter().enumerate() {
            out.values[i * g + l] = 2.0 * ti.iter().zip(sl).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    out
}

/// Closed-form coefficients of the indicator of `[a, b]²`:
/// `(χ, φ_jk) = 2·I_j·I_k` with `I_j = (cos(jπa) − cos(jπb))/(jπ)`.
pub fn indicator_square_coeffs(a: f64, b: f64, j_max: usize) -> SpectralField {
    let ints: Vec<f64> = (1..=j_max)
        .map(|j| {
            let jp = j as f64 * PI;
            (libm::cos(jp * a) - libm::cos(jp * b)) / jp
        })
        .collect();
    let mut out = SpectralField::zeros(j_max);
    for k in 0..j_max {
        for j in 0..j_max {
            out.coeffs[k * j_max + j] = 2.0 * ints[j] * ints[k];
        }
    }
    out
}
