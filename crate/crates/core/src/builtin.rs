//! The three reference initial velocities and their experiment constants.

use core::f64::consts::PI;

use crate::spectral::{indicator_square_coeffs, project, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Example {
    /// `8x^{1.01}(x−1) sin(πy)`, `T = 1`, `σ = 0.2`
    Ex1,
    /// `7x^{0.75}(x−1) sin(2πy)`, `T = 1`, `σ = 0.4`
    Ex2,
    /// indicator of `[0.25, 0.75]²`, `T = 0.1`, `σ = 0.01`
    Ex3,
}

impl Example {
    pub const ALL: [Example; 3] = [Example::Ex1, Example::Ex2, Example::Ex3];

    pub fn id(self) -> &'static str {
        match self {
            Example::Ex1 => "ex1",
            Example::Ex2 => "ex2",
            Example::Ex3 => "ex3",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.id() == id)
    }

    pub fn t_final(self) -> f64 {
        match self {
            Example::Ex1 | Example::Ex2 => 1.0,
            Example::Ex3 => 0.1,
        }
    }

    pub fn sigma(self) -> f64 {
        match self {
            Example::Ex1 => 0.2,
            Example::Ex2 => 0.4,
            Example::Ex3 => 0.01,
        }
    }

    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            Example::Ex1 => 8.0 * libm::pow(x, 1.01) * (x - 1.0) * libm::sin(PI * y),
            Example::Ex2 => 7.0 * libm::pow(x, 0.75) * (x - 1.0) * libm::sin(2.0 * PI * y),
            Example::Ex3 => {
                if (0.25..=0.75).contains(&x) && (0.25..=0.75).contains(&y) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Sine coefficients up to `j_max`. The indicator uses its closed form;
    /// the others use tensor Gauss–Legendre with at least `4·j_max` nodes.
    pub fn coefficients(self, j_max: usize) -> SpectralField {
        match self {
            Example::Ex3 => indicator_square_coeffs(0.25, 0.75, j_max),
            _ => project(|x, y| self.eval(x, y), j_max, (4 * j_max).max(128)),
        }
    }
}

/// Modes per dimension for reconstructions.
pub const J_MAX: usize = 32;
/// Modes per dimension for reference fields in error norms.
pub const J_REF: usize = 128;
/// Observation grid size per dimension (`n = 6241`).
pub const G_OBS: usize = 79;
