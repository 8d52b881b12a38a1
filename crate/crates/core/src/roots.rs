//! All complex roots of a real polynomial by Durand-Kerner iteration.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurandKerner {
    pub max_iterations: usize,
    /// Converged once no root moves more than this (relative to max(1, |z|)).
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for DurandKerner {
    fn default() -> Self {
        DurandKerner {
            max_iterations: 500,
            tolerance: 1e-12,
            seed: 0x5eed_1e55,
        }
    }
}

/// Horner evaluation; `coeffs[i]` multiplies `z^i`.
pub fn eval_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and derivative at a real point.
pub fn eval_real(coeffs: &[f64], x: f64) -> (f64, f64) {
    coeffs.iter().rev().fold((0.0, 0.0), |(p, dp), &c| (p * x + c, dp * x + p))
}

/// |p(z)| is within a few ulps of the evaluation's own rounding error.
/// Clustered (multiple) roots stall here with steps far above `tolerance`.
fn at_rounding_level(coeffs: &[f64], z: Complex64) -> bool {
    let scale = coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * z.norm() + c.abs());
    eval_complex(coeffs, z).norm() <= 8.0 * f64::EPSILON * scale
}

impl DurandKerner {
    /// Roots of `Σ coeffs[i] z^i`. Leading and constant coefficients must be
    /// nonzero. Returns `degree` roots with multiplicity.
    pub fn solve(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        let n = coeffs.len().saturating_sub(1);
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = coeffs[n];
        if lead == 0.0 || coeffs[0] == 0.0 {
            return Err(Error::InvalidArgument(
                "polynomial must have nonzero leading and constant terms".into(),
            ));
        }
        let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
        if n == 1 {
            return Ok(vec![Complex64::new(-monic[0], 0.0)]);
        }

        // ring of radius |a0|^(1/n) with jittered angles
        let radius = monic[0].abs().powf(1.0 / n as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let offset: f64 = rng.gen_range(0.0..TAU);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let jitter: f64 = rng.gen_range(-0.25..0.25);
                let theta = offset + TAU * (k as f64 + jitter) / n as f64;
                Complex64::from_polar(radius * rng.gen_range(0.9..1.1), theta)
            })
            .collect();

        for _ in 0..self.max_iterations {
            let mut moved = 0.0f64;
            for i in 0..n {
                let zi = z[i];
                let denom = z
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(Complex64::new(1.0, 0.0), |acc, (_, &zj)| acc * (zi - zj));
                if denom.norm() == 0.0 {
                    // coincident estimates; nudge apart
                    z[i] += Complex64::new(1e-8, 1e-8) * zi.norm().max(1.0);
                    moved = f64::INFINITY;
                    continue;
                }
                let step = eval_complex(&monic, zi) / denom;
                z[i] = zi - step;
                moved = moved.max(step.norm() / zi.norm().max(1.0));
            }
            if moved <= self.tolerance || z.iter().all(|&zi| at_rounding_level(&monic, zi)) {
                return Ok(z);
            }
        }
        let residual = z
            .iter()
            .map(|&zi| eval_complex(&monic, zi).norm())
            .fold(0.0, f64::max);
        Err(Error::NoConvergence {
            iterations: self.max_iterations,
            residual,
        })
    }
}
