//! Rotation-length maximization: coarse grid, then golden-section refinement
//! inside the bracket around the best grid point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Uniform grid of `steps` rotation lengths from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl TauGrid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "tau grid needs at least 2 points, got {steps}"
            )));
        }
        if !(min.is_finite() && max.is_finite() && min > 0.0 && max > min) {
            return Err(Error::InvalidArgument(format!(
                "tau grid needs 0 < min < max, got [{min}, {max}]"
            )));
        }
        Ok(TauGrid { min, max, steps })
    }

    /// `steps` points spaced `full / steps` apart ending at `full`:
    /// full/steps, 2 full/steps, ..., full.
    pub fn up_to(full: f64, steps: usize) -> Result<Self> {
        TauGrid::new(full / steps as f64, full, steps)
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + h * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub tau: f64,
    pub value: f64,
    /// Index of the best grid point before refinement.
    pub grid_index: usize,
}

/// Maximizes `f` over the grid. Infeasible points may return -inf.
/// Ties go to the smaller τ.
pub fn maximize<F>(grid: &[f64], f: F) -> Result<Optimum>
where
    F: Fn(f64) -> Result<f64>,
{
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty tau grid".into()));
    }
    let values = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    maximize_sampled(grid, &values, f)
}

/// As [`maximize`], with the grid values already computed.
pub fn maximize_sampled<F>(grid: &[f64], values: &[f64], f: F) -> Result<Optimum>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] || values[best].is_nan() {
            best = i;
        }
    }
    let grid_value = values[best];
    if !(grid_value > f64::NEG_INFINITY) {
        return Err(Error::InvalidArgument(
            "objective is infeasible on the whole grid".into(),
        ));
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let mut opt = Optimum {
        tau: grid[best],
        value: grid_value,
        grid_index: best,
    };
    if hi > lo {
        let (tau, value) = golden_section(lo, hi, &f)?;
        if value > opt.value {
            opt.tau = tau;
            opt.value = value;
        }
    }
    Ok(opt)
}

/// Golden-section search for a maximum on `[lo, hi]`.
pub fn golden_section<F>(mut lo: f64, mut hi: f64, f: &F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let tol = 1e-10 * hi.abs().max(1.0);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}
