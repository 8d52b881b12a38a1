//! Composite Simpson integration over a rotation.
//!
//! Each panel is integrated with two Simpson half-panels, so a panel needs the
//! integrand at its endpoints, midpoint and quarter points. Panels never
//! straddle a breakpoint (tabulated knots, investment events, density knots).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_INTERVALS: usize = 4096;

/// Uniform composite Simpson scheme with `intervals` panels per rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrature {
    pub intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            intervals: DEFAULT_INTERVALS,
        }
    }
}

impl Quadrature {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one interval".into(),
            ));
        }
        Ok(Quadrature { intervals })
    }

    /// Panel boundaries covering `[lo, hi]`, refined so every breakpoint
    /// strictly inside the interval is a node. Each segment between
    /// breakpoints gets a share of panels proportional to its length.
    pub fn nodes(&self, lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<f64> {
        if hi <= lo {
            return vec![lo];
        }
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let span = hi - lo;
        let mut nodes = Vec::with_capacity(self.intervals + cuts.len() + 1);
        nodes.push(lo);
        let mut start = lo;
        for end in cuts.into_iter().chain(std::iter::once(hi)) {
            let len = end - start;
            let n = ((self.intervals as f64 * len / span).round() as usize).max(1);
            let h = len / n as f64;
            for i in 1..n {
                nodes.push(start + h * i as f64);
            }
            nodes.push(end);
            start = end;
        }
        nodes
    }

    /// Integral of `f` over `[lo, hi]`.
    pub fn integrate<F>(&self, lo: f64, hi: f64, breakpoints: &[f64], f: F) -> f64
    where
        F: Fn(f64) -> f64,
    {
        self.nodes(lo, hi, breakpoints)
            .windows(2)
            .map(|w| panel(w[0], w[1], &f))
            .sum()
    }
}

/// Two Simpson half-panels over `[a, b]`.
pub(crate) fn panel<F>(a: f64, b: f64, f: &F) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    half_panels(a, m, b, f(a), f(0.25 * (3.0 * a + b)), f(m), f(0.25 * (a + 3.0 * b)), f(b)).1
}

/// Returns (integral over [a, m], integral over [a, b]) from five samples.
#[allow(clippy::too_many_arguments)]
pub(crate) fn half_panels(
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fq1: f64,
    fm: f64,
    fq3: f64,
    fb: f64,
) -> (f64, f64) {
    let left = (m - a) / 6.0 * (fa + 4.0 * fq1 + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * fq3 + fb);
    (left, left + right)
}
