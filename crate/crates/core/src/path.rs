//! Spot return-rate paths r(t) over a rotation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// A spot return rate r(t), in 1/year, over a rotation cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReturnPath {
    Constant {
        rate: f64,
    },
    /// `mean_rate * (shape + 2 (1 - shape) sin²(π t / full_cycle))` on
    /// `[0, full_cycle]`. The factor 2 makes the full-cycle average equal
    /// `mean_rate`.
    Ansatz {
        mean_rate: f64,
        shape: f64,
        full_cycle: f64,
    },
    /// Piecewise-linear through `(time, rate)` knots. No extrapolation.
    Tabulated { knots: Vec<(f64, f64)> },
    /// `r'(t) = inner(horizon - t)`.
    Reversed {
        inner: Box<ReturnPath>,
        horizon: f64,
    },
}

impl ReturnPath {
    pub fn constant(rate: f64) -> Result<Self> {
        let p = ReturnPath::Constant { rate };
        p.validate()?;
        Ok(p)
    }

    pub fn ansatz(mean_rate: f64, shape: f64, full_cycle: f64) -> Result<Self> {
        let p = ReturnPath::Ansatz {
            mean_rate,
            shape,
            full_cycle,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        let p = ReturnPath::Tabulated { knots };
        p.validate()?;
        Ok(p)
    }

    /// The same path run backwards over `[0, horizon]`.
    pub fn reversed(&self, horizon: f64) -> Result<Self> {
        let p = ReturnPath::Reversed {
            inner: Box::new(self.clone()),
            horizon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPath(msg));
        match self {
            ReturnPath::Constant { rate } => {
                if !rate.is_finite() {
                    return bad(format!("constant rate must be finite, got {rate}"));
                }
            }
            ReturnPath::Ansatz {
                mean_rate,
                shape,
                full_cycle,
            } => {
                if !mean_rate.is_finite() || !shape.is_finite() {
                    return bad("ansatz mean_rate and shape must be finite".into());
                }
                if !(full_cycle.is_finite() && *full_cycle > 0.0) {
                    return bad(format!("ansatz full_cycle must be > 0, got {full_cycle}"));
                }
            }
            ReturnPath::Tabulated { knots } => {
                if knots.len() < 2 {
                    return bad("tabulated path needs at least two knots".into());
                }
                if knots.iter().any(|(t, r)| !t.is_finite() || !r.is_finite()) {
                    return bad("tabulated knots must be finite".into());
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return bad("tabulated knot times must be strictly increasing".into());
                }
            }
            ReturnPath::Reversed { inner, horizon } => {
                inner.validate()?;
                if !(horizon.is_finite() && *horizon > 0.0) {
                    return bad(format!("reversal horizon must be > 0, got {horizon}"));
                }
                let (lo, hi) = inner.domain();
                if lo > 0.0 || hi < *horizon {
                    return bad(format!(
                        "reversal horizon {horizon} exceeds inner domain [{lo}, {hi}]"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Closed interval on which the path is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            ReturnPath::Constant { .. } => (0.0, f64::INFINITY),
            ReturnPath::Ansatz { full_cycle, .. } => (0.0, *full_cycle),
            ReturnPath::Tabulated { knots } => (knots[0].0, knots[knots.len() - 1].0),
            ReturnPath::Reversed { inner, horizon } => {
                let (lo, hi) = inner.domain();
                ((horizon - hi).max(0.0), (horizon - lo).min(*horizon))
            }
        }
    }

    /// Maps `t` into the domain, absorbing rounding at the endpoints.
    fn locate(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * hi.abs().max(1.0);
        if t.is_nan() || t < lo - slack || t > hi + slack {
            return Err(Error::Domain { t, lo, hi });
        }
        Ok(t.clamp(lo, hi))
    }

    pub(crate) fn check_interval(&self, a: f64, b: f64) -> Result<()> {
        self.locate(a)?;
        self.locate(b)?;
        Ok(())
    }

    /// r(t).
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let t = self.locate(t)?;
        Ok(self.rate(t))
    }

    /// r(t) for a `t` already known to be in the domain.
    pub(crate) fn rate(&self, t: f64) -> f64 {
        match self {
            ReturnPath::Constant { rate } => *rate,
            ReturnPath::Ansatz {
                mean_rate,
                shape,
                full_cycle,
            } => {
                let s = (PI * t / full_cycle).sin();
                mean_rate * (shape + 2.0 * (1.0 - shape) * s * s)
            }
            ReturnPath::Tabulated { knots } => {
                let i = knots.partition_point(|k| k.0 <= t);
                if i == 0 {
                    return knots[0].1;
                }
                if i == knots.len() {
                    return knots[knots.len() - 1].1;
                }
                let (t0, r0) = knots[i - 1];
                let (t1, r1) = knots[i];
                r0 + (r1 - r0) * (t - t0) / (t1 - t0)
            }
            ReturnPath::Reversed { inner, horizon } => inner.rate(horizon - t),
        }
    }

    /// Times where r(t) has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ReturnPath::Constant { .. } | ReturnPath::Ansatz { .. } => Vec::new(),
            ReturnPath::Tabulated { knots } => knots.iter().map(|k| k.0).collect(),
            ReturnPath::Reversed { inner, horizon } => {
                inner.breakpoints().into_iter().map(|b| horizon - b).collect()
            }
        }
    }

    /// R(t) = ∫₀ᵗ r(s) ds with the default scheme.
    pub fn cumulative_return(&self, t: f64) -> Result<f64> {
        self.cumulative_return_with(t, &Quadrature::default())
    }

    pub fn cumulative_return_with(&self, t: f64, quad: &Quadrature) -> Result<f64> {
        self.check_interval(0.0, t)?;
        if t < 0.0 {
            return Err(Error::Domain {
                t,
                lo: 0.0,
                hi: self.domain().1,
            });
        }
        let t = self.locate(t)?;
        Ok(quad.integrate(0.0, t, &self.breakpoints(), |s| self.rate(s)))
    }

    /// ⟨r⟩ over `[0, tau]`, i.e. R(tau) / tau.
    pub fn time_average_rate(&self, tau: f64) -> Result<f64> {
        self.time_average_rate_with(tau, &Quadrature::default())
    }

    pub fn time_average_rate_with(&self, tau: f64, quad: &Quadrature) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(Error::InvalidArgument(format!("tau must be > 0, got {tau}")));
        }
        Ok(self.cumulative_return_with(tau, quad)? / tau)
    }

    /// A natural scale for quoting rates as multiples: the full-cycle mean
    /// for the ansatz, the rate itself for a constant path.
    pub fn reference_rate(&self) -> Option<f64> {
        match self {
            ReturnPath::Constant { rate } => Some(*rate),
            ReturnPath::Ansatz { mean_rate, .. } => Some(*mean_rate),
            ReturnPath::Tabulated { .. } => None,
            ReturnPath::Reversed { inner, .. } => inner.reference_rate(),
        }
    }

    /// Period of the ansatz, if this path is (a reversal of) one.
    pub fn full_cycle(&self) -> Option<f64> {
        match self {
            ReturnPath::Ansatz { full_cycle, .. } => Some(*full_cycle),
            ReturnPath::Reversed { inner, .. } => inner.full_cycle(),
            _ => None,
        }
    }
}
