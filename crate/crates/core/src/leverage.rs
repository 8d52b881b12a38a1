//! Leverage: return rate on equity and the leveraged quasi-internal rate Ω.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::GrowthScenario;
use crate::optimize::{maximize, Optimum};

/// Leverage `L = K/E − 1` and the market rate `u` paid (or earned) on debt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeverageSpec {
    pub leverage: f64,
    pub market_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equity: Option<f64>,
}

impl LeverageSpec {
    pub fn new(leverage: f64, market_rate: f64) -> Result<Self> {
        check_leverage(leverage)?;
        if !market_rate.is_finite() {
            return Err(Error::InvalidArgument("market rate must be finite".into()));
        }
        Ok(LeverageSpec {
            leverage,
            market_rate,
            equity: None,
        })
    }

    /// Attaches equity, which must satisfy `L + 1 = K / E`.
    pub fn with_equity(mut self, capital: f64, equity: f64) -> Result<Self> {
        let implied = leverage_from_equity(capital, equity)?;
        if (implied - self.leverage).abs() >= 1e-9 {
            return Err(Error::Inconsistent {
                what: "L + 1 = K / E",
                a: self.leverage,
                b: implied,
            });
        }
        self.equity = Some(equity);
        Ok(self)
    }
}

pub(crate) fn check_leverage(leverage: f64) -> Result<()> {
    if leverage.is_finite() && leverage >= -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLeverage(leverage))
    }
}

pub fn leverage_from_equity(capital: f64, equity: f64) -> Result<f64> {
    if !(equity.is_finite() && equity > 0.0) || !(capital.is_finite() && capital >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need capital >= 0 and equity > 0, got K = {capital}, E = {equity}"
        )));
    }
    Ok(capital / equity - 1.0)
}

/// `⟨s⟩ + L (⟨s⟩ − u)`, evaluated as `(1 + L)⟨s⟩ − L u` so that `L = −1`
/// returns `u` exactly.
pub fn rroe(rroc: f64, leverage: f64, market_rate: f64) -> Result<f64> {
    check_leverage(leverage)?;
    Ok((1.0 + leverage) * rroc - leverage * market_rate)
}

/// Ω solving `[(1+L)e^{⟨r⟩τ} − L e^{uτ}] e^{−Ωτ} − 1 = 0`.
pub fn leveraged_discount_rate_from_mean(tau: f64, mean_rate: f64, leverage: f64, market_rate: f64) -> Result<f64> {
    check_leverage(leverage)?;
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be > 0, got {tau}")));
    }
    // 1 + L (1 − e^{−τ(r−u)})
    let argument = 1.0 - leverage * (-tau * (mean_rate - market_rate)).exp_m1();
    if !(argument > 0.0) {
        return Err(Error::WipedOutEquity { tau, argument });
    }
    let omega = mean_rate + argument.ln() / tau;

    let residual = ((1.0 + leverage) * (mean_rate * tau).exp() - leverage * (market_rate * tau).exp())
        * (-omega * tau).exp()
        - 1.0;
    if residual.abs() >= 1e-9 {
        return Err(Error::Inconsistent {
            what: "leveraged discount rate residual",
            a: residual,
            b: 0.0,
        });
    }
    Ok(omega)
}

pub fn leveraged_discount_rate(scenario: &GrowthScenario, leverage: f64, market_rate: f64) -> Result<f64> {
    if !scenario.is_investment_free() {
        return Err(Error::UnsupportedSchedule);
    }
    leveraged_discount_rate_from_mean(
        scenario.rotation_length(),
        scenario.mean_rate()?,
        leverage,
        market_rate,
    )
}

pub fn rroc_argmax(scenario: &GrowthScenario, grid: &[f64]) -> Result<Optimum> {
    maximize(grid, |tau| scenario.with_rotation(tau)?.rroc())
}

/// Rotation length maximizing RROE. Needs `L > −1`; at `L = −1` RROE is
/// the constant `u`.
pub fn rroe_argmax(scenario: &GrowthScenario, leverage: f64, market_rate: f64, grid: &[f64]) -> Result<Optimum> {
    check_leverage(leverage)?;
    if leverage == -1.0 {
        return Err(Error::InvalidLeverage(leverage));
    }
    maximize(grid, |tau| {
        rroe(scenario.with_rotation(tau)?.rroc()?, leverage, market_rate)
    })
}

/// Rotation length maximizing Ω; rotations that wipe out equity are skipped.
pub fn omega_argmax(scenario: &GrowthScenario, leverage: f64, market_rate: f64, grid: &[f64]) -> Result<Optimum> {
    maximize(grid, |tau| {
        match leveraged_discount_rate(&scenario.with_rotation(tau)?, leverage, market_rate) {
            Err(Error::WipedOutEquity { .. }) => Ok(f64::NEG_INFINITY),
            other => other,
        }
    })
}
